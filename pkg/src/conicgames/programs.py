"""The primal-dual conic pair and its certificate checks.

    (P)  inf <c, x>   s.t.  A x - b in K*,  x in C
    (D)  sup <y, b>   s.t.  c - A* y in C*,  y in K
"""

from dataclasses import dataclass, field

import numpy as np

from .cones import as_product, block_margins
from .exceptions import DimensionError, InfeasiblePointError
from .operators import LinOp, adjoint_apply, apply


@dataclass(frozen=True, eq=False)
class ConicPair:
    C: object
    K: object
    A: LinOp
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        C, K = as_product(self.C), as_product(self.K)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "K", K)
        if not isinstance(self.A, LinOp):
            object.__setattr__(self, "A", LinOp(self.A))
        if self.A.shape != (K.total_dim, C.total_dim):
            raise DimensionError(f"operator is {self.A.shape}, cones need ({K.total_dim}, {C.total_dim})")
        b = K.check(self.b, "b").copy()
        c = C.check(self.c, "c").copy()
        b.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def __eq__(self, other):
        return (isinstance(other, ConicPair) and self.C == other.C and self.K == other.K
                and self.A == other.A and np.array_equal(self.b, other.b) and np.array_equal(self.c, other.c))

    __hash__ = None


def dual_pair(pair):
    """Rewrite (D) as a primal program.

    The returned pair's (P) is ``inf <-b, y>`` over ``y in K`` with
    ``-A* y + c in C*``, so ``val(D) = -val(P of dual_pair)``. Applying the
    map twice gives back the original pair.
    """
    return ConicPair(C=pair.K, K=pair.C, A=LinOp(-pair.A.matrix.T), b=-pair.c, c=-pair.b)


@dataclass
class CertCheck:
    feasible: bool
    strictly_feasible: bool
    objective: float
    residuals: list = field(default_factory=list)


def _scale(*vecs):
    return 1.0 + max(float(np.linalg.norm(v)) for v in vecs)


def _check(var_cone, slack_cone, var, slack, objective, tol, scale):
    var_m = block_margins(var_cone, var)
    slack_m = block_margins(slack_cone, slack, dual=True)
    thr = tol * scale
    feasible = all(m >= -thr for m in var_m + slack_m)
    strict = feasible and all(m > thr for m in slack_m)
    return CertCheck(feasible, strict, float(objective), var_m + slack_m)


def check_primal(pair, x, tol=1e-8):
    """Feasibility of ``x`` for (P); residuals list C blocks then K* blocks."""
    x = pair.C.check(x, "x")
    Ax = apply(pair.A, x)
    return _check(pair.C, pair.K, x, Ax - pair.b, pair.c @ x, tol, _scale(x, Ax, pair.b))


def check_dual(pair, y, tol=1e-8):
    """Feasibility of ``y`` for (D); residuals list K blocks then C* blocks."""
    y = pair.K.check(y, "y")
    Aty = adjoint_apply(pair.A, y)
    return _check(pair.K, pair.C, y, pair.c - Aty, y @ pair.b, tol, _scale(y, Aty, pair.c))


def _require_feasible(pair, x, y, tol):
    cp, cd = check_primal(pair, x, tol), check_dual(pair, y, tol)
    if not cp.feasible:
        raise InfeasiblePointError("x is not feasible for (P)", residual=min(cp.residuals))
    if not cd.feasible:
        raise InfeasiblePointError("y is not feasible for (D)", residual=min(cd.residuals))
    return cp, cd


def duality_gap(pair, x, y, tol=1e-8):
    """``<c, x> - <y, b>`` for a feasible pair of points."""
    cp, cd = _require_feasible(pair, x, y, tol)
    return cp.objective - cd.objective


def complementary_slackness(pair, x, y, tol=1e-8):
    """True when both slack pairings vanish, which certifies joint optimality."""
    _require_feasible(pair, x, y, tol)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    Ax, Aty = apply(pair.A, x), adjoint_apply(pair.A, y)
    scale = _scale(x, y, Ax, Aty, pair.b, pair.c)
    return bool(abs(y @ (Ax - pair.b)) <= tol * scale and abs((pair.c - Aty) @ x) <= tol * scale)
