"""Zero-sum games on bases of cones.

Player I picks ``x`` in ``S = {x in C : <alpha, x> = 1}`` and maximizes,
player II picks ``y`` in ``T = {y in K : <y, beta> = 1}`` and minimizes the
payoff ``u(x, y) = <y, A x>``.
"""

from dataclasses import dataclass

import numpy as np

from . import moments
from .cones import (ORTHANT, PSD, as_product, canonical_interior, in_cone, in_dual_interior, smat, svec)
from .exceptions import DimensionError, NotAStrategyError
from .operators import LinOp, adjoint_apply, apply

STRATEGY_TOL = 1e-7
_EIG_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ConicGame:
    C: object
    K: object
    alpha: np.ndarray
    beta: np.ndarray
    A: LinOp

    def __post_init__(self):
        C, K = as_product(self.C), as_product(self.K)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "K", K)
        if not isinstance(self.A, LinOp):
            object.__setattr__(self, "A", LinOp(self.A))
        if self.A.shape != (K.total_dim, C.total_dim):
            raise DimensionError(f"operator is {self.A.shape}, cones need ({K.total_dim}, {C.total_dim})")
        alpha = C.check(self.alpha, "alpha").copy()
        beta = K.check(self.beta, "beta").copy()
        if not in_dual_interior(C, alpha, 1e-9):
            raise ValueError("alpha must lie in the interior of the dual cone of C")
        if not in_dual_interior(K, beta, 1e-9):
            raise ValueError("beta must lie in the interior of the dual cone of K")
        alpha.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class LeveledSpec:
    """Level interval ``[p, q]`` of a cone-leveled strategy set."""

    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 0 and self.q >= self.p):
            raise ValueError(f"need 0 < p <= q, got p={self.p}, q={self.q}")


@dataclass
class BestResponse:
    value: float
    strategy: np.ndarray
    block: int


@dataclass
class EquilibriumReport:
    v_hat: float
    residual_I: float
    residual_II: float
    ok: bool


def in_base(cone, weight, x, tol=STRATEGY_TOL):
    x = np.asarray(x, dtype=float)
    scale = 1.0 + float(np.linalg.norm(x))
    return in_cone(cone, x, tol) and abs(weight @ x - 1.0) <= tol * scale


def check_strategy_I(G, x, tol=STRATEGY_TOL):
    x = G.C.check(x, "x")
    if not in_base(G.C, G.alpha, x, tol):
        raise NotAStrategyError("x is not in player I's base")
    return x


def check_strategy_II(G, y, tol=STRATEGY_TOL):
    y = G.K.check(y, "y")
    if not in_base(G.K, G.beta, y, tol):
        raise NotAStrategyError("y is not in player II's base")
    return y


def payoff(G, x, y, tol=STRATEGY_TOL):
    x = check_strategy_I(G, x, tol)
    y = check_strategy_II(G, y, tol)
    return float(y @ apply(G.A, x))


def _inv_sqrt(B):
    w, Q = np.linalg.eigh(B)
    return (Q / np.sqrt(np.maximum(w, _EIG_FLOOR))) @ Q.T


def _block_extreme(kind, g, w, sign):
    """Extremize ``<g, u>`` over ``{u in block cone : <w, u> = 1}``.

    ``sign=+1`` minimizes, ``sign=-1`` maximizes. Returns ``(value, u)``.
    """
    if kind == ORTHANT:
        r = sign * g / w
        i = int(np.argmin(r))
        u = np.zeros_like(g)
        u[i] = 1.0 / w[i]
        return sign * float(r[i]), u
    if kind == PSD:
        Bm = _inv_sqrt(smat(w))
        M = Bm @ (sign * smat(g)) @ Bm
        lam, V = np.linalg.eigh(0.5 * (M + M.T))
        v = Bm @ V[:, 0]
        return sign * float(lam[0]), svec(np.outer(v, v))
    val, t = moments.ratio_min(sign * g, w)
    return sign * val, moments.point_moments(t, g.size) / np.polynomial.polynomial.polyval(t, w)


def _best(cone, weight, g, sign):
    best_val, best_u, best_k = None, None, -1
    parts_g, parts_w = cone.split(g), cone.split(weight)
    for k, (blk, gb, wb) in enumerate(zip(cone.blocks, parts_g, parts_w)):
        val, u = _block_extreme(blk.kind, gb, wb, sign)
        better = best_val is None or sign * val < sign * best_val - 1e-12 * (1.0 + abs(best_val))
        if better:
            best_val, best_u, best_k = val, u, k
    strategy = np.zeros(cone.total_dim)
    strategy[cone.slices()[best_k]] = best_u
    return BestResponse(float(best_val), strategy, best_k)


def best_response_II(G, x, tol=STRATEGY_TOL):
    """Player II's best reply: ``min over T of <y, A x>``."""
    x = check_strategy_I(G, x, tol)
    return _best(G.K, G.beta, apply(G.A, x), +1)


def best_response_I(G, y, tol=STRATEGY_TOL):
    """Player I's best reply: ``max over S of <A* y, x>``."""
    y = check_strategy_II(G, y, tol)
    return _best(G.C, G.alpha, adjoint_apply(G.A, y), -1)


def center_I(G):
    x0 = canonical_interior(G.C)
    return x0 / (G.alpha @ x0)


def center_II(G):
    y0 = canonical_interior(G.K)
    return y0 / (G.beta @ y0)


def value_bounds(G):
    """``(lb, ub)`` from best replies to the normalized canonical interior points."""
    return best_response_II(G, center_I(G)).value, best_response_I(G, center_II(G)).value


def verify_equilibrium(G, x, y, tol=1e-6):
    v_hat = payoff(G, x, y)
    r2 = v_hat - best_response_II(G, x).value
    r1 = best_response_I(G, y).value - v_hat
    scale = 1.0 + abs(v_hat)
    return EquilibriumReport(v_hat, r1, r2, bool(r1 <= tol * scale and r2 <= tol * scale))


def normalize_leveled(G, spec_I, spec_II):
    """Base game equivalent to the leveled game with levels ``spec_I``, ``spec_II``.

    Player I plays on the top level ``q`` and player II on the bottom level
    ``p``, since the payoff is linear in each player's scale.
    """
    for spec in (spec_I, spec_II):
        if not isinstance(spec, LeveledSpec):
            raise TypeError("levels must be LeveledSpec instances")
    return ConicGame(G.C, G.K, G.alpha / spec_I.q, G.beta / spec_II.p, G.A)
