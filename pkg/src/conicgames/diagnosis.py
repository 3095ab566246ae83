"""Reading strict feasibility and duality-gap risk of a conic pair off a game.

The diagnostic game of a pair ``(C, K, A, b, c)`` is ``(alpha, beta, A)`` for
interior points ``alpha`` of C* and ``beta`` of K*. Its value ``v`` decides:

* ``v > 0``: (P) is strictly feasible whenever it is feasible.
* ``v < 0``: (D) is strictly feasible whenever it is feasible.
* ``v = 0``: with ``B_I``/``B_II`` the optimal strategy sets,
  (D) is strictly feasible iff ``<c, x> > 0`` on all of ``B_I`` and
  (P) is strictly feasible iff ``<y, b> < 0`` on all of ``B_II``.
  If both null sets are met neither side is strictly feasible and a
  duality gap may occur.
"""

from dataclasses import dataclass, field

import numpy as np

from .cones import ConeProduct, Orthant, canonical_dual_interior, in_cone, in_dual_cone, in_dual_interior
from .exceptions import SolverFailure
from .facial import solve_with_reduction
from .game import ConicGame
from .operators import LinOp, adjoint_apply, apply
from .programs import ConicPair, check_dual, check_primal, dual_pair
from .reduction import solve_game
from .solver import OPTIMAL, PRIMAL_INFEASIBLE, SolverOptions, StandardProgram, solve, to_standard

YES, NO, UNTESTED = "Yes", "No", "Untested"
NONZERO = "NonzeroValue"
RESOLVED = "ZeroValueResolved"
PATHOLOGY = "ZeroValuePathology"

ZERO_TOL = 1e-7
GUARD_BAND = (1e-9, 1e-5)
STRICT_TOL = 1e-7
RANGE_TOL = 1e-6


@dataclass
class StrictFeasibility:
    verdict: str
    margin: float
    witness: np.ndarray = None
    status: str = ""

    @property
    def strictly_feasible(self):
        return {YES: True, NO: False}.get(self.verdict)


@dataclass
class NullspaceTest:
    meets: object  # True, False or None when untested
    range: tuple
    witnesses: tuple = (None, None)
    status: str = ""

    def zero_point(self):
        """A point of the set where the linear functional vanishes, if the range contains 0."""
        lo, hi = self.range
        x_lo, x_hi = self.witnesses
        if not self.meets or x_lo is None:
            return None
        if hi - lo <= 0 or x_hi is None:
            return x_lo
        t = (0.0 - lo) / (hi - lo)
        t = min(max(t, 0.0), 1.0)
        return (1 - t) * x_lo + t * x_hi


@dataclass
class Diagnosis:
    game_value: float
    case: str
    strict_P: str
    strict_D: str
    bI_meets_cperp: object
    bII_meets_bperp: object
    witnesses: dict = field(default_factory=dict)
    ranges: dict = field(default_factory=dict)
    rescue: object = None
    pair_values: tuple = None
    notes: list = field(default_factory=list)


@dataclass
class AlternativeVerdict:
    first: str
    second: str
    witness_first: np.ndarray
    witness_second: np.ndarray
    value: float


# -- strict feasibility through the auxiliary program -------------------------

def _margin_program(pair, ref):
    """Standard form of ``min t  s.t.  A x + t ref - b in K*,  x in C,  t >= -1``."""
    prog, rec = to_standard(pair)
    N = prog.objective.size
    G = np.hstack([prog.G.matrix, np.zeros((prog.G.rows, 1))])
    Aeq = np.hstack([prog.A_eq.matrix, np.zeros((prog.A_eq.rows, 1))])
    for (src, sl), rsl in zip(rec.y_parts, pair.K.slices()):
        if src == "z":
            G[sl, N] = -ref[rsl]
        else:
            Aeq[sl, N] = ref[rsl]
    cap = np.zeros((1, N + 1))
    cap[0, N] = -1.0
    q = np.zeros(N + 1)
    q[N] = 1.0
    cone = ConeProduct(list(prog.cone.blocks) + [Orthant(1)])
    return StandardProgram(q, LinOp(np.vstack([G, cap])), np.concatenate([prog.h, [1.0]]), cone,
                           LinOp(Aeq), prog.b_eq)


def _strict(pair, opts, checker, tol):
    ref = canonical_dual_interior(pair.K)
    res = solve(_margin_program(pair, ref), opts or SolverOptions())
    if res.status != OPTIMAL:
        return StrictFeasibility(UNTESTED, np.nan, None, res.status)
    t = float(res.primal_obj)
    x = res.x[: pair.C.total_dim]
    if t < -tol:
        if checker(pair, x, 1e-9).strictly_feasible:
            return StrictFeasibility(YES, -t, x, res.status)
        return StrictFeasibility(UNTESTED, -t, x, "witness failed verification")
    return StrictFeasibility(NO, -t, x if t <= tol else None, res.status)


def strict_feasibility_P(pair, opts=None, tol=STRICT_TOL):
    """Is there ``x in C`` with ``A x - b`` interior to K*? ``margin`` is capped at 1."""
    return _strict(pair, opts, check_primal, tol)


def strict_feasibility_D(pair, opts=None, tol=STRICT_TOL):
    """Is there ``y in K`` with ``c - A* y`` interior to C*? ``margin`` is capped at 1."""
    return _strict(dual_pair(pair), opts, check_primal, tol)


# -- optimal strategy sets -------------------------------------------------------

def _range_over(pair, weight, opts, tol):
    """Min and max of ``<pair.c, x>`` over the feasible set of (P) cut by ``<weight, x> = 1``."""
    prog, _ = to_standard(pair)
    N = prog.objective.size
    row = np.zeros((1, N))
    row[0, : pair.C.total_dim] = weight
    A_eq = np.vstack([prog.A_eq.matrix, row])
    b_eq = np.concatenate([prog.b_eq, [1.0]])
    ends, pts = [], []
    for sign in (1.0, -1.0):
        sp = StandardProgram(sign * prog.objective, prog.G, prog.h, prog.cone, LinOp(A_eq), b_eq)
        fr = solve_with_reduction(sp, opts)
        if fr.status == PRIMAL_INFEASIBLE:
            return None, "empty"
        if fr.status != OPTIMAL:
            return (), fr.status
        ends.append(sign * fr.value)
        pts.append(fr.x[: pair.C.total_dim])
    return (ends, pts), OPTIMAL


def _nullspace(weight, opts, tol, v_shift, relaxations=(0.0, 1e-8, 1e-6), if_empty=None):
    """Range test with a few relaxations of the value if the set comes out empty.

    ``if_empty`` is the verdict when every attempt finds the set empty.
    """
    status = ""
    for relax in relaxations:
        p = v_shift(relax)
        out, status = _range_over(p, weight, opts, tol)
        if out is None:
            continue
        if out == ():
            break
        (lo, hi), pts = out
        meets = bool(lo <= tol * (1 + abs(lo)) and hi >= -tol * (1 + abs(hi)))
        return NullspaceTest(meets, (lo, hi), tuple(pts), status if relax == 0 else f"{status} (value relaxed by {relax:g})")
    return NullspaceTest(if_empty if status == "empty" else None, (np.nan, np.nan), (None, None), status)


def optimal_set_meets_nullspace_I(G, v, c, opts=None, tol=RANGE_TOL):
    """Range of ``<c, x>`` over ``B_I = {x in S : A x - v beta in K*}``."""
    c = G.C.check(c, "c")

    def shifted(relax):
        return ConicPair(G.C, G.K, G.A, (v - relax * (1 + abs(v))) * G.beta, c)

    return _nullspace(G.alpha, opts, tol, shifted)


def optimal_set_meets_nullspace_II(G, v, b, opts=None, tol=RANGE_TOL):
    """Range of ``<y, b>`` over ``B_II = {y in T : v alpha - A* y in C*}``."""
    b = G.K.check(b, "b")
    At = LinOp(-G.A.matrix.T)

    def shifted(relax):
        return ConicPair(G.K, G.C, At, -(v + relax * (1 + abs(v))) * G.alpha, b)

    return _nullspace(G.beta, opts, tol, shifted)


def _rescue_I(G, pair, opts, tol):
    """Range of ``<c, x>`` over optimal strategies (value 0) that are feasible for (P)."""
    K2 = ConeProduct(list(G.K.blocks) * 2)
    A2 = LinOp(np.vstack([G.A.matrix, G.A.matrix]))
    p = ConicPair(G.C, K2, A2, np.concatenate([np.zeros(G.K.total_dim), pair.b]), pair.c)
    return _nullspace(G.alpha, opts, tol, lambda relax: p, (0.0,), False)


def _rescue_II(G, pair, opts, tol):
    """Range of ``<y, b>`` over optimal strategies (value 0) that are feasible for (D)."""
    C2 = ConeProduct(list(G.C.blocks) * 2)
    At = -G.A.matrix.T
    p = ConicPair(G.K, C2, LinOp(np.vstack([At, At])), np.concatenate([np.zeros(G.C.total_dim), -pair.c]), pair.b)
    return _nullspace(G.beta, opts, tol, lambda relax: p, (0.0,), False)


# -- classification ----------------------------------------------------------------

def _tight(opts):
    o = opts or SolverOptions()
    return SolverOptions(min(o.feas_tol, 1e-10), min(o.gap_tol, 1e-10), max(o.max_iter, 200), o.eq_tol, o.verbose)


def diagnostic_game(pair, alpha=None, beta=None):
    alpha = canonical_dual_interior(pair.C) if alpha is None else np.asarray(alpha, dtype=float)
    beta = canonical_dual_interior(pair.K) if beta is None else np.asarray(beta, dtype=float)
    return ConicGame(pair.C, pair.K, alpha, beta, pair.A)


def _nonzero_witness(pair, direction, checker, strict):
    """Feasible point plus a multiple of an interior direction, verified strictly feasible."""
    if strict.witness is None:
        return None
    for t in (1.0, 10.0, 100.0, 1e4, 1e6):
        w = strict.witness + t * direction
        if checker(pair, w, 1e-9).strictly_feasible:
            return w
    return None


def classify(pair, opts=None, alpha=None, beta=None):
    """Classify a conic pair by the value and optimal strategies of its diagnostic game."""
    G = diagnostic_game(pair, alpha, beta)
    try:
        sol = solve_game(G, opts)
        if GUARD_BAND[0] < abs(sol.value) < GUARD_BAND[1]:
            sol = solve_game(G, _tight(opts))
    except SolverFailure as exc:
        return Diagnosis(np.nan, None, UNTESTED, UNTESTED, None, None, notes=[f"game solve failed: {exc}"])
    v = sol.value
    wit = {"x_star": sol.x_star, "y_star": sol.y_star}

    if v > ZERO_TOL:
        sf = strict_feasibility_P(pair, opts)
        w = _nonzero_witness(pair, sol.x_star, check_primal, sf)
        d = Diagnosis(v, NONZERO, YES, UNTESTED, None, None, wit)
        if w is not None:
            wit["strict_P"] = w
        elif sf.verdict == NO and sf.witness is None:
            d.strict_P = NO
            d.notes.append("(P) appears infeasible; the pair is not consistent")
        else:
            d.notes.append("could not assemble a verified strictly feasible point for (P)")
        return d
    if v < -ZERO_TOL:
        dp = dual_pair(pair)
        sf = strict_feasibility_P(dp, opts)
        w = _nonzero_witness(dp, sol.y_star, check_primal, sf)
        d = Diagnosis(v, NONZERO, UNTESTED, YES, None, None, wit)
        if w is not None:
            wit["strict_D"] = w
        elif sf.verdict == NO and sf.witness is None:
            d.strict_D = NO
            d.notes.append("(D) appears infeasible; the pair is not consistent")
        else:
            d.notes.append("could not assemble a verified strictly feasible point for (D)")
        return d

    # value zero: the sets are taken at v = 0 exactly
    tI = optimal_set_meets_nullspace_I(G, 0.0, pair.c, opts)
    tII = optimal_set_meets_nullspace_II(G, 0.0, pair.b, opts)
    ranges = {"B_I": tI.range, "B_II": tII.range}
    strict_D = _verdict_from_range(tI, positive=True)
    strict_P = _verdict_from_range(tII, positive=False)
    d = Diagnosis(v, None, strict_P, strict_D, tI.meets, tII.meets, wit, ranges)
    if tI.meets is None or tII.meets is None:
        d.notes.append("a null-set test could not be completed")
        d.case = RESOLVED if (tI.meets is False or tII.meets is False) else None
        return d
    if not (tI.meets and tII.meets):
        d.case = RESOLVED
        return d

    d.case = PATHOLOGY
    wit["x_in_cperp"] = tI.zero_point()
    wit["y_in_bperp"] = tII.zero_point()
    rI, rII = _rescue_I(G, pair, opts, RANGE_TOL), _rescue_II(G, pair, opts, RANGE_TOL)
    d.ranges.update({"B_I_feasible": rI.range, "B_II_feasible": rII.range})
    if rI.meets and rII.meets:
        x0, y0 = rI.zero_point(), rII.zero_point()
        if check_primal(pair, x0, 1e-7).feasible and check_dual(pair, y0, 1e-7).feasible:
            d.rescue = True
            wit["rescue_x"], wit["rescue_y"] = x0, y0
        else:
            d.rescue = False
    else:
        d.rescue = None if (rI.meets is None or rII.meets is None) else False
    d.pair_values = pair_values(pair, opts)
    return d


def _verdict_from_range(test, positive):
    if test.meets is None:
        return UNTESTED
    lo, hi = test.range
    if positive:
        return YES if lo > RANGE_TOL * (1 + abs(lo)) else NO
    return YES if hi < -RANGE_TOL * (1 + abs(hi)) else NO


def pair_values(pair, opts=None):
    """``(val P, val D)`` from independent solves with facial reduction (nan if unavailable)."""
    p = solve_with_reduction(to_standard(pair)[0], opts)
    d = solve_with_reduction(to_standard(dual_pair(pair))[0], opts)
    vp = p.value if p.status == OPTIMAL else (np.inf if p.status == PRIMAL_INFEASIBLE else np.nan)
    vd = -d.value if d.status == OPTIMAL else (-np.inf if d.status == PRIMAL_INFEASIBLE else np.nan)
    return float(vp), float(vd)


# -- theorem of alternatives -------------------------------------------------------

def alternatives(G, opts=None, tol=ZERO_TOL):
    """Which of (i)/(ii) and which of (i')/(ii') hold, with verified witnesses.

    (i)   y in K, y != 0, -A* y in C*        (ii)  x in C, x != 0, A x in int K*
    (i')  y in K, y != 0, -A* y in int C*    (ii') x in C, x != 0, A x in K*
    """
    sol = solve_game(G, opts)
    if GUARD_BAND[0] < abs(sol.value) < GUARD_BAND[1]:
        sol = solve_game(G, _tight(opts))
    v, x, y = sol.value, sol.x_star, sol.y_star
    Ax, Aty = apply(G.A, x), adjoint_apply(G.A, y)
    # plain memberships get the solver's round-off slack; strict ones must clear zero
    if v > tol:
        ok = in_cone(G.C, x, tol) and in_dual_interior(G.K, Ax)
        verdict = AlternativeVerdict("ii", "ii'", x, x, v)
    elif v < -tol:
        ok = in_cone(G.K, y, tol) and in_dual_interior(G.C, -Aty)
        verdict = AlternativeVerdict("i", "i'", y, y, v)
    else:
        ok = (in_cone(G.K, y, tol) and in_dual_cone(G.C, -Aty, tol)
              and in_cone(G.C, x, tol) and in_dual_cone(G.K, Ax, tol))
        verdict = AlternativeVerdict("i", "ii'", y, x, v)
    if not ok:
        raise SolverFailure(f"alternative witness failed verification at value {v:.3e}; tighten the tolerance")
    return verdict
