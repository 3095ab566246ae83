"""Solving a game through its associated conic pair.

The pair of a game ``(alpha, beta, A)`` is

    (P_beta)   inf <alpha, x>   s.t.  A x - beta in K*,  x in C
    (D_alpha)  sup <y, beta>    s.t.  alpha - A* y in C*,  y in K

and when its value is positive the game value is its reciprocal. To make the
value positive the payoff is replaced by ``lam * A + kappa * E`` with the
rank-one ``E(x) = beta <alpha, x>``. This shifts every payoff on ``S x T``
by ``kappa`` and scales it by ``lam`` without changing the equilibria.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import SolverFailure
from .game import ConicGame, EquilibriumReport, value_bounds, verify_equilibrium
from .operators import combine, make_E
from .programs import ConicPair
from .solver import OPTIMAL, SolverOptions, solve_pair

KAPPA_START = 0.75
KAPPA_CAP = 2.0 ** 20
VERIFY_TOL = 1e-6


@dataclass(frozen=True)
class ReductionParams:
    lam: float
    kappa: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.kappa > 0.5:
            raise ValueError(f"kappa must exceed 1/2, got {self.kappa}")


@dataclass
class GameSolution:
    value: float
    x_star: np.ndarray
    y_star: np.ndarray
    params: ReductionParams
    pair_values: tuple
    report: EquilibriumReport
    iterations: int = 0


def build_pair(G):
    return ConicPair(G.C, G.K, G.A, G.beta, G.alpha)


def build_shifted_pair(G, params):
    B = combine(params.lam, G.A, params.kappa, make_E(G.alpha, G.beta))
    return ConicPair(G.C, G.K, B, G.beta, G.alpha)


def shifted_game(G, params):
    """The game whose pair is :func:`build_shifted_pair`; its value is ``lam * v + kappa``."""
    return ConicGame(G.C, G.K, G.alpha, G.beta, combine(params.lam, G.A, params.kappa, make_E(G.alpha, G.beta)))


def choose_lambda(G):
    lb, ub = value_bounds(G)
    return 1.0 / (2.0 * max(1.0, abs(lb), abs(ub)))


def choose_params(G, opts=None):
    """Pick ``lam`` from the value bounds and escalate ``kappa`` until the solve succeeds.

    Returns ``(params, pair_result)``.
    """
    opts = opts or SolverOptions()
    lam = choose_lambda(G)
    kappa = KAPPA_START
    last = None
    while kappa <= KAPPA_CAP:
        params = ReductionParams(lam, kappa)
        res = solve_pair(build_shifted_pair(G, params), opts)
        if res.status == OPTIMAL and res.primal_obj > 0:
            return params, res
        last = res
        kappa *= 2.0
    raise SolverFailure("no kappa up to the cap produced an optimal shifted pair", result=last)


def normalize_solution(x, xi):
    if not xi > 0:
        raise ValueError(f"scale must be positive, got {xi}")
    return np.asarray(x, dtype=float) / xi


def denormalize_solution(x_prime, alpha):
    """Map a point of the cone to the base: returns ``(x, xi)`` with ``x = xi * x_prime``."""
    x_prime = np.asarray(x_prime, dtype=float)
    d = float(np.asarray(alpha, dtype=float) @ x_prime)
    if not d > 0:
        raise ValueError("point has non-positive weight and cannot be normalized")
    xi = 1.0 / d
    return xi * x_prime, xi


def solve_game(G, opts=None):
    """Value and a verified saddle point of ``G``."""
    params, res = choose_params(G, opts)
    val = 0.5 * (res.primal_obj + res.dual_obj)
    v_kappa = 1.0 / val
    value = (v_kappa - params.kappa) / params.lam
    x_star, _ = denormalize_solution(res.x, G.alpha)
    y_star, _ = denormalize_solution(res.y, G.beta)
    report = verify_equilibrium(G, x_star, y_star, VERIFY_TOL)
    if not report.ok:
        raise SolverFailure(
            f"equilibrium check failed (residuals {report.residual_I:.3e}, {report.residual_II:.3e})", result=res.raw)
    # the value lies between the two best-reply values; clamping only removes error
    lo = report.v_hat - report.residual_II
    hi = report.v_hat + report.residual_I
    value = min(max(value, lo), hi)
    return GameSolution(value, x_star, y_star, params, (res.primal_obj, res.dual_obj), report, res.raw.iterations)
