"""Constructors for the supported game families."""

import numpy as np

from .cones import Moment, Orthant, Psd, svec
from .game import ConicGame
from .moments import hankel, hankel_adjoint  # noqa: F401  (re-exported)
from .operators import LinOp
from .programs import ConicPair


def matrix_game(R):
    """Classical game where player I (rows) maximizes ``x' R y``."""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.ndim != 2 or R.size == 0:
        raise ValueError("payoff matrix must be a non-empty 2-d array")
    if not np.all(np.isfinite(R)):
        raise ValueError("payoff matrix must be finite")
    m, n = R.shape
    return ConicGame([Orthant(m)], [Orthant(n)], np.ones(m), np.ones(n), LinOp(R.T))


def _svec_basis(m):
    iu, ju = np.triu_indices(m)
    out = []
    for i, j in zip(iu, ju):
        E = np.zeros((m, m))
        if i == j:
            E[i, i] = 1.0
        else:
            E[i, j] = E[j, i] = 1.0 / np.sqrt(2.0)
        out.append(E)
    return out


def tensor_operator(T):
    """Materialize ``X -> [sum_ij X_ij T_ijkl]_kl`` on svec coordinates."""
    T = np.asarray(T, dtype=float)
    if T.ndim != 4 or T.shape[0] != T.shape[1] or T.shape[2] != T.shape[3]:
        raise ValueError(f"tensor must have shape (m, m, n, n), got {T.shape}")
    tol = 1e-12 * max(1.0, float(np.max(np.abs(T), initial=0.0)))
    if np.max(np.abs(T - T.transpose(1, 0, 2, 3)), initial=0.0) > tol or \
            np.max(np.abs(T - T.transpose(0, 1, 3, 2)), initial=0.0) > tol:
        raise ValueError("tensor must satisfy T_ijkl = T_jikl = T_ijlk")
    m = T.shape[0]
    cols = [svec(np.einsum("ij,ijkl->kl", E, T)) for E in _svec_basis(m)]
    return LinOp(np.column_stack(cols))


def sdp_game(T, m=None, n=None):
    """Game on spectraplexes with payoff ``sum X_ij T_ijkl Y_kl``."""
    T = np.asarray(T, dtype=float)
    A = tensor_operator(T)
    m = T.shape[0] if m is None else m
    n = T.shape[2] if n is None else n
    if T.shape != (m, m, n, n):
        raise ValueError(f"tensor shape {T.shape} does not match m={m}, n={n}")
    return ConicGame([Psd(m)], [Psd(n)], svec(np.eye(m)), svec(np.eye(n)), A)


def polynomial_game(p, m=None, n=None):
    """Game with payoff ``P(x, y) = sum p_ij x^i y^j`` over probability measures on [-1, 1].

    Strategies are moment vectors, ``p`` has shape ``(m + 1, n + 1)`` and both
    degrees must be even (pad with zero rows or columns if needed). Player I
    (the ``x`` variable) maximizes.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    m = p.shape[0] - 1 if m is None else m
    n = p.shape[1] - 1 if n is None else n
    if m % 2 or n % 2 or m < 0 or n < 0:
        raise ValueError(f"degrees must be even and non-negative, got m={m}, n={n}")
    if p.shape != (m + 1, n + 1):
        raise ValueError(f"coefficients have shape {p.shape}, expected ({m + 1}, {n + 1})")
    e_m = np.zeros(m + 1)
    e_m[0] = 1.0
    e_n = np.zeros(n + 1)
    e_n[0] = 1.0
    return ConicGame([Moment(m)], [Moment(n)], e_m, e_n, LinOp(p.T))


EX44_A1 = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
EX44_A2 = np.diag([0.0, 1.0, 0.0])


def example44(variant="original", param=None):
    """The 2-variable semidefinite pair with a duality gap and its two variants.

    ``variant`` is ``"original"``, ``"rho"`` (objective ``(rho, 0)``, rho >= 0)
    or ``"sigma"`` (off-diagonal ``sigma`` in the right-hand side, sigma in
    [1/2, 1]). Returns ``(game, pair)``; the game is the same for all variants.
    """
    A = LinOp(np.column_stack([svec(EX44_A1), svec(EX44_A2)]))
    C, K = [Orthant(2)], [Psd(3)]
    game = ConicGame(C, K, np.ones(2), svec(np.eye(3)), A)
    B = np.diag([0.0, -1.0, -1.0])
    c = np.array([-1.0, 0.0])
    if variant == "original":
        if param is not None:
            raise ValueError("the original variant takes no parameter")
    elif variant == "rho":
        rho = 0.0 if param is None else float(param)
        if not rho >= 0:
            raise ValueError(f"rho must be non-negative, got {param}")
        c = np.array([rho, 0.0])
    elif variant == "sigma":
        sigma = 1.0 if param is None else float(param)
        if not 0.5 <= sigma <= 1.0:
            raise ValueError(f"sigma must lie in [1/2, 1], got {param}")
        B = np.array([[0.0, sigma, 0.0], [sigma, -1.0, 0.0], [0.0, 0.0, -1.0]])
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return game, ConicPair(C, K, A, svec(B), c)
