"""Hankel operators and polynomial extremization on [-1, 1].

Moment vectors ``mu = (mu_0, ..., mu_d)`` and polynomial coefficient vectors
``p = (p_0, ..., p_d)`` share the same ascending-power layout, so that
``dot(p, mu)`` is the integral of ``p`` against the measure behind ``mu``.
"""

import numpy as np
from numpy.polynomial import polynomial as P


def hankel(a):
    """Return the k x k Hankel matrix ``H[i, j] = a[i + j]`` of an odd-length vector."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size % 2 == 0:
        raise ValueError(f"hankel needs a vector of odd length, got shape {a.shape}")
    k = (a.size + 1) // 2
    idx = np.add.outer(np.arange(k), np.arange(k))
    return a[idx]


def hankel_adjoint(B):
    """Sum a symmetric k x k matrix along its antidiagonals.

    This is the adjoint of :func:`hankel` for the Frobenius product, so each
    off-diagonal entry is counted twice.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"hankel_adjoint needs a square matrix, got shape {B.shape}")
    k = B.shape[0]
    out = np.zeros(2 * k - 1)
    idx = np.add.outer(np.arange(k), np.arange(k))
    np.add.at(out, idx.ravel(), B.ravel())
    return out


def localizing(a):
    """Localizing matrix of ``1 - t**2``: ``L[i, j] = a[i + j] - a[i + j + 2]``.

    Equal to ``M1' H(a) M1 - M2' H(a) M2`` with ``M1 = [I; 0]`` and
    ``M2 = [0; I]``. Empty (0 x 0) for a length-one vector.
    """
    H = hankel(a)
    return H[:-1, :-1] - H[1:, 1:]


def localizing_adjoint(B, length):
    B = np.asarray(B, dtype=float)
    k = (length + 1) // 2
    if B.shape != (k - 1, k - 1):
        raise ValueError(f"expected a {k - 1}x{k - 1} matrix, got {B.shape}")
    full = np.zeros((k, k))
    full[:-1, :-1] += B
    full[1:, 1:] -= B
    return hankel_adjoint(full)


def point_moments(t, length):
    """Moment vector ``(1, t, t**2, ...)`` of the point mass at ``t``."""
    return float(t) ** np.arange(length)


def uniform_moments(length):
    """Moments of the uniform probability measure on [-1, 1]."""
    j = np.arange(length)
    return np.where(j % 2 == 0, 1.0 / (j + 1), 0.0)


def _critical_points(p, w):
    # Stationary points of p/w: roots of p'w - pw'.
    num = P.polysub(P.polymul(P.polyder(p), w), P.polymul(p, P.polyder(w)))
    num = np.trim_zeros(np.asarray(num, dtype=float), "b")
    pts = [-1.0, 1.0]
    if num.size > 1 and np.any(num != 0.0):
        scale = np.max(np.abs(num))
        num = np.where(np.abs(num) < 1e-15 * scale, 0.0, num)
        num = np.trim_zeros(num, "b")
        if num.size > 1:
            for r in P.polyroots(num):
                if abs(r.imag) <= 1e-7 * max(1.0, abs(r.real)) and -1.0 < r.real < 1.0:
                    pts.append(float(r.real))
    return sorted(pts)


def ratio_min(p, w=None):
    """Minimize ``p(t) / w(t)`` over t in [-1, 1].

    ``w`` must be positive on the interval (defaults to the constant 1).
    Returns ``(value, t)``; ties go to the smallest ``t``.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    w = np.ones(1) if w is None else np.atleast_1d(np.asarray(w, dtype=float))
    best_val, best_t = np.inf, -1.0
    for t in _critical_points(p, w):
        val = P.polyval(t, p) / P.polyval(t, w)
        if val < best_val - 1e-14 * max(1.0, abs(val)):
            best_val, best_t = val, t
    return float(best_val), best_t


def ratio_max(p, w=None):
    val, t = ratio_min(-np.asarray(p, dtype=float), w)
    return -val, t
