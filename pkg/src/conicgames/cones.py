"""Cone products, symmetric-matrix vectorization, and membership tests.

Three block kinds are supported:

``orthant``
    The nonnegative orthant of R^n. Self-dual.
``psd``
    Positive semidefinite matrices of side m, stored with :func:`svec`. Self-dual.
``moment``
    Truncated moment vectors ``(mu_0, ..., mu_d)`` of nonnegative measures on
    [-1, 1], with d even. Membership is ``H(mu) >= 0`` and ``L(mu) >= 0`` for
    the Hankel and localizing matrices. The dual cone is the set of
    coefficient vectors of polynomials that are nonnegative on [-1, 1].

The block ``size`` is the side length for ``psd`` and the coordinate length
for the other two kinds.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import moments
from .exceptions import DimensionError

ORTHANT = "orthant"
PSD = "psd"
MOMENT = "moment"
KINDS = (ORTHANT, PSD, MOMENT)

DEFAULT_TOL = 1e-9
_SQRT2 = np.sqrt(2.0)


# -- svec / smat -------------------------------------------------------------

@lru_cache(maxsize=None)
def _tri(m):
    iu, ju = np.triu_indices(m)
    off = iu != ju
    for a in (iu, ju, off):
        a.setflags(write=False)
    return iu, ju, off


def svec(M):
    """Vectorize a symmetric matrix: row-wise upper triangle, off-diagonals times sqrt(2)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"svec needs a square matrix, got shape {M.shape}")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12 * max(1.0, np.max(np.abs(M), initial=0.0))):
        raise ValueError("svec needs a symmetric matrix")
    iu, ju, off = _tri(M.shape[0])
    out = M[iu, ju]
    out[off] *= _SQRT2
    return out


def tri_side(n):
    """Return m with m(m+1)/2 == n, or raise."""
    m = int(round((np.sqrt(8 * n + 1) - 1) / 2))
    if m < 0 or m * (m + 1) // 2 != n:
        raise DimensionError(f"length {n} is not a triangular number")
    return m


def smat(v):
    """Inverse of :func:`svec`."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"smat needs a vector, got shape {v.shape}")
    m = tri_side(v.size)
    iu, ju, off = _tri(m)
    vals = np.where(off, v / _SQRT2, v)
    M = np.zeros((m, m))
    M[iu, ju] = vals
    M[ju, iu] = vals
    return M


def svec_dim(m):
    return m * (m + 1) // 2


# -- blocks ------------------------------------------------------------------

@dataclass(frozen=True)
class ConeBlock:
    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"cone size must be a positive integer, got {self.size!r}")
        if self.kind == MOMENT and self.size % 2 == 0:
            raise ValueError("moment blocks need an odd number of moments (even degree)")
        object.__setattr__(self, "size", int(self.size))

    @property
    def dim(self):
        return svec_dim(self.size) if self.kind == PSD else self.size

    @property
    def self_dual(self):
        return self.kind != MOMENT


def Orthant(n):
    return ConeBlock(ORTHANT, n)


def Psd(m):
    return ConeBlock(PSD, m)


def Moment(degree):
    """Moment block for measures on [-1, 1] up to the given even degree."""
    return ConeBlock(MOMENT, degree + 1)


@lru_cache(maxsize=None)
def moment_svec_maps(size):
    """Matrices ``(Hm, Lm)`` with ``svec(H(mu)) = Hm @ mu`` and ``svec(L(mu)) = Lm @ mu``."""
    eye = np.eye(size)
    Hm = np.column_stack([svec(moments.hankel(e)) for e in eye])
    k = (size + 1) // 2
    if k > 1:
        Lm = np.column_stack([svec(moments.localizing(e)) for e in eye])
    else:
        Lm = np.zeros((0, size))
    Hm.setflags(write=False)
    Lm.setflags(write=False)
    return Hm, Lm


def _check_len(block, v):
    v = np.asarray(v, dtype=float)
    if v.shape != (block.dim,):
        raise DimensionError(f"{block.kind}({block.size}) expects {block.dim} coordinates, got shape {v.shape}")
    return v


def min_eig(block, v):
    """Smallest eigenvalue-like margin of ``v`` in the (primal) cone of ``block``."""
    v = _check_len(block, v)
    if block.kind == ORTHANT:
        return float(np.min(v))
    if block.kind == PSD:
        return float(np.linalg.eigvalsh(smat(v))[0])
    lam = np.linalg.eigvalsh(moments.hankel(v))[0]
    if block.size > 1:
        lam = min(lam, np.linalg.eigvalsh(moments.localizing(v))[0])
    return float(lam)


def dual_margin(block, v):
    """Margin of ``v`` in the dual cone: equals :func:`min_eig` on self-dual blocks.

    For moment blocks this is the minimum of the polynomial on [-1, 1].
    """
    v = _check_len(block, v)
    if block.self_dual:
        return min_eig(block, v)
    return moments.ratio_min(v)[0]


# -- products ----------------------------------------------------------------

class ConeProduct:
    """Ordered product of cone blocks with concatenated coordinates."""

    __slots__ = ("blocks", "offsets", "total_dim")

    def __init__(self, blocks):
        blocks = tuple(blocks)
        if not blocks:
            raise ValueError("a cone product needs at least one block")
        for b in blocks:
            if not isinstance(b, ConeBlock):
                raise TypeError(f"expected ConeBlock, got {type(b).__name__}")
        self.blocks = blocks
        self.offsets = tuple(int(o) for o in np.concatenate([[0], np.cumsum([b.dim for b in blocks])]))
        self.total_dim = self.offsets[-1]

    def __eq__(self, other):
        return isinstance(other, ConeProduct) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __repr__(self):
        inner = ", ".join(f"{b.kind}({b.size})" for b in self.blocks)
        return f"ConeProduct([{inner}])"

    @property
    def self_dual(self):
        return all(b.self_dual for b in self.blocks)

    def slices(self):
        return [slice(self.offsets[i], self.offsets[i + 1]) for i in range(len(self.blocks))]

    def split(self, v):
        v = self.check(v)
        return [v[s] for s in self.slices()]

    def check(self, v, name="point"):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.total_dim,):
            raise DimensionError(f"{name} has shape {v.shape}, cone expects ({self.total_dim},)")
        return v


def as_product(cone):
    if isinstance(cone, ConeProduct):
        return cone
    if isinstance(cone, ConeBlock):
        return ConeProduct([cone])
    return ConeProduct(cone)


def _scaled(v, tol):
    return tol * max(1.0, float(np.linalg.norm(v)))


def block_margins(K, v, dual=False):
    """Per-block margins (:func:`min_eig` or :func:`dual_margin`)."""
    K = as_product(K)
    f = dual_margin if dual else min_eig
    return [f(b, part) for b, part in zip(K.blocks, K.split(v))]


def in_cone(K, v, tol=DEFAULT_TOL):
    K = as_product(K)
    return all(m >= -_scaled(p, tol) for m, p in zip(block_margins(K, v), K.split(v)))


def in_interior(K, v, tol=DEFAULT_TOL):
    K = as_product(K)
    return all(m > _scaled(p, tol) for m, p in zip(block_margins(K, v), K.split(v)))


def in_dual_cone(K, v, tol=DEFAULT_TOL):
    K = as_product(K)
    return all(m >= -_scaled(p, tol) for m, p in zip(block_margins(K, v, dual=True), K.split(v)))


def in_dual_interior(K, v, tol=DEFAULT_TOL):
    K = as_product(K)
    return all(m > _scaled(p, tol) for m, p in zip(block_margins(K, v, dual=True), K.split(v)))


def canonical_interior(K):
    """A fixed interior point of the cone itself (ones, identity, uniform moments)."""
    K = as_product(K)
    parts = []
    for b in K.blocks:
        if b.kind == ORTHANT:
            parts.append(np.ones(b.size))
        elif b.kind == PSD:
            parts.append(svec(np.eye(b.size)))
        else:
            parts.append(moments.uniform_moments(b.size))
    return np.concatenate(parts)


def canonical_dual_interior(K):
    """A fixed interior point of the dual cone. The constant polynomial 1 on moment blocks."""
    K = as_product(K)
    parts = []
    for b in K.blocks:
        if b.kind == MOMENT:
            e = np.zeros(b.size)
            e[0] = 1.0
            parts.append(e)
        else:
            parts.append(canonical_interior(ConeProduct([b])))
    return np.concatenate(parts)
