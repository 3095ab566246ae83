"""Dense linear maps between cone coordinate spaces."""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError


@dataclass(frozen=True, eq=False)
class LinOp:
    """A dense ``rows x cols`` matrix acting on cone coordinates.

    The stored array is read-only, so instances can be shared freely.
    """

    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float, copy=True)
        if M.ndim != 2:
            raise DimensionError(f"LinOp needs a 2-d array, got shape {M.shape}")
        if not np.all(np.isfinite(M)):
            raise ValueError("LinOp entries must be finite")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_flat(cls, rows, cols, data):
        data = np.asarray(data, dtype=float)
        if data.size != rows * cols:
            raise DimensionError(f"expected {rows}*{cols} entries, got {data.size}")
        return cls(data.reshape(rows, cols))

    @property
    def rows(self):
        return self.matrix.shape[0]

    @property
    def cols(self):
        return self.matrix.shape[1]

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def data(self):
        """Row-major flat copy of the entries."""
        return self.matrix.ravel().copy()

    def __eq__(self, other):
        return isinstance(other, LinOp) and self.shape == other.shape and np.array_equal(self.matrix, other.matrix)

    __hash__ = None

    def __repr__(self):
        return f"LinOp({self.rows}x{self.cols})"

    def __add__(self, other):
        _same_shape(self, other)
        return LinOp(self.matrix + other.matrix)

    def __sub__(self, other):
        _same_shape(self, other)
        return LinOp(self.matrix - other.matrix)

    def __mul__(self, scalar):
        return LinOp(float(scalar) * self.matrix)

    __rmul__ = __mul__

    def __neg__(self):
        return LinOp(-self.matrix)


def _same_shape(A, B):
    if A.shape != B.shape:
        raise DimensionError(f"operator shapes differ: {A.shape} vs {B.shape}")


def apply(A, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (A.cols,):
        raise DimensionError(f"operator takes {A.cols} coordinates, got shape {x.shape}")
    return A.matrix @ x


def adjoint_apply(A, y):
    y = np.asarray(y, dtype=float)
    if y.shape != (A.rows,):
        raise DimensionError(f"adjoint takes {A.rows} coordinates, got shape {y.shape}")
    return A.matrix.T @ y


def adjoint(A):
    return LinOp(A.matrix.T)


def identity(n):
    return LinOp(np.eye(n))


def zeros(rows, cols):
    return LinOp(np.zeros((rows, cols)))


def make_E(alpha, beta):
    """Rank-one operator ``x -> beta * <alpha, x>``."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if alpha.ndim != 1 or beta.ndim != 1:
        raise DimensionError("alpha and beta must be vectors")
    return LinOp(np.outer(beta, alpha))


def combine(lam, A, kappa, E):
    """Return ``lam * A + kappa * E``."""
    _same_shape(A, E)
    return LinOp(lam * A.matrix + kappa * E.matrix)
