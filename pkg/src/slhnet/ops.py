"""Dense complex operator arithmetic.

Operators are plain two-dimensional ``complex128`` numpy arrays.  The helpers
here add the dimension checks, tolerance predicates and checked inverse that
the rest of the package relies on.  All tolerance checks use the entrywise
max-abs norm (:func:`maxabs`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, SingularMatrix

DEFAULT_TOL = 1e-10


def as_op(a, name: str = "operator") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array.

    Scalars become 1x1 operators.  Raises :class:`DimensionError` for arrays
    of the wrong rank and :class:`ValueError` for NaN/Inf entries.
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def maxabs(a) -> float:
    """Entrywise max-abs norm; 0 for empty arrays."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def matmul(a, b) -> np.ndarray:
    a, b = as_op(a), as_op(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(as_op(a)).T


def kron(a, b) -> np.ndarray:
    return np.kron(as_op(a), as_op(b))


def im_op(a) -> np.ndarray:
    """Operator imaginary part ``(a - a^dagger) / 2i``; always Hermitian."""
    a = _square(a)
    out = (a - a.conj().T) / 2j
    # symmetrize explicitly so the result is Hermitian to the last bit
    return 0.5 * (out + out.conj().T)


def re_op(a) -> np.ndarray:
    """Operator real part ``(a + a^dagger) / 2``."""
    a = _square(a)
    out = (a + a.conj().T) / 2
    return 0.5 * (out + out.conj().T)


def hermitian_part(a) -> np.ndarray:
    return re_op(a)


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    a = _square(a)
    return maxabs(a - a.conj().T) <= tol


def unitarity_residual(a) -> float:
    """``max(||a^dagger a - 1||, ||a a^dagger - 1||)`` in max-abs norm."""
    a = _square(a)
    eye = np.eye(a.shape[0])
    return max(maxabs(a.conj().T @ a - eye), maxabs(a @ a.conj().T - eye))


def is_unitary(a, tol: float = DEFAULT_TOL) -> bool:
    return unitarity_residual(a) <= tol


def inv_checked(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Inverse of a square operator, refusing near-singular input.

    Raises
    ------
    SingularMatrix
        If the smallest singular value is below ``tol`` times the largest.
        The exception carries both singular values.
    """
    a = _square(a)
    n = a.shape[0]
    if n == 0:
        return a.copy()
    sv = np.linalg.svd(a, compute_uv=False)
    smax, smin = float(sv[0]), float(sv[-1])
    if smax == 0.0 or smin < tol * smax:
        raise SingularMatrix(
            f"matrix is singular to tolerance {tol:g} "
            f"(sigma_min={smin:.3e}, sigma_max={smax:.3e})",
            sigma_min=smin,
            sigma_max=smax,
        )
    return np.linalg.solve(a, np.eye(n, dtype=np.complex128))


def condition_number(a) -> float:
    a = _square(a)
    if a.shape[0] == 0:
        return 1.0
    return float(np.linalg.cond(a))


def smallest_singular_value(a) -> float:
    a = as_op(a)
    if a.size == 0:
        return float("inf")
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def annihilator(d: int) -> np.ndarray:
    """Truncated bosonic lowering operator on ``d`` Fock levels."""
    if int(d) != d or d < 2:
        raise ValueError(f"truncation dimension must be an integer >= 2, got {d}")
    d = int(d)
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(np.complex128)


def creator(d: int) -> np.ndarray:
    return annihilator(d).conj().T


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def embed(op, dims: Sequence[int], index: int) -> np.ndarray:
    """Place ``op`` on tensor factor ``index`` of ``dims``, identity elsewhere."""
    op = as_op(op)
    if not 0 <= index < len(dims):
        raise DimensionError(f"factor index {index} out of range for {list(dims)}")
    if op.shape != (dims[index], dims[index]):
        raise DimensionError(
            f"operator of shape {op.shape} does not act on factor of dim {dims[index]}"
        )
    out = np.ones((1, 1), dtype=np.complex128)
    for k, dk in enumerate(dims):
        out = np.kron(out, op if k == index else np.eye(dk))
    return out


def _square(a) -> np.ndarray:
    a = as_op(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square operator, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class BlockShape:
    """Partition of a matrix dimension into consecutive blocks."""

    block_dims: tuple

    def __post_init__(self):
        dims = tuple(int(b) for b in self.block_dims)
        if any(b < 0 for b in dims):
            raise DimensionError(f"block dims must be non-negative: {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def total(self) -> int:
        return sum(self.block_dims)

    @property
    def offsets(self) -> tuple:
        return tuple(np.concatenate(([0], np.cumsum(self.block_dims, dtype=int))).tolist())

    def __len__(self) -> int:
        return len(self.block_dims)

    def slice(self, i: int) -> slice:
        off = self.offsets
        return slice(off[i], off[i + 1])

    def indices(self, blocks: Sequence[int]) -> np.ndarray:
        """Flat index array covering ``blocks`` in the given order."""
        off = self.offsets
        parts = [np.arange(off[i], off[i + 1]) for i in blocks]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=int)


def block(a: np.ndarray, rows: BlockShape, cols: BlockShape, i: int, j: int) -> np.ndarray:
    """View of block ``(i, j)`` of ``a`` under the given row/column shapes."""
    if a.shape != (rows.total, cols.total):
        raise DimensionError(f"shape {a.shape} does not match blocks {rows.total}x{cols.total}")
    return a[rows.slice(i), cols.slice(j)]
