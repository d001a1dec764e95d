"""Generator coefficients of the Heisenberg-picture dynamics.

Superoperators act on column-stacked operators: ``vec(A X B) = (B^T kron A) vec(X)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops
from .errors import DimensionError
from .ops import maxabs
from .slh import SLH, GalileanMatrix, ItoMatrix, build_G, build_M, series


def vec(x) -> np.ndarray:
    """Column-stacking vectorization."""
    return ops.as_op(x).reshape(-1, order="F")


def unvec(v, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=np.complex128).reshape((dim, dim), order="F")


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on ``dim x dim`` operators stored as a ``dim^2`` square matrix."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = ops.as_op(self.matrix, "superoperator")
        if m.shape != (self.dim ** 2, self.dim ** 2):
            raise DimensionError(f"superoperator on dim {self.dim} must be {self.dim ** 2} square")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, x) -> np.ndarray:
        x = ops.as_op(x, "X")
        if x.shape != (self.dim, self.dim):
            raise DimensionError(f"operand must be {self.dim}x{self.dim}, got {x.shape}")
        return unvec(self.matrix @ vec(x), self.dim)

    __call__ = apply


def lindblad_apply(t: SLH, x) -> np.ndarray:
    """``sum_i (L_i^dag [X, L_i] + [L_i^dag, X] L_i) / 2 - i [X, H]`` evaluated directly."""
    X = ops.as_op(x, "X")
    out = -1j * (X @ t.H - t.H @ X)
    for k in range(t.cdim):
        Lk = t.channel(k)
        Lkd = Lk.conj().T
        out = out + 0.5 * Lkd @ (X @ Lk - Lk @ X) + 0.5 * (Lkd @ X - X @ Lkd) @ Lk
    return out


def lindblad(t: SLH) -> Superoperator:
    """Lindblad generator of ``t`` as a superoperator matrix."""
    d = t.dim
    eye = np.eye(d)
    H = t.H
    m = -1j * np.kron(H.T, eye) + 1j * np.kron(eye, H)
    for k in range(t.cdim):
        Lk = t.channel(k)
        LdL = Lk.conj().T @ Lk
        m = m + np.kron(Lk.T, Lk.conj().T) - 0.5 * np.kron(eye, LdL) - 0.5 * np.kron(LdL.T, eye)
    return Superoperator(d, m)


class EvansHudsonMaps:
    """The family ``L_ab`` read off from ``X G + G^dag X + G^dag Pi X Pi G``.

    ``X`` is ampliated block-diagonally over the ``1 + n`` indices; index 0
    is time.  :meth:`apply` evaluates the full block matrix directly and
    :meth:`superoperator` gives each entry as a ``d^2 x d^2`` matrix.
    """

    def __init__(self, g: ItoMatrix):
        self.g = g
        self.dim = g.dim
        self.size = g.cdim + 1

    def apply(self, x) -> np.ndarray:
        d = self.dim
        X = ops.as_op(x, "X")
        if X.shape != (d, d):
            raise DimensionError(f"operand must be {d}x{d}, got {X.shape}")
        G = self.g.data
        Gd = G.conj().T
        Xa = np.kron(np.eye(self.size), X)
        PXP = Xa.copy()
        PXP[:d, :d] = 0
        return Xa @ G + Gd @ Xa + Gd @ PXP @ G

    def block(self, x, alpha: int, beta: int) -> np.ndarray:
        d = self.dim
        return self.apply(x)[alpha * d:(alpha + 1) * d, beta * d:(beta + 1) * d]

    def superoperator(self, alpha: int, beta: int) -> Superoperator:
        d, g = self.dim, self.g
        eye = np.eye(d)
        Gab = g.channel_op(alpha, beta)
        Gba = g.channel_op(beta, alpha)
        m = np.kron(Gab.T, eye) + np.kron(eye, Gba.conj().T)
        for k in range(1, self.size):
            m = m + np.kron(g.channel_op(k, beta).T, g.channel_op(k, alpha).conj().T)
        return Superoperator(d, m)

    def superoperators(self) -> dict:
        return {(a, b): self.superoperator(a, b)
                for a in range(self.size) for b in range(self.size)}


def evans_hudson(g: ItoMatrix) -> EvansHudsonMaps:
    return EvansHudsonMaps(g)


@dataclass(frozen=True, eq=False)
class OutputCoefficients:
    """Coefficients of the output increments ``dA_out = S dA_in + L dt``.

    ``scatter`` rows follow ``out_ports`` and columns ``in_ports``.
    """

    scatter: np.ndarray
    drift: np.ndarray
    in_ports: tuple
    out_ports: tuple


def output_coeffs(t: SLH) -> OutputCoefficients:
    return OutputCoefficients(t.S.copy(), t.L.copy(), t.in_ports, t.out_ports)


def galilean_output_map(m: GalileanMatrix) -> np.ndarray:
    """Coefficient array ``c[a, b, mu, nu] = M_{a mu}^dag M_{b nu}``.

    Returns an array of shape ``(N, N, N, N, d, d)`` with ``N = 1 + n``.
    """
    d, N = m.dim, m.cdim + 1
    blocks = m.data.reshape(N, d, N, d).transpose(0, 2, 1, 3)  # blocks[a, mu] = M_{a mu}
    adj = blocks.conj().transpose(0, 1, 3, 2)
    return np.einsum("amij,bnjk->abmnik", adj, blocks)


def check_eh_series(t1: SLH, t2: SLH, x) -> float:
    """Largest blockwise deviation between the Evans-Hudson maps of the
    cascade ``t2 <| t1`` and ``L1_ab(X) + (M1_{mu a})^dag L2_{mu nu}(X) M1_{nu b}``."""
    composite = evans_hudson(build_G(series(t2, t1))).apply(x)
    m1 = build_M(t1).data
    rhs = evans_hudson(build_G(t1)).apply(x) + m1.conj().T @ evans_hudson(build_G(t2)).apply(x) @ m1
    return maxabs(composite - rhs)
