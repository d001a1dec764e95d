"""SLH triples and their matrix representations.

An :class:`SLH` triple ``(S, L, H)`` lives on ``h (x) K`` with ``h`` of
dimension ``d`` and ``K = C^n``.  Operators on ``h (x) K`` are stored
port-major: the ``(k, l)`` channel block of ``S`` is the ``d x d`` slice
``S[k*d:(k+1)*d, l*d:(l+1)*d]`` and ``L`` stacks the per-channel ``d x d``
coupling operators.

The ``(1+n)``-block matrices built from a triple are

* the Ito generator matrix ``G = [[-L^dag L/2 - iH, -L^dag S], [L, S - 1]]``,
* the model matrix ``V = G + Pi``,
* the Galilean matrix ``M = 1 + Pi G = [[1, 0], [L, S]]``,

where ``Pi`` kills the leading (time) block.  ``Pi`` is never stored; products
with it are realised by zeroing the leading ``d`` rows or columns.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import ops
from .errors import DimensionError, InvariantError
from .ops import DEFAULT_TOL, BlockShape, maxabs


@dataclass(frozen=True)
class PortSpec:
    """A named port with multiplicity (number of field channels)."""

    label: str
    mult: int = 1

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise ValueError(f"port label must be a non-empty string, got {self.label!r}")
        if int(self.mult) != self.mult or self.mult < 1:
            raise ValueError(f"port {self.label!r}: multiplicity must be a positive integer")
        object.__setattr__(self, "mult", int(self.mult))


def _ports(spec, prefix: str, n: int) -> tuple:
    if spec is None:
        if n == 1:
            return (PortSpec(prefix, 1),)
        return tuple(PortSpec(f"{prefix}{k + 1}", 1) for k in range(n))
    out = []
    for p in spec:
        if isinstance(p, PortSpec):
            out.append(p)
        elif isinstance(p, str):
            out.append(PortSpec(p, 1))
        else:
            label, mult = p
            out.append(PortSpec(label, mult))
    return tuple(out)


def _check_labels(ports: Sequence[PortSpec], what: str) -> None:
    seen = set()
    for p in ports:
        if p.label in seen:
            raise InvariantError(f"duplicate {what} port label {p.label!r}")
        seen.add(p.label)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def port_shape(ports: Sequence[PortSpec], dim: int) -> BlockShape:
    return BlockShape(tuple(p.mult * dim for p in ports))


@dataclass(frozen=True, eq=False)
class SLH:
    """System parameters ``(S, L, H)`` of a Markovian input-output component.

    Parameters
    ----------
    S : array_like, shape (d*n, d*n)
        Unitary scattering operator; rows are indexed by output channels,
        columns by input channels.
    L : array_like, shape (d*n, d)
        Coupling operators, one ``d x d`` block per output channel.
    H : array_like, shape (d, d)
        Hermitian system Hamiltonian.
    in_ports, out_ports : sequence, optional
        :class:`PortSpec` entries (or labels, or ``(label, mult)`` pairs).
        Defaults to one port per channel named ``in``/``out`` (single
        channel) or ``in1..inN``/``out1..outN``.
    tol : float
        Tolerance for the unitarity and Hermiticity checks.
    check : bool
        Set to ``False`` to skip the unitarity/Hermiticity checks (shape
        checks always run).
    """

    S: np.ndarray
    L: np.ndarray
    H: np.ndarray
    in_ports: tuple = None
    out_ports: tuple = None
    tol: float = field(default=DEFAULT_TOL, repr=False)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        H = ops.as_op(self.H, "H")
        d = H.shape[0]
        if H.shape != (d, d):
            raise DimensionError(f"H must be square, got {H.shape}")
        S = ops.as_op(self.S, "S")
        L = ops.as_op(self.L, "L")
        if S.shape[0] != S.shape[1] or S.shape[0] % d:
            raise DimensionError(f"S of shape {S.shape} is not square over a dim-{d} system")
        n = S.shape[0] // d
        if n < 1:
            raise DimensionError("a component needs at least one channel")
        if L.shape != (n * d, d):
            raise DimensionError(f"L must have shape {(n * d, d)}, got {L.shape}")
        in_ports = _ports(self.in_ports, "in", n)
        out_ports = _ports(self.out_ports, "out", n)
        _check_labels(in_ports, "input")
        _check_labels(out_ports, "output")
        if sum(p.mult for p in in_ports) != n or sum(p.mult for p in out_ports) != n:
            raise InvariantError(
                f"port multiplicities (in={sum(p.mult for p in in_ports)}, "
                f"out={sum(p.mult for p in out_ports)}) must both equal the channel count {n}"
            )
        if self.check:
            res = ops.unitarity_residual(S)
            if res > self.tol:
                raise InvariantError(f"S is not unitary (residual {res:.3e} > {self.tol:g})")
            res = maxabs(H - H.conj().T)
            if res > self.tol:
                raise InvariantError(f"H is not Hermitian (residual {res:.3e} > {self.tol:g})")
        object.__setattr__(self, "S", _frozen(S))
        object.__setattr__(self, "L", _frozen(L))
        object.__setattr__(self, "H", _frozen(H))
        object.__setattr__(self, "in_ports", in_ports)
        object.__setattr__(self, "out_ports", out_ports)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def cdim(self) -> int:
        """Total channel count ``n``."""
        return self.S.shape[0] // self.dim

    @property
    def in_shape(self) -> BlockShape:
        return port_shape(self.in_ports, self.dim)

    @property
    def out_shape(self) -> BlockShape:
        return port_shape(self.out_ports, self.dim)

    def in_index(self, label: str) -> int:
        for k, p in enumerate(self.in_ports):
            if p.label == label:
                return k
        raise KeyError(f"no input port {label!r}")

    def out_index(self, label: str) -> int:
        for k, p in enumerate(self.out_ports):
            if p.label == label:
                return k
        raise KeyError(f"no output port {label!r}")

    def S_block(self, out_label: str, in_label: str) -> np.ndarray:
        return self.S[self.out_shape.slice(self.out_index(out_label)),
                      self.in_shape.slice(self.in_index(in_label))]

    def L_block(self, out_label: str) -> np.ndarray:
        return self.L[self.out_shape.slice(self.out_index(out_label)), :]

    def channel(self, k: int) -> np.ndarray:
        """Coupling operator ``L_k`` of channel ``k`` (0-based)."""
        d = self.dim
        return self.L[k * d:(k + 1) * d, :]

    def relabel(self, in_ports=None, out_ports=None) -> "SLH":
        return SLH(self.S, self.L, self.H,
                   in_ports if in_ports is not None else self.in_ports,
                   out_ports if out_ports is not None else self.out_ports,
                   check=False)

    def max_difference(self, other: "SLH") -> float:
        """Largest entrywise deviation over ``S``, ``L`` and ``H``."""
        if (self.S.shape, self.L.shape) != (other.S.shape, other.L.shape):
            return float("inf")
        return max(maxabs(self.S - other.S), maxabs(self.L - other.L),
                   maxabs(self.H - other.H))

    def __repr__(self):
        ins = ",".join(f"{p.label}:{p.mult}" for p in self.in_ports)
        outs = ",".join(f"{p.label}:{p.mult}" for p in self.out_ports)
        return f"SLH(dim={self.dim}, cdim={self.cdim}, in=[{ins}], out=[{outs}])"


def passthrough_slh(dim: int = 1, n: int = 1) -> SLH:
    """The trivial triple ``(1, 0, 0)``."""
    return SLH(np.eye(dim * n), np.zeros((dim * n, dim)), np.zeros((dim, dim)))


# ---------------------------------------------------------------------------
# (1+n)-block matrices
# ---------------------------------------------------------------------------


def _pi_left(x: np.ndarray, d: int) -> np.ndarray:
    """``Pi @ x``."""
    y = x.copy()
    y[:d, :] = 0
    return y


def _pi_right(x: np.ndarray, d: int) -> np.ndarray:
    """``x @ Pi``."""
    y = x.copy()
    y[:, :d] = 0
    return y


def _pi(n_total: int, d: int) -> np.ndarray:
    out = np.eye(n_total, dtype=np.complex128)
    out[:d, :d] = 0
    return out


@dataclass(frozen=True, eq=False)
class _BlockOperator:
    data: np.ndarray
    dim: int

    def __post_init__(self):
        data = ops.as_op(self.data)
        d = int(self.dim)
        if data.shape[0] != data.shape[1] or data.shape[0] % d or data.shape[0] < d:
            raise DimensionError(f"shape {data.shape} is not a (1+n)-block matrix over dim {d}")
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "dim", d)

    @property
    def cdim(self) -> int:
        return self.data.shape[0] // self.dim - 1

    @property
    def time_block(self) -> np.ndarray:
        d = self.dim
        return self.data[:d, :d]

    @property
    def row_block(self) -> np.ndarray:
        d = self.dim
        return self.data[:d, d:]

    @property
    def column_block(self) -> np.ndarray:
        d = self.dim
        return self.data[d:, :d]

    @property
    def channel_block(self) -> np.ndarray:
        d = self.dim
        return self.data[d:, d:]

    def channel_op(self, alpha: int, beta: int) -> np.ndarray:
        """``d x d`` entry ``(alpha, beta)`` with 0 the time index."""
        d = self.dim
        return self.data[alpha * d:(alpha + 1) * d, beta * d:(beta + 1) * d]


class ItoMatrix(_BlockOperator):
    """Ito generator matrix ``G``."""


class GalileanMatrix(_BlockOperator):
    """Galilean transformation ``M = [[1, 0], [L, S]]``."""

    @property
    def S(self) -> np.ndarray:
        return self.channel_block

    @property
    def L(self) -> np.ndarray:
        return self.column_block


@dataclass(frozen=True, eq=False)
class ModelMatrix(_BlockOperator):
    """Model matrix ``V`` with labelled output rows and input columns.

    Index 0 is the time block; the remaining row blocks follow
    ``out_ports`` and column blocks follow ``in_ports``.
    """

    in_ports: tuple = ()
    out_ports: tuple = ()

    def __post_init__(self):
        super().__post_init__()
        ins, outs = tuple(self.in_ports), tuple(self.out_ports)
        n = self.cdim
        if not ins and not outs and n:
            ins, outs = _ports(None, "in", n), _ports(None, "out", n)
        if sum(p.mult for p in ins) != n or sum(p.mult for p in outs) != n:
            raise DimensionError("port multiplicities do not match the model matrix size")
        _check_labels(ins, "input")
        _check_labels(outs, "output")
        object.__setattr__(self, "in_ports", ins)
        object.__setattr__(self, "out_ports", outs)

    @property
    def row_shape(self) -> BlockShape:
        return BlockShape((self.dim,) + tuple(p.mult * self.dim for p in self.out_ports))

    @property
    def col_shape(self) -> BlockShape:
        return BlockShape((self.dim,) + tuple(p.mult * self.dim for p in self.in_ports))

    def row_of(self, label) -> int:
        """Block row index of output ``label`` (``0`` for the time row)."""
        if label == 0:
            return 0
        for k, p in enumerate(self.out_ports):
            if p.label == label:
                return k + 1
        raise KeyError(f"no output port {label!r}")

    def col_of(self, label) -> int:
        if label == 0:
            return 0
        for k, p in enumerate(self.in_ports):
            if p.label == label:
                return k + 1
        raise KeyError(f"no input port {label!r}")

    def block(self, out_label, in_label) -> np.ndarray:
        """Block ``V_{s r}``; pass ``0`` for the time index."""
        return self.data[self.row_shape.slice(self.row_of(out_label)),
                         self.col_shape.slice(self.col_of(in_label))]

    def out_mult(self, label) -> int:
        return self.out_ports[self.row_of(label) - 1].mult

    def in_mult(self, label) -> int:
        return self.in_ports[self.col_of(label) - 1].mult


def build_G(t: SLH) -> ItoMatrix:
    S, L, H = t.S, t.L, t.H
    Ld = L.conj().T
    top = np.hstack([-0.5 * Ld @ L - 1j * H, -Ld @ S])
    bottom = np.hstack([L, S - np.eye(S.shape[0])])
    return ItoMatrix(np.vstack([top, bottom]), t.dim)


def build_V(t: SLH) -> ModelMatrix:
    S, L, H = t.S, t.L, t.H
    Ld = L.conj().T
    top = np.hstack([-0.5 * Ld @ L - 1j * H, -Ld @ S])
    bottom = np.hstack([L, S])
    return ModelMatrix(np.vstack([top, bottom]), t.dim, t.in_ports, t.out_ports)


def build_M(t: SLH) -> GalileanMatrix:
    d, nd = t.dim, t.S.shape[0]
    top = np.hstack([np.eye(d), np.zeros((d, nd))])
    bottom = np.hstack([t.L, t.S])
    return GalileanMatrix(np.vstack([top, bottom]), d)


def pi_matrix(dim: int, cdim: int) -> np.ndarray:
    """Explicit ``Pi`` for a ``(1+cdim)``-block matrix (used by checks only)."""
    return _pi(dim * (1 + cdim), dim)


def extract_slh(v: ModelMatrix, *, tol: float = DEFAULT_TOL, check: bool = True) -> SLH:
    """Recover ``(S, L, H)`` from a model matrix.

    ``H`` is taken as the operator imaginary part of ``-V_00`` so it is exactly
    Hermitian; consistency of ``V_00`` and ``V_0r`` with ``(S, L)`` is what
    :func:`model_residuals` measures.
    """
    S, L = v.channel_block, v.column_block
    H = ops.im_op(-v.time_block)
    return SLH(S, L, H, v.in_ports, v.out_ports, tol=tol, check=check)


def slh_from_G(g: ItoMatrix, *, tol: float = DEFAULT_TOL, check: bool = True) -> SLH:
    d = g.dim
    S = g.channel_block + np.eye(g.data.shape[0] - d)
    return SLH(S, g.column_block, ops.im_op(-g.time_block), tol=tol, check=check)


class ItoResiduals(NamedTuple):
    isometry: float
    coisometry: float

    @property
    def max(self) -> float:
        return max(self.isometry, self.coisometry)


def check_ito(g: ItoMatrix) -> ItoResiduals:
    """Residuals of ``G + G^dag + G^dag Pi G = 0 = G + G^dag + G Pi G^dag``."""
    G = g.data
    Gd = G.conj().T
    d = g.dim
    iso = G + Gd + Gd @ _pi_left(G, d)
    coiso = G + Gd + _pi_right(G, d) @ Gd
    return ItoResiduals(maxabs(iso), maxabs(coiso))


def model_residuals(v: ModelMatrix) -> dict:
    """Residuals of the model-matrix identities.

    ``v00``: ``V_00 + V_00^dag + sum_s V_s0^dag V_s0``;
    ``v0r``: ``V_0r + sum_s V_s0^dag V_sr``;
    ``unitarity``: unitarity residual of the scattering block.
    """
    V00, V0r, Vs0, Vsr = v.time_block, v.row_block, v.column_block, v.channel_block
    return {
        "v00": maxabs(V00 + V00.conj().T + Vs0.conj().T @ Vs0),
        "v0r": maxabs(V0r + Vs0.conj().T @ Vsr),
        "unitarity": ops.unitarity_residual(Vsr) if Vsr.size else 0.0,
    }


# ---------------------------------------------------------------------------
# Galilean group
# ---------------------------------------------------------------------------


def galilean(S, L) -> GalileanMatrix:
    S, L = ops.as_op(S, "S"), ops.as_op(L, "L")
    d = L.shape[1]
    top = np.hstack([np.eye(d), np.zeros((d, S.shape[1]))])
    return GalileanMatrix(np.vstack([top, np.hstack([L, S])]), d)


def _same_shape(a: _BlockOperator, b: _BlockOperator) -> None:
    if a.dim != b.dim or a.data.shape != b.data.shape:
        raise DimensionError(
            f"shape mismatch: {a.data.shape} over dim {a.dim} vs {b.data.shape} over dim {b.dim}"
        )


def galilean_mul(m1: GalileanMatrix, m2: GalileanMatrix) -> GalileanMatrix:
    """Group product: ``(L1, S1)(L2, S2) = (L1 + S1 L2, S1 S2)``."""
    _same_shape(m1, m2)
    return galilean(m1.S @ m2.S, m1.L + m1.S @ m2.L)


def galilean_inv(m: GalileanMatrix) -> GalileanMatrix:
    """Group inverse ``(-S^dag L, S^dag)``."""
    Sd = m.S.conj().T
    return galilean(Sd, -Sd @ m.L)


def galilean_pi_residual(m: GalileanMatrix) -> float:
    """``|| M Pi M^dag - Pi ||``."""
    M = m.data
    return maxabs(_pi_right(M, m.dim) @ M.conj().T - pi_matrix(m.dim, m.cdim))


def conjugate_G(g: ItoMatrix, n: GalileanMatrix) -> ItoMatrix:
    """``N^dag G N``; stays in the Ito class for Galilean ``N``."""
    _same_shape(g, n)
    N = n.data
    return ItoMatrix(N.conj().T @ g.data @ N, g.dim)


# ---------------------------------------------------------------------------
# Concatenation and series product
# ---------------------------------------------------------------------------


def concat(v1: ModelMatrix, v2: ModelMatrix) -> ModelMatrix:
    """Concatenation ``V1 (+) V2``: summed time blocks, block-diagonal
    scattering, no cross-talk between the two port sets."""
    if v1.dim != v2.dim:
        raise DimensionError(f"cannot concatenate systems of dim {v1.dim} and {v2.dim}")
    d = v1.dim
    n1, n2 = v1.data.shape[0] - d, v2.data.shape[0] - d
    out = np.zeros((d + n1 + n2, d + n1 + n2), dtype=np.complex128)
    out[:d, :d] = v1.time_block + v2.time_block
    out[:d, d:d + n1] = v1.row_block
    out[:d, d + n1:] = v2.row_block
    out[d:d + n1, :d] = v1.column_block
    out[d + n1:, :d] = v2.column_block
    out[d:d + n1, d:d + n1] = v1.channel_block
    out[d + n1:, d + n1:] = v2.channel_block
    return ModelMatrix(out, d, v1.in_ports + v2.in_ports, v1.out_ports + v2.out_ports)


def concat_slh(t1: SLH, t2: SLH) -> SLH:
    """Concatenation at the level of parameters: ``(S1 (+) S2, [L1; L2], H1 + H2)``."""
    if t1.dim != t2.dim:
        raise DimensionError(f"cannot concatenate systems of dim {t1.dim} and {t2.dim}")
    n1, n2 = t1.S.shape[0], t2.S.shape[0]
    S = np.zeros((n1 + n2, n1 + n2), dtype=np.complex128)
    S[:n1, :n1] = t1.S
    S[n1:, n1:] = t2.S
    return SLH(S, np.vstack([t1.L, t2.L]), t1.H + t2.H,
               t1.in_ports + t2.in_ports, t1.out_ports + t2.out_ports, check=False)


def series(t2: SLH, t1: SLH) -> SLH:
    """Series product ``t2 <| t1``: the output of ``t1`` feeds ``t2``.

    Returns ``(S2 S1, L2 + S2 L1, H1 + H2 + Im(L2^dag S2 L1))`` with the
    input ports of ``t1`` and the output ports of ``t2``.
    """
    if t1.dim != t2.dim:
        raise DimensionError(f"system dims differ: {t1.dim} vs {t2.dim}")
    if t1.cdim != t2.cdim:
        raise DimensionError(
            f"multiplicity mismatch: t1 emits {t1.cdim} channels, t2 accepts {t2.cdim}"
        )
    S = t2.S @ t1.S
    L = t2.L + t2.S @ t1.L
    H = t1.H + t2.H + ops.im_op(t2.L.conj().T @ t2.S @ t1.L)
    return SLH(S, L, H, t1.in_ports, t2.out_ports, check=False)


def series_G(g2: ItoMatrix, g1: ItoMatrix) -> ItoMatrix:
    """Series product on generators: ``G1 + G2 + G2 Pi G1``."""
    _same_shape(g1, g2)
    return ItoMatrix(g1.data + g2.data + g2.data @ _pi_left(g1.data, g1.dim), g1.dim)


# ---------------------------------------------------------------------------
# Augmented (1+n+1) matrices
# ---------------------------------------------------------------------------


class AugmentedMatrix(_BlockOperator):
    """``[[1, -L^dag S, -L^dag L/2 - iH], [0, S, L], [0, 0, 1]]``.

    Series products become ordinary products of augmented matrices.
    """

    @property
    def cdim(self) -> int:
        return self.data.shape[0] // self.dim - 2

    def _zeta_indices(self) -> np.ndarray:
        d, m = self.dim, self.data.shape[0]
        idx = np.arange(m)
        # reverse the order of the three blocks, keep order inside each block
        return np.concatenate([idx[m - d:], idx[d:m - d], idx[:d]])


def augmented(t: SLH) -> AugmentedMatrix:
    d, nd = t.dim, t.S.shape[0]
    Ld = t.L.conj().T
    out = np.zeros((2 * d + nd, 2 * d + nd), dtype=np.complex128)
    out[:d, :d] = np.eye(d)
    out[:d, d:d + nd] = -Ld @ t.S
    out[:d, d + nd:] = -0.5 * Ld @ t.L - 1j * t.H
    out[d:d + nd, d:d + nd] = t.S
    out[d:d + nd, d + nd:] = t.L
    out[d + nd:, d + nd:] = np.eye(d)
    return AugmentedMatrix(out, d)


def star(x: AugmentedMatrix) -> AugmentedMatrix:
    """The involution ``X* = zeta X^dag zeta`` (zeta swaps the outer blocks)."""
    idx = x._zeta_indices()
    xd = x.data.conj().T
    return AugmentedMatrix(xd[np.ix_(idx, idx)], x.dim)


def aug_mul(x: AugmentedMatrix, y: AugmentedMatrix) -> AugmentedMatrix:
    _same_shape(x, y)
    return AugmentedMatrix(x.data @ y.data, x.dim)


def star_unitarity_residual(x: AugmentedMatrix) -> float:
    eye = np.eye(x.data.shape[0])
    xs = star(x).data
    return max(maxabs(xs @ x.data - eye), maxabs(x.data @ xs - eye))


def slh_from_augmented(x: AugmentedMatrix, *, tol: float = DEFAULT_TOL,
                       check: bool = True) -> SLH:
    d, m = x.dim, x.data.shape[0]
    S = x.data[d:m - d, d:m - d]
    L = x.data[d:m - d, m - d:]
    H = ops.im_op(-x.data[:d, m - d:])
    return SLH(S, L, H, tol=tol, check=check)
