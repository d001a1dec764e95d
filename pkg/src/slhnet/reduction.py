"""Elimination of internal channels in the zero time-delay limit.

Eliminating an internal edge ``(s, r)`` with gain ``X`` maps the model matrix
through the non-commutative linear fractional (Moebius) transformation

    F(V, X)_ab = V_ab + V_ar X (1 - V_sr X)^{-1} V_sb,

with ``a`` running over the time index and the surviving outputs and ``b``
over the time index and the surviving inputs.  Eliminating every internal
edge at once uses the adjacency matrix ``eta`` as the gain, which gives
``V_ab + V_ai (eta - V_ii)^{-1} V_ib``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import ops
from .errors import (DimensionError, DivergentPathSum, NetworkError, NonConvergent,
                     SingularLoop, SingularMatrix)
from .network import AdjacencyMatrix, Network, adjacency, build_network_V, make_adjacency
from .ops import DEFAULT_TOL, maxabs
from .slh import SLH, ModelMatrix, PortSpec, extract_slh


class DelayIgnoredWarning(UserWarning):
    """Emitted when a network with nonzero edge delays is reduced."""


class EdgeRef(NamedTuple):
    source: str
    target: str


def _inverse(a, tol, what):
    try:
        return ops.inv_checked(a, tol)
    except SingularMatrix as exc:
        raise SingularLoop(
            f"{what} is not invertible: zero-delay limit is ill-posed "
            f"(sigma_min={exc.sigma_min:.3e})",
            sigma_min=exc.sigma_min, sigma_max=exc.sigma_max,
        ) from None


class _Partition(NamedTuple):
    keep_rows: np.ndarray
    keep_cols: np.ndarray
    loop_rows: np.ndarray
    loop_cols: np.ndarray
    out_ports: tuple
    in_ports: tuple


def _partition(v: ModelMatrix, sources: Sequence[str], targets: Sequence[str]) -> _Partition:
    if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
        raise NetworkError("an internal port may be eliminated only once")
    s_blocks = [v.row_of(s) for s in sources]
    r_blocks = [v.col_of(r) for r in targets]
    for s, r in zip(sources, targets):
        if v.out_mult(s) != v.in_mult(r):
            raise DimensionError(f"edge {s} -> {r} joins ports of different multiplicity")
    rows = [0] + [k for k in range(1, len(v.out_ports) + 1) if k not in s_blocks]
    cols = [0] + [k for k in range(1, len(v.in_ports) + 1) if k not in r_blocks]
    rs, cs = v.row_shape, v.col_shape
    return _Partition(
        rs.indices(rows), cs.indices(cols), rs.indices(s_blocks), cs.indices(r_blocks),
        tuple(v.out_ports[k - 1] for k in rows[1:]),
        tuple(v.in_ports[k - 1] for k in cols[1:]),
    )


def feedback_reduce(v: ModelMatrix, edge, gain=None, tol: float = DEFAULT_TOL) -> ModelMatrix:
    """Eliminate ``edge = (source, target)`` through gain ``X``.

    ``gain`` acts on the edge multiplicity space (``d*mult`` square) and
    defaults to the identity.

    Raises
    ------
    SingularLoop
        If ``1 - V_sr X`` fails :func:`slhnet.ops.inv_checked`.
    """
    source, target = edge
    p = _partition(v, [source], [target])
    V = v.data
    Vsr = V[np.ix_(p.loop_rows, p.loop_cols)]
    X = np.eye(Vsr.shape[0]) if gain is None else ops.as_op(gain, "gain")
    if X.shape != (Vsr.shape[1], Vsr.shape[0]):
        raise DimensionError(f"gain must have shape {(Vsr.shape[1], Vsr.shape[0])}")
    loop = _inverse(np.eye(Vsr.shape[0]) - Vsr @ X, tol, f"1 - V_sr X on edge {source} -> {target}")
    red = (V[np.ix_(p.keep_rows, p.keep_cols)]
           + V[np.ix_(p.keep_rows, p.loop_cols)] @ X @ loop @ V[np.ix_(p.loop_rows, p.keep_cols)])
    return ModelMatrix(red, v.dim, p.in_ports, p.out_ports)


def eliminate_edge(v: ModelMatrix, edge, tol: float = DEFAULT_TOL) -> ModelMatrix:
    """Zero-delay elimination of one edge:
    ``V_ab + V_ar (1 - V_sr)^{-1} V_sb``."""
    source, target = edge
    p = _partition(v, [source], [target])
    V = v.data
    Vsr = V[np.ix_(p.loop_rows, p.loop_cols)]
    loop = _inverse(np.eye(Vsr.shape[0]) - Vsr, tol, f"1 - V_sr on edge {source} -> {target}")
    red = (V[np.ix_(p.keep_rows, p.keep_cols)]
           + V[np.ix_(p.keep_rows, p.loop_cols)] @ loop @ V[np.ix_(p.loop_rows, p.keep_cols)])
    return ModelMatrix(red, v.dim, p.in_ports, p.out_ports)


def eliminate_sequence(v: ModelMatrix, edges: Iterable, tol: float = DEFAULT_TOL) -> ModelMatrix:
    """Eliminate ``edges`` one at a time, in the order given."""
    for e in edges:
        v = eliminate_edge(v, e, tol)
    return v


def eliminate_all(v: ModelMatrix, eta: AdjacencyMatrix, tol: float = DEFAULT_TOL) -> ModelMatrix:
    """Eliminate all internal channels of ``eta`` simultaneously."""
    if len(eta) == 0:
        return v
    sources = [q.label for q in eta.row_ports]
    targets = [q.label for q in eta.col_ports]
    p = _partition_any(v, sources, targets)
    V = v.data
    Vii = V[np.ix_(p.loop_rows, p.loop_cols)]
    loop = _inverse(eta.data - Vii, tol, "eta - S_ii")
    red = (V[np.ix_(p.keep_rows, p.keep_cols)]
           + V[np.ix_(p.keep_rows, p.loop_cols)] @ loop @ V[np.ix_(p.loop_rows, p.keep_cols)])
    return ModelMatrix(red, v.dim, p.in_ports, p.out_ports)


def _partition_any(v: ModelMatrix, sources, targets) -> _Partition:
    # rows/cols of eta are ordered independently, so no pairwise mult check here
    s_blocks = [v.row_of(s) for s in sources]
    r_blocks = [v.col_of(r) for r in targets]
    rows = [0] + [k for k in range(1, len(v.out_ports) + 1) if k not in s_blocks]
    cols = [0] + [k for k in range(1, len(v.in_ports) + 1) if k not in r_blocks]
    rs, cs = v.row_shape, v.col_shape
    return _Partition(
        rs.indices(rows), cs.indices(cols), rs.indices(s_blocks), cs.indices(r_blocks),
        tuple(v.out_ports[k - 1] for k in rows[1:]),
        tuple(v.in_ports[k - 1] for k in cols[1:]),
    )


def _slh_partition(t: SLH, eta: AdjacencyMatrix):
    int_out = {q.label for q in eta.row_ports}
    int_in = {q.label for q in eta.col_ports}
    oshape, ishape = t.out_shape, t.in_shape
    o_int = [t.out_index(q.label) for q in eta.row_ports]
    i_int = [t.in_index(q.label) for q in eta.col_ports]
    o_ext = [k for k, q in enumerate(t.out_ports) if q.label not in int_out]
    i_ext = [k for k, q in enumerate(t.in_ports) if q.label not in int_in]
    return (oshape.indices(o_int), ishape.indices(i_int),
            oshape.indices(o_ext), ishape.indices(i_ext),
            tuple(t.out_ports[k] for k in o_ext), tuple(t.in_ports[k] for k in i_ext))


def reduced_params(t: SLH, eta: AdjacencyMatrix, tol: float = DEFAULT_TOL) -> SLH:
    """Parameters of the fully reduced network.

    With ``R = (eta - S_ii)^{-1}``::

        S_red = S_ee + S_ei R S_ie
        L_red = L_e + S_ei R L_i
        H_red = H + Im(sum_j L_j^dag S_ji R L_i)      (j over all outputs)
    """
    oi, ii, oe, ie, out_ports, in_ports = _slh_partition(t, eta)
    S, L = t.S, t.L
    R = _inverse(eta.data - S[np.ix_(oi, ii)], tol, "eta - S_ii")
    SeiR = S[np.ix_(oe, ii)] @ R
    S_red = S[np.ix_(oe, ie)] + SeiR @ S[np.ix_(oi, ie)]
    L_red = L[oe, :] + SeiR @ L[oi, :]
    H_red = t.H + ops.im_op(L.conj().T @ S[:, ii] @ R @ L[oi, :])
    return SLH(S_red, L_red, H_red, in_ports, out_ports, check=False)


def reduced_params_edge(t: SLH, edge, tol: float = DEFAULT_TOL) -> SLH:
    """Single-edge form of :func:`reduced_params`."""
    eta = make_adjacency([tuple(edge)], t.out_ports, t.in_ports, t.dim)
    return reduced_params(t, eta, tol)


def loop_sigma_min(t: SLH, eta: AdjacencyMatrix) -> float:
    """Smallest singular value of ``eta - S_ii`` (``inf`` with no loops)."""
    if len(eta) == 0:
        return float("inf")
    oi, ii, *_ = _slh_partition(t, eta)
    return ops.smallest_singular_value(eta.data - t.S[np.ix_(oi, ii)])


def reduce_network(net: Network, tol: float = DEFAULT_TOL) -> SLH:
    """Eliminate every internal edge of ``net`` and return the reduced triple."""
    if any(e.delay for e in net.edges):
        warnings.warn("edge delays are ignored: reduction is in the zero-delay limit",
                      DelayIgnoredWarning, stacklevel=2)
    v = eliminate_all(build_network_V(net), adjacency(net), tol)
    return extract_slh(v, check=False)


# ---------------------------------------------------------------------------
# Redheffer star product
# ---------------------------------------------------------------------------


def _two_port_blocks(t: SLH, name: str):
    if len(t.in_ports) != 2 or len(t.out_ports) != 2:
        raise DimensionError(f"{name} must have exactly two input and two output ports")
    o, i = t.out_shape, t.in_shape
    S = {(a, b): t.S[o.slice(a), i.slice(b)] for a in (0, 1) for b in (0, 1)}
    L = [t.L[o.slice(a), :] for a in (0, 1)]
    return S, L


def redheffer_star(tA: SLH, tB: SLH, tol: float = DEFAULT_TOL, names=("A", "B")) -> SLH:
    """Crossed feedback of two two-port components.

    ``A``'s second output feeds ``B``'s first input and ``B``'s first output
    feeds ``A``'s second input.  The remaining ports (``A`` first, then
    ``B``) are the external ports of the result, labelled
    ``"<name>.<port>"``.  Operator ordering is kept general, so ``A`` and
    ``B`` need not commute.
    """
    if tA.dim != tB.dim:
        raise DimensionError(f"system dims differ: {tA.dim} vs {tB.dim}")
    if tA.out_ports[1].mult != tB.in_ports[0].mult or tB.out_ports[0].mult != tA.in_ports[1].mult:
        raise DimensionError("internal port multiplicities of A and B do not match")
    SA, (L1, L2) = _two_port_blocks(tA, "A")
    SB, (L3, L4) = _two_port_blocks(tB, "B")
    S11, S12, S21, a = SA[0, 0], SA[0, 1], SA[1, 0], SA[1, 1]
    b, S34, S43, S44 = SB[0, 0], SB[0, 1], SB[1, 0], SB[1, 1]
    P = _inverse(np.eye(a.shape[0]) - a @ b, tol, "1 - S22^A S33^B")
    Q = _inverse(np.eye(b.shape[0]) - b @ a, tol, "1 - S33^B S22^A")
    S = np.block([
        [S11 + S12 @ b @ P @ S21, S12 @ Q @ S34],
        [S43 @ P @ S21, S44 + S43 @ a @ Q @ S34],
    ])
    L = np.vstack([
        L1 + S12 @ b @ P @ L2 + S12 @ Q @ L3,
        L4 + S43 @ P @ L2 + S43 @ a @ Q @ L3,
    ])
    d = lambda x: x.conj().T  # noqa: E731
    K = (d(L3) @ Q @ L3 + d(L3) @ Q @ b @ L2
         + d(L2) @ P @ a @ L3 + d(L2) @ P @ L2
         + d(L1) @ S12 @ Q @ L3 + d(L1) @ S12 @ Q @ b @ L2
         + d(L4) @ S43 @ P @ a @ L3 + d(L4) @ S43 @ P @ L2)
    H = tA.H + tB.H + ops.im_op(K)
    nA, nB = names
    ins = (PortSpec(f"{nA}.{tA.in_ports[0].label}", tA.in_ports[0].mult),
           PortSpec(f"{nB}.{tB.in_ports[1].label}", tB.in_ports[1].mult))
    outs = (PortSpec(f"{nA}.{tA.out_ports[0].label}", tA.out_ports[0].mult),
            PortSpec(f"{nB}.{tB.out_ports[1].label}", tB.out_ports[1].mult))
    return SLH(S, L, H, ins, outs, check=False)


# ---------------------------------------------------------------------------
# Siegel identities
# ---------------------------------------------------------------------------


def _abcd(s, n1: int):
    s = ops.as_op(s, "S")
    if s.shape[0] != s.shape[1] or not 0 < n1 < s.shape[0]:
        raise DimensionError(f"cannot split a {s.shape} operator at {n1}")
    return s[:n1, :n1], s[:n1, n1:], s[n1:, :n1], s[n1:, n1:]


def mobius(s, x, n1: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``Phi_S(X) = D + C X (1 - A X)^{-1} B`` for ``S = [[A, B], [C, D]]``
    with ``A`` of size ``n1``."""
    A, B, C, D = _abcd(s, n1)
    X = ops.as_op(x, "X")
    return D + C @ X @ _inverse(np.eye(n1) - A @ X, tol, "1 - A X") @ B


class SiegelResiduals(NamedTuple):
    isometry: float
    coisometry: float

    @property
    def max(self) -> float:
        return max(self.isometry, self.coisometry)


def siegel_check(s, x, y, n1: int, tol: float = DEFAULT_TOL) -> SiegelResiduals:
    """Residuals of the two Siegel identities

        Phi(X)^dag Phi(Y) - 1 = B^dag (1 - X^dag A^dag)^{-1} (X^dag Y - 1) (1 - A Y)^{-1} B
        Phi(X) Phi(Y)^dag - 1 = C (1 - X A)^{-1} (X Y^dag - 1) (1 - A^dag Y^dag)^{-1} C^dag
    """
    A, B, C, D = _abcd(s, n1)
    X, Y = ops.as_op(x, "X"), ops.as_op(y, "Y")
    I1, I2 = np.eye(n1), np.eye(D.shape[0])
    dg = lambda z: z.conj().T  # noqa: E731
    px, py = mobius(s, X, n1, tol), mobius(s, Y, n1, tol)
    rhs1 = (dg(B) @ _inverse(I1 - dg(X) @ dg(A), tol, "1 - X^dag A^dag")
            @ (dg(X) @ Y - I1) @ _inverse(I1 - A @ Y, tol, "1 - A Y") @ B)
    rhs2 = (C @ _inverse(I1 - X @ A, tol, "1 - X A")
            @ (X @ dg(Y) - I1) @ _inverse(I1 - dg(A) @ dg(Y), tol, "1 - A^dag Y^dag") @ dg(C))
    return SiegelResiduals(maxabs(dg(px) @ py - I2 - rhs1), maxabs(px @ dg(py) - I2 - rhs2))


# ---------------------------------------------------------------------------
# Path sums
# ---------------------------------------------------------------------------


def spectral_radius(a, iterations: int = 50, tol: float = 1e-8) -> float:
    """Spectral radius of a square operator.

    Exact eigenvalues are used up to dimension 64; above that a power
    iteration with ``iterations`` steps is run.
    """
    a = ops.as_op(a)
    n = a.shape[0]
    if n == 0:
        return 0.0
    if n <= 64:
        return float(np.max(np.abs(np.linalg.eigvals(a))))
    v = np.ones(n, dtype=np.complex128) / np.sqrt(n)
    est = 0.0
    for _ in range(iterations):
        w = a @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if abs(nrm - est) <= tol * max(nrm, 1.0):
            return float(nrm)
        est = nrm
    return float(est)


@dataclass(frozen=True)
class PathSumResult:
    slh: SLH
    terms: int
    spectral_radius: float


def path_sum_expansion(net: Network, max_path_len: int = 10_000,
                       tol: float = DEFAULT_TOL) -> PathSumResult:
    """Reduced parameters as a sum over port-to-port paths.

    The sum over paths that traverse ``k + 1`` internal channels is the
    ``k``-th Neumann term of ``(eta - S_ii)^{-1} = eta^{-1} sum_k (S_ii eta^{-1})^k``.
    Terms are added until the estimated remainder drops below ``tol``.

    Raises
    ------
    DivergentPathSum
        If the loop operator ``S_ii eta^{-1}`` has spectral radius
        ``>= 1 - tol``.
    NonConvergent
        If ``max_path_len`` terms were not enough.
    """
    t = net.slh()
    eta = adjacency(net)
    oi, ii, oe, ie, out_ports, in_ports = _slh_partition(t, eta)
    S, L = t.S, t.L
    if len(eta) == 0:
        return PathSumResult(SLH(S[np.ix_(oe, ie)], L[oe, :], t.H, in_ports, out_ports,
                                 check=False), 0, 0.0)
    eta_inv = eta.data.conj().T  # permutation
    W = S[np.ix_(oi, ii)] @ eta_inv
    rho = spectral_radius(W)
    if rho >= 1.0 - tol:
        raise DivergentPathSum(
            f"loop spectral radius {rho:.6g} is not below 1 - tol; use the exact reduction",
            spectral_radius=rho,
        )
    Sei, Sie, Li = S[np.ix_(oe, ii)], S[np.ix_(oi, ie)], L[oi, :]
    Hleft = L.conj().T @ S[:, ii]
    nrm = lambda z: np.linalg.norm(z, 2) if z.size else 0.0  # noqa: E731
    scale = max(1.0, nrm(Sei) * nrm(Sie), nrm(Sei) * nrm(Li), nrm(Hleft) * nrm(Li))
    S_acc, L_acc = S[np.ix_(oe, ie)].copy(), L[oe, :].copy()
    K_acc = np.zeros_like(t.H)
    power = np.eye(W.shape[0], dtype=np.complex128)
    for k in range(max_path_len):
        step = eta_inv @ power
        S_acc += Sei @ step @ Sie
        L_acc += Sei @ step @ Li
        K_acc += Hleft @ step @ Li
        power = W @ power
        if not power.any() or nrm(power) * scale / (1.0 - rho) <= tol:
            slh = SLH(S_acc, L_acc, t.H + ops.im_op(K_acc), in_ports, out_ports, check=False)
            return PathSumResult(slh, k + 1, rho)
    raise NonConvergent(
        f"path sum not converged after {max_path_len} terms (spectral radius {rho:.6g})"
    )


def path_sum_reduce(net: Network, max_path_len: int = 10_000, tol: float = DEFAULT_TOL) -> SLH:
    return path_sum_expansion(net, max_path_len, tol).slh


@dataclass(frozen=True)
class PathTerm:
    """One path through the network and its operator weight.

    ``kind`` is ``"S"`` for a path from an external input to an external
    output and ``"L"`` for a path from an output port (whose coupling
    operator is picked up) to an external output.  ``ports`` lists the
    visited port labels in travel order and ``length`` counts internal
    channels traversed.
    """

    kind: str
    start: str
    end: str
    ports: tuple
    length: int
    op: np.ndarray


def enumerate_paths(net: Network, max_len: int = 6) -> list:
    """Explicit enumeration of all paths using at most ``max_len`` internal
    channels.  Structurally zero scattering blocks are skipped."""
    net.require_valid()
    sigma = {e.source: e.target for e in net.edges}
    external_out = {p.label for p in net.external_outputs}
    owner_out, owner_in = {}, {}
    for c in net.components:
        for k, p in enumerate(c.slh.out_ports):
            owner_out[f"{c.name}.{p.label}"] = (c, k)
        for k, p in enumerate(c.slh.in_ports):
            owner_in[f"{c.name}.{p.label}"] = (c, k)

    def scatter(r_label):
        c, j = owner_in[r_label]
        o, i = c.slh.out_shape, c.slh.in_shape
        for k, p in enumerate(c.slh.out_ports):
            blk = c.slh.S[o.slice(k), i.slice(j)]
            if blk.any():
                yield f"{c.name}.{p.label}", blk

    terms = []

    def walk_from_output(kind, start, ports, s_label, op, length):
        if s_label in external_out:
            terms.append(PathTerm(kind, start, s_label, tuple(ports), length, op))
            return
        if length >= max_len:
            return
        r_label = sigma[s_label]
        for s2, blk in scatter(r_label):
            walk_from_output(kind, start, ports + [r_label, s2], s2, blk @ op, length + 1)

    for q in net.external_inputs:
        for s, blk in scatter(q.label):
            walk_from_output("S", q.label, [q.label, s], s, blk, 0)
    for s_label, (c, k) in owner_out.items():
        Lk = c.slh.L[c.slh.out_shape.slice(k), :]
        walk_from_output("L", s_label, [s_label], s_label, Lk, 0)
    return terms
