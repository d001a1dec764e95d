"""Factories for standard components and the example network topologies."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import ops
from .errors import DimensionError, InvariantError
from .network import Network
from .ops import DEFAULT_TOL
from .slh import SLH, PortSpec

KINDS = ("cavity", "beam_splitter", "passthrough", "static_hamiltonian", "custom")


def cavity(gamma: float, d: int, h0=None, tol: float = DEFAULT_TOL) -> SLH:
    """Single-mode cavity truncated to ``d`` levels: ``(1, sqrt(gamma) a, h0)``."""
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma < 0:
        raise InvariantError(f"cavity decay rate must be finite and >= 0, got {gamma}")
    a = ops.annihilator(d)
    H = np.zeros((d, d)) if h0 is None else ops.as_op(h0, "h0")
    if H.shape != (d, d):
        raise DimensionError(f"h0 must be {d}x{d}, got {H.shape}")
    return SLH(np.eye(d), np.sqrt(gamma) * a, H, tol=tol)


def beam_splitter(T, d: int = 1, tol: float = DEFAULT_TOL) -> SLH:
    """Static two-port splitter ``(T kron 1_d, 0, 0)``; ports in1, in2, out1, out2."""
    T = ops.as_op(T, "T")
    if T.shape != (2, 2):
        raise DimensionError(f"beam splitter matrix must be 2x2, got {T.shape}")
    if not ops.is_unitary(T, tol):
        raise InvariantError(f"beam splitter matrix is not unitary "
                             f"(residual {ops.unitarity_residual(T):.3e})")
    if int(d) != d or d < 1:
        raise ValueError(f"system dimension must be a positive integer, got {d}")
    d = int(d)
    return SLH(np.kron(T, np.eye(d)), np.zeros((2 * d, d)), np.zeros((d, d)),
               ["in1", "in2"], ["out1", "out2"], tol=tol)


def fifty_fifty() -> np.ndarray:
    """Real orthogonal 50/50 splitter matrix."""
    return np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def passthrough(d: int = 1, n: int = 1) -> SLH:
    """``(1, 0, 0)`` on ``n`` channels."""
    return SLH(np.eye(d * n), np.zeros((d * n, d)), np.zeros((d, d)))


def static_hamiltonian(H, n: int = 1, tol: float = DEFAULT_TOL) -> SLH:
    """Component with trivial field coupling and Hamiltonian ``H``."""
    H = ops.as_op(H, "H")
    d = H.shape[0]
    return SLH(np.eye(d * n), np.zeros((d * n, d)), H, tol=tol)


def custom(S, L, H, in_ports=None, out_ports=None, tol: float = DEFAULT_TOL) -> SLH:
    return SLH(S, L, H, in_ports, out_ports, tol=tol)


def embed_slh(t: SLH, dims: Sequence[int], index: int) -> SLH:
    """Lift ``t`` onto factor ``index`` of the tensor product ``dims``."""
    dims = [int(x) for x in dims]
    if t.dim != dims[index]:
        raise DimensionError(f"component dim {t.dim} does not match factor dim {dims[index]}")
    d, n = t.dim, t.cdim
    D = int(np.prod(dims))
    S = np.zeros((n * D, n * D), dtype=np.complex128)
    L = np.zeros((n * D, D), dtype=np.complex128)
    for k in range(n):
        L[k * D:(k + 1) * D] = ops.embed(t.channel(k), dims, index)
        for j in range(n):
            S[k * D:(k + 1) * D, j * D:(j + 1) * D] = ops.embed(
                t.S[k * d:(k + 1) * d, j * d:(j + 1) * d], dims, index)
    return SLH(S, L, ops.embed(t.H, dims, index), t.in_ports, t.out_ports, check=False)


@dataclass(frozen=True)
class ComponentSpec:
    """Declarative description of a component.

    ``params`` by kind:

    * ``cavity``: ``gamma``, optional ``h0``
    * ``beam_splitter``: ``T``
    * ``passthrough``: optional ``n``
    * ``static_hamiltonian``: ``H``, optional ``n``
    * ``custom``: ``S``, ``L``, ``H``, optional ``in_ports``/``out_ports``

    ``embed`` optionally lifts the result onto one factor of a joint space,
    as ``{"dims": [...], "index": k}``.
    """

    kind: str
    params: dict = field(default_factory=dict)
    dim: Optional[int] = None
    embed: Optional[dict] = None

    def build(self, tol: float = DEFAULT_TOL) -> SLH:
        p = self.params
        if self.kind == "cavity":
            t = cavity(p["gamma"], self.dim, p.get("h0"), tol)
        elif self.kind == "beam_splitter":
            t = beam_splitter(p["T"], self.dim or 1, tol)
        elif self.kind == "passthrough":
            t = passthrough(self.dim or 1, int(p.get("n", 1)))
        elif self.kind == "static_hamiltonian":
            t = static_hamiltonian(p["H"], int(p.get("n", 1)), tol)
        elif self.kind == "custom":
            t = custom(p["S"], p["L"], p["H"], p.get("in_ports"), p.get("out_ports"), tol)
        else:
            raise ValueError(f"unknown component kind {self.kind!r}")
        if self.embed is not None:
            t = embed_slh(t, self.embed["dims"], int(self.embed["index"]))
        return t


# ---------------------------------------------------------------------------
# Example topologies
# ---------------------------------------------------------------------------


def _single_port(t: SLH, what: str):
    if len(t.in_ports) != 1 or len(t.out_ports) != 1:
        raise DimensionError(f"{what} must have a single input and a single output port")
    return t.in_ports[0].label, t.out_ports[0].label


def series_network(t1: SLH, t2: SLH, names=("C1", "C2")) -> Network:
    """``t1``'s output feeds ``t2``'s input."""
    _, o1 = _single_port(t1, "first component")
    i2, _ = _single_port(t2, "second component")
    a, b = names
    return Network([(a, t1), (b, t2)], [(f"{a}.{o1}", f"{b}.{i2}")])


def figure6_network(plant: SLH, T, tol: float = DEFAULT_TOL) -> Network:
    """Plant in a splitter loop.

    The splitter ``bs`` (declared first) sends its second output into the
    plant, whose output returns to the splitter's second input.  External
    ports are ``bs.in1`` and ``bs.out1``.
    """
    i, o = _single_port(plant, "plant")
    bs = beam_splitter(T, plant.dim, tol)
    return Network([("bs", bs), ("plant", plant)],
                   [("bs.out2", f"plant.{i}"), (f"plant.{o}", "bs.in2")])


def figure7_network(tA: SLH, tB: SLH) -> Network:
    """Two two-ports in crossed feedback: ``A``'s second output feeds ``B``'s
    first input and ``B``'s first output feeds ``A``'s second input."""
    for t, nm in ((tA, "A"), (tB, "B")):
        if len(t.in_ports) != 2 or len(t.out_ports) != 2:
            raise DimensionError(f"{nm} must have exactly two input and two output ports")
    return Network([("A", tA), ("B", tB)], [
        (f"A.{tA.out_ports[1].label}", f"B.{tB.in_ports[0].label}"),
        (f"B.{tB.out_ports[0].label}", f"A.{tA.in_ports[1].label}"),
    ])


def figure2_network(c1: SLH, c2: SLH, c3: SLH) -> Network:
    """Three components: ``C1`` and ``C3`` two-port, ``C2`` one-port.

    Internal edges run from ``C1``'s first output to its first input and from
    ``C3``'s first output into ``C1``'s second input.  External inputs are
    ``C2``'s input and both inputs of ``C3``; external outputs are ``C1``'s
    second output, ``C2``'s output and ``C3``'s second output.
    """
    if len(c1.in_ports) != 2 or len(c1.out_ports) != 2:
        raise DimensionError("C1 must have two input and two output ports")
    if len(c3.in_ports) != 2 or len(c3.out_ports) != 2:
        raise DimensionError("C3 must have two input and two output ports")
    _single_port(c2, "C2")
    return Network([("C1", c1), ("C2", c2), ("C3", c3)], [
        (f"C1.{c1.out_ports[0].label}", f"C1.{c1.in_ports[0].label}"),
        (f"C3.{c3.out_ports[0].label}", f"C1.{c1.in_ports[1].label}"),
    ])


def cascade_cavities(gamma1: float, gamma2: float, d: int, h1=None, h2=None) -> tuple:
    """Two cavities on the joint space ``C^d (x) C^d``; returns ``(t1, t2)``."""
    t1 = embed_slh(cavity(gamma1, d, h1), [d, d], 0)
    t2 = embed_slh(cavity(gamma2, d, h2), [d, d], 1)
    return t1, t2


def perfect_mirror(d: int = 1) -> Network:
    """Self-loop through a channel that reflects perfectly back into itself.

    ``S = 1`` on two channels with ``out2 -> in2`` makes ``1 - S_22`` zero,
    so the zero-delay reduction is ill-posed.
    """
    t = SLH(np.eye(2 * d), np.zeros((2 * d, d)), np.zeros((d, d)),
            [PortSpec("in1"), PortSpec("in2")], [PortSpec("out1"), PortSpec("out2")])
    return Network([("mirror", t)], [("mirror.out2", "mirror.in2")])
