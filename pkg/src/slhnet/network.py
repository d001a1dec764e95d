"""Networks of SLH components joined by internal channels.

Ports are addressed by qualified labels ``"<component>.<port>"``.  Every
internal edge runs from an output port (its source) to an input port (its
range); ports not touched by any edge are external.  All orderings follow
declaration order: components as listed, ports within a component as listed
on its triple.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional

import numpy as np

from .errors import NetworkError
from .slh import SLH, ModelMatrix, PortSpec, build_V, concat, concat_slh


def qualify(component: str, port: str) -> str:
    return f"{component}.{port}"


def split_port(ref: str) -> tuple:
    """``"plant.out"`` -> ``("plant", "out")``; component names have no dots."""
    if not isinstance(ref, str) or "." not in ref:
        raise ValueError(f"port reference {ref!r} is not of the form 'component.port'")
    comp, port = ref.split(".", 1)
    if not comp or not port:
        raise ValueError(f"port reference {ref!r} is not of the form 'component.port'")
    return comp, port


@dataclass(frozen=True)
class Component:
    name: str
    slh: SLH


@dataclass(frozen=True)
class Edge:
    """Internal channel from output ``source`` to input ``target``.

    ``delay`` is an annotation only; every computation here is in the zero
    time-delay limit.
    """

    source: str
    target: str
    delay: Optional[float] = None


@dataclass(frozen=True)
class Violation:
    """One broken topology rule; ``edge`` is the offending edge index, if any."""

    rule: str
    where: str
    message: str
    edge: Optional[int] = None

    def __str__(self):
        return f"[{self.rule}] {self.where}: {self.message}"


class Network:
    """A collection of components plus internal edges.

    Construction never raises on topology problems; call :func:`validate`
    (or :meth:`require_valid`) to get them.
    """

    def __init__(self, components: Iterable, edges: Iterable = ()):
        comps = []
        for c in components:
            if not isinstance(c, Component):
                name, slh = c
                c = Component(name, slh)
            comps.append(c)
        self.components = tuple(comps)
        es = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            es.append(e)
        self.edges = tuple(es)

    def __repr__(self):
        names = ", ".join(c.name for c in self.components)
        return f"Network([{names}], {len(self.edges)} internal edges)"

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(f"no component named {name!r}")

    @property
    def dim(self) -> int:
        return self.components[0].slh.dim if self.components else 0

    @property
    def in_ports(self) -> tuple:
        return tuple(PortSpec(qualify(c.name, p.label), p.mult)
                     for c in self.components for p in c.slh.in_ports)

    @property
    def out_ports(self) -> tuple:
        return tuple(PortSpec(qualify(c.name, p.label), p.mult)
                     for c in self.components for p in c.slh.out_ports)

    @property
    def internal_outputs(self) -> tuple:
        used = {e.source for e in self.edges}
        return tuple(p for p in self.out_ports if p.label in used)

    @property
    def internal_inputs(self) -> tuple:
        used = {e.target for e in self.edges}
        return tuple(p for p in self.in_ports if p.label in used)

    @property
    def external_outputs(self) -> tuple:
        used = {e.source for e in self.edges}
        return tuple(p for p in self.out_ports if p.label not in used)

    @property
    def external_inputs(self) -> tuple:
        used = {e.target for e in self.edges}
        return tuple(p for p in self.in_ports if p.label not in used)

    def require_valid(self) -> None:
        problems = validate(self)
        if problems:
            raise NetworkError(
                "invalid network: " + "; ".join(str(v) for v in problems), problems
            )

    def slh(self) -> SLH:
        """Concatenated triple of all components, with qualified port labels."""
        self.require_valid()
        parts = [
            c.slh.relabel(
                [PortSpec(qualify(c.name, p.label), p.mult) for p in c.slh.in_ports],
                [PortSpec(qualify(c.name, p.label), p.mult) for p in c.slh.out_ports],
            )
            for c in self.components
        ]
        return reduce(concat_slh, parts)

    def with_components(self, order: Iterable[str]) -> "Network":
        """Same network with components redeclared in ``order``."""
        return Network([self.component(n) for n in order], self.edges)


def validate(net: Network) -> list:
    """Return every topology rule the network breaks (empty when valid)."""
    out = []
    if not net.components:
        return [Violation("empty", "network", "network has no components")]
    seen = set()
    for c in net.components:
        if c.name in seen:
            out.append(Violation("duplicate-component", c.name, "component name used twice"))
        seen.add(c.name)
        if not c.name or "." in c.name:
            out.append(Violation("component-name", c.name,
                                 "component names must be non-empty and contain no '.'"))
    d = net.components[0].slh.dim
    for c in net.components:
        if c.slh.dim != d:
            out.append(Violation("dim-mismatch", c.name,
                                 f"system dimension {c.slh.dim} differs from {d}"))

    outs = {p.label: p.mult for p in net.out_ports}
    ins = {p.label: p.mult for p in net.in_ports}
    src_count, dst_count = {}, {}
    for k, e in enumerate(net.edges):
        where = f"edge {k} ({e.source} -> {e.target})"
        ok = True
        if e.source not in outs:
            msg = ("is an input port, not an output" if e.source in ins
                   else "does not name an output port")
            out.append(Violation("dangling-port", where, f"source {e.source!r} {msg}", k))
            ok = False
        if e.target not in ins:
            msg = ("is an output port, not an input" if e.target in outs
                   else "does not name an input port")
            out.append(Violation("dangling-port", where, f"target {e.target!r} {msg}", k))
            ok = False
        src_count[e.source] = src_count.get(e.source, 0) + 1
        dst_count[e.target] = dst_count.get(e.target, 0) + 1
        if ok and outs[e.source] != ins[e.target]:
            out.append(Violation(
                "multiplicity", where,
                f"source multiplicity {outs[e.source]} != target multiplicity {ins[e.target]}", k))
    for port, n in list(src_count.items()) + list(dst_count.items()):
        if n > 1:
            out.append(Violation("exactly-one-channel", port,
                                 f"port is connected to {n} internal channels"))
    if not out:
        ext_in = sum(p.mult for p in net.external_inputs)
        ext_out = sum(p.mult for p in net.external_outputs)
        if ext_in != ext_out:
            out.append(Violation("external-balance", "network",
                                 f"external input multiplicity {ext_in} != output {ext_out}"))
        elif ext_in == 0:
            out.append(Violation("external-balance", "network",
                                 "network has no external channels"))
    return out


def build_network_V(net: Network) -> ModelMatrix:
    """Network model matrix: concatenation of component model matrices in
    declaration order (port labels qualified by component name)."""
    net.require_valid()
    return build_V(net.slh())


def concat_all(models: Iterable[ModelMatrix]) -> ModelMatrix:
    return reduce(concat, models)


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix:
    """Block permutation ``eta`` over internal ports.

    ``pattern[i, j] == 1`` iff internal output ``row_ports[i]`` feeds
    internal input ``col_ports[j]``.  ``data`` is the full operator with an
    identity block of size ``dim * mult`` at each such position.
    """

    pattern: np.ndarray
    row_ports: tuple
    col_ports: tuple
    dim: int

    @property
    def data(self) -> np.ndarray:
        rdims = [p.mult * self.dim for p in self.row_ports]
        cdims = [p.mult * self.dim for p in self.col_ports]
        roff = np.concatenate(([0], np.cumsum(rdims, dtype=int)))
        coff = np.concatenate(([0], np.cumsum(cdims, dtype=int)))
        out = np.zeros((int(roff[-1]), int(coff[-1])), dtype=np.complex128)
        for i, j in zip(*np.nonzero(self.pattern)):
            out[roff[i]:roff[i + 1], coff[j]:coff[j + 1]] = np.eye(rdims[i])
        return out

    @property
    def edges(self) -> tuple:
        return tuple((self.row_ports[i].label, self.col_ports[j].label)
                     for i, j in zip(*np.nonzero(self.pattern)))

    def __len__(self):
        return len(self.row_ports)


def adjacency(net: Network) -> AdjacencyMatrix:
    net.require_valid()
    rows, cols = net.internal_outputs, net.internal_inputs
    ridx = {p.label: k for k, p in enumerate(rows)}
    cidx = {p.label: k for k, p in enumerate(cols)}
    pattern = np.zeros((len(rows), len(cols)), dtype=int)
    for e in net.edges:
        pattern[ridx[e.source], cidx[e.target]] = 1
    return AdjacencyMatrix(pattern, rows, cols, net.dim)


def make_adjacency(edges, out_ports, in_ports, dim: int) -> AdjacencyMatrix:
    """Adjacency over explicit ``(source, target)`` label pairs, with rows and
    columns ordered as the labels appear in ``out_ports`` / ``in_ports``."""
    src = {s for s, _ in edges}
    dst = {r for _, r in edges}
    rows = tuple(p for p in out_ports if p.label in src)
    cols = tuple(p for p in in_ports if p.label in dst)
    if len(rows) != len(edges) or len(cols) != len(edges):
        raise NetworkError("edges must pair distinct existing ports one to one")
    ridx = {p.label: k for k, p in enumerate(rows)}
    cidx = {p.label: k for k, p in enumerate(cols)}
    pattern = np.zeros((len(rows), len(cols)), dtype=int)
    for s, r in edges:
        pattern[ridx[s], cidx[r]] = 1
    return AdjacencyMatrix(pattern, rows, cols, dim)
