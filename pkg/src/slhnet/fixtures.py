"""Deterministic example netlists.

``python3 -m slhnet.fixtures DIR`` writes each one to ``DIR/<name>.json``.
"""
from __future__ import annotations

import pathlib
import sys

import numpy as np

from .components import ComponentSpec, fifty_fifty, rotation
from .netlist import NetlistDocument, document_from_specs, serialize_netlist
from .ops import annihilator


def _custom(S, L, H, ins=None, outs=None) -> ComponentSpec:
    params = {"S": np.asarray(S, dtype=complex), "L": np.asarray(L, dtype=complex),
              "H": np.asarray(H, dtype=complex)}
    if ins is not None:
        params["in_ports"] = tuple(ins)
    if outs is not None:
        params["out_ports"] = tuple(outs)
    return ComponentSpec("custom", params)


def single_cavity() -> NetlistDocument:
    return document_from_specs([("cav", ComponentSpec("cavity", {"gamma": 1.0}, dim=3))])


def series_scalar() -> NetlistDocument:
    """Two one-dimensional components in cascade."""
    c1 = _custom([[1.0]], [[0.8]], [[0.0]])
    c2 = _custom([[np.exp(0.3j)]], [[0.5 + 0.2j]], [[0.0]])
    return document_from_specs([("C1", c1), ("C2", c2)], [("C1.out", "C2.in")])


def cascade_cavities(gamma1: float = 1.0, gamma2: float = 2.0, d: int = 2) -> NetlistDocument:
    """Cavity-into-cavity cascade on the joint space ``C^d (x) C^d``."""
    c1 = ComponentSpec("cavity", {"gamma": gamma1}, dim=d, embed={"dims": [d, d], "index": 0})
    c2 = ComponentSpec("cavity", {"gamma": gamma2}, dim=d, embed={"dims": [d, d], "index": 1})
    return document_from_specs([("cav1", c1), ("cav2", c2)], [("cav1.out", "cav2.in")])


def figure2() -> NetlistDocument:
    """Three components with a self-loop on ``C1`` and ``C3`` feeding ``C1``."""
    d = 2
    a = annihilator(d)
    eye = np.eye(d)
    c1 = _custom(np.kron(rotation(1.0), eye), np.vstack([np.sqrt(0.5) * a, 0.3 * a]),
                 0.2 * a.conj().T @ a, ["r1", "r2"], ["s1", "s2"])
    c2 = ComponentSpec("cavity", {"gamma": 1.0}, dim=d)
    c3 = ComponentSpec("beam_splitter", {"T": fifty_fifty()}, dim=d)
    return document_from_specs(
        [("C1", c1), ("C2", c2), ("C3", c3)],
        [("C1.s1", "C1.r1"), ("C3.out1", "C1.r2")],
    )


def figure6() -> NetlistDocument:
    """Cavity plant inside a splitter loop."""
    d = 3
    a = annihilator(d)
    plant = ComponentSpec("cavity", {"gamma": 1.0, "h0": 0.5 * a.conj().T @ a}, dim=d)
    bs = ComponentSpec("beam_splitter", {"T": rotation(0.7)}, dim=d)
    return document_from_specs([("bs", bs), ("plant", plant)],
                               [("bs.out2", "plant.in"), ("plant.out", "bs.in2")])


def figure7() -> NetlistDocument:
    """Two two-port components in crossed feedback."""
    d = 2
    a = annihilator(d)
    eye = np.eye(d)
    A = _custom(np.kron(rotation(0.5), eye), np.vstack([0.7 * a, 0.2 * a]), 0.1 * a.conj().T @ a)
    T = np.array([[np.cos(1.1), 1j * np.sin(1.1)], [1j * np.sin(1.1), np.cos(1.1)]])
    B = _custom(np.kron(T, eye), np.vstack([0.3 * a, 0.5 * a.conj().T]), np.zeros((d, d)))
    return document_from_specs([("A", A), ("B", B)],
                               [("A.out2", "B.in1"), ("B.out1", "A.in2")])


def perfect_mirror() -> NetlistDocument:
    """Self-loop through a perfectly reflecting channel: the reduction is ill-posed."""
    m = _custom(np.eye(2), np.zeros((2, 1)), np.zeros((1, 1)), ["in1", "in2"], ["out1", "out2"])
    return document_from_specs([("mirror", m)], [("mirror.out2", "mirror.in2")])


def fifty_fifty_loop() -> NetlistDocument:
    """50/50 splitter with its second output fed back into its second input."""
    bs = ComponentSpec("beam_splitter", {"T": fifty_fifty()}, dim=1)
    return document_from_specs([("bs", bs)], [("bs.out2", "bs.in2")])


FIXTURES = {
    "single_cavity": single_cavity,
    "series": series_scalar,
    "cascade": cascade_cavities,
    "figure2": figure2,
    "figure6": figure6,
    "figure7": figure7,
    "perfect_mirror": perfect_mirror,
    "fifty_fifty_loop": fifty_fifty_loop,
}


def write_fixtures(directory) -> list:
    out = pathlib.Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, make in FIXTURES.items():
        p = out / f"{name}.json"
        p.write_bytes(serialize_netlist(make()))
        paths.append(p)
    return paths


if __name__ == "__main__":
    for p in write_fixtures(sys.argv[1] if len(sys.argv) > 1 else "netlists"):
        print(p)
