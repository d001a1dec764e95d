"""Seeded random generators for property checks."""
from __future__ import annotations

import numpy as np

from .slh import SLH, PortSpec


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(rng, shape) -> np.ndarray:
    rng = rng_from(rng)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_unitary(n: int, rng=None) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary (QR with phase-fixed ``R`` diagonal)."""
    z = complex_gaussian(rng, (n, n))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_hermitian(d: int, rng=None, scale: float = 1.0) -> np.ndarray:
    a = complex_gaussian(rng, (d, d)) * scale
    return 0.5 * (a + a.conj().T)


def random_contraction(n: int, rng=None, norm: float = 0.9) -> np.ndarray:
    """Random operator with spectral norm ``norm``."""
    a = complex_gaussian(rng, (n, n))
    return norm * a / np.linalg.norm(a, 2)


def random_slh(rng=None, dim: int = 2, mults=(1,), out_mults=None,
               l_scale: float = 1.0, h_scale: float = 1.0,
               in_labels=None, out_labels=None) -> SLH:
    """Random triple with Haar ``S``, Gaussian ``L`` and Gaussian Hermitian ``H``.

    ``mults`` gives the input-port multiplicities; ``out_mults`` defaults to
    the same list.
    """
    rng = rng_from(rng)
    out_mults = tuple(mults) if out_mults is None else tuple(out_mults)
    n = sum(mults)
    in_labels = in_labels or [f"in{k + 1}" for k in range(len(mults))]
    out_labels = out_labels or [f"out{k + 1}" for k in range(len(out_mults))]
    S = haar_unitary(n * dim, rng)
    L = complex_gaussian(rng, (n * dim, dim)) * l_scale
    H = random_hermitian(dim, rng, h_scale)
    return SLH(S, L, H,
               [PortSpec(lbl, m) for lbl, m in zip(in_labels, mults)],
               [PortSpec(lbl, m) for lbl, m in zip(out_labels, out_mults)])


def random_two_port(rng=None, dim: int = 2, l_scale: float = 1.0) -> SLH:
    """Random component with ports in1, in2 and out1, out2."""
    return random_slh(rng, dim, (1, 1), l_scale=l_scale)


def random_network(rng=None, dim: int = 2, n_edges: int = 2, ports=(2, 2)):
    """Random network of components with the given port counts and
    ``n_edges`` internal edges joining randomly chosen ports.

    Returns ``(network, edges)`` with edges as ``(source, target)`` labels.
    """
    from .network import Network

    rng = rng_from(rng)
    comps = [(f"C{k + 1}", random_slh(rng, dim, (1,) * p)) for k, p in enumerate(ports)]
    outs = [f"{name}.{p.label}" for name, t in comps for p in t.out_ports]
    ins = [f"{name}.{p.label}" for name, t in comps for p in t.in_ports]
    if n_edges >= len(outs):
        raise ValueError("need at least one external channel")
    src = rng.choice(len(outs), size=n_edges, replace=False)
    dst = rng.choice(len(ins), size=n_edges, replace=False)
    edges = [(outs[s], ins[r]) for s, r in zip(src, dst)]
    return Network(comps, edges), edges
