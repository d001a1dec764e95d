"""Command-line interface: ``slhnet {reduce,series,check,lindblad,paths}``.

Exit codes: 0 success, 1 invariant failure, 2 parse or validation error,
3 ill-posed or divergent loop (singular loop, divergent or non-convergent
path sum).
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import ops
from .dynamics import lindblad
from .errors import (DimensionError, DivergentPathSum, InvariantError, NetlistError, NetworkError,
                     NonConvergent, SingularLoop)
from .netlist import ReductionReport, load_netlist, serialize_report
from .network import Network, adjacency, build_network_V
from .ops import DEFAULT_TOL, maxabs
from .reduction import (eliminate_all, enumerate_paths, loop_sigma_min,
                        path_sum_expansion, reduced_params, spectral_radius)
from .slh import (SLH, build_G, build_M, build_V, check_ito, conjugate_G, galilean_pi_residual,
                  model_residuals, series)

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_LOOP = 0, 1, 2, 3

#: largest loop spectral radius for which ``check`` also compares the path sum
PATH_SUM_RADIUS = 0.9
#: reporting cap on enumerated path length
PATH_REPORT_LEN = 6


def _slh_residuals(t: SLH, prefix: str = "") -> dict:
    g = build_G(t)
    m = build_M(t)
    return {
        f"{prefix}unitarity": ops.unitarity_residual(t.S),
        f"{prefix}hermiticity": maxabs(t.H - t.H.conj().T),
        f"{prefix}ito": check_ito(g).max,
        f"{prefix}galilean_pi": galilean_pi_residual(m),
        f"{prefix}galilean_conjugation": maxabs(conjugate_G(g, m).data - g.data),
    }


def reduction_report(net: Network, tol: float = DEFAULT_TOL) -> ReductionReport:
    """Eliminate all internal edges and collect the invariant residuals."""
    eta = adjacency(net)
    t = net.slh()
    v_red = eliminate_all(build_network_V(net), eta, tol)
    t_red = reduced_params(t, eta, tol)
    mres = model_residuals(v_red)
    residuals = _slh_residuals(t_red)
    residuals["model_v00"] = mres["v00"]
    residuals["model_v0r"] = mres["v0r"]
    residuals["params_vs_elimination"] = maxabs(build_V(t_red).data - v_red.data)
    diagnostics = {
        "components": len(net.components),
        "internal_edges": len(net.edges),
    }
    if len(eta):
        diagnostics["loop_sigma_min"] = loop_sigma_min(t, eta)
        oi = [t.out_index(q.label) for q in eta.row_ports]
        ii = [t.in_index(q.label) for q in eta.col_ports]
        Sii = t.S[np.ix_(t.out_shape.indices(oi), t.in_shape.indices(ii))]
        diagnostics["loop_spectral_radius"] = spectral_radius(Sii @ eta.data.conj().T)
    return ReductionReport(t_red, residuals, eta.edges, diagnostics, tol)


def check_report(net: Network, tol: float = DEFAULT_TOL) -> ReductionReport:
    """Component invariants, reduction invariants and (for well-damped
    loops) agreement of the path sum with the exact reduction."""
    base = reduction_report(net, tol)
    residuals = {}
    for c in net.components:
        residuals.update(_slh_residuals(c.slh, f"{c.name}."))
    residuals.update(base.residuals)
    thresholds = {}
    rho = base.diagnostics.get("loop_spectral_radius", 0.0)
    if rho <= PATH_SUM_RADIUS:
        ps = path_sum_expansion(net, tol=tol)
        residuals["path_sum_vs_reduce"] = ps.slh.max_difference(base.reduced)
        thresholds["path_sum_vs_reduce"] = max(10 * tol, 1e-8)
    return ReductionReport(base.reduced, residuals, base.eliminated_edges, base.diagnostics,
                           tol, thresholds=thresholds)


def paths_report(net: Network, max_len: int, tol: float = DEFAULT_TOL) -> ReductionReport:
    ps = path_sum_expansion(net, max_len, tol)
    exact = reduced_params(net.slh(), adjacency(net), tol)
    listing = [{"kind": p.kind, "start": p.start, "end": p.end, "length": p.length,
                "ports": list(p.ports)}
               for p in enumerate_paths(net, min(max_len, PATH_REPORT_LEN))]
    residuals = _slh_residuals(ps.slh)
    residuals["path_sum_vs_reduce"] = ps.slh.max_difference(exact)
    diagnostics = {"loop_spectral_radius": ps.spectral_radius, "series_terms": ps.terms}
    return ReductionReport(ps.slh, residuals, adjacency(net).edges, diagnostics, tol,
                           extras={"paths": listing},
                           thresholds={"path_sum_vs_reduce": max(10 * tol, 1e-8)})


def series_report(net1: Network, net2: Network, tol: float = DEFAULT_TOL) -> ReductionReport:
    """Reduce each network, then cascade the first into the second."""
    r1, r2 = reduction_report(net1, tol), reduction_report(net2, tol)
    t = series(r2.reduced, r1.reduced)
    residuals = _slh_residuals(t)
    diagnostics = {f"{which}_{k}": v for which, r in (("first", r1), ("second", r2))
                   for k, v in r.diagnostics.items()}
    edges = tuple(r1.eliminated_edges) + tuple(r2.eliminated_edges)
    return ReductionReport(t, residuals, edges, diagnostics, tol)


def lindblad_report(net: Network, tol: float = DEFAULT_TOL) -> ReductionReport:
    base = reduction_report(net, tol)
    sup = lindblad(base.reduced)
    residuals = dict(base.residuals)
    residuals["lindblad_unital"] = maxabs(sup.apply(np.eye(sup.dim)))
    return ReductionReport(base.reduced, residuals, base.eliminated_edges, base.diagnostics,
                           tol, extras={"lindblad": sup.matrix})


def resolve_tol(cli_tol: Optional[float], doc_tol: Optional[float] = None) -> float:
    """``--tol`` beats ``QNET_TOL``, which beats the netlist option."""
    if cli_tol is not None:
        return float(cli_tol)
    env = os.environ.get("QNET_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise NetlistError([("", f"QNET_TOL={env!r} is not a number")]) from None
    return DEFAULT_TOL if doc_tol is None else float(doc_tol)


def _override_tol(cli_tol) -> Optional[float]:
    if cli_tol is not None or os.environ.get("QNET_TOL"):
        return resolve_tol(cli_tol)
    return None


def _load(path: str, cli_tol):
    override = _override_tol(cli_tol)
    doc = load_netlist(path, override)
    tol = override if override is not None else doc.tol
    if any(e.delay for e in doc.edges):
        print(f"warning: {path}: edge delays are ignored (zero-delay reduction)", file=sys.stderr)
    return doc.to_network(tol), tol


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slhnet", description="Reduce networks of quantum input-output components.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=_positive_float, default=None,
                       help="numerical tolerance (overrides QNET_TOL and the netlist option)")
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("reduce", help="eliminate all internal edges")
    p.add_argument("netlist")
    common(p)
    p = sub.add_parser("series", help="cascade the first netlist into the second")
    p.add_argument("netlist_a")
    p.add_argument("netlist_b")
    common(p)
    p = sub.add_parser("check", help="validate and run every invariant check")
    p.add_argument("netlist")
    common(p)
    p = sub.add_parser("lindblad", help="reduce, then emit the Lindblad superoperator")
    p.add_argument("netlist")
    common(p)
    p = sub.add_parser("paths", help="reduce by summing over paths")
    p.add_argument("netlist")
    p.add_argument("--max-len", type=_positive_int, default=10_000,
                   help="maximum number of internal channels a path may traverse")
    common(p)
    return parser


def _emit(data: bytes, out: Optional[str]) -> None:
    if out is None:
        buf = getattr(sys.stdout, "buffer", None)
        if buf is None:
            sys.stdout.write(data.decode("utf-8"))
        else:
            buf.write(data)
        sys.stdout.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def _run(args) -> int:
    if args.command == "series":
        net1, tol1 = _load(args.netlist_a, args.tol)
        net2, tol2 = _load(args.netlist_b, args.tol)
        report = series_report(net1, net2, min(tol1, tol2))
    else:
        net, tol = _load(args.netlist, args.tol)
        if args.command == "reduce":
            report = reduction_report(net, tol)
        elif args.command == "check":
            report = check_report(net, tol)
        elif args.command == "lindblad":
            report = lindblad_report(net, tol)
        else:
            report = paths_report(net, args.max_len, tol)
    _emit(serialize_report(report, args.format), args.out)
    if not report.passed:
        failed = [k for k in report.residuals if not report.passes(k)]
        print(f"invariant failure: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except NetlistError as exc:
        for path, msg in exc.issues:
            print(f"error: {path or '/'}: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except (NetworkError, DimensionError, InvariantError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SingularLoop as exc:
        print(f"error: singular loop: {exc}", file=sys.stderr)
        return EXIT_LOOP
    except DivergentPathSum as exc:
        print(f"error: divergent path sum: {exc}", file=sys.stderr)
        return EXIT_LOOP
    except NonConvergent as exc:
        print(f"error: path sum did not converge: {exc}", file=sys.stderr)
        return EXIT_LOOP


def entry_point() -> None:
    sys.exit(main())
