"""JSON netlist documents and reduction reports.

Netlist layout (``format_version`` ``"1"``)::

    {
      "format_version": "1",
      "components": [{"name": "plant", "spec": {"kind": "cavity", "dim": 3,
                                                "params": {"gamma": 1.0}}}],
      "edges": [{"from": "bs.out2", "to": "plant.in", "delay": 0.0}],
      "options": {"tol": 1e-10}
    }

A complex scalar is ``[re, im]`` (a bare number is read as real) and a
matrix is a list of rows of scalars.  Output is canonical: keys sorted,
every float written with 17 significant digits, matrix entries always as
``[re, im]`` pairs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .components import KINDS, ComponentSpec
from .errors import NetlistError, SLHError
from .network import Component, Edge, Network, split_port, validate
from .ops import DEFAULT_TOL
from .slh import SLH, PortSpec

FORMAT_VERSION = "1"

_MATRIX_PARAMS = {"h0", "T", "H", "S", "L"}
_REAL_PARAMS = {"gamma"}
_INT_PARAMS = {"n"}
_PORT_PARAMS = {"in_ports", "out_ports"}
_ALLOWED_PARAMS = {
    "cavity": {"gamma", "h0"},
    "beam_splitter": {"T"},
    "passthrough": {"n"},
    "static_hamiltonian": {"H", "n"},
    "custom": {"S", "L", "H", "in_ports", "out_ports"},
}
_REQUIRED_PARAMS = {
    "cavity": {"gamma"},
    "beam_splitter": {"T"},
    "passthrough": set(),
    "static_hamiltonian": {"H"},
    "custom": {"S", "L", "H"},
}


# ---------------------------------------------------------------------------
# Canonical JSON emitter
# ---------------------------------------------------------------------------


def format_float(x: float) -> str:
    """17 significant digits in scientific notation; exact for doubles."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    if x == 0.0:
        x = 0.0  # fold -0.0
    return format(x, ".16e")


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(obj[k], indent, level + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj, indent: int = 2) -> str:
    return _emit(obj, indent, 0) + "\n"


def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_scalar(v, path: str, issues: list) -> complex:
    if isinstance(v, bool):
        issues.append((path, "expected a number or [re, im]"))
        return 0j
    if isinstance(v, (int, float)):
        return complex(v)
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
        return complex(v[0], v[1])
    issues.append((path, "expected a number or [re, im]"))
    return 0j


def decode_matrix(v, path: str, issues: list) -> Optional[np.ndarray]:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        issues.append((path, "expected a non-empty matrix given as a list of rows"))
        return None
    width = len(v[0])
    if any(len(r) != width for r in v) or width == 0:
        issues.append((path, "matrix rows must be non-empty and of equal length"))
        return None
    before = len(issues)
    out = np.array([[decode_scalar(z, f"{path}/{i}/{j}", issues) for j, z in enumerate(r)]
                    for i, r in enumerate(v)], dtype=np.complex128)
    if len(issues) > before:
        return None
    if not np.all(np.isfinite(out)):
        issues.append((path, "matrix has non-finite entries"))
        return None
    return out


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComponentEntry:
    name: str
    spec: ComponentSpec


@dataclass(frozen=True, eq=False)
class NetlistDocument:
    format_version: str
    components: tuple
    edges: tuple
    options: dict = field(default_factory=dict)

    @property
    def tol(self) -> float:
        return float(self.options.get("tol", DEFAULT_TOL))

    def to_network(self, tol: Optional[float] = None) -> Network:
        tol = self.tol if tol is None else tol
        return Network([Component(c.name, c.spec.build(tol)) for c in self.components],
                       self.edges)

    def equals(self, other: "NetlistDocument") -> bool:
        """Structural equality with exact comparison of all numbers."""
        return serialize_netlist(self) == serialize_netlist(other)


def _ports_to_json(ports) -> list:
    out = []
    for p in ports:
        p = p if isinstance(p, PortSpec) else PortSpec(*p) if isinstance(p, tuple) else PortSpec(p)
        out.append({"label": p.label, "mult": p.mult})
    return out


def _param_to_json(key, value):
    if key in _MATRIX_PARAMS:
        return encode_matrix(value)
    if key in _PORT_PARAMS:
        return _ports_to_json(value)
    if key in _INT_PARAMS:
        return int(value)
    return float(value)


def netlist_to_obj(doc: NetlistDocument) -> dict:
    comps = []
    for c in doc.components:
        spec = {"kind": c.spec.kind,
                "params": {k: _param_to_json(k, v) for k, v in c.spec.params.items()}}
        if c.spec.dim is not None:
            spec["dim"] = int(c.spec.dim)
        if c.spec.embed is not None:
            spec["embed"] = {"dims": [int(x) for x in c.spec.embed["dims"]],
                             "index": int(c.spec.embed["index"])}
        comps.append({"name": c.name, "spec": spec})
    edges = []
    for e in doc.edges:
        item = {"from": e.source, "to": e.target}
        if e.delay is not None:
            item["delay"] = float(e.delay)
        edges.append(item)
    options = {k: float(v) for k, v in doc.options.items()}
    return {"format_version": doc.format_version, "components": comps,
            "edges": edges, "options": options}


def serialize_netlist(doc: NetlistDocument) -> bytes:
    return dumps_canonical(netlist_to_obj(doc)).encode("utf-8")


def _parse_ports(v, path, issues):
    if not isinstance(v, list) or not v:
        issues.append((path, "expected a non-empty list of ports"))
        return None
    out = []
    for k, p in enumerate(v):
        try:
            if isinstance(p, str):
                out.append(PortSpec(p))
            elif isinstance(p, dict) and set(p) <= {"label", "mult"} and "label" in p:
                out.append(PortSpec(p["label"], p.get("mult", 1)))
            else:
                issues.append((f"{path}/{k}", "expected a label or {label, mult}"))
        except (ValueError, TypeError) as exc:
            issues.append((f"{path}/{k}", str(exc)))
    return tuple(out)


def _parse_spec(v, path, issues) -> Optional[ComponentSpec]:
    if not isinstance(v, dict):
        issues.append((path, "expected an object"))
        return None
    unknown = set(v) - {"kind", "dim", "params", "embed"}
    for k in sorted(unknown):
        issues.append((f"{path}/{k}", "unknown key"))
    kind = v.get("kind")
    if kind not in KINDS:
        issues.append((f"{path}/kind", f"unknown component kind {kind!r}; expected one of {list(KINDS)}"))
        return None
    dim = v.get("dim")
    if dim is not None and (isinstance(dim, bool) or not isinstance(dim, int) or dim < 1):
        issues.append((f"{path}/dim", "expected a positive integer"))
        dim = None
    if kind == "cavity" and dim is None:
        issues.append((f"{path}/dim", "cavity needs a truncation dimension"))
    raw = v.get("params", {})
    if not isinstance(raw, dict):
        issues.append((f"{path}/params", "expected an object"))
        return None
    params = {}
    for key in sorted(raw):
        ppath = f"{path}/params/{key}"
        val = raw[key]
        if key not in _ALLOWED_PARAMS[kind]:
            issues.append((ppath, f"parameter not accepted by kind {kind!r}"))
        elif key in _MATRIX_PARAMS:
            m = decode_matrix(val, ppath, issues)
            if m is not None:
                params[key] = m
        elif key in _PORT_PARAMS:
            ports = _parse_ports(val, ppath, issues)
            if ports is not None:
                params[key] = ports
        elif key in _INT_PARAMS:
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                issues.append((ppath, "expected a positive integer"))
            else:
                params[key] = val
        elif key in _REAL_PARAMS:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                issues.append((ppath, "expected a real number"))
            else:
                params[key] = float(val)
    for key in sorted(_REQUIRED_PARAMS[kind] - set(raw)):
        issues.append((f"{path}/params/{key}", "missing required parameter"))
    embed = v.get("embed")
    if embed is not None:
        ok = (isinstance(embed, dict) and set(embed) == {"dims", "index"}
              and isinstance(embed["dims"], list) and embed["dims"]
              and all(isinstance(x, int) and not isinstance(x, bool) and x >= 1
                      for x in embed["dims"])
              and isinstance(embed["index"], int) and not isinstance(embed["index"], bool)
              and 0 <= embed["index"] < len(embed["dims"]))
        if not ok:
            issues.append((f"{path}/embed", "expected {dims: [positive ints], index: valid factor}"))
            embed = None
    return ComponentSpec(kind, params, dim, embed)


def _json_error(exc: json.JSONDecodeError) -> NetlistError:
    return NetlistError([("", f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")])


def parse_netlist(text, tol: Optional[float] = None) -> NetlistDocument:
    """Parse and validate a netlist.

    Every problem found is collected into a single :class:`NetlistError`.
    Components are built (so matrix invariants are checked) and the
    resulting network topology is validated.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise NetlistError([("", f"not UTF-8: {exc}")]) from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _json_error(exc) from None
    issues = []
    if not isinstance(obj, dict):
        raise NetlistError([("", "top level must be an object")])
    for k in sorted(set(obj) - {"format_version", "components", "edges", "options"}):
        issues.append((f"/{k}", "unknown key"))
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        issues.append(("/format_version", f"unsupported format version {version!r}; expected {FORMAT_VERSION!r}"))

    options = obj.get("options", {})
    if not isinstance(options, dict):
        issues.append(("/options", "expected an object"))
        options = {}
    opts = {}
    for k in sorted(options):
        v = options[k]
        if k != "tol":
            issues.append((f"/options/{k}", "unknown option"))
        elif isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            issues.append(("/options/tol", "expected a positive number"))
        else:
            opts["tol"] = float(v)
    build_tol = tol if tol is not None else opts.get("tol", DEFAULT_TOL)

    comps_raw = obj.get("components")
    entries = []
    built = []
    if not isinstance(comps_raw, list) or not comps_raw:
        issues.append(("/components", "expected a non-empty list"))
        comps_raw = []
    for k, c in enumerate(comps_raw):
        path = f"/components/{k}"
        if not isinstance(c, dict):
            issues.append((path, "expected an object"))
            continue
        for key in sorted(set(c) - {"name", "spec"}):
            issues.append((f"{path}/{key}", "unknown key"))
        name = c.get("name")
        if not isinstance(name, str) or not name:
            issues.append((f"{path}/name", "expected a non-empty string"))
            continue
        before = len(issues)
        spec = _parse_spec(c.get("spec"), f"{path}/spec", issues)
        if spec is None or len(issues) > before:
            continue
        try:
            built.append(Component(name, spec.build(build_tol)))
        except (SLHError, ValueError, KeyError) as exc:
            issues.append((f"{path}/spec", str(exc)))
            continue
        entries.append(ComponentEntry(name, spec))

    edges_raw = obj.get("edges", [])
    edges = []
    if not isinstance(edges_raw, list):
        issues.append(("/edges", "expected a list"))
        edges_raw = []
    for k, e in enumerate(edges_raw):
        path = f"/edges/{k}"
        if not isinstance(e, dict):
            issues.append((path, "expected an object"))
            continue
        for key in sorted(set(e) - {"from", "to", "delay"}):
            issues.append((f"{path}/{key}", "unknown key"))
        ok = True
        for key in ("from", "to"):
            try:
                split_port(e.get(key))
            except ValueError as exc:
                issues.append((f"{path}/{key}", str(exc)))
                ok = False
        delay = e.get("delay")
        if delay is not None and (isinstance(delay, bool) or not isinstance(delay, (int, float))
                                  or delay < 0):
            issues.append((f"{path}/delay", "expected a non-negative number"))
            ok = False
        if ok:
            edges.append(Edge(e["from"], e["to"], None if delay is None else float(delay)))

    if issues:
        raise NetlistError(issues)
    for v in validate(Network(built, edges)):
        path = f"/edges/{v.edge}" if v.edge is not None else (
            "/components" if v.rule in ("duplicate-component", "component-name", "dim-mismatch",
                                        "empty") else "/edges")
        issues.append((path, f"[{v.rule}] {v.message}"))
    if issues:
        raise NetlistError(issues)
    return NetlistDocument(FORMAT_VERSION, tuple(entries), tuple(edges), opts)


def load_netlist(path, tol: Optional[float] = None) -> NetlistDocument:
    with open(path, "rb") as fh:
        return parse_netlist(fh.read(), tol)


def document_from_specs(components, edges=(), options=None) -> NetlistDocument:
    """Build a document from ``(name, ComponentSpec)`` pairs and edges."""
    entries = tuple(ComponentEntry(n, s) for n, s in components)
    es = tuple(e if isinstance(e, Edge) else Edge(*e) for e in edges)
    return NetlistDocument(FORMAT_VERSION, entries, es, dict(options or {}))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ReductionReport:
    """Outcome of a reduction with its invariant residuals.

    ``residuals`` maps invariant names to norms; each passes when it is at
    most its entry in ``thresholds`` (default ``tol``).  ``extras`` carries
    command-specific payloads (e.g. a superoperator matrix or a path listing).
    """

    reduced: SLH
    residuals: dict
    eliminated_edges: tuple
    diagnostics: dict
    tol: float
    extras: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    def threshold(self, name: str) -> float:
        return float(self.thresholds.get(name, self.tol))

    def passes(self, name: str) -> bool:
        return self.residuals[name] <= self.threshold(name)

    @property
    def passed(self) -> bool:
        return all(self.passes(k) for k in self.residuals)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return encode_matrix(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    return v


def report_to_obj(r: ReductionReport) -> dict:
    t = r.reduced
    diag = dict(r.diagnostics)
    diag["tol"] = float(r.tol)
    diag["in_ports"] = _ports_to_json(t.in_ports)
    diag["out_ports"] = _ports_to_json(t.out_ports)
    diag["dim"] = t.dim
    obj = {
        "reduced": {"S": encode_matrix(t.S), "L": encode_matrix(t.L), "H": encode_matrix(t.H)},
        "residuals": {k: float(v) for k, v in r.residuals.items()},
        "thresholds": {k: r.threshold(k) for k in r.residuals},
        "eliminated_edges": [[s, d] for s, d in r.eliminated_edges],
        "diagnostics": _jsonable(diag),
    }
    for k, v in r.extras.items():
        obj[k] = _jsonable(v)
    return obj


def _fmt_complex(z: complex) -> str:
    return f"{z.real:+.6e}{z.imag:+.6e}j"


def _text_matrix(name, a) -> list:
    lines = [f"{name} ({a.shape[0]}x{a.shape[1]}):"]
    for row in a:
        lines.append("  " + "  ".join(_fmt_complex(z) for z in row))
    return lines


def report_to_text(r: ReductionReport) -> str:
    t = r.reduced
    lines = [f"reduced model: dim={t.dim}, channels={t.cdim}",
             "inputs:  " + ", ".join(f"{p.label}(x{p.mult})" for p in t.in_ports),
             "outputs: " + ", ".join(f"{p.label}(x{p.mult})" for p in t.out_ports)]
    if r.eliminated_edges:
        lines.append("eliminated edges: " + ", ".join(f"{s} -> {d}" for s, d in r.eliminated_edges))
    else:
        lines.append("eliminated edges: none")
    lines.append("")
    lines.append(f"invariant residuals (tol {r.tol:.1e}):")
    width = max((len(k) for k in r.residuals), default=0)
    for k, v in r.residuals.items():
        verdict = "PASS" if r.passes(k) else "FAIL"
        lines.append(f"  {k:<{width}}  {v:.3e}  <= {r.threshold(k):.1e}  {verdict}")
    if r.diagnostics:
        lines.append("")
        lines.append("diagnostics:")
        for k, v in r.diagnostics.items():
            if isinstance(v, float):
                lines.append(f"  {k}: {v:.6e}")
            elif not isinstance(v, (list, dict, np.ndarray)):
                lines.append(f"  {k}: {v}")
    paths = r.extras.get("paths")
    if paths:
        lines.append("")
        lines.append(f"paths ({len(paths)}):")
        for p in paths:
            lines.append(f"  [{p['kind']}] len {p['length']}: " + " -> ".join(p["ports"]))
    lines.append("")
    lines += _text_matrix("S", t.S)
    lines += _text_matrix("L", t.L)
    lines += _text_matrix("H", t.H)
    for k, v in r.extras.items():
        if isinstance(v, np.ndarray):
            lines += _text_matrix(k, v)
    return "\n".join(lines) + "\n"


def serialize_report(r: ReductionReport, mode: str = "json") -> bytes:
    if mode == "json":
        return dumps_canonical(report_to_obj(r)).encode("utf-8")
    if mode == "text":
        return report_to_text(r).encode("utf-8")
    raise ValueError(f"unknown report mode {mode!r}")


def parse_report(text) -> dict:
    """Read a json report back, decoding the reduced matrices to arrays."""
    obj = json.loads(text)
    issues = []
    red = {k: decode_matrix(v, f"/reduced/{k}", issues) for k, v in obj["reduced"].items()}
    if issues:
        raise NetlistError(issues)
    obj["reduced"] = red
    return obj
