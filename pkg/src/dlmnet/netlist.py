"""Line-oriented netlist format for DLM networks.

Example::

    # Mach-Zehnder interferometer
    param alpha 0.99
    param mode deterministic
    source in 2
    proc bs1 beamsplitter
    passive r0 rotation 0
    passive r1 rotation 30
    proc bs2 beamsplitter
    wire in.0 -> bs1.0
    wire in.1 -> bs1.1
    wire bs1.0 -> r0.0
    wire bs1.1 -> r1.0
    wire r0.0 -> bs2.0
    wire r1.0 -> bs2.1
    sink N2 from bs2.0
    sink N3 from bs2.1
    tap N0 from bs1.0
    tap N1 from bs1.1
    input in.0 weight 1 phase 0

Statements:

``param alpha|mode|seed VALUE``
``source ID CHANNELS``
``proc ID beamsplitter|hadamard|cnot``
``proc ID hadamard-lift QUBIT`` (0 = least significant qubit)
``proc ID matrix NUM_EVENT_TYPES MESSAGE_LEN M00 M01 ...`` (row-major)
``passive ID rotation DEGREES``
``passive ID matrix N M00 M01 ...``
``wire ID.CH -> ID.CH``
``sink ID from ID.CH`` and ``tap ID from ID.CH``
``input ID.CH weight W phase DEGREES`` or ``input ID.CH weight W payload V0 V1 ...``
"""

from __future__ import annotations

import graphlib
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DlmError
from .network import Network, OutputMode, Processor
from .transforms import (
    HADAMARD,
    Transform,
    beam_splitter_transform,
    cnot_transform,
    hadamard_transform,
    lift_single_qubit,
    plane_rotation,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*\Z")
_PORT = re.compile(r"([A-Za-z_][A-Za-z0-9_\-]*)\.(\d+)\Z")
_TOKEN = re.compile(r"\S+")

PROC_KINDS = ("beamsplitter", "hadamard", "hadamard-lift", "cnot", "matrix")
PASSIVE_KINDS = ("rotation", "matrix")
PARAMS = ("alpha", "mode", "seed")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"


class NetlistError(DlmError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


@dataclass
class Declaration:
    statement: str  # source | proc | passive | sink | tap
    id: str
    kind: str = ""
    args: tuple = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass
class Wire:
    src: tuple[str, int]
    dst: tuple[str, int]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass
class InputSpec:
    port: tuple[str, int]
    weight: float
    phase: float | None = None
    payload: tuple[float, ...] | None = None
    line: int = field(default=0, compare=False)

    def vector(self) -> np.ndarray:
        if self.payload is not None:
            return np.array(self.payload, dtype=np.float64)
        r = math.radians(self.phase)
        return np.array([math.cos(r), math.sin(r)])


@dataclass
class NetlistDocument:
    params: dict = field(default_factory=dict)
    declarations: list[Declaration] = field(default_factory=list)
    wires: list[Wire] = field(default_factory=list)
    inputs: list[InputSpec] = field(default_factory=list)

    def declaration(self, node_id: str) -> Declaration | None:
        for d in self.declarations:
            if d.id == node_id:
                return d
        return None


# -- parsing --------------------------------------------------------------

class _Line:
    def __init__(self, lineno: int, text: str):
        self.lineno = lineno
        body = text.split("#", 1)[0]
        self.tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]
        self.end = len(body.rstrip()) + 1


class _Parser:
    def __init__(self):
        self.doc = NetlistDocument()
        self.diags: list[Diagnostic] = []

    def error(self, line: _Line, pos: int, message: str) -> None:
        col = line.tokens[pos][1] if pos < len(line.tokens) else line.end
        self.diags.append(Diagnostic(line.lineno, col, message))

    def number(self, line: _Line, pos: int, what: str, integer: bool = False):
        if pos >= len(line.tokens):
            self.error(line, pos, f"missing {what}")
            return None
        tok = line.tokens[pos][0]
        try:
            value = int(tok) if integer else float(tok)
        except ValueError:
            self.error(line, pos, f"expected {what}, got {tok!r}")
            return None
        if not integer and not math.isfinite(value):
            self.error(line, pos, f"{what} must be finite")
            return None
        return value

    def ident(self, line: _Line, pos: int, what: str = "identifier") -> str | None:
        if pos >= len(line.tokens):
            self.error(line, pos, f"missing {what}")
            return None
        tok = line.tokens[pos][0]
        if not _IDENT.match(tok):
            self.error(line, pos, f"invalid {what} {tok!r}")
            return None
        return tok

    def port(self, line: _Line, pos: int) -> tuple[str, int] | None:
        if pos >= len(line.tokens):
            self.error(line, pos, "missing port (expected NODE.CHANNEL)")
            return None
        m = _PORT.match(line.tokens[pos][0])
        if not m:
            self.error(line, pos, f"invalid port {line.tokens[pos][0]!r} (expected NODE.CHANNEL)")
            return None
        return m.group(1), int(m.group(2))

    def arity(self, line: _Line, n: int) -> bool:
        if len(line.tokens) > n:
            self.error(line, n, f"unexpected token {line.tokens[n][0]!r}")
            return False
        return True

    def numbers(self, line: _Line, start: int, count: int, what: str):
        vals = []
        for i in range(count):
            v = self.number(line, start + i, what)
            if v is None:
                return None
            vals.append(v)
        if not self.arity(line, start + count):
            return None
        return tuple(vals)

    def parse_line(self, line: _Line) -> None:
        head = line.tokens[0][0]
        handler = getattr(self, "stmt_" + head, None)
        if handler is None:
            self.error(line, 0, f"unknown statement {head!r}")
            return
        handler(line)

    def stmt_param(self, line: _Line) -> None:
        name = self.ident(line, 1, "parameter name")
        if name is None:
            return
        if name not in PARAMS:
            self.error(line, 1, f"unknown parameter {name!r} (expected one of {', '.join(PARAMS)})")
            return
        if name == "alpha":
            value = self.number(line, 2, "alpha")
            if value is not None and not 0.0 < value < 1.0:
                self.error(line, 2, "alpha must lie in (0, 1)")
                return
        elif name == "seed":
            value = self.number(line, 2, "integer seed", integer=True)
        else:
            value = line.tokens[2][0] if len(line.tokens) > 2 else None
            if value not in (m.value for m in OutputMode):
                self.error(line, 2, "mode must be 'deterministic' or 'stochastic'")
                return
        if value is None or not self.arity(line, 3):
            return
        if name in self.doc.params:
            self.error(line, 1, f"parameter {name!r} set twice")
            return
        self.doc.params[name] = value

    def _declare(self, line: _Line, statement: str, kind: str = "", args: tuple = ()) -> None:
        self.doc.declarations.append(
            Declaration(statement, line.tokens[1][0], kind, args, line.lineno, line.tokens[1][1])
        )

    def stmt_source(self, line: _Line) -> None:
        if self.ident(line, 1) is None:
            return
        channels = self.number(line, 2, "channel count", integer=True)
        if channels is None or not self.arity(line, 3):
            return
        if channels < 1:
            self.error(line, 2, "a source needs at least one channel")
            return
        self._declare(line, "source", args=(channels,))

    def stmt_proc(self, line: _Line) -> None:
        if self.ident(line, 1) is None:
            return
        kind = self.ident(line, 2, "processor kind")
        if kind is None:
            return
        if kind not in PROC_KINDS:
            self.error(line, 2, f"unknown processor kind {kind!r} (expected one of {', '.join(PROC_KINDS)})")
            return
        if kind in ("beamsplitter", "hadamard", "cnot"):
            if self.arity(line, 3):
                self._declare(line, "proc", kind)
        elif kind == "hadamard-lift":
            q = self.number(line, 3, "qubit index", integer=True)
            if q is None or not self.arity(line, 4):
                return
            if q not in (0, 1):
                self.error(line, 3, "qubit index must be 0 or 1")
                return
            self._declare(line, "proc", kind, (q,))
        else:
            ne = self.number(line, 3, "number of event types", integer=True)
            nm = self.number(line, 4, "message length", integer=True) if ne is not None else None
            if ne is None or nm is None:
                return
            if ne < 2 or nm < 1:
                self.error(line, 3, "need at least 2 event types and message length 1")
                return
            d = ne * nm
            entries = self.numbers(line, 5, d * d, f"matrix entry ({d * d} expected)")
            if entries is None:
                return
            if not Transform(np.reshape(entries, (d, d))).is_orthogonal(1e-9):
                self.error(line, 5, "matrix is not orthogonal")
                return
            self._declare(line, "proc", kind, (ne, nm) + entries)

    def stmt_passive(self, line: _Line) -> None:
        if self.ident(line, 1) is None:
            return
        kind = self.ident(line, 2, "passive kind")
        if kind is None:
            return
        if kind not in PASSIVE_KINDS:
            self.error(line, 2, f"unknown passive kind {kind!r} (expected rotation or matrix)")
            return
        if kind == "rotation":
            phi = self.number(line, 3, "angle in degrees")
            if phi is not None and self.arity(line, 4):
                self._declare(line, "passive", kind, (phi,))
            return
        n = self.number(line, 3, "dimension", integer=True)
        if n is None:
            return
        if n < 1:
            self.error(line, 3, "dimension must be positive")
            return
        entries = self.numbers(line, 4, n * n, f"matrix entry ({n * n} expected)")
        if entries is None:
            return
        if not Transform(np.reshape(entries, (n, n))).is_orthogonal(1e-9):
            self.error(line, 4, "matrix is not orthogonal")
            return
        self._declare(line, "passive", kind, (n,) + entries)

    def stmt_wire(self, line: _Line) -> None:
        src = self.port(line, 1)
        if src is None:
            return
        if len(line.tokens) < 3 or line.tokens[2][0] != "->":
            self.error(line, 2, "expected '->'")
            return
        dst = self.port(line, 3)
        if dst is None or not self.arity(line, 4):
            return
        self.doc.wires.append(Wire(src, dst, line.lineno, line.tokens[1][1]))

    def _counter(self, line: _Line, statement: str) -> None:
        if self.ident(line, 1) is None:
            return
        if len(line.tokens) < 3 or line.tokens[2][0] != "from":
            self.error(line, 2, "expected 'from'")
            return
        port = self.port(line, 3)
        if port is None or not self.arity(line, 4):
            return
        self._declare(line, statement, args=port)

    def stmt_sink(self, line: _Line) -> None:
        self._counter(line, "sink")

    def stmt_tap(self, line: _Line) -> None:
        self._counter(line, "tap")

    def stmt_input(self, line: _Line) -> None:
        port = self.port(line, 1)
        if port is None:
            return
        if len(line.tokens) < 3 or line.tokens[2][0] != "weight":
            self.error(line, 2, "expected 'weight'")
            return
        w = self.number(line, 3, "weight")
        if w is None:
            return
        if w < 0:
            self.error(line, 3, "weight must be non-negative")
            return
        if len(line.tokens) < 5 or line.tokens[4][0] not in ("phase", "payload"):
            self.error(line, 4, "expected 'phase' or 'payload'")
            return
        if line.tokens[4][0] == "phase":
            phi = self.number(line, 5, "phase in degrees")
            if phi is not None and self.arity(line, 6):
                self.doc.inputs.append(InputSpec(port, w, phase=phi, line=line.lineno))
            return
        vals = []
        for pos in range(5, len(line.tokens)):
            v = self.number(line, pos, "payload component")
            if v is None:
                return
            vals.append(v)
        if not vals:
            self.error(line, 5, "missing payload components")
            return
        if abs(math.sqrt(sum(v * v for v in vals)) - 1.0) > 1e-9:
            self.error(line, 5, "payload must be a unit vector")
            return
        self.doc.inputs.append(InputSpec(port, w, payload=tuple(vals), line=line.lineno))


def _shape(decl: Declaration) -> tuple[int, int, int, int] | None:
    """(inputs, outputs, num_event_types, payload_len) of a declared node."""
    if decl.statement == "source":
        return 0, decl.args[0], 0, 0
    if decl.statement == "sink":
        return 1, 0, 0, 0
    if decl.statement == "passive":
        n = 2 if decl.kind == "rotation" else decl.args[0]
        return 1, 1, 0, n
    if decl.statement == "proc":
        ne = {"beamsplitter": 2, "hadamard": 2, "cnot": 4, "hadamard-lift": 4}.get(decl.kind)
        nm = 2
        if decl.kind == "matrix":
            ne, nm = decl.args[0], decl.args[1]
        return ne, ne, ne, nm
    return None


def check(doc: NetlistDocument) -> list[Diagnostic]:
    """Semantic checks: ids, port ranges, dimensions, totality, acyclicity."""
    diags: list[Diagnostic] = []
    nodes: dict[str, Declaration] = {}
    counters: set[str] = set()
    for d in doc.declarations:
        if d.id in nodes or d.id in counters:
            diags.append(Diagnostic(d.line, d.column, f"duplicate id {d.id!r}"))
            continue
        if d.statement == "tap":
            counters.add(d.id)
        else:
            nodes[d.id] = d
    if not any(d.statement == "source" for d in nodes.values()):
        diags.append(Diagnostic(1, 1, "no source declared"))

    edges: list[tuple[tuple[str, int], tuple[str, int], int, int]] = [
        (w.src, w.dst, w.line, w.column) for w in doc.wires
    ]
    for d in doc.declarations:
        if d.statement == "sink" and nodes.get(d.id) is d:
            edges.append((d.args, (d.id, 0), d.line, d.column))

    wired: dict[tuple[str, int], int] = {}
    for src, dst, line, col in edges:
        ok = True
        for (node_id, ch), want in ((src, "out"), (dst, "in")):
            decl = nodes.get(node_id)
            if decl is None:
                diags.append(Diagnostic(line, col, f"wire refers to undeclared node {node_id!r}"))
                ok = False
                continue
            n_in, n_out, _, _ = _shape(decl)
            limit = n_out if want == "out" else n_in
            if ch >= limit:
                side = "output" if want == "out" else "input"
                diags.append(Diagnostic(line, col, f"{node_id!r} has no {side} channel {ch}"))
                ok = False
        if src in wired:
            diags.append(Diagnostic(line, col, f"output {src[0]}.{src[1]} is already wired "
                                               f"(line {wired[src]})"))
            ok = False
        if not ok:
            continue
        wired[src] = line
        s, t = _shape(nodes[src[0]]), _shape(nodes[dst[0]])
        if s[2] and t[2] and s[2] != t[2]:
            diags.append(Diagnostic(line, col, f"wire joins processors with {s[2]} and {t[2]} event types"))
        elif s[3] and t[3] and s[3] != t[3]:
            diags.append(Diagnostic(line, col, f"dimension mismatch: {src[0]}.{src[1]} carries "
                                               f"{s[3]}-vectors, {dst[0]} expects {t[3]}"))
    for d in doc.declarations:
        if d.statement == "tap":
            decl = nodes.get(d.args[0])
            if decl is None:
                diags.append(Diagnostic(d.line, d.column, f"tap watches undeclared node {d.args[0]!r}"))
            elif d.args[1] >= _shape(decl)[1]:
                diags.append(Diagnostic(d.line, d.column, f"{d.args[0]!r} has no output channel {d.args[1]}"))
    for node_id, d in nodes.items():
        for ch in range(_shape(d)[1]):
            if (node_id, ch) not in wired:
                diags.append(Diagnostic(d.line, d.column, f"output {node_id}.{ch} is not wired"))
    for spec in doc.inputs:
        decl = nodes.get(spec.port[0])
        if decl is None or decl.statement != "source":
            diags.append(Diagnostic(spec.line, 1, f"input must name a source, got {spec.port[0]!r}"))
        elif spec.port[1] >= decl.args[0]:
            diags.append(Diagnostic(spec.line, 1, f"source {spec.port[0]!r} has no channel {spec.port[1]}"))

    graph: dict[str, set[str]] = {n: set() for n in nodes}
    where: dict[tuple[str, str], tuple[int, int]] = {}
    for src, dst, line, col in edges:
        if src[0] in nodes and dst[0] in nodes:
            graph[dst[0]].add(src[0])
            where[(src[0], dst[0])] = (line, col)
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        steps = list(zip(cycle, cycle[1:]))
        spots = [where.get((a, b)) or where.get((b, a)) for a, b in steps]
        line, col = max(s for s in spots if s is not None)
        diags.append(Diagnostic(line, col, "wiring contains a cycle: " + " -> ".join(reversed(cycle))))
    return sorted(diags, key=lambda d: (d.line, d.column))


def parse_netlist(text: str) -> NetlistDocument:
    """Parse and check a netlist; raise NetlistError with every diagnostic found."""
    p = _Parser()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _Line(lineno, raw)
        if line.tokens:
            p.parse_line(line)
    diags = p.diags or check(p.doc)
    if diags:
        raise NetlistError(diags)
    return p.doc


# -- printing -------------------------------------------------------------

def _num(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def format_netlist(doc: NetlistDocument) -> str:
    out = []
    for name in PARAMS:
        if name in doc.params:
            v = doc.params[name]
            out.append(f"param {name} {v.value if isinstance(v, OutputMode) else _num(v)}")
    for d in doc.declarations:
        if d.statement in ("sink", "tap"):
            out.append(f"{d.statement} {d.id} from {d.args[0]}.{d.args[1]}")
        elif d.statement == "source":
            out.append(f"source {d.id} {d.args[0]}")
        else:
            out.append(" ".join([d.statement, d.id, d.kind] + [_num(a) for a in d.args]))
    for w in doc.wires:
        out.append(f"wire {w.src[0]}.{w.src[1]} -> {w.dst[0]}.{w.dst[1]}")
    for s in doc.inputs:
        head = f"input {s.port[0]}.{s.port[1]} weight {_num(s.weight)}"
        if s.payload is not None:
            out.append(head + " payload " + " ".join(_num(v) for v in s.payload))
        else:
            out.append(head + f" phase {_num(s.phase)}")
    return "\n".join(out) + "\n"


# -- building -------------------------------------------------------------

def _transform(decl: Declaration) -> Transform:
    if decl.kind == "beamsplitter":
        return beam_splitter_transform()
    if decl.kind == "hadamard":
        return hadamard_transform()
    if decl.kind == "cnot":
        return cnot_transform()
    if decl.kind == "hadamard-lift":
        return lift_single_qubit(HADAMARD, decl.args[0])
    if decl.kind == "rotation":
        return plane_rotation(decl.args[0])
    if decl.statement == "proc":
        ne, nm = decl.args[0], decl.args[1]
        d = ne * nm
        return Transform(np.reshape(decl.args[2:], (d, d)))
    n = decl.args[0]
    return Transform(np.reshape(decl.args[1:], (n, n)))


def build_network(doc: NetlistDocument, alpha: float, mode, rng: np.random.Generator,
                  slm_rng: np.random.Generator) -> Network:
    """Instantiate the document; DLMs are initialized in declaration order."""
    net = Network(slm_rng=slm_rng)
    sinks = []
    for d in doc.declarations:
        if d.statement == "source":
            net.add_source(d.id, d.args[0])
        elif d.statement == "proc":
            t = _transform(d)
            nm = d.args[1] if d.kind == "matrix" else 2
            net.add_processor(d.id, Processor.random(rng, t, alpha, nm, mode))
        elif d.statement == "passive":
            net.add_passive(d.id, _transform(d))
        else:
            sinks.append(d)
    for w in doc.wires:
        net.connect(w.src, w.dst)
    for d in sinks:
        if d.statement == "sink":
            net.add_sink(d.id, d.args)
        else:
            net.add_tap(d.id, d.args)
    net.validate()
    return net
