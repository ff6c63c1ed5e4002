"""Processors and single-message event routing between them."""

from __future__ import annotations

import enum
import graphlib
from dataclasses import dataclass, field

import numpy as np

from .dlm import DlmState, Message, build_target, deterministic_output, learn, stochastic_output
from .errors import ConfigurationError, ValidationError
from .transforms import (
    HADAMARD,
    Transform,
    beam_splitter_transform,
    cnot_transform,
    lift_single_qubit,
    plane_rotation,
)


class OutputMode(str, enum.Enum):
    DETERMINISTIC = "deterministic"
    STOCHASTIC = "stochastic"


@dataclass(eq=False)
class Processor:
    """DLM 1 -> orthogonal transform -> DLM 2."""

    dlm1: DlmState
    transform: Transform
    dlm2: DlmState
    output_mode: OutputMode = OutputMode.DETERMINISTIC

    def __post_init__(self):
        self.output_mode = OutputMode(self.output_mode)
        d = self.transform.dim
        if self.dlm1.dim != d or self.dlm2.dim != d:
            raise ConfigurationError(
                f"processor dims disagree: dlm1={self.dlm1.dim}, transform={d}, dlm2={self.dlm2.dim}"
            )
        if (self.dlm1.num_event_types, self.dlm1.message_len) != (
            self.dlm2.num_event_types, self.dlm2.message_len
        ):
            raise ConfigurationError("dlm1 and dlm2 must share num_event_types and message_len")

    @classmethod
    def random(cls, rng: np.random.Generator, transform: Transform, alpha: float,
               message_len: int = 2, output_mode=OutputMode.DETERMINISTIC) -> Processor:
        if transform.dim % message_len:
            raise ConfigurationError(
                f"transform dim {transform.dim} is not a multiple of message_len {message_len}"
            )
        ne = transform.dim // message_len
        dlm1 = DlmState.random(rng, alpha, ne, message_len)
        dlm2 = DlmState.random(rng, alpha, ne, message_len)
        return cls(dlm1, transform, dlm2, output_mode)

    @property
    def num_event_types(self) -> int:
        return self.dlm1.num_event_types

    @property
    def message_len(self) -> int:
        return self.dlm1.message_len

    def process(self, msg: Message, rng_draw: float | None = None) -> Message:
        stochastic = self.output_mode is OutputMode.STOCHASTIC
        if stochastic and rng_draw is None:
            raise ValidationError("stochastic processor needs a random draw per event")
        if not stochastic and rng_draw is not None:
            raise ValidationError("deterministic processor takes no random draw")
        learn(self.dlm1, build_target(self.dlm1, msg))
        _, rule = learn(self.dlm2, self.transform(self.dlm1.values))
        if stochastic:
            return stochastic_output(self.dlm2, rng_draw)
        return deterministic_output(rule, self.dlm2)


def process_event(p: Processor, msg: Message, rng_draw: float | None = None) -> Message:
    return p.process(msg, rng_draw)


@dataclass(eq=False)
class Source:
    channels: int


@dataclass(eq=False)
class Passive:
    """Transform-only device acting on the payload; the channel passes through."""

    transform: Transform


@dataclass(eq=False)
class Sink:
    pass


NodeKind = Source | Processor | Passive | Sink
Port = tuple[str, int]


@dataclass(eq=False)
class Network:
    """Directed acyclic graph of devices with exactly one message in flight.

    ``routes`` maps an output port ``(node, channel)`` to an input port. The
    channel of the input port becomes the event type seen by the receiving
    node. Counters exist for every sink and for every tap; a tap counts the
    messages leaving an output port without consuming them.
    """

    slm_rng: np.random.Generator = field(default_factory=np.random.default_rng)
    nodes: dict[str, NodeKind] = field(default_factory=dict)
    routes: dict[Port, Port] = field(default_factory=dict)
    taps: dict[str, Port] = field(default_factory=dict)
    counters: dict[str, int] = field(default_factory=dict)
    _in_flight: bool = field(default=False, init=False, repr=False)
    _validated: bool = field(default=False, init=False, repr=False)

    # -- construction -----------------------------------------------------

    def _add(self, node_id: str, node: NodeKind) -> None:
        if node_id in self.nodes or node_id in self.taps:
            raise ConfigurationError(f"duplicate id {node_id!r}")
        self.nodes[node_id] = node
        self._validated = False

    def add_source(self, node_id: str, channels: int) -> None:
        self._add(node_id, Source(channels))

    def add_processor(self, node_id: str, processor: Processor) -> None:
        self._add(node_id, processor)

    def add_passive(self, node_id: str, transform: Transform) -> None:
        self._add(node_id, Passive(transform))

    def add_sink(self, node_id: str, source: Port) -> None:
        self._add(node_id, Sink())
        self.counters[node_id] = 0
        self.connect(source, (node_id, 0))

    def add_tap(self, tap_id: str, port: Port) -> None:
        if tap_id in self.nodes or tap_id in self.taps:
            raise ConfigurationError(f"duplicate id {tap_id!r}")
        self.taps[tap_id] = port
        self.counters[tap_id] = 0

    def connect(self, src: Port, dst: Port) -> None:
        if src in self.routes:
            raise ConfigurationError(f"output {src[0]}.{src[1]} is already wired")
        self.routes[src] = dst
        self._validated = False

    def set_passive(self, node_id: str, transform: Transform) -> None:
        node = self.nodes.get(node_id)
        if not isinstance(node, Passive):
            raise ConfigurationError(f"{node_id!r} is not a passive device")
        if transform.dim != node.transform.dim:
            raise ConfigurationError("replacement transform changes the payload dimension")
        node.transform = transform

    def set_mode(self, mode: OutputMode | str) -> None:
        for p in self.processors().values():
            p.output_mode = OutputMode(mode)

    # -- inspection -------------------------------------------------------

    def processors(self) -> dict[str, Processor]:
        return {k: v for k, v in self.nodes.items() if isinstance(v, Processor)}

    def of_kind(self, kind: type) -> list[str]:
        return [k for k, v in self.nodes.items() if isinstance(v, kind)]

    def reset_counters(self) -> None:
        for k in self.counters:
            self.counters[k] = 0

    def _outputs(self, node: NodeKind) -> int:
        if isinstance(node, Source):
            return node.channels
        if isinstance(node, Processor):
            return node.num_event_types
        if isinstance(node, Passive):
            return 1
        return 0

    def _inputs(self, node: NodeKind) -> int:
        if isinstance(node, Processor):
            return node.num_event_types
        if isinstance(node, (Passive, Sink)):
            return 1
        return 0

    def _payload_len(self, node: NodeKind) -> int | None:
        if isinstance(node, Processor):
            return node.message_len
        if isinstance(node, Passive):
            return node.transform.dim
        return None

    def validate(self) -> None:
        """Check wiring totality, port ranges, dimensions and acyclicity."""
        for (src, sch), (dst, dch) in self.routes.items():
            if src not in self.nodes:
                raise ConfigurationError(f"wire from unknown node {src!r}")
            if dst not in self.nodes:
                raise ConfigurationError(f"wire to unknown node {dst!r}")
            s, d = self.nodes[src], self.nodes[dst]
            if not 0 <= sch < self._outputs(s):
                raise ConfigurationError(f"{src!r} has no output channel {sch}")
            if not 0 <= dch < self._inputs(d):
                raise ConfigurationError(f"{dst!r} has no input channel {dch}")
            if isinstance(s, Processor) and isinstance(d, Processor) \
                    and s.num_event_types != d.num_event_types:
                raise ConfigurationError(
                    f"wire {src}.{sch} -> {dst}.{dch} joins processors with "
                    f"{s.num_event_types} and {d.num_event_types} event types"
                )
            ls, ld = self._payload_len(s), self._payload_len(d)
            if ls is not None and ld is not None and ls != ld:
                raise ConfigurationError(
                    f"wire {src}.{sch} -> {dst}.{dch} carries {ls}-vectors into a {ld}-vector port"
                )
        for tap_id, (node_id, ch) in self.taps.items():
            node = self.nodes.get(node_id)
            if node is None or not 0 <= ch < self._outputs(node):
                raise ConfigurationError(f"tap {tap_id!r} watches a missing port {node_id}.{ch}")
        for node_id, node in self.nodes.items():
            for ch in range(self._outputs(node)):
                if (node_id, ch) not in self.routes:
                    raise ConfigurationError(f"output {node_id}.{ch} is not wired")
        if not self.of_kind(Source):
            raise ConfigurationError("no source declared")
        graph: dict[str, set[str]] = {n: set() for n in self.nodes}
        for (src, _), (dst, _) in self.routes.items():
            graph[dst].add(src)
        try:
            tuple(graphlib.TopologicalSorter(graph).static_order())
        except graphlib.CycleError as exc:
            cycle = " -> ".join(exc.args[1])
            raise ConfigurationError(f"wiring contains a cycle: {cycle}") from None
        self._validated = True

    # -- event processing -------------------------------------------------

    def route(self, source_msg: Message, entry: str) -> tuple[str, Message]:
        if not self._validated:
            self.validate()
        src = self.nodes.get(entry)
        if not isinstance(src, Source):
            raise ConfigurationError(f"{entry!r} is not a source")
        if not 0 <= source_msg.event_type < src.channels:
            raise ValidationError(f"source {entry!r} has no channel {source_msg.event_type}")
        if self._in_flight:
            raise RuntimeError("a message is already travelling through the network")
        self._in_flight = True
        try:
            port: Port = (entry, source_msg.event_type)
            payload = source_msg.payload
            while True:
                for tap_id, watched in self.taps.items():
                    if watched == port:
                        self.counters[tap_id] += 1
                dst, ch = self.routes[port]
                node = self.nodes[dst]
                msg = Message(ch, payload)
                if isinstance(node, Sink):
                    self.counters[dst] += 1
                    return dst, msg
                if isinstance(node, Processor):
                    draw = None
                    if node.output_mode is OutputMode.STOCHASTIC:
                        draw = float(self.slm_rng.random())
                    out = node.process(msg, draw)
                    port, payload = (dst, out.event_type), out.payload
                else:
                    port, payload = (dst, 0), node.transform(payload)
        finally:
            self._in_flight = False


def route(net: Network, source_msg: Message, entry: str) -> tuple[str, Message]:
    return net.route(source_msg, entry)


# -- built-in networks ----------------------------------------------------

def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def build_beam_splitter(alpha: float, mode=OutputMode.DETERMINISTIC, rng=None,
                        slm_rng=None) -> Network:
    """Single beam-splitter processor with sinks ``N0`` and ``N1``."""
    rng = _rng(rng)
    net = Network(slm_rng=_rng(slm_rng))
    net.add_source("in", 2)
    net.add_processor("bs", Processor.random(rng, beam_splitter_transform(), alpha, 2, mode))
    for ch in range(2):
        net.connect(("in", ch), ("bs", ch))
    net.add_sink("N0", ("bs", 0))
    net.add_sink("N1", ("bs", 1))
    net.validate()
    return net


def build_mzi(alpha: float, phi0: float = 0.0, phi1: float = 0.0,
              mode=OutputMode.DETERMINISTIC, rng=None, slm_rng=None) -> Network:
    """Two beam splitters with phase rotations ``phi0``/``phi1`` (degrees) on the arms.

    Taps ``N0``/``N1`` count the first beam splitter's outputs; sinks
    ``N2``/``N3`` count the second's.
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    rng = _rng(rng)
    net = Network(slm_rng=_rng(slm_rng))
    net.add_source("in", 2)
    net.add_processor("bs1", Processor.random(rng, beam_splitter_transform(), alpha, 2, mode))
    net.add_passive("r0", plane_rotation(phi0))
    net.add_passive("r1", plane_rotation(phi1))
    net.add_processor("bs2", Processor.random(rng, beam_splitter_transform(), alpha, 2, mode))
    net.connect(("in", 0), ("bs1", 0))
    net.connect(("in", 1), ("bs1", 1))
    net.connect(("bs1", 0), ("r0", 0))
    net.connect(("bs1", 1), ("r1", 0))
    net.connect(("r0", 0), ("bs2", 0))
    net.connect(("r1", 0), ("bs2", 1))
    net.add_sink("N2", ("bs2", 0))
    net.add_sink("N3", ("bs2", 1))
    net.add_tap("N0", ("bs1", 0))
    net.add_tap("N1", ("bs1", 1))
    net.validate()
    return net


CNOT_CIRCUIT_STAGES = ("h1a", "h2a", "cnot", "h1b", "h2b")


def build_cnot_circuit(alpha: float, mode=OutputMode.DETERMINISTIC, rng=None,
                       slm_rng=None) -> Network:
    """H on both qubits, CNOT (control qubit 1), H on both qubits; sinks ``f0``..``f3``."""
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    rng = _rng(rng)
    transforms = {
        "h1a": lift_single_qubit(HADAMARD, 0),
        "h2a": lift_single_qubit(HADAMARD, 1),
        "cnot": cnot_transform(),
        "h1b": lift_single_qubit(HADAMARD, 0),
        "h2b": lift_single_qubit(HADAMARD, 1),
    }
    net = Network(slm_rng=_rng(slm_rng))
    net.add_source("in", 4)
    for name in CNOT_CIRCUIT_STAGES:
        net.add_processor(name, Processor.random(rng, transforms[name], alpha, 2, mode))
    prev = "in"
    for name in CNOT_CIRCUIT_STAGES:
        for ch in range(4):
            net.connect((prev, ch), (name, ch))
        prev = name
    for ch in range(4):
        net.add_sink(f"f{ch}", (prev, ch))
    net.validate()
    return net
