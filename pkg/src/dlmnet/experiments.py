"""Beam-splitter, Mach-Zehnder and CNOT-circuit experiments.

Every run draws from three independent streams spawned from one seed: DLM
initialization, input generation, and the output draws of stochastic
processors. Switching between deterministic and stochastic mode therefore
leaves the initial vectors and the input sequence unchanged.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import oracle
from .dlm import Message
from .errors import ValidationError
from .network import (
    Network,
    OutputMode,
    build_beam_splitter,
    build_cnot_circuit,
    build_mzi,
)
from .transforms import plane_rotation

SEED_ENV = "DLMNET_SEED"
COMPARE_EPS = 1e-12


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float = 0.99
    events_per_point: int = 10000
    seed: int = field(default_factory=default_seed)
    mode: OutputMode = OutputMode.DETERMINISTIC
    discard_fraction: float = 0.0
    reinit_per_point: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", OutputMode(self.mode))
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.events_per_point < 1:
            raise ValidationError("events_per_point must be at least 1")
        if not 0.0 <= self.discard_fraction < 1.0:
            raise ValidationError("discard_fraction must lie in [0, 1)")

    def streams(self) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
        """(initialization, input, stochastic-output) generators."""
        init, inputs, slm = np.random.SeedSequence(self.seed).spawn(3)
        return (np.random.default_rng(init), np.random.default_rng(inputs),
                np.random.default_rng(slm))


@dataclass(frozen=True)
class FrequencyReport:
    """Counts of retained events next to the quantum prediction.

    ``groups`` lists channel indices that are normalized together; each group
    is a separate probability distribution (e.g. the two beam splitters of
    the interferometer).
    """

    counts: tuple[int, ...]
    oracle: tuple[float, ...] | None
    groups: tuple[tuple[int, ...], ...] = ()
    params: dict = field(default_factory=dict)
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.counts)
        if self.oracle is not None and len(self.oracle) != n:
            raise ValidationError("counts and oracle probabilities differ in length")
        if not self.groups:
            object.__setattr__(self, "groups", (tuple(range(n)),))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        elif len(self.labels) != n:
            raise ValidationError("one label per channel is required")

    @property
    def frequencies(self) -> tuple[float, ...]:
        f = [0.0] * len(self.counts)
        for g in self.groups:
            total = sum(self.counts[i] for i in g)
            for i in g:
                f[i] = self.counts[i] / total if total else 0.0
        return tuple(f)

    @property
    def deviation(self) -> float:
        if self.oracle is None:
            return math.nan
        return max(abs(f - p) for f, p in zip(self.frequencies, self.oracle))


def compare(report: FrequencyReport, tolerance: float) -> bool:
    """True iff every frequency is within ``tolerance`` of its oracle probability."""
    if report.oracle is None:
        raise ValidationError("report carries no oracle probabilities to compare against")
    return report.deviation <= tolerance + COMPARE_EPS


def _unit(psi: float) -> np.ndarray:
    r = math.radians(psi)
    return np.array([math.cos(r), math.sin(r)])


def _retained(n: int, discard_fraction: float) -> int:
    """Index of the first event that is counted."""
    return int(math.floor(n * discard_fraction))


def _drive(net: Network, messages, n: int, discard_fraction: float) -> None:
    """Push ``n`` messages from ``in`` and keep counts of the retained ones only."""
    first = _retained(n, discard_fraction)
    for i in range(n):
        if i == first:
            net.reset_counters()
        net.route(messages(i), "in")


# -- beam splitter --------------------------------------------------------

@dataclass(frozen=True)
class BeamSplitterPoint:
    psi0: float
    psi1: float
    report: FrequencyReport


def run_beam_splitter(cfg: ExperimentConfig, p0: float,
                      num_phase_pairs: int) -> list[BeamSplitterPoint]:
    if not 0.0 <= p0 <= 1.0:
        raise ValidationError(f"p0 must lie in [0, 1], got {p0}")
    init_rng, input_rng, slm_rng = cfg.streams()
    net = build_beam_splitter(cfg.alpha, cfg.mode, init_rng, slm_rng)
    points = []
    for k in range(num_phase_pairs):
        if k and cfg.reinit_per_point:
            net = build_beam_splitter(cfg.alpha, cfg.mode, init_rng, slm_rng)
        psi0, psi1 = (float(v) for v in input_rng.uniform(0.0, 360.0, 2))
        inputs = (Message(0, _unit(psi0)), Message(1, _unit(psi1)))
        channels = (input_rng.random(cfg.events_per_point) >= p0).astype(np.intp)
        _drive(net, lambda i: inputs[channels[i]], cfg.events_per_point, cfg.discard_fraction)
        q = oracle.beam_splitter_probability(p0, psi0, psi1)
        report = FrequencyReport(
            (net.counters["N0"], net.counters["N1"]), (q, 1.0 - q),
            params={"input_p0": p0, "psi0": psi0, "psi1": psi1},
        )
        points.append(BeamSplitterPoint(psi0, psi1, report))
    return points


# -- Mach-Zehnder ---------------------------------------------------------

@dataclass(frozen=True)
class MziPoint:
    phi0: float
    psi0: float
    report: FrequencyReport

    @property
    def first_splitter(self) -> float:
        """N0 / (N0 + N1)."""
        return self.report.frequencies[0]

    @property
    def output(self) -> float:
        """N2 / (N2 + N3)."""
        return self.report.frequencies[2]


def mzi_phases(phi0_step: float, phi0_start: float = 0.0, phi0_stop: float = 360.0) -> list[float]:
    if phi0_step <= 0:
        raise ValidationError("phi0_step must be positive")
    n = int(math.ceil((phi0_stop - phi0_start) / phi0_step - 1e-9))
    return [phi0_start + k * phi0_step for k in range(n)]


def run_mzi(cfg: ExperimentConfig, phi1: float, phi0_step: float = 10.0,
            phi0_start: float = 0.0, phi0_stop: float = 360.0) -> list[MziPoint]:
    """Sweep ``phi0`` with input on channel 0 only and a fresh random phase per point."""
    init_rng, input_rng, slm_rng = cfg.streams()
    net = build_mzi(cfg.alpha, phi0_start, phi1, cfg.mode, init_rng, slm_rng)
    points = []
    for k, phi0 in enumerate(mzi_phases(phi0_step, phi0_start, phi0_stop)):
        if k and cfg.reinit_per_point:
            net = build_mzi(cfg.alpha, phi0, phi1, cfg.mode, init_rng, slm_rng)
        net.set_passive("r0", plane_rotation(phi0))
        psi0 = float(input_rng.uniform(0.0, 360.0))
        msg = Message(0, _unit(psi0))
        _drive(net, lambda i: msg, cfg.events_per_point, cfg.discard_fraction)
        b0, b1 = oracle.mzi_output(1.0, 0.0, phi0, phi1)
        q = abs(b0) ** 2
        c = net.counters
        report = FrequencyReport(
            (c["N0"], c["N1"], c["N2"], c["N3"]), (0.5, 0.5, q, 1.0 - q),
            groups=((0, 1), (2, 3)),
            params={"phi0": phi0, "phi1": phi1, "psi0": psi0},
        )
        points.append(MziPoint(phi0, psi0, report))
    return points


# -- CNOT circuit ---------------------------------------------------------

def cnot_circuit_network(cfg: ExperimentConfig) -> Network:
    init_rng, _, slm_rng = cfg.streams()
    return build_cnot_circuit(cfg.alpha, cfg.mode, init_rng, slm_rng)


def run_cnot_circuit(cfg: ExperimentConfig, qubit1: int, qubit2: int,
                     network: Network | None = None) -> FrequencyReport:
    """Feed ``events_per_point`` copies of the basis input ``|qubit2 qubit1>``.

    Pass ``network`` to continue from a previously trained circuit; it is
    switched to ``cfg.mode`` first.
    """
    if qubit1 not in (0, 1) or qubit2 not in (0, 1):
        raise ValidationError("qubit values must be 0 or 1")
    net = network if network is not None else cnot_circuit_network(cfg)
    net.set_mode(cfg.mode)
    msg = Message(qubit1 + 2 * qubit2, np.array([1.0, 0.0]))
    _drive(net, lambda i: msg, cfg.events_per_point, cfg.discard_fraction)
    probs = oracle.cnot_circuit_output(qubit1, qubit2)
    return FrequencyReport(
        tuple(net.counters[f"f{k}"] for k in range(4)), tuple(float(p) for p in probs),
        params={"mode": cfg.mode.value, "events": cfg.events_per_point,
                "qubit1": qubit1, "qubit2": qubit2},
    )


BASIS_INPUTS = ((0, 0), (1, 0), (0, 1), (1, 1))
# (mode, events) blocks run back to back on one network; coarse at alpha 0.99, fine at 0.999
COARSE_SCHEDULE = (("deterministic", 100), ("deterministic", 200), ("stochastic", 2000))
FINE_SCHEDULE = (("deterministic", 1000), ("deterministic", 2000), ("stochastic", 20000))


def run_cnot_schedule(cfg: ExperimentConfig, schedule=COARSE_SCHEDULE) -> list[FrequencyReport]:
    """Run all four basis inputs for each ``(mode, events)`` block on one network.

    The DLMs are initialized once; every row continues from the state the
    previous row left behind.
    """
    net = cnot_circuit_network(cfg)
    reports = []
    for mode, events in schedule:
        row_cfg = replace(cfg, mode=mode, events_per_point=events)
        for q1, q2 in BASIS_INPUTS:
            reports.append(run_cnot_circuit(row_cfg, q1, q2, network=net))
    return reports


# -- user netlists --------------------------------------------------------

def run_netlist(doc, cfg: ExperimentConfig) -> FrequencyReport:
    """Drive a parsed netlist with its ``input`` statements and report every counter.

    Sinks form one distribution; taps on the same node form another. No
    oracle is attached.
    """
    from .netlist import build_network

    if not doc.inputs:
        raise ValidationError("netlist declares no input")
    init_rng, input_rng, slm_rng = cfg.streams()
    net = build_network(doc, cfg.alpha, cfg.mode, init_rng, slm_rng)
    weights = np.array([s.weight for s in doc.inputs], dtype=np.float64)
    if weights.sum() <= 0:
        raise ValidationError("input weights sum to zero")
    edges = np.cumsum(weights / weights.sum())
    picks = np.minimum(np.searchsorted(edges, input_rng.random(cfg.events_per_point), side="right"),
                       len(doc.inputs) - 1)
    msgs = [(s.port[0], Message(s.port[1], s.vector())) for s in doc.inputs]
    first = _retained(cfg.events_per_point, cfg.discard_fraction)
    for i in range(cfg.events_per_point):
        if i == first:
            net.reset_counters()
        entry, msg = msgs[picks[i]]
        net.route(msg, entry)

    labels = tuple(net.counters)
    sinks = tuple(i for i, k in enumerate(labels) if k not in net.taps)
    by_node: dict[str, list[int]] = {}
    for i, k in enumerate(labels):
        if k in net.taps:
            by_node.setdefault(net.taps[k][0], []).append(i)
    groups = ((sinks,) if sinks else ()) + tuple(tuple(g) for g in by_node.values())
    return FrequencyReport(
        tuple(net.counters[k] for k in labels), None, groups=groups, labels=labels,
        params={"events": cfg.events_per_point},
    )
