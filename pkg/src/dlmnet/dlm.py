"""Deterministic learning machines.

A DLM holds a unit vector of ``num_event_types * message_len`` components.
On every input it builds ``2 * D`` candidate vectors, each obtained by
shrinking all components by ``alpha`` and replacing one of them with
``+/- sqrt(1 - alpha**2 + alpha**2 * x_j**2)``, and keeps the candidate with
the largest overlap with the target vector. The rule it picked decides the
type of the event it emits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

NORM_TOL = 1e-12
PAYLOAD_TOL = 1e-9


class DegenerateOutputWarning(RuntimeWarning):
    """The block selected for output had zero norm."""


@dataclass(frozen=True)
class CandidateRule:
    index: int
    sign: int  # +1 or -1

    @property
    def flat(self) -> int:
        """Position of this rule in the canonical order (index, + before -)."""
        return 2 * self.index + (0 if self.sign > 0 else 1)

    @classmethod
    def from_flat(cls, m: int) -> CandidateRule:
        index, s = divmod(int(m), 2)
        return cls(index, 1 if s == 0 else -1)


@dataclass(eq=False)
class Message:
    event_type: int
    payload: np.ndarray

    def __post_init__(self):
        self.payload = np.asarray(self.payload, dtype=np.float64)
        if self.event_type < 0:
            raise ValidationError(f"negative event type {self.event_type}")
        norm = math.sqrt(float(self.payload @ self.payload))
        if abs(norm - 1.0) > PAYLOAD_TOL:
            raise ValidationError(f"message payload must be a unit vector, got norm {norm!r}")

    def __eq__(self, other):
        if not isinstance(other, Message):
            return NotImplemented
        return self.event_type == other.event_type and np.array_equal(self.payload, other.payload)


@dataclass(eq=False)
class DlmState:
    values: np.ndarray
    alpha: float
    num_event_types: int = 2
    message_len: int = 2
    selections: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.values = np.array(self.values, dtype=np.float64)
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.num_event_types < 2 or self.message_len < 1:
            raise ValidationError("need num_event_types >= 2 and message_len >= 1")
        if self.values.shape != (self.dim,):
            raise ValidationError(
                f"internal vector has shape {self.values.shape}, expected ({self.dim},)"
            )
        norm = float(np.linalg.norm(self.values))
        if abs(norm - 1.0) > 1e-9:
            raise ValidationError(f"internal vector must be a unit vector, got norm {norm!r}")
        # rule-usage histogram, indexed by CandidateRule.flat
        self.selections = np.zeros(2 * self.dim, dtype=np.int64)

    @property
    def dim(self) -> int:
        return self.num_event_types * self.message_len

    @classmethod
    def random(cls, rng: np.random.Generator, alpha: float, num_event_types: int = 2,
               message_len: int = 2) -> DlmState:
        """Draw the internal vector uniformly from the unit sphere."""
        v = rng.standard_normal(num_event_types * message_len)
        return cls(v / np.linalg.norm(v), alpha, num_event_types, message_len)

    def block(self, k: int) -> np.ndarray:
        return self.values[k * self.message_len:(k + 1) * self.message_len]

    def block_masses(self) -> np.ndarray:
        return (self.values ** 2).reshape(self.num_event_types, self.message_len).sum(axis=1)

    def copy(self) -> DlmState:
        new = DlmState(self.values.copy(), self.alpha, self.num_event_types, self.message_len)
        new.selections = self.selections.copy()
        return new


def all_rules(dim: int) -> list[CandidateRule]:
    return [CandidateRule.from_flat(m) for m in range(2 * dim)]


def candidate_state(state: DlmState, rule: CandidateRule) -> np.ndarray:
    x = state.values
    a = state.alpha
    w = a * x
    j = rule.index
    w[j] = rule.sign * math.sqrt(1.0 - a * a + a * a * x[j] * x[j])
    return w


def build_target(state: DlmState, msg: Message) -> np.ndarray:
    k = msg.event_type
    if not 0 <= k < state.num_event_types:
        raise ValidationError(
            f"event type {k} out of range for a DLM with {state.num_event_types} event types"
        )
    if msg.payload.shape != (state.message_len,):
        raise ValidationError(
            f"payload length {msg.payload.shape[0]} does not match message_len {state.message_len}"
        )
    target = state.values.copy()
    target[k * state.message_len:(k + 1) * state.message_len] = msg.payload
    return target


def candidate_costs(state: DlmState, target: np.ndarray) -> np.ndarray:
    """Costs ``-w_m . target`` of all ``2 * D`` candidates, in canonical rule order.

    Every candidate shares the shrunk part ``alpha * x``; only the replaced
    component differs, so the full set is computed in O(D).
    """
    x = state.values
    a = state.alpha
    t = np.asarray(target, dtype=np.float64)
    root = np.sqrt(1.0 - a * a + a * a * x * x)
    shrunk = a * x
    rest = float(shrunk @ t) - shrunk * t
    costs = np.empty(2 * x.shape[0])
    costs[0::2] = -(rest + root * t)
    costs[1::2] = -(rest - root * t)
    return costs


def select_rule(state: DlmState, target: np.ndarray) -> CandidateRule:
    """Rule with the lowest cost; ties go to the lowest index, ``+`` before ``-``."""
    # np.argmin returns the first minimum, which is exactly the tie order above
    return CandidateRule.from_flat(int(np.argmin(candidate_costs(state, target))))


def learn(state: DlmState, target: np.ndarray) -> tuple[DlmState, CandidateRule]:
    """Replace the internal vector by the best candidate. Mutates ``state``."""
    rule = select_rule(state, target)
    state.values = candidate_state(state, rule)
    state.selections[rule.flat] += 1
    return state, rule


def _block_message(state: DlmState, k: int) -> Message:
    b = state.block(k)
    norm = float(np.linalg.norm(b))
    if norm == 0.0:
        warnings.warn(f"output block {k} has zero norm; emitting first basis vector",
                      DegenerateOutputWarning, stacklevel=3)
        payload = np.zeros(state.message_len)
        payload[0] = 1.0
        return Message(k, payload)
    return Message(k, b / norm)


def deterministic_output(rule: CandidateRule, state_after: DlmState) -> Message:
    return _block_message(state_after, rule.index // state_after.message_len)


def stochastic_output(state_after: DlmState, rng_draw: float) -> Message:
    """Pick the output block whose cumulative mass interval contains ``rng_draw``."""
    if not 0.0 <= rng_draw < 1.0:
        raise ValidationError(f"random draw must lie in [0, 1), got {rng_draw}")
    edges = np.cumsum(state_after.block_masses())
    k = int(np.searchsorted(edges, rng_draw, side="right"))
    # rounding can leave the last edge a hair below 1
    k = min(k, state_after.num_event_types - 1)
    return _block_message(state_after, k)
