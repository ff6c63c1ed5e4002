"""Quantum-theory predictions used as ground truth for the DLM networks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .transforms import BEAM_SPLITTER, CNOT, HADAMARD, check_unitary, lift_unitary

NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        total = float(np.sum(np.abs(a) ** 2))
        if abs(total - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized (sum |a|^2 = {total!r})")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def basis(cls, k: int, n: int = 4) -> QuantumState:
        a = np.zeros(n, dtype=complex)
        a[k] = 1.0
        return cls(a)


def _check_pair(a0: complex, a1: complex) -> np.ndarray:
    a = np.array([a0, a1], dtype=complex)
    total = float(np.sum(np.abs(a) ** 2))
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"input amplitudes are not normalized (|a0|^2+|a1|^2 = {total!r})")
    return a


def bs_output(a0: complex, a1: complex) -> tuple[complex, complex]:
    b = BEAM_SPLITTER @ _check_pair(a0, a1)
    return complex(b[0]), complex(b[1])


def mzi_unitary(phi0: float, phi1: float) -> np.ndarray:
    """Beam splitter, phase shifts ``phi0``/``phi1`` (degrees) on the arms, beam splitter."""
    shifts = np.diag(np.exp(1j * np.radians([phi0, phi1])))
    return BEAM_SPLITTER @ shifts @ BEAM_SPLITTER


def mzi_output(a0: complex, a1: complex, phi0: float, phi1: float) -> tuple[complex, complex]:
    b = mzi_unitary(phi0, phi1) @ _check_pair(a0, a1)
    return complex(b[0]), complex(b[1])


def beam_splitter_probability(p0: float, psi0: float, psi1: float) -> float:
    """|b0|^2 for ``a0 = sqrt(p0) e^{i psi0}``, ``a1 = sqrt(1-p0) e^{i psi1}`` (degrees)."""
    return 0.5 + math.sqrt(p0 * (1.0 - p0)) * math.sin(math.radians(psi0 - psi1))


def mzi_probability(phi0: float, phi1: float) -> float:
    """|b0|^2 of the interferometer when only input 0 is fed."""
    return math.sin(math.radians(phi0 - phi1) / 2.0) ** 2


def probabilities(state: QuantumState) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def apply_gate(state: QuantumState, gate: np.ndarray, targets: int | None = None) -> QuantumState:
    """Apply ``gate`` to a two-qubit state.

    A 2x2 gate acts on qubit ``targets`` (0 = least significant); a 4x4 gate
    acts on the whole register and ``targets`` must be omitted.
    """
    gate = check_unitary(gate)
    n = state.amplitudes.shape[0]
    if gate.shape == (2, 2) and n == 4:
        if targets is None:
            raise ValidationError("single-qubit gate needs a target qubit")
        full = lift_unitary(gate, targets)
    elif gate.shape == (n, n):
        if targets is not None:
            raise ValidationError("a full-register gate takes no target")
        full = gate
    else:
        raise ValidationError(f"gate of shape {gate.shape} does not fit a {n}-amplitude state")
    out = full @ state.amplitudes
    # renormalize away rounding so chained gates keep the 1e-12 invariant
    out = out / math.sqrt(float(np.sum(np.abs(out) ** 2)))
    return QuantumState(out)


def cnot_circuit_unitary() -> np.ndarray:
    """Hadamard on both qubits, CNOT with control on qubit 1, Hadamard on both."""
    hh = lift_unitary(HADAMARD, 1) @ lift_unitary(HADAMARD, 0)
    return hh @ CNOT @ hh


def cnot_circuit_output(qubit1: int, qubit2: int) -> np.ndarray:
    """Outcome probabilities of the circuit for a basis input (qubit 1 = LSB)."""
    state = QuantumState.basis(qubit1 + 2 * qubit2)
    for gate, target in ((HADAMARD, 0), (HADAMARD, 1), (CNOT, None), (HADAMARD, 0), (HADAMARD, 1)):
        state = apply_gate(state, gate, target)
    return probabilities(state)
