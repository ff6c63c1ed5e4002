"""Orthogonal transformation stages.

Complex amplitudes map onto real vectors with the real part at even and the
imaginary part at odd positions, ``a_k = x[2k] + i x[2k+1]``. Two-qubit basis
states are ordered with qubit 1 as the least significant bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

ORTHO_TOL = 1e-12
UNITARY_TOL = 1e-10

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
BEAM_SPLITTER = np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2)
# control = qubit 1 (LSB): |01> <-> |11>
CNOT = np.eye(4, dtype=complex)[[0, 3, 2, 1]]


@dataclass(frozen=True, eq=False)
class Transform:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"transform must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def __matmul__(self, other: Transform) -> Transform:
        return Transform(self.matrix @ other.matrix)

    def orthogonality_error(self) -> float:
        return float(np.abs(self.matrix @ self.matrix.T - np.eye(self.dim)).max())

    def is_orthogonal(self, tol: float = ORTHO_TOL) -> bool:
        return self.orthogonality_error() <= tol


def plane_rotation(phi: float) -> Transform:
    """Rotation of a 2-vector by ``phi`` degrees."""
    c, s = math.cos(math.radians(phi)), math.sin(math.radians(phi))
    return Transform(np.array([[c, -s], [s, c]]))


def rotate_in_plane(dim: int, i: int, j: int, phi: float) -> Transform:
    """Rotation by ``phi`` degrees acting on the component pair ``(i, j)``."""
    m = np.eye(dim)
    r = plane_rotation(phi).matrix
    m[np.ix_([i, j], [i, j])] = r
    return Transform(m)


def beam_splitter_transform() -> Transform:
    # R(45) on (x0, x3) and on (x2, x1); the two rotations commute
    return rotate_in_plane(4, 0, 3, 45.0) @ rotate_in_plane(4, 2, 1, 45.0)


def hadamard_transform() -> Transform:
    return Transform(np.array([
        [1, 0, 1, 0],
        [0, 1, 0, 1],
        [1, 0, -1, 0],
        [0, 1, 0, -1],
    ]) / math.sqrt(2))


def cnot_transform() -> Transform:
    perm = [0, 1, 6, 7, 4, 5, 2, 3]
    return Transform(np.eye(8)[perm])


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {u.shape}")
    err = float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())
    if err > tol:
        raise ValidationError(f"matrix is not unitary (max deviation {err:.3g})")
    return u


def embed_unitary(u: np.ndarray) -> Transform:
    """Real orthogonal image of a complex unitary; ``a+bi`` -> ``[[a, -b], [b, a]]``."""
    u = check_unitary(u)
    n = u.shape[0]
    m = np.empty((2 * n, 2 * n))
    m[0::2, 0::2] = u.real
    m[0::2, 1::2] = -u.imag
    m[1::2, 0::2] = u.imag
    m[1::2, 1::2] = u.real
    return Transform(m)


def lift_unitary(u: np.ndarray, target_qubit: int) -> np.ndarray:
    """Complex 4x4 operator applying ``u`` to one qubit of a two-qubit register.

    ``target_qubit`` is 0 for the least significant qubit ("qubit 1" in the
    usual two-qubit labelling) and 1 for the most significant one.
    """
    u = check_unitary(u)
    if u.shape != (2, 2):
        raise ValidationError("single-qubit gate must be 2x2")
    eye = np.eye(2, dtype=complex)
    if target_qubit == 0:
        return np.kron(eye, u)
    if target_qubit == 1:
        return np.kron(u, eye)
    raise ValidationError(f"target qubit must be 0 or 1, got {target_qubit}")


def lift_single_qubit(u: np.ndarray, target_qubit: int) -> Transform:
    return embed_unitary(lift_unitary(u, target_qubit))
