"""Pulse-generated gates and the repreparation words.

A single-qubit pulse of area ``a`` along axis ``sigma`` is
``I cos(a) - i Sigma sin(a)``. The gates X, Y, Z, S and H are realized
from such pulses and agree with the textbook matrices up to a global
phase. Qubit 1 is the left tensor factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import PAULI_X, PAULI_Y, PAULI_Z, I2
from .qstate import BELL, COMPUTATIONAL, PureState, check_theta, fidelity_pure, ket, make_initial

_AXES = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

TEXTBOOK = {
    "X": PAULI_X,
    "Y": PAULI_Y,
    "Z": PAULI_Z,
    "S": np.diag([1, 1j]),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
}


@dataclass(frozen=True)
class PulseSpec:
    axis: str
    area: float

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(f"axis must be x, y or z, got {self.axis!r}")
        if not math.isfinite(self.area):
            raise ValueError("pulse area must be finite")


def pulse_gate(p: PulseSpec) -> np.ndarray:
    return I2 * math.cos(p.area) - 1j * _AXES[p.axis] * math.sin(p.area)


def pulse_sequence(label: str, theta: float | None = None, p: int = 0, q: int = 0) -> list[PulseSpec]:
    """Pulses (rightmost applied first) realizing a single-qubit gate."""
    if label in ("X", "Y", "Z"):
        return [PulseSpec(label.lower(), (2 * p + 1) * math.pi / 2)]
    if label == "S":
        return [PulseSpec("z", (4 * p + 1) * math.pi / 4)]
    if label == "H":
        return [PulseSpec("x", (2 * p + 1) * math.pi / 2), PulseSpec("y", (4 * q + 1) * math.pi / 4)]
    if label == "U":
        if theta is None:
            raise ValueError("U gate needs theta")
        return [PulseSpec("z", theta)]
    raise ValueError(f"unknown single-qubit gate {label!r}")


def realize_gate(label: str, theta: float | None = None, p: int = 0, q: int = 0) -> np.ndarray:
    """Matrix of a pulse-realized gate.

    ``label`` is one of X, Y, Z, S, H, U (the z-rotation ``U_theta``) or
    ``C12`` for the controlled-not with qubit 1 as control. Single-qubit
    gates are 2x2; ``C12`` is 4x4.
    """
    if label == "C12":
        return CNOT.copy()
    out = I2.copy()
    for spec in pulse_sequence(label, theta, p, q):
        out = out @ pulse_gate(spec)
    return out


@dataclass(frozen=True)
class Gate:
    label: str
    target: int = 1
    theta: float | None = None

    def __str__(self):
        if self.label == "C12":
            return "C12"
        sub = f"{self.target}" if self.theta is None else f"{self.target}(theta={self.theta:.6g})"
        return f"{self.label}_{sub}"

    def matrix(self) -> np.ndarray:
        g = realize_gate(self.label, self.theta)
        if self.label == "C12":
            return g
        if self.target == 1:
            return np.kron(g, I2)
        if self.target == 2:
            return np.kron(I2, g)
        raise ValueError(f"target qubit must be 1 or 2, got {self.target!r}")


class GateWord(tuple):
    """Ordered gate product; the leftmost gate acts last."""

    def __new__(cls, gates):
        gates = tuple(gates)
        if not gates:
            raise ValueError("a gate word cannot be empty")
        return super().__new__(cls, gates)

    def matrix(self) -> np.ndarray:
        out = np.eye(4, dtype=complex)
        for g in self:
            out = out @ g.matrix()
        return out

    def __str__(self):
        return " ".join(str(g) for g in self)


def _bell_frame() -> list[Gate]:
    return [Gate("C12"), Gate("H", 1), Gate("C12")]


def _kernel(theta: float) -> list[Gate]:
    return [Gate("H", 1), Gate("U", 1, theta), Gate("H", 1)]


def repreparation_word(measured: str, theta: float) -> GateWord:
    if measured == "00":
        return GateWord(_bell_frame())
    if measured == "01":
        return GateWord(_bell_frame() + [Gate("Y", 1), Gate("S", 1)] + _kernel(theta))
    if measured == "11":
        return GateWord(_bell_frame() + [Gate("Y", 1), Gate("S", 1), Gate("X", 1)] + _kernel(theta))
    raise ValueError(
        f"no repreparation word for outcome |{measured}>; defined for 00, 01 and 11"
    )


# Source state each readout outcome is identified with.
DECISION = {"00": 1, "01": 2, "11": 2}


def reprepare(measured: str, theta: float) -> tuple[GateWord, PureState]:
    """Gate word for a readout outcome and the state it produces from ``|ij>``.

    The result is in Bell coordinates and equals the identified source
    state up to a global phase.
    """
    check_theta(theta)
    word = repreparation_word(measured, theta)
    out = PureState.normalized(word.matrix() @ ket(measured).amps, COMPUTATIONAL)
    return word, out.to(BELL)


def verify_repreparation(measured: str, theta: float) -> float:
    _, out = reprepare(measured, theta)
    return fidelity_pure(make_initial(DECISION[measured], theta), out)


def kernel_identity_check(theta: float, j: int, atol: float = 1e-12) -> bool:
    """Check ``H U_theta H |j> = cos(theta)|j> - i sin(theta)|j xor 1>`` up to phase."""
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    h = realize_gate("H")
    lhs = h @ realize_gate("U", theta) @ h @ np.eye(2)[j]
    rhs = math.cos(theta) * np.eye(2)[j] - 1j * math.sin(theta) * np.eye(2)[1 - j]
    return bool(abs(abs(np.vdot(rhs, lhs)) - 1.0) < atol)
