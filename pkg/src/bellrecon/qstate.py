"""Two-qubit states, density matrices and unitaries.

Everything here is hardwired to dimension 4. Amplitudes are stored as
numpy complex vectors together with a :class:`Basis` tag that says which
orthonormal basis the coordinates refer to.

Computational coordinates always use the conventional ordering
``(|00>, |01>, |10>, |11>)``. The element correspondence between the
computational, Bell and rotated bases (``|00>, |01>, |11>, |10>`` against
``b00, b01, b10, b11``) is kept separately in :data:`CORRESPONDENCE_ORDER`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ATOL_ALGEBRA = 1e-12
ATOL_SPECTRAL = 1e-10

SQ2 = np.sqrt(2.0)

# |00>, |01>, |10>, |11>
KET = np.eye(4, dtype=complex)

# b00, b01, b10, b11 as columns, in computational coordinates
BELL_MATRIX = np.array(
    [
        [1, 0, 1, 0],
        [0, 1, 0, 1],
        [0, 1, 0, -1],
        [1, 0, -1, 0],
    ],
    dtype=complex,
) / SQ2

# Position of the computational element that corresponds to the k-th Bell
# (or rotated) element: |00> <-> b00, |01> <-> b01, |11> <-> b10, |10> <-> b11.
CORRESPONDENCE_ORDER = (0, 1, 3, 2)

BELL_LABELS = ("b00", "b01", "b10", "b11")
ROTATED_LABELS = ("r00", "r01", "r10", "r11")
COMPUTATIONAL_LABELS = ("00", "01", "10", "11")


def rotated_in_bell(theta: float) -> np.ndarray:
    """Columns are r00, r01, r10, r11 written in Bell coordinates."""
    s, c = np.sin(theta), np.cos(theta)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, s, -c, 0],
            [0, -c, -s, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class Basis:
    """Tag for one of the three working bases.

    ``kind`` is ``"computational"``, ``"bell"`` or ``"rotated"``; the rotated
    basis carries its angle.
    """

    kind: str
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in ("computational", "bell", "rotated"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.kind == "rotated":
            if self.theta is None:
                raise ValueError("rotated basis needs theta")
            check_theta(self.theta)
        elif self.theta is not None:
            raise ValueError(f"{self.kind} basis takes no theta")

    @property
    def matrix(self) -> np.ndarray:
        """Basis vectors as columns, in computational coordinates."""
        if self.kind == "computational":
            return KET
        if self.kind == "bell":
            return BELL_MATRIX
        return BELL_MATRIX @ rotated_in_bell(self.theta)

    @property
    def labels(self) -> tuple[str, ...]:
        return {
            "computational": COMPUTATIONAL_LABELS,
            "bell": BELL_LABELS,
            "rotated": ROTATED_LABELS,
        }[self.kind]

    def correspondence_labels(self) -> tuple[str, ...]:
        """Element labels in the cross-basis correspondence order."""
        if self.kind == "computational":
            return tuple(COMPUTATIONAL_LABELS[i] for i in CORRESPONDENCE_ORDER)
        return self.labels


COMPUTATIONAL = Basis("computational")
BELL = Basis("bell")


def rotated(theta: float) -> Basis:
    return Basis("rotated", float(theta))


def check_theta(theta: float) -> float:
    if not (0.0 <= theta <= np.pi / 2):
        raise ValueError(f"theta={theta!r} outside [0, pi/2]")
    return float(theta)


def transform_matrix(source: Basis, target: Basis) -> np.ndarray:
    """Matrix taking coordinates in ``source`` to coordinates in ``target``."""
    if source == target:
        return np.eye(4, dtype=complex)
    return target.matrix.conj().T @ source.matrix


def _as_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=complex)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized 4-component state vector tagged with its basis."""

    amps: np.ndarray
    basis: Basis = field(default=COMPUTATIONAL)

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex).reshape(-1)
        if a.shape != (4,):
            raise ValueError(f"expected 4 amplitudes, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("state has non-finite amplitudes")
        norm = np.vdot(a, a).real
        if abs(norm - 1.0) > ATOL_ALGEBRA:
            raise ValueError(f"state not normalized (|psi|^2 = {norm!r})")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def normalized(cls, amps, basis: Basis = COMPUTATIONAL) -> "PureState":
        a = np.asarray(amps, dtype=complex)
        return cls(a / np.linalg.norm(a), basis)

    def to(self, target: Basis) -> "PureState":
        return change_basis(self, target)

    def computational(self) -> np.ndarray:
        """Amplitudes in conventional computational coordinates."""
        return self.basis.matrix @ self.amps

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amps, self.amps.conj()), self.basis)

    def __repr__(self):
        return f"PureState({np.array2string(self.amps, precision=6)}, {self.basis})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    m: np.ndarray
    basis: Basis = field(default=COMPUTATIONAL)

    def __post_init__(self):
        a = _as_matrix(self.m)
        if np.max(np.abs(a - a.conj().T)) > ATOL_ALGEBRA:
            raise ValueError("density matrix not Hermitian")
        if abs(np.trace(a).real - 1.0) > ATOL_ALGEBRA:
            raise ValueError("density matrix trace != 1")
        if np.min(np.linalg.eigvalsh(a)) < -ATOL_SPECTRAL:
            raise ValueError("density matrix not positive semidefinite")
        object.__setattr__(self, "m", a)

    def to(self, target: Basis) -> "DensityMatrix":
        w = transform_matrix(self.basis, target)
        return DensityMatrix(w @ self.m @ w.conj().T, target)


@dataclass(frozen=True, eq=False)
class Unitary4:
    """4x4 unitary operator whose matrix is written in ``basis`` coordinates."""

    m: np.ndarray
    basis: Basis = field(default=COMPUTATIONAL)

    def __post_init__(self):
        a = _as_matrix(self.m)
        if np.max(np.abs(a @ a.conj().T - np.eye(4))) > ATOL_SPECTRAL:
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "m", a)

    def to(self, target: Basis) -> "Unitary4":
        w = transform_matrix(self.basis, target)
        return Unitary4(w @ self.m @ w.conj().T, target)

    @property
    def dagger(self) -> "Unitary4":
        return Unitary4(self.m.conj().T, self.basis)

    def __matmul__(self, other):
        if isinstance(other, Unitary4):
            return Unitary4(self.m @ other.to(self.basis).m, self.basis)
        if isinstance(other, PureState):
            s = other.to(self.basis)
            return PureState.normalized(self.m @ s.amps, self.basis).to(other.basis)
        return NotImplemented

    def __repr__(self):
        return f"Unitary4(basis={self.basis},\n{np.array2string(self.m, precision=6)})"


def ket(label: str, basis: Basis = COMPUTATIONAL) -> PureState:
    """Basis element by label, e.g. ``ket("01")`` or ``ket("b10", BELL)``.

    The state is returned in the coordinates of ``basis``; the label may
    name an element of any of the three bases (rotated labels need a
    rotated ``basis`` to supply theta).
    """
    for b in (COMPUTATIONAL, BELL) + ((basis,) if basis.kind == "rotated" else ()):
        if label in b.labels:
            amps = np.zeros(4, dtype=complex)
            amps[b.labels.index(label)] = 1.0
            return PureState(amps, b).to(basis)
    raise ValueError(f"unknown basis element {label!r}")


def make_initial(which: int, theta: float) -> PureState:
    """The two source states ``b00`` and ``sin(theta) b01 - cos(theta) b10``.

    Returned in Bell coordinates.
    """
    check_theta(theta)
    if which == 1:
        return PureState([1, 0, 0, 0], BELL)
    if which == 2:
        return PureState([0, np.sin(theta), -np.cos(theta), 0], BELL)
    raise ValueError(f"which must be 1 or 2, got {which!r}")


def change_basis(s: PureState, target: Basis) -> PureState:
    if s.basis == target:
        return s
    return PureState(transform_matrix(s.basis, target) @ s.amps, target)


def overlap(a: PureState, b: PureState) -> complex:
    """<a|b>, converting ``b`` into the basis of ``a`` if needed."""
    return complex(np.vdot(a.amps, b.to(a.basis).amps))


def fidelity_pure(a: PureState, b: PureState) -> float:
    """|<a|b>|^2; insensitive to global phase."""
    return float(min(1.0, abs(overlap(a, b)) ** 2))


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    d = rho1.m - rho2.to(rho1.basis).m
    return float(0.5 * np.sum(np.linalg.svd(d, compute_uv=False)))


_SYSY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(s: PureState) -> float:
    """Pure-state concurrence |<psi| sy x sy |psi*>|."""
    psi = s.computational()
    return float(abs(psi @ _SYSY @ psi))


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = ATOL_ALGEBRA) -> bool:
    """True when ``a = exp(i phi) b`` entrywise for some real phi."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) < atol:
        return bool(np.max(np.abs(a)) < atol)
    phase = a[k] / b[k]
    if abs(abs(phase) - 1.0) > 10 * atol:
        return False
    return bool(np.max(np.abs(a - phase * b)) < atol)


def remove_global_phase(m: np.ndarray) -> np.ndarray:
    """Divide by the phase of the first entry of largest modulus."""
    m = np.asarray(m, dtype=complex)
    flat = m.reshape(-1)
    k = np.argmax(np.abs(flat) > 0.5 * np.max(np.abs(flat)))
    return m * (abs(flat[k]) / flat[k])


def projector(*states: PureState, basis: Basis = COMPUTATIONAL) -> np.ndarray:
    """Sum of |s><s| over ``states``, written in ``basis`` coordinates."""
    p = np.zeros((4, 4), dtype=complex)
    for s in states:
        v = s.to(basis).amps
        p += np.outer(v, v.conj())
    return p


def random_state(rng: np.random.Generator, basis: Basis = COMPUTATIONAL) -> PureState:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return PureState.normalized(v, basis)


def outcome_distance(rho1: DensityMatrix, rho2: DensityMatrix, basis: Basis = COMPUTATIONAL) -> float:
    """Total-variation distance between the outcome statistics of measuring in ``basis``.

    This is the trace distance of the two states after full dephasing in
    ``basis``; it never exceeds :func:`trace_distance`.
    """
    p1 = np.real(np.diag(rho1.to(basis).m))
    p2 = np.real(np.diag(rho2.to(basis).m))
    return float(0.5 * np.sum(np.abs(p1 - p2)))
