"""Discrimination measurements for the reconstructed pair.

A :class:`MeasurementSet` groups effects into the two decision operators
``e1`` (declare state 1), ``e2`` (declare state 2) and an optional
inconclusive effect. Operators are stored as matrices in the coordinates
of the set's basis tag.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import reconstructed_pair
from .qstate import (
    ATOL_ALGEBRA,
    ATOL_SPECTRAL,
    BELL,
    COMPUTATIONAL,
    Basis,
    PureState,
    Unitary4,
    ket,
    make_initial,
    rotated,
    rotated_in_bell,
    transform_matrix,
)

BUILTIN_LABELS = ("M_C", "M_B", "M_B'", "M_R")

# Positions (in storage order) whose projectors form e1 for each builtin set.
# M_C / M_B pair |00>,|11> and b00,b10; M_B' / M_R pair b00,b11 and r00,r11.
_E1_POSITIONS = {
    "M_C": (0, 3),
    "M_B": (0, 2),
    "M_B'": (0, 3),
    "M_R": (0, 3),
}


def _psd(m: np.ndarray, atol: float = ATOL_SPECTRAL) -> bool:
    return bool(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) >= -atol)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    label: str
    e1: np.ndarray
    e2: np.ndarray
    e_inc: np.ndarray = field(default=None)
    basis: Basis = field(default=COMPUTATIONAL)

    def __post_init__(self):
        e_inc = np.zeros((4, 4), dtype=complex) if self.e_inc is None else self.e_inc
        ops = []
        for name, m in (("e1", self.e1), ("e2", self.e2), ("e_inc", e_inc)):
            a = np.array(m, dtype=complex)
            if a.shape != (4, 4):
                raise ValueError(f"{name} must be 4x4")
            if not _psd(a):
                raise ValueError(f"{name} is not positive semidefinite")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
            ops.append(a)
        if np.max(np.abs(sum(ops) - np.eye(4))) > ATOL_ALGEBRA:
            raise ValueError("effects do not sum to the identity")

    @property
    def effects(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.e1, self.e2, self.e_inc

    def to(self, target: Basis) -> "MeasurementSet":
        w = transform_matrix(self.basis, target)
        e1, e2, ei = (w @ e @ w.conj().T for e in self.effects)
        return MeasurementSet(self.label, e1, e2, ei, target)

    def pre_rotated(self, u: Unitary4) -> "MeasurementSet":
        """The set measured after applying ``u``: effects become ``U^dag E U``."""
        m = u.to(self.basis).m
        e1, e2, ei = (m.conj().T @ e @ m for e in self.effects)
        return MeasurementSet(self.label, e1, e2, ei, self.basis)

    def equals(self, other: "MeasurementSet", atol: float = ATOL_ALGEBRA) -> bool:
        o = other.to(self.basis)
        return all(np.max(np.abs(a - b)) < atol for a, b in zip(self.effects, o.effects))


@dataclass(frozen=True)
class DiscriminationResult:
    p_h1: float
    p_h2: float
    p_inconclusive: float
    avg_fidelity: float


def _natural_basis(label: str, theta: float | None) -> Basis:
    if label == "M_C":
        return COMPUTATIONAL
    if label in ("M_B", "M_B'"):
        return BELL
    if theta is None:
        raise ValueError("M_R needs theta")
    return rotated(theta)


def builtin_set(label: str, theta: float | None = None) -> MeasurementSet:
    """One of the four projective partitions ``M_C, M_B, M_B', M_R``.

    Returned in its natural basis (computational for ``M_C``, Bell for
    ``M_B`` and ``M_B'``, rotated by ``theta`` for ``M_R``); use
    :meth:`MeasurementSet.to` to re-express.
    """
    if label not in _E1_POSITIONS:
        raise ValueError(f"unknown measurement set {label!r}; choose from {BUILTIN_LABELS}")
    basis = _natural_basis(label, theta)
    d = np.zeros(4)
    d[list(_E1_POSITIONS[label])] = 1.0
    return MeasurementSet(label, np.diag(d), np.diag(1.0 - d), None, basis)


def probability_matrix(ms: MeasurementSet, b1: PureState, b2: PureState) -> np.ndarray:
    """Array ``P[k, j] = <b_k| E_j |b_k>`` for ``j`` in (1, 2, inconclusive)."""
    for b in (b1, b2):
        if b.basis != ms.basis:
            raise ValueError(f"state basis {b.basis} differs from measurement basis {ms.basis}")
    out = np.empty((2, 3))
    for k, b in enumerate((b1, b2)):
        for j, e in enumerate(ms.effects):
            out[k, j] = np.vdot(b.amps, e @ b.amps).real
    return np.clip(out, 0.0, 1.0)


def helstrom(ms: MeasurementSet, b1: PureState, b2: PureState) -> DiscriminationResult:
    """Correct-identification probabilities of the two premeasured states.

    ``avg_fidelity`` assumes faithful repreparation of the (orthogonal)
    source states, so it is the mean of the two success probabilities.
    """
    p = probability_matrix(ms, b1, b2)
    p_h1, p_h2 = p[0, 0], p[1, 1]
    return DiscriminationResult(
        p_h1=float(p_h1),
        p_h2=float(p_h2),
        p_inconclusive=float(0.5 * (p[0, 2] + p[1, 2])),
        avg_fidelity=float(0.5 * (p_h1 + p_h2)),
    )


def _resolve_set(ms, theta: float) -> MeasurementSet:
    if isinstance(ms, MeasurementSet):
        return ms
    return builtin_set(ms, theta)


def average_fidelity(ms, theta: float, n: int, delta: float,
                     repreparation_perfect: bool = True) -> float:
    """Average fidelity of discriminate-then-reprepare after reconstruction.

    ``ms`` is a :class:`MeasurementSet` or a builtin label. State ``k`` is
    produced with probability 1/2, declared ``j`` with probability
    ``<b''_k|E_j|b''_k>``, and the declared state is reprepared. With
    ``repreparation_perfect`` the reprepared state is the source state
    ``b_j``; otherwise it is the reconstructed ``b''_j`` itself. An
    inconclusive outcome contributes nothing.
    """
    ms = _resolve_set(ms, theta)
    pre = reconstructed_pair(theta, n, delta)
    targets = [make_initial(k, theta) for k in (1, 2)]
    reprepared = targets if repreparation_perfect else list(pre)
    premeasured = [b.to(ms.basis) for b in pre]
    p = probability_matrix(ms, *premeasured)
    total = 0.0
    for k in range(2):
        for j in range(2):
            overlap = abs(np.vdot(reprepared[j].amps, targets[k].to(reprepared[j].basis).amps)) ** 2
            total += p[k, j] * overlap
    return float(0.5 * total)


def fidelity_cb(theta: float) -> float:
    return 1.0 - 0.5 * math.cos(theta) ** 2


def fidelity_bprime(theta: float, n: int, delta: float) -> float:
    return 1.0 - 0.5 * math.sin(2 * n * math.pi * delta) ** 2 * (1.0 + math.cos(theta) ** 2)


OVERLAP_TABLE_ROWS = ("00", "01", "10", "11", "b00", "b01", "b10", "b11", "r00", "r01", "r10", "r11")


def overlap_table(theta: float, n: int, delta: float) -> dict[str, tuple[float, float]]:
    """Squared overlaps of every basis element with both reconstructed states.

    Keys are element labels (``"01"``, ``"b10"``, ``"r01"``, ...); values
    are ``(|<phi|b''_1>|^2, |<phi|b''_2>|^2)``.
    """
    b1, b2 = reconstructed_pair(theta, n, delta)
    rb = rotated(theta)
    out = {}
    for label in OVERLAP_TABLE_ROWS:
        phi = ket(label, rb)
        out[label] = tuple(
            float(abs(np.vdot(phi.amps, b.to(rb).amps)) ** 2) for b in (b1, b2)
        )
    return out


# --- fidelity-invariance subgroup -------------------------------------------

def _block_unitary(block: np.ndarray) -> bool:
    return bool(np.max(np.abs(block @ block.conj().T - np.eye(2))) < ATOL_SPECTRAL)


def commutant_member(a11, a12, a21, a22, b11, b12, b21, b22,
                     basis: Basis = BELL) -> Unitary4:
    """Unitary commuting with the basis' first/last vs middle partition.

    The outer block ``[[a11, b11], [b12, a12]]`` acts on storage positions
    1 and 4, the inner block ``[[a21, b21], [b22, a22]]`` on positions 2
    and 3. Both blocks must be 2x2 unitaries.
    """
    outer = np.array([[a11, b11], [b12, a12]], dtype=complex)
    inner = np.array([[a21, b21], [b22, a22]], dtype=complex)
    for name, b in (("outer", outer), ("inner", inner)):
        if not _block_unitary(b):
            raise ValueError(f"{name} block is not unitary")
    u = np.zeros((4, 4), dtype=complex)
    u[np.ix_([0, 3], [0, 3])] = outer
    u[np.ix_([1, 2], [1, 2])] = inner
    return Unitary4(u, basis)


def commutant_partition(basis: Basis) -> MeasurementSet:
    """The partition (positions 1,4 vs 2,3) left invariant by commutant members."""
    label = {"computational": "M_C", "bell": "M_B'", "rotated": "M_R"}[basis.kind]
    d = np.array([1.0, 0.0, 0.0, 1.0])
    return MeasurementSet(label, np.diag(d), np.diag(1 - d), None, basis)


def _random_u2(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_commutant_member(rng: np.random.Generator, basis: Basis = BELL) -> Unitary4:
    o, i = _random_u2(rng), _random_u2(rng)
    return commutant_member(o[0, 0], o[1, 1], i[0, 0], i[1, 1],
                            o[0, 1], o[1, 0], i[0, 1], i[1, 0], basis)


def is_commutant_member(u: Unitary4, atol: float = ATOL_SPECTRAL) -> bool:
    e1 = commutant_partition(u.basis).e1
    return bool(np.max(np.abs(u.m @ e1 - e1 @ u.m)) < atol)


def printed_constraints_hold(u: Unitary4, atol: float = ATOL_SPECTRAL) -> bool:
    """Check the unconjugated block constraints on a commutant member.

    Tests ``a_ij^2 + b_ij^2 = 1`` for all four (a, b) pairs and
    ``a_i1 b_i2 + a_i2 b_i1 = 0`` for both blocks, literally, with no
    complex conjugation. Returns whether they hold; they generally do not
    for complex blocks.
    """
    m = u.m
    a = {(1, 1): m[0, 0], (1, 2): m[3, 3], (2, 1): m[1, 1], (2, 2): m[2, 2]}
    b = {(1, 1): m[0, 3], (1, 2): m[3, 0], (2, 1): m[1, 2], (2, 2): m[2, 1]}
    ok = all(abs(a[k] ** 2 + b[k] ** 2 - 1) < atol for k in a)
    ok &= all(abs(a[(i, 1)] * b[(i, 2)] + a[(i, 2)] * b[(i, 1)]) < atol for i in (1, 2))
    return bool(ok)


U_CB_PRINTED = np.array(
    [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, -1, 0], [1, 0, 0, -1]], dtype=complex
) / math.sqrt(2)


def u_cb() -> Unitary4:
    """Computational-to-Bell change of frame, computational coordinates."""
    return Unitary4(U_CB_PRINTED, COMPUTATIONAL)


def u_br(theta: float) -> Unitary4:
    """Bell-to-rotated change of frame, Bell coordinates."""
    return Unitary4(rotated_in_bell(theta), BELL)


# --- optimal and Bell-diagonal measurements ---------------------------------

def optimal_povm(b1: PureState, b2: PureState, atol: float = 1e-12) -> MeasurementSet:
    """Unambiguous-discrimination POVM for two pure states.

    ``E_k = (P_span - |b_k'><b_k'|) / (1 + |<b_1|b_2>|)`` for ``k != k'``,
    where ``P_span`` projects on ``span{b1, b2}``; everything else is
    inconclusive. On both states the inconclusive weight is ``|<b_1|b_2>|``.
    For orthogonal inputs the decision effects are the two projectors.
    """
    basis = b1.basis
    v1, v2 = b1.amps, b2.to(basis).amps
    c = abs(np.vdot(v1, v2))
    # orthonormal basis of the span via Gram-Schmidt
    w = v2 - np.vdot(v1, v2) * v1
    p_span = np.outer(v1, v1.conj())
    if np.linalg.norm(w) > atol:
        w = w / np.linalg.norm(w)
        p_span = p_span + np.outer(w, w.conj())
    p1, p2 = np.outer(v1, v1.conj()), np.outer(v2, v2.conj())
    e1 = (p_span - p2) / (1 + c)
    e2 = (p_span - p1) / (1 + c)
    return MeasurementSet("optimal", e1, e2, np.eye(4) - e1 - e2, basis)


def optimal_projective(b1: PureState, b2: PureState) -> MeasurementSet:
    """Projective set {|b1><b1|, |b2><b2|} padded with the complement.

    Only meaningful for orthogonal inputs; the complement goes to ``e_inc``.
    """
    basis = b1.basis
    p1 = np.outer(b1.amps, b1.amps.conj())
    v2 = b2.to(basis).amps
    p2 = np.outer(v2, v2.conj())
    return MeasurementSet("optimal_projective", p1, p2, np.eye(4) - p1 - p2, basis)


def bell_diagonal_optima(theta: float, n: int, delta: float) -> dict[int, list[tuple[str, float]]]:
    """Critical single-projector probabilities for Bell-diagonal measurements.

    For each reconstructed state ``k`` lists ``(label, |<b_ij|b''_k>|^2)``
    for the Bell projectors at which ``<b''_k|M^dag M|b''_k>`` is critical.
    """
    b1, b2 = reconstructed_pair(theta, n, delta)
    pick = {1: ("b00", "b10"), 2: ("b00", "b10", "b01")}
    out = {}
    for k, b in ((1, b1), (2, b2)):
        probs = np.abs(b.to(BELL).amps) ** 2
        out[k] = [(lab, float(probs[BELL.labels.index(lab)])) for lab in pick[k]]
    return out


def bell_diagonal_grid_max(state: PureState, resolution: int = 50) -> tuple[float, str]:
    """Grid search over rank-one Bell-diagonal ``M = alpha |b_ij><b_ij|``.

    ``|alpha|`` runs over ``resolution`` points of [0, 1] on every axis
    (phases do not enter the probability). Returns the best probability
    and its projector label.
    """
    probs = np.abs(state.to(BELL).amps) ** 2
    mags = np.linspace(0.0, 1.0, resolution)
    vals = np.outer(mags ** 2, probs)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    return float(vals[i, j]), BELL.labels[j]


def extended_orthogonal_set(theta: float, n: int, delta: float) -> tuple[PureState, PureState]:
    """Two states completing the reconstructed pair to an orthonormal basis."""
    a = 2 * n * math.pi * delta
    st, ct = math.sin(theta), math.cos(theta)
    e1 = np.exp(-1j * a)
    b3 = PureState(
        [1j * e1 * math.sin(a) * st, -np.exp(-2j * a) * ct, -e1 * math.cos(a) * st, 0], BELL
    )
    b4 = PureState([0, 0, 0, 1], BELL)
    return b3, b4


def extended_partition(theta: float, n: int, delta: float) -> MeasurementSet:
    """Projective set ``{b''_1 + b''_4, b''_2 + b''_3}`` built on the extended basis."""
    b1, b2 = reconstructed_pair(theta, n, delta)
    b3, b4 = extended_orthogonal_set(theta, n, delta)

    def proj(*states):
        return sum(np.outer(s.amps, s.amps.conj()) for s in states)

    return MeasurementSet("extended", proj(b1, b4), proj(b2, b3), None, BELL)
