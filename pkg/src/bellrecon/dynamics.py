"""Heisenberg pair dynamics: distortion and pulsed-field reconstruction.

All public times are dimensionless, ``t' = R t``. The Hamiltonian is

    H = -J (sx sx + sy sy + sz sz) + B1 sz x 1 + B2 1 x sz

and the derived parameters are ``R = sqrt((B1 - B2)^2 + 4 J^2)``,
``j = J / R``, ``b_plus = (B1 + B2) / R`` and ``b_minus = (B1 - B2) / R``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .qstate import (
    BELL,
    PureState,
    Unitary4,
    COMPUTATIONAL,
    check_theta,
    fidelity_pure,
    make_initial,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class HamiltonianParams:
    J: float
    B1: float
    B2: float

    def __post_init__(self):
        for name in ("J", "B1", "B2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.R <= 0.0:
            raise ValueError("R = 0: need B1 != B2 or J != 0")

    @classmethod
    def from_dimensionless(cls, j: float, b_plus: float, R: float = 1.0,
                           b_minus_sign: int = 1) -> "HamiltonianParams":
        """Build physical fields from ``(j, b_plus)`` at scale ``R``.

        ``b_minus`` is fixed by ``b_minus**2 + 4 j**2 = 1``, so ``|j| <= 1/2``.
        """
        if abs(j) > 0.5 + 1e-15:
            raise ValueError(f"|j| = {abs(j)!r} > 1/2 is not realizable")
        b_minus = b_minus_sign * math.sqrt(max(0.0, 1.0 - 4.0 * j * j))
        return cls(J=j * R, B1=0.5 * (b_plus + b_minus) * R, B2=0.5 * (b_plus - b_minus) * R)

    @property
    def R(self) -> float:
        return math.hypot(self.B1 - self.B2, 2.0 * self.J)

    @property
    def j(self) -> float:
        return self.J / self.R

    @property
    def b_plus(self) -> float:
        return (self.B1 + self.B2) / self.R

    @property
    def b_minus(self) -> float:
        return (self.B1 - self.B2) / self.R

    def shifted(self, delta_b_plus: float) -> "HamiltonianParams":
        """Add a homogeneous field so ``b_plus -> b_plus + delta_b_plus``.

        Both fields move by the same amount, which leaves ``b_minus`` and
        ``R`` untouched.
        """
        dB = 0.5 * delta_b_plus * self.R
        return HamiltonianParams(self.J, self.B1 + dB, self.B2 + dB)


@dataclass(frozen=True)
class ControlParams:
    """Reconstruction integers ``(n, m, s)`` and the elapsed distortion time.

    The derived quantities that depend on the Hamiltonian (``delta``,
    ``delta_b_plus``) are methods taking the :class:`HamiltonianParams`.
    """

    n: int
    m: int
    s: int
    t: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if int(self.m) != self.m or int(self.s) != self.s:
            raise ValueError("m and s must be integers")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ValueError(f"t={self.t!r} must be finite and non-negative")

    @classmethod
    def for_params(cls, p: HamiltonianParams, n: int, t: float,
                   s: int | None = None, m: int | None = None) -> "ControlParams":
        """Fill in defaults: ``s`` nearest to ``2 n j`` and ``m`` minimizing ``|delta_b_plus|``."""
        if s is None:
            s = round(2 * n * p.j)
        if m is None:
            x = n * (p.b_plus - 2 * p.j + 1) / 2
            m = math.ceil(x - 0.5)
        return cls(int(n), int(m), int(s), float(t))

    @property
    def T(self) -> float:
        return self.n * math.pi - self.t

    @property
    def Q(self) -> Fraction:
        return Fraction(self.s, 2 * self.n)

    def delta(self, p: HamiltonianParams) -> float:
        return p.j - self.s / (2 * self.n)

    def delta_b_plus(self, p: HamiltonianParams) -> float:
        T = self.T
        if T <= 0:
            raise ValueError(f"T = n*pi - t = {T!r} must be positive")
        return math.pi * (2 * self.m - self.n * (p.b_plus - 2 * p.j + 1)) / T


def hamiltonian_matrix(p: HamiltonianParams) -> np.ndarray:
    """Physical Hamiltonian in computational coordinates (00, 01, 10, 11)."""
    exchange = sum(np.kron(s, s) for s in (PAULI_X, PAULI_Y, PAULI_Z))
    h = -p.J * exchange + p.B1 * np.kron(PAULI_Z, I2) + p.B2 * np.kron(I2, PAULI_Z)
    return 0.5 * (h + h.conj().T)


def propagator(p: HamiltonianParams, t_prime: float) -> np.ndarray:
    """exp(-i H t) with ``t = t_prime / R``, by Hermitian eigendecomposition."""
    if t_prime < 0:
        raise ValueError("time must be non-negative")
    w, v = np.linalg.eigh(hamiltonian_matrix(p))
    return (v * np.exp(-1j * w * (t_prime / p.R))) @ v.conj().T


def evolve_oracle(p: HamiltonianParams, t_prime: float, s: PureState) -> PureState:
    u = Unitary4(propagator(p, t_prime), COMPUTATIONAL)
    return u @ s


def distort_analytic(p: HamiltonianParams, t: float, which: int, theta: float) -> PureState:
    """Closed-form distorted states, Bell coordinates, dimensionless time."""
    check_theta(theta)
    j, bp, bm = p.j, p.b_plus, p.b_minus
    ep, em = np.exp(1j * j * t), np.exp(-1j * j * t)
    cb, sb = math.cos(bp * t), math.sin(bp * t)
    if which == 1:
        return PureState([ep * cb, 0, -1j * ep * sb, 0], BELL)
    if which == 2:
        st, ct = math.sin(theta), math.cos(theta)
        return PureState(
            [
                1j * ep * ct * sb,
                em * (2j * j * math.sin(t) + math.cos(t)) * st,
                -ep * ct * cb,
                -1j * bm * em * st * math.sin(t),
            ],
            BELL,
        )
    raise ValueError(f"which must be 1 or 2, got {which!r}")


def reconstruction_pulse(p: HamiltonianParams, c: ControlParams) -> Unitary4:
    """Distortion for ``t`` at ``b_plus`` followed by ``T`` at ``b_plus + delta_b_plus``."""
    if c.T <= 0:
        raise ValueError(f"T = n*pi - t = {c.T!r} must be positive")
    stage2 = propagator(p.shifted(c.delta_b_plus(p)), c.T)
    return Unitary4(stage2 @ propagator(p, c.t), COMPUTATIONAL)


def loop_defect(n: int, delta: float) -> np.ndarray:
    """The residual diagonal ``diag(1, 1, 1, exp(4 i n pi delta))``."""
    return np.diag([1, 1, 1, np.exp(4j * n * math.pi * delta)])


def reconstruct(p: HamiltonianParams, c: ControlParams, which: int, theta: float) -> PureState:
    """Initial state pushed through the full distortion + reconstruction propagator."""
    u = reconstruction_pulse(p, c)
    return (u @ make_initial(which, theta)).to(BELL)


def fidelity_do_nothing(theta: float, n: int, delta: float) -> float:
    """Closed-form do-nothing fidelity ``1 - sin^2(2 n pi delta)(1 + cos^2 theta)/2``.

    This coincides with the overlap average of :func:`fidelity_do_nothing_states`
    only when ``sin(2 theta) sin(2 n pi delta) = 0``; elsewhere it is larger by
    ``sin^2 theta cos^2 theta sin^2(2 n pi delta) / 2``. It always equals the
    discrimination fidelity of the Bell-frame measurement.
    """
    return 1.0 - 0.5 * math.sin(2 * n * math.pi * delta) ** 2 * (1.0 + math.cos(theta) ** 2)


def fidelity_do_nothing_states(p: HamiltonianParams, c: ControlParams, theta: float) -> float:
    """Average of ``|<b_k|b''_k>|^2`` over both source states, from the propagator."""
    return 0.5 * sum(
        fidelity_pure(make_initial(k, theta), reconstruct(p, c, k, theta)) for k in (1, 2)
    )


def setup_for_defect(n: int, delta: float, *, s: int | None = None, b_plus: float = 0.37,
                     t: float = 0.9, R: float = 1.0) -> tuple[HamiltonianParams, ControlParams]:
    """Physical parameters realizing a chosen ``(n, delta)``.

    Picks ``s`` (default ``n // 2``) and sets ``j = s / 2n + delta``.
    """
    if s is None:
        s = n // 2
    j = s / (2 * n) + delta
    p = HamiltonianParams.from_dimensionless(j, b_plus, R=R)
    if t >= n * math.pi:
        t = 0.5 * n * math.pi
    return p, ControlParams.for_params(p, n, t, s=s)


def reconstructed_pair(theta: float, n: int, delta: float, **kw) -> tuple[PureState, PureState]:
    """Both reconstructed states for a chosen ``(theta, n, delta)``, Bell coordinates."""
    p, c = setup_for_defect(n, delta, **kw)
    u = reconstruction_pulse(p, c)
    return tuple((u @ make_initial(k, theta)).to(BELL) for k in (1, 2))


def reconstructed_closed_form(which: int, theta: float, n: int, delta: float) -> PureState:
    """The reconstructed states written out in Bell coordinates."""
    a = 2 * n * math.pi * delta
    e = np.exp(1j * a)
    if which == 1:
        return PureState([1 + 1j * e * math.sin(a), 0, -1j * e * math.sin(a), 0], BELL)
    st, ct = math.sin(theta), math.cos(theta)
    return PureState([1j * e * ct * math.sin(a), st, -e * ct * math.cos(a), 0], BELL)

