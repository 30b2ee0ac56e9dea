import math

import numpy as np
import pytest
from scipy.linalg import expm

from bellrecon.dynamics import (
    ControlParams,
    HamiltonianParams,
    distort_analytic,
    evolve_oracle,
    fidelity_do_nothing,
    fidelity_do_nothing_states,
    hamiltonian_matrix,
    loop_defect,
    propagator,
    reconstruct,
    reconstructed_closed_form,
    reconstruction_pulse,
    setup_for_defect,
)
from bellrecon.qstate import BELL, equal_up_to_phase, fidelity_pure, ket, make_initial, random_state

X = np.array([[0, 1], [1, 0]])
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1, -1])


def test_params_derived_quantities():
    p = HamiltonianParams(J=1.0, B1=2.0, B2=1.0)
    assert p.R == pytest.approx(math.sqrt(5))
    assert p.b_minus ** 2 + 4 * p.j ** 2 == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        HamiltonianParams(0.0, 1.0, 1.0)


def test_from_dimensionless_round_trip():
    p = HamiltonianParams.from_dimensionless(0.3, 0.5, R=2.0)
    assert (p.j, p.b_plus, p.R) == pytest.approx((0.3, 0.5, 2.0))
    with pytest.raises(ValueError):
        HamiltonianParams.from_dimensionless(0.6, 0.1)


def test_hamiltonian_no_coupling():
    h = hamiltonian_matrix(HamiltonianParams(0.0, 1.0, -1.0))
    np.testing.assert_allclose(h, np.diag([0, 2, -2, 0]), atol=1e-15)


def test_hamiltonian_pure_exchange():
    h = hamiltonian_matrix(HamiltonianParams(1.0, 0.0, 0.0))
    expect = -(np.kron(X, X) + np.kron(Y, Y) + np.kron(Z, Z))
    np.testing.assert_allclose(h, expect, atol=1e-15)


def test_hamiltonian_spectrum():
    p = HamiltonianParams(1.0, 2.0, 1.0)
    h = hamiltonian_matrix(p)
    # block structure: {00, 11} gives -J +/- (B1+B2); {01, 10} gives J +/- R
    expect = sorted([-1 + 3, -1 - 3, 1 + p.R, 1 - p.R])
    np.testing.assert_allclose(sorted(np.linalg.eigvalsh(h)), expect, atol=1e-12)


def test_propagator_against_expm():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = HamiltonianParams(*rng.normal(size=3))
        t = rng.uniform(0, 10)
        ref = expm(-1j * hamiltonian_matrix(p) * t / p.R)
        assert np.max(np.abs(propagator(p, t) - ref)) < 1e-11


def test_evolve_oracle_identity_and_norm():
    rng = np.random.default_rng(1)
    p = HamiltonianParams(0.4, 1.1, -0.3)
    s = random_state(rng)
    np.testing.assert_allclose(evolve_oracle(p, 0.0, s).amps, s.amps, atol=1e-15)
    for _ in range(1000):
        p = HamiltonianParams(*rng.normal(size=3))
        s = random_state(rng, BELL)
        out = evolve_oracle(p, rng.uniform(0, 50), s)
        assert abs(np.linalg.norm(out.amps) - 1) < 1e-12
        assert out.basis == BELL


def test_distort_state_one_form():
    p = HamiltonianParams.from_dimensionless(0.2, 0.7)
    t = 1.3
    s = distort_analytic(p, t, 1, 0.5)
    expect = np.array([math.cos(0.7 * t), 0, -1j * math.sin(0.7 * t), 0])
    assert equal_up_to_phase(s.amps, expect, 1e-12)


def test_distort_state_two_at_zero_time():
    p = HamiltonianParams(0.3, 0.2, 0.9)
    s = distort_analytic(p, 0.0, 2, 0.8)
    np.testing.assert_allclose(s.amps, make_initial(2, 0.8).amps, atol=1e-15)


def test_distort_state_two_against_oracle():
    p = HamiltonianParams.from_dimensionless(0.3, 0.5)
    th, t = math.pi / 3, 1.7
    a = distort_analytic(p, t, 2, th)
    o = evolve_oracle(p, t, make_initial(2, th))
    assert fidelity_pure(a, o) == pytest.approx(1.0, abs=1e-12)


def test_distort_rejects_bad_which():
    with pytest.raises(ValueError):
        distort_analytic(HamiltonianParams(1, 0, 0), 0.1, 0, 0.1)


def test_control_defaults():
    p = HamiltonianParams.from_dimensionless(0.26, 0.4)
    c = ControlParams.for_params(p, n=2, t=0.5)
    assert c.s == 1 and c.Q == 0.25
    assert c.delta(p) == pytest.approx(0.01, abs=1e-15)
    # m minimizes |delta_b_plus| over integers
    best = min(range(-10, 10), key=lambda m: abs(ControlParams(2, m, 1, 0.5).delta_b_plus(p)))
    assert c.m == best


def test_control_rejects_late_pulse():
    p = HamiltonianParams(1, 0.2, 0.1)
    c = ControlParams(1, 0, 1, 4.0)
    with pytest.raises(ValueError):
        reconstruction_pulse(p, c)


def test_loop_closes_at_rational_coupling():
    p = HamiltonianParams.from_dimensionless(0.25, 0.8)
    c = ControlParams.for_params(p, n=2, t=1.1, s=1)
    u = reconstruction_pulse(p, c).m
    assert equal_up_to_phase(u, np.eye(4), 1e-9)


def test_loop_defect_form():
    p = HamiltonianParams.from_dimensionless(0.26, 0.8)
    c = ControlParams.for_params(p, n=2, t=1.1, s=1)
    u = reconstruction_pulse(p, c).m
    # both stages built directly from the matrix exponential
    ref = expm(-1j * hamiltonian_matrix(p.shifted(c.delta_b_plus(p))) * c.T / p.R) @ expm(
        -1j * hamiltonian_matrix(p) * c.t / p.R
    )
    assert np.max(np.abs(u - ref)) < 1e-10
    np.testing.assert_allclose(u / u[0, 0], np.diag([1, 1, 1, np.exp(8j * math.pi * 0.01)]), atol=1e-9)


def test_loop_defect_independent_of_m():
    p = HamiltonianParams.from_dimensionless(0.31, -0.4)
    us = [reconstruction_pulse(p, ControlParams(3, m, 2, 0.4)).m for m in (-3, 0, 2)]
    for u in us:
        np.testing.assert_allclose(u / u[0, 0], loop_defect(3, p.j - 2 / 6), atol=1e-9)


def test_pulse_is_unitary():
    rng = np.random.default_rng(6)
    for _ in range(100):
        p = HamiltonianParams(*rng.normal(size=3))
        n = int(rng.integers(1, 6))
        c = ControlParams(n, int(rng.integers(-3, 4)), int(rng.integers(-5, 6)), rng.uniform(0, n * math.pi - 0.01))
        u = reconstruction_pulse(p, c).m
        assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-10


def test_reconstruct_at_zero_defect():
    p, c = setup_for_defect(2, 0.0)
    th = math.pi / 5
    assert fidelity_pure(make_initial(2, th), reconstruct(p, c, 2, th)) == pytest.approx(1.0, abs=1e-9)


def test_reconstructed_overlaps():
    n, d, th = 3, 0.013, 0.9
    p, c = setup_for_defect(n, d)
    b1, b2 = reconstruct(p, c, 1, th), reconstruct(p, c, 2, th)
    assert fidelity_pure(ket("b00", BELL), b1) == pytest.approx(math.cos(2 * n * math.pi * d) ** 2, abs=1e-12)
    assert fidelity_pure(ket("b01", BELL), b2) == pytest.approx(math.sin(th) ** 2, abs=1e-12)


def test_reconstructed_closed_form_matches_oracle_up_to_phase():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 6))
        d = rng.uniform(-0.2, 0.2)
        th = rng.uniform(0, math.pi / 2)
        p, c = setup_for_defect(n, d)
        for k in (1, 2):
            got = reconstruct(p, c, k, th)
            assert fidelity_pure(got, reconstructed_closed_form(k, th, n, d)) == pytest.approx(1.0, abs=1e-10)


def test_reconstructed_closed_form_coefficients_are_normalized():
    # the written-out coefficients are unit norm without extra scaling
    for a in np.linspace(-1, 1, 21):
        reconstructed_closed_form(1, 0.3, 1, a)


def test_fidelity_do_nothing_values():
    assert fidelity_do_nothing(0.4, 3, 0.0) == 1.0
    for n, d in ((1, 0.1), (4, 0.03)):
        assert fidelity_do_nothing(math.pi / 2, n, d) == pytest.approx(
            1 - 0.5 * math.sin(2 * n * math.pi * d) ** 2, abs=1e-15
        )


def test_fidelity_do_nothing_against_states():
    p, c = setup_for_defect(3, 0.02)
    state_level = fidelity_do_nothing_states(p, c, 0.0)
    assert state_level == pytest.approx(fidelity_do_nothing(0.0, 3, 0.02), abs=1e-9)


def test_overlap_average_against_derived_form():
    # I' only rephases |11>; the overlaps follow by hand
    rng = np.random.default_rng(8)
    for _ in range(200):
        n, d, th = int(rng.integers(1, 6)), rng.uniform(-0.2, 0.2), rng.uniform(0, math.pi / 2)
        p, c = setup_for_defect(n, d)
        C = math.cos(2 * n * math.pi * d) ** 2
        s2, c2 = math.sin(th) ** 2, math.cos(th) ** 2
        expect = 0.5 * (C + s2 * s2 + c2 * C * (1 + s2))
        got = fidelity_do_nothing_states(p, c, th)
        assert got == pytest.approx(expect, abs=1e-10)
        gap = 0.5 * s2 * c2 * (1 - C)
        assert fidelity_do_nothing(th, n, d) - got == pytest.approx(gap, abs=1e-10)
