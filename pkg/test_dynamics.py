"""
Tests for dynamics.py
Hamiltonians, the lift, every closed-form family and the reduction against the integrator
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from algebra import IDENTITY2, IDENTITY4, NonUnitaryError, field_dot_sigma, fidelity_phase_invariant, swap_operator, unitarity_defect
from designer import xor_target
from dynamics import (
    ConstraintViolationError,
    build_hamiltonian,
    build_parallel_hamiltonian,
    dual_sech_propagator,
    effective_field,
    evolve,
    free_evolution,
    hamiltonian_function,
    lift_two_level,
    numeric_propagator,
    outer_phase_check,
    propagator_tol,
    propagator_trajectory,
    q_evolution,
    sech_asymptotic_propagator,
    sech_boundary_values,
    sech_limit_propagator,
    sech_propagator,
    swap_probability,
    swap_probability_from_propagator,
    two_level_propagator,
)
from oracle import IntegratorConfig, evolve_numeric
from pulses import (
    ConstantShape,
    QTrajectory,
    SechShape,
    SinSquaredShape,
    constant_pair,
    dual_sech_pulse,
    free_pulse,
    planar_loop,
    proportional,
    q_vector_pulse,
    sampled_pulse,
    sech_pulse,
)


def test_zero_hamiltonian():
    np.testing.assert_array_equal(build_hamiltonian((0, 0, 0), (0, 0, 0), 0.0), np.zeros((4, 4)))


def test_zeeman_only_hamiltonian():
    np.testing.assert_allclose(build_hamiltonian((0, 0, 0.4), (0, 0, 0.4), 0.0), np.diag([0.8, 0, 0, -0.8]))


def test_heisenberg_spectrum():
    eigenvalues = np.sort(np.linalg.eigvalsh(build_hamiltonian((0, 0, 0), (0, 0, 0), 1.0)))
    np.testing.assert_allclose(eigenvalues, [-1.5, 0.5, 0.5, 0.5], atol=1e-14)


def test_parallel_hamiltonian_matches_general_form():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        bplus, bminus, j = rng.uniform(-2, 2, size=3)
        general = build_hamiltonian((0, 0, (bplus + bminus) / 2), (0, 0, (bplus - bminus) / 2), j)
        worst = max(worst, np.abs(build_parallel_hamiltonian(bplus, bminus, j) - general).max())
    assert worst <= 1e-13


def test_parallel_hamiltonian_zeeman_only():
    np.testing.assert_allclose(build_parallel_hamiltonian(0.7, 0.0, 0.0), np.diag([0.7, 0, 0, -0.7]))


def test_free_evolution_limits():
    np.testing.assert_allclose(free_evolution(0.0), IDENTITY4, atol=1e-15)
    assert fidelity_phase_invariant(free_evolution(math.pi / 2), swap_operator()) == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(free_evolution(math.pi / 4) @ free_evolution(math.pi / 4), free_evolution(math.pi / 2), atol=1e-13)


def test_free_evolution_matches_exponential():
    phi = 0.37
    h = build_parallel_hamiltonian(0.0, 0.0, 1.0)
    np.testing.assert_allclose(free_evolution(phi), expm(-1j * h * phi), atol=1e-13)


def test_effective_field_of_families():
    profile = proportional(0.4, SinSquaredShape(1.0, 5.0), 0.0, 5.0)
    k = effective_field(profile).at(2.0)
    q = math.sin(math.pi * 2.0 / 5.0) ** 2
    np.testing.assert_allclose(k, q * np.array([math.sin(0.4), 0.0, math.cos(0.4)]))
    k = effective_field(sech_pulse(0.9, 0.2, 0.5, 0.0, 10.0)).at(1.0)
    np.testing.assert_allclose(k, [0.9 / math.cosh(0.5), 0.0, 0.2])


def test_lift_identity_and_xor():
    np.testing.assert_allclose(lift_two_level(IDENTITY2, 0.0, 0.0), IDENTITY4, atol=1e-15)
    r = lift_two_level(IDENTITY2, math.pi / 2, math.pi / 2)
    assert fidelity_phase_invariant(r, xor_target()) == pytest.approx(1.0, abs=1e-14)


def test_lift_rejects_non_unitary():
    with pytest.raises(NonUnitaryError):
        lift_two_level(2 * IDENTITY2, 0.0, 0.0)


def test_lift_of_reduced_integration_equals_full_integration():
    profile = constant_pair(0.6, -0.3, 0.25, 7.0)
    cfg = IntegratorConfig()
    u = evolve_numeric(hamiltonian_function(profile, 2), 0.0, 7.0, cfg)
    lifted = lift_two_level(u, profile.gamma(7.0), profile.phi(7.0), cfg.unitarity_tol)
    full = evolve_numeric(hamiltonian_function(profile, 4), 0.0, 7.0, cfg)
    assert np.linalg.norm(lifted - full) <= 1e-8


def test_lift_accepts_integration_defect_within_its_tolerance():
    cfg = IntegratorConfig(rtol=1e-8, atol=1e-10)
    # defect 2 sqrt(2) 1e-9: above the exact tolerance, inside the integrator one
    u = expm(-0.7j * field_dot_sigma((0.6, 0.0, 0.8))) * (1.0 + 1e-9)
    with pytest.raises(NonUnitaryError):
        lift_two_level(u, 0.0, 0.0)
    assert unitarity_defect(lift_two_level(u, 0.3, 0.2, cfg.unitarity_tol)) <= cfg.unitarity_tol


def test_sampled_pulse_evolves_at_loose_tolerance():
    times = np.linspace(0.0, 12.0, 25)
    profile = sampled_pulse(times, 0.4 + 0.1 * np.sin(times), 0.3 * np.cos(times), [0.1] * 25)
    cfg = IntegratorConfig(rtol=1e-8, atol=1e-10)
    result = evolve(profile, 12.0, cfg)
    assert propagator_tol(profile, cfg) == cfg.unitarity_tol
    assert propagator_tol(constant_pair(0.4, 0.3, 0.1, 12.0), cfg) < cfg.unitarity_tol
    reference = numeric_propagator(profile, 12.0)
    assert fidelity_phase_invariant(result.propagator, reference, cfg.unitarity_tol) >= 1.0 - 1e-6


@pytest.mark.parametrize("profile, t", [
    (constant_pair(0.8, 0.3, -0.2, 6.0), 6.0),
    (proportional(1.1, SinSquaredShape(0.9, 9.0), 0.1, 9.0), 9.0),
    (sech_pulse(1.5, 0.3, 0.5, 0.2, 30.0), 30.0),
    (sech_pulse(-0.8, -0.4, 0.4, 0.0, 25.0), 25.0),
    (dual_sech_pulse(0.7, 0.4, 0.6, -0.1, 20.0), 20.0),
    (free_pulse(SechShape(0.5, 0.3), 15.0, 0.05), 15.0),
    (q_vector_pulse(planar_loop(0.6, 0.1, 2.0, 10.0), 0.0, 10.0), 6.5),
])
def test_closed_form_matches_integration(profile, t):
    r = evolve(profile, t).propagator
    assert unitarity_defect(r) <= 1e-10
    assert np.linalg.norm(r - numeric_propagator(profile, t)) <= 1e-7


def test_cross_check_field_records_deviation():
    result = evolve(constant_pair(0.5, 0.5, 0.0, 4.0), 4.0, cross_check=True)
    assert result.oracle_deviation is not None and result.oracle_deviation <= 1e-8


def test_proportional_closed_form_matches_reduced_integration():
    rng = np.random.default_rng(17)
    for _ in range(5):
        lam = rng.uniform(0, math.pi)
        T = rng.uniform(2.0, 12.0)
        profile = proportional(lam, SinSquaredShape(rng.uniform(0.2, 1.0), T), 0.0, T)
        u = two_level_propagator(profile, T)
        numeric = evolve_numeric(hamiltonian_function(profile, 2), 0.0, T)
        assert np.linalg.norm(u - numeric) <= 1e-9


def test_sech_propagator_starts_at_identity():
    np.testing.assert_allclose(sech_propagator(1.3, 0.2, 0.7, 0.0), IDENTITY2, atol=1e-14)


def test_sech_equal_fields_reduces_to_pulse_area():
    # with c = 0 the field is along sigma1 only, u = cos(Phi) - i sigma1 sin(Phi)
    a, omega, t = 1.7, 0.6, 4.0
    phi = SechShape(a, omega).integral(t)
    expected = np.array([[math.cos(phi), -1j * math.sin(phi)], [-1j * math.sin(phi), math.cos(phi)]])
    np.testing.assert_allclose(sech_propagator(a, 0.0, omega, t), expected, atol=1e-12)


def test_sech_boundary_values_vanish_for_even_lambda():
    _, g20 = sech_boundary_values(2.0, 0.0, 1.0)
    assert abs(g20) <= 1e-11
    _, g20 = sech_boundary_values(1.0, 0.0, 1.0)
    assert g20 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("lam", [2.0, 4.0])
def test_sech_limit(lam):
    omega = 1.0
    for t in (15.0, 25.0):
        u = sech_propagator(lam * omega, 0.0, omega, t)
        assert np.linalg.norm(u - sech_limit_propagator(lam * omega, 0.0, omega, t)) <= 1e-5


@pytest.mark.parametrize("lam", [2.0, 3.0])
def test_sech_asymptote_with_field_difference(lam):
    a, c, omega = lam, 0.3, 1.0
    for t in (15.0, 20.0, 30.0):
        u = sech_propagator(a, c, omega, t)
        assert np.linalg.norm(u - sech_asymptotic_propagator(a, c, omega, t)) <= 1e-5


def test_sech_asymptote_matches_integration_with_field_difference():
    a, c, omega, t = 2.0, 0.3, 1.0, 18.0
    profile = sech_pulse(a, c, omega, 0.0, t)
    numeric = evolve_numeric(hamiltonian_function(profile, 2), 0.0, t)
    assert np.linalg.norm(numeric - sech_asymptotic_propagator(a, c, omega, t)) <= 1e-5


def test_sech_asymptote_keeps_the_boundary_residual():
    a, c, omega = 5.0, 0.3, 1.0
    _, g20 = sech_boundary_values(a, c, omega)
    u = sech_asymptotic_propagator(a, c, omega, 40.0)
    assert unitarity_defect(u) <= 1e-10
    assert abs(u[1, 0]) == pytest.approx(abs(g20) / math.hypot(2.0 * c, omega), rel=1e-9)
    # the residual does not vanish with a field difference, so the limit differs
    assert np.linalg.norm(u - sech_limit_propagator(a, c, omega, 40.0)) > 1e-3


@pytest.mark.parametrize("lam", [2.0, 4.0])
def test_sech_asymptote_equals_limit_when_residual_vanishes(lam):
    for t in (0.0, 7.5, 30.0):
        np.testing.assert_allclose(sech_asymptotic_propagator(lam, 0.0, 1.0, t),
                                   sech_limit_propagator(lam, 0.0, 1.0, t), atol=1e-11)


def test_sech_limit_is_identity_for_lambda_four():
    np.testing.assert_allclose(sech_limit_propagator(4.0, 0.0, 1.0, 20.0), IDENTITY2, atol=1e-12)
    np.testing.assert_allclose(sech_limit_propagator(2.0, 0.0, 1.0, 20.0), -IDENTITY2, atol=1e-12)


def test_dual_sech_is_unitary():
    assert unitarity_defect(dual_sech_propagator(0.5, 0.2, 0.3, 12.0)) <= 1e-10


def test_q_evolution_constant_trajectory():
    q0 = np.array([0.3, -0.2, 0.5])
    trajectory = QTrajectory(lambda t: q0, lambda t: np.zeros(3))
    field, u = q_evolution(trajectory, 5.0)
    np.testing.assert_allclose(field.at(1.0), 0.0)
    np.testing.assert_allclose(u, IDENTITY2, atol=1e-15)


def test_q_evolution_closed_loop_returns_identity():
    _, u = q_evolution(planar_loop(0.8, -0.3, 2.2, 9.0), 9.0)
    np.testing.assert_allclose(u, IDENTITY2, atol=1e-10)


def test_q_evolution_matches_integration():
    loop = planar_loop(0.8, -0.3, 2.2, 9.0)
    field, u = q_evolution(loop, 4.0)
    numeric = evolve_numeric(lambda t: field_dot_sigma(field.at(t)), 0.0, 4.0)
    assert np.linalg.norm(u - numeric) <= 1e-8


def test_q_evolution_rejects_constraint_violation():
    trajectory = QTrajectory(lambda t: np.array([t, 0.0, 0.0]), lambda t: np.array([1.0, 1.0, 0.0]))
    with pytest.raises(ConstraintViolationError) as info:
        q_evolution(trajectory, 1.0)
    assert info.value.max_residual == pytest.approx(1.0)


@pytest.mark.parametrize("lam, omega, expected", [
    (0.0, 1.3, 0.0),
    (math.pi / 2, math.pi / 2, 1.0),
    (math.pi / 6, math.pi / 4, 0.125),
])
def test_swap_probability(lam, omega, expected):
    assert swap_probability(lam, omega) == pytest.approx(expected, abs=1e-15)
    r = evolve(proportional(lam, ConstantShape(1.0), 0.3, omega), omega).propagator
    assert swap_probability_from_propagator(r) == pytest.approx(expected, abs=1e-10)


def test_outer_phase_matches_quadrature():
    profile = proportional(0.9, SinSquaredShape(0.7, 6.0), 0.15, 6.0)
    assert outer_phase_check(profile, 6.0) <= 1e-9


def test_trajectory_of_sampled_pulse_matches_closed_form_constant():
    times = np.linspace(0.0, 5.0, 11)
    sampled = sampled_pulse(times, [0.4] * 11, [0.3] * 11, [0.1] * 11)
    constant = constant_pair(0.4, 0.3, 0.1, 5.0)
    results = propagator_trajectory(sampled, times[::2])
    for result in results:
        assert np.linalg.norm(result.propagator - evolve(constant, result.t).propagator) <= 1e-8


def test_evolve_rejects_negative_time():
    with pytest.raises(ValueError):
        evolve(constant_pair(0.1, 0.1, 0.0, 1.0), -1.0)
