"""
Tests for oracle.py
Numerical propagators against exact exponentials and error handling
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from algebra import SIGMA1, SIGMA3, sigma_dot_rho, unitarity_defect
from oracle import (
    IntegratorConfig,
    NonHermitianError,
    evolve_numeric,
    evolve_numeric_trajectory,
    evolve_with_tail,
    integrate_propagator,
    sech_truncation_time,
)


def test_constant_hamiltonian_matches_expm():
    h = 0.4 * SIGMA1 - 0.9 * SIGMA3
    u = evolve_numeric(lambda t: h, 0.0, 6.0)
    np.testing.assert_allclose(u, expm(-6.0j * h), atol=1e-9)


def test_four_level_constant_hamiltonian():
    h = 0.5 * sigma_dot_rho() + np.diag([0.3, 0.1, -0.1, -0.3])
    u = evolve_numeric(lambda t: h, 1.0, 4.0)
    np.testing.assert_allclose(u, expm(-3.0j * h), atol=1e-9)


def test_commuting_time_dependence():
    # H(t) = f(t) sigma3 commutes with itself, U = exp(-i sigma3 int f)
    u = evolve_numeric(lambda t: math.cos(t) * SIGMA3, 0.0, 2.0)
    np.testing.assert_allclose(u, expm(-1j * math.sin(2.0) * SIGMA3), atol=1e-10)


def test_zero_interval_is_identity():
    run = integrate_propagator(lambda t: SIGMA1, 3.0, 3.0)
    np.testing.assert_array_equal(run.propagator, np.eye(2))
    assert run.steps == 0


def test_unitarity_preserved():
    run = integrate_propagator(lambda t: math.sin(t) * SIGMA1 + 0.3 * SIGMA3, 0.0, 20.0)
    assert run.unitarity_defect <= 1e-8
    assert unitarity_defect(run.propagator) == pytest.approx(run.unitarity_defect)


def test_renormalized_result_is_unitary():
    cfg = IntegratorConfig(rtol=1e-6, atol=1e-8, renormalize=True)
    u = evolve_numeric(lambda t: math.sin(t) * SIGMA1 + 0.3 * SIGMA3, 0.0, 20.0, cfg)
    assert unitarity_defect(u) <= 1e-13


def test_trajectory_matches_endpoints():
    h = lambda t: 0.2 * t * SIGMA1 + 0.5 * SIGMA3
    times = [0.0, 1.0, 2.5, 4.0]
    trajectory = evolve_numeric_trajectory(h, times)
    np.testing.assert_allclose(trajectory[0], np.eye(2), atol=1e-14)
    np.testing.assert_allclose(trajectory[-1], evolve_numeric(h, 0.0, 4.0), atol=1e-9)


def test_trajectory_needs_increasing_times():
    with pytest.raises(ValueError):
        evolve_numeric_trajectory(lambda t: SIGMA1, [0.0, 2.0, 1.0])


def test_non_hermitian_hamiltonian_rejected():
    with pytest.raises(NonHermitianError):
        evolve_numeric(lambda t: np.array([[0, 1], [0, 0]], dtype=complex), 0.0, 1.0)


def test_reversed_interval_rejected():
    with pytest.raises(ValueError):
        evolve_numeric(lambda t: SIGMA1, 2.0, 1.0)


@pytest.mark.parametrize("rtol", [0.0, 0.5, -1e-8])
def test_config_validation(rtol):
    with pytest.raises(ValueError):
        IntegratorConfig(rtol=rtol)


def test_unitarity_tol_follows_loosest_tolerance():
    assert IntegratorConfig(rtol=1e-8, atol=1e-10).unitarity_tol == pytest.approx(1e-7)
    assert IntegratorConfig(rtol=1e-12, atol=1e-9).unitarity_tol == pytest.approx(1e-8)


def test_tail_uses_constant_hamiltonian():
    h_tail = 0.3 * SIGMA3
    # the pulse has decayed to nothing by t = 2
    run = evolve_with_tail(lambda t: SIGMA1 * math.exp(-50 * t) + h_tail, 0.0, 10.0, 2.0, h_tail)
    assert run.truncation_time == 2.0
    full = evolve_numeric(lambda t: SIGMA1 * math.exp(-50 * t) + h_tail, 0.0, 10.0)
    assert np.linalg.norm(run.propagator - full) <= 1e-9


def test_sech_truncation_time():
    t = sech_truncation_time(0.5)
    assert 1.0 / math.cosh(0.5 * t) == pytest.approx(1e-14, rel=1e-6)
