"""
Tests for pulses.py
Shape integrals, first crossing, q trajectories and profile constructors
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from pulses import (
    ConstantShape,
    SampledShape,
    SechShape,
    SinSquaredShape,
    first_crossing,
    planar_loop,
    proportional,
    sampled_pulse,
    sech_pulse,
)


@pytest.mark.parametrize("shape", [
    ConstantShape(0.3),
    SechShape(1.2, 0.7),
    SinSquaredShape(0.8, 10.0),
    SechShape(-0.5, 2.0).scaled(3.0),
])
def test_integral_matches_quadrature(shape):
    for t in (0.0, 0.5, 3.0, 7.5):
        expected, _ = quad(shape.value, 0.0, t, epsabs=1e-14, epsrel=1e-13)
        assert shape.integral(t) == pytest.approx(expected, abs=1e-12)


def test_sech_total_area():
    # int_0^inf a sech(w t) dt = a pi / (2 w)
    shape = SechShape(2.0, 0.5)
    assert shape.integral(200.0) == pytest.approx(2.0 * math.pi / (2 * 0.5), rel=1e-12)


def test_sampled_shape_reproduces_cubic():
    times = np.linspace(0.0, 4.0, 9)
    shape = SampledShape(times, times ** 2)
    assert shape.value(1.3) == pytest.approx(1.69, rel=1e-2)
    assert shape.integral(4.0) == pytest.approx(64.0 / 3.0, rel=1e-3)


@pytest.mark.parametrize("times, values", [
    ([0.0, 1.0, 2.0], [1.0, 1.0, 1.0]),
    ([0.5, 1.0, 2.0, 3.0], [1.0, 1.0, 1.0, 1.0]),
    ([0.0, 1.0, 1.0, 3.0], [1.0, 1.0, 1.0, 1.0]),
    ([0.0, 1.0, 2.0, 3.0], [1.0, float("nan"), 1.0, 1.0]),
])
def test_sampled_shape_validation(times, values):
    with pytest.raises(ValueError):
        SampledShape(times, values)


def test_first_crossing_constant():
    t, monotone = first_crossing(ConstantShape(0.5), 2 * math.pi, 100.0)
    assert t == pytest.approx(4 * math.pi, rel=1e-12)
    assert monotone


def test_first_crossing_sin2_is_monotone():
    shape = SinSquaredShape(1.0, 10.0)
    t, monotone = first_crossing(shape, 2 * math.pi, 100.0)
    assert shape.integral(t) == pytest.approx(2 * math.pi, abs=1e-12)
    assert monotone


def test_first_crossing_flags_sign_change():
    shape = SampledShape([0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0], [1.0, 1.0, -1.0, -1.0, 1.0, 2.0, 2.0])
    target = shape.integral(6.0)
    _, monotone = first_crossing(shape, target, 6.0)
    assert not monotone


def test_first_crossing_unreachable():
    with pytest.raises(ValueError):
        first_crossing(ConstantShape(0.1), 100.0, 10.0)


def test_planar_loop_satisfies_constraint_and_closes():
    loop = planar_loop(0.7, 0.2, 2.5, 12.0)
    for t in np.linspace(0.0, 12.0, 31):
        assert abs(loop.constraint_residual(float(t))) < 1e-14
    np.testing.assert_allclose(loop.q(12.0), loop.q(0.0), atol=1e-12)


def test_proportional_profile_components():
    lam = 0.6
    profile = proportional(lam, SinSquaredShape(1.0, 8.0), 0.1, 8.0)
    for t in (0.5, 2.0, 7.0):
        q = math.sin(math.pi * t / 8.0) ** 2
        assert profile.J(t) == pytest.approx(q * math.sin(lam))
        assert profile.bminus(t) == pytest.approx(q * math.cos(lam))
    assert profile.gamma(8.0) == pytest.approx(0.8)


def test_sech_pulse_rejects_non_positive_rate():
    with pytest.raises(ValueError):
        sech_pulse(1.0, 0.1, 0.0, 0.0, 10.0)


def test_sampled_pulse_window():
    profile = sampled_pulse([0.0, 1.0, 2.0, 3.0], [0.1] * 4, [0.2] * 4, [0.0] * 4)
    assert profile.family == "Sampled"
    assert profile.t_end == 3.0
    assert profile.phi(3.0) == pytest.approx(0.3)
