"""
Pulse shapes and pulse profiles for parallel-field two-spin control
Scalar time functions with running integrals, and the tagged PulseProfile families
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

logger = logging.getLogger(__name__)


# ============================================================================
# Scalar shapes
# ============================================================================

class PulseShape:
    """A scalar control f(t) on t >= 0 with its running integral from 0"""

    def value(self, t: float) -> float:
        raise NotImplementedError

    def integral(self, t: float) -> float:
        raise NotImplementedError

    def scaled(self, factor: float) -> "PulseShape":
        return ScaledShape(self, factor)

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantShape(PulseShape):
    level: float

    def value(self, t: float) -> float:
        return self.level

    def integral(self, t: float) -> float:
        return self.level * t

    def describe(self) -> dict:
        return {"shape": "constant", "level": self.level}


@dataclass(frozen=True)
class SechShape(PulseShape):
    """amplitude / cosh(rate * t)"""
    amplitude: float
    rate: float

    def value(self, t: float) -> float:
        return self.amplitude / math.cosh(self.rate * t)

    def integral(self, t: float) -> float:
        # int_0^t sech(w s) ds = (2/w) arctan(tanh(w t / 2))
        return self.amplitude * 2.0 * math.atan(math.tanh(0.5 * self.rate * t)) / self.rate

    def describe(self) -> dict:
        return {"shape": "sech", "amplitude": self.amplitude, "rate": self.rate}


@dataclass(frozen=True)
class SinSquaredShape(PulseShape):
    """amplitude * sin^2(pi t / duration), a smooth on-off ramp"""
    amplitude: float
    duration: float

    def value(self, t: float) -> float:
        return self.amplitude * math.sin(math.pi * t / self.duration) ** 2

    def integral(self, t: float) -> float:
        phase = 2.0 * math.pi * t / self.duration
        return self.amplitude * (0.5 * t - self.duration * math.sin(phase) / (4.0 * math.pi))

    def describe(self) -> dict:
        return {"shape": "sin2", "amplitude": self.amplitude, "duration": self.duration}


class SampledShape(PulseShape):
    """Cubic-spline interpolation through samples; integral from the spline antiderivative"""

    def __init__(self, times, values):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 4:
            raise ValueError("Sampled pulse needs matching 1-D times/values with at least 4 samples")
        if times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise ValueError("Sampled pulse times must start at 0 and increase strictly")
        if not np.all(np.isfinite(values)):
            raise ValueError("Sampled pulse values must be finite")
        self.times = times
        self.values = values
        self._spline = CubicSpline(times, values)
        self._antiderivative = self._spline.antiderivative()

    def value(self, t: float) -> float:
        return float(self._spline(t))

    def integral(self, t: float) -> float:
        return float(self._antiderivative(t) - self._antiderivative(0.0))

    def describe(self) -> dict:
        return {"shape": "sampled", "samples": int(self.times.size), "t_end": float(self.times[-1])}


@dataclass(frozen=True)
class ScaledShape(PulseShape):
    base: PulseShape
    factor: float

    def value(self, t: float) -> float:
        return self.factor * self.base.value(t)

    def integral(self, t: float) -> float:
        return self.factor * self.base.integral(t)

    def describe(self) -> dict:
        return {"shape": "scaled", "factor": self.factor, "base": self.base.describe()}


def first_crossing(shape: PulseShape, target: float, t_max: float, samples: int = 4000) -> Tuple[float, bool]:
    """
    First time the running integral of shape reaches target

    Args:
        shape: Pulse shape
        target: Value the integral from 0 must reach
        t_max: Search window [0, t_max]
        samples: Grid points for the scan before brentq refinement

    Returns:
        (time, monotone) where monotone says the integral never decreased
        before the crossing
    """
    if target == 0.0:
        return 0.0, True
    grid = np.linspace(0.0, t_max, samples + 1)
    residual = np.array([shape.integral(t) - target for t in grid])
    signs = np.sign(residual)
    crossings = np.nonzero(signs[1:] * signs[:-1] <= 0)[0]
    if crossings.size == 0:
        raise ValueError(f"Pulse area {target:.6g} not reached within t <= {t_max:.6g} ps")
    i = int(crossings[0])
    if residual[i + 1] == 0.0:
        t_cross = float(grid[i + 1])
    else:
        t_cross = brentq(lambda t: shape.integral(t) - target, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15)
    steps = np.diff(residual[: i + 2]) * math.copysign(1.0, target)
    monotone = bool(np.all(steps >= -1e-15))
    return t_cross, monotone


# ============================================================================
# Pulse profiles
# ============================================================================

FAMILIES = ("Free", "ConstantPair", "Proportional", "Sech", "DualSech", "QVector", "Sampled")


@dataclass(frozen=True)
class QTrajectory:
    """
    A real three-vector q(t) and its derivative, defining the effective field

    K = (q' + q x q') / (1 + q^2), valid when q2' = q1 q3' - q3 q1'.
    """
    q: Callable[[float], np.ndarray]
    qdot: Callable[[float], np.ndarray]
    label: str = "custom"

    def constraint_residual(self, t: float) -> float:
        q = np.asarray(self.q(t), dtype=float)
        dq = np.asarray(self.qdot(t), dtype=float)
        return float(dq[1] - (q[0] * dq[2] - q[2] * dq[0]))


def planar_loop(radius: float, q2_start: float, sweep: float, duration: float) -> QTrajectory:
    """
    q in polar form (r cos phi, q2, r sin phi) with phi = sweep * sin^2(pi t / duration)

    q2 follows r^2 phi, so the constraint holds exactly and q(duration) = q(0).
    """
    def phi(t):
        return sweep * math.sin(math.pi * t / duration) ** 2

    def phidot(t):
        return sweep * math.pi / duration * math.sin(2.0 * math.pi * t / duration)

    def q(t):
        p = phi(t)
        return np.array([radius * math.cos(p), q2_start + radius ** 2 * p, radius * math.sin(p)])

    def qdot(t):
        p, dp = phi(t), phidot(t)
        return np.array([-radius * math.sin(p) * dp, radius ** 2 * dp, radius * math.cos(p) * dp])

    return QTrajectory(q=q, qdot=qdot, label=f"planar_loop(r={radius}, sweep={sweep}, T={duration})")


@dataclass(frozen=True)
class PulseProfile:
    """
    Time-dependent parallel-field controls J(t), B-(t), B+(t) in rad/ps

    B- and B+ already include mu_B and the g-factors. family carries the
    closed-form parameters; J_shape/bminus_shape/bplus_shape evaluate the
    controls for any family.
    """
    family: str
    J_shape: PulseShape
    bminus_shape: PulseShape
    bplus_shape: PulseShape
    t_end: float
    params: dict = field(default_factory=dict)
    trajectory: Optional[QTrajectory] = None

    def J(self, t: float) -> float:
        return self.J_shape.value(t)

    def bminus(self, t: float) -> float:
        return self.bminus_shape.value(t)

    def bplus(self, t: float) -> float:
        return self.bplus_shape.value(t)

    def gamma(self, t: float) -> float:
        """Gamma(t) = int_0^t B+"""
        return self.bplus_shape.integral(t)

    def phi(self, t: float) -> float:
        """Phi(t) = int_0^t J"""
        return self.J_shape.integral(t)

    def describe(self) -> dict:
        info = {"family": self.family, "t_end": self.t_end}
        info.update({k: v for k, v in self.params.items() if isinstance(v, (int, float, str))})
        info["J"] = self.J_shape.describe()
        info["Bminus"] = self.bminus_shape.describe()
        info["Bplus"] = self.bplus_shape.describe()
        return info


def free_pulse(J_shape: PulseShape, t_end: float, bplus_level: float = 0.0) -> PulseProfile:
    return PulseProfile("Free", J_shape, ConstantShape(0.0), ConstantShape(bplus_level), t_end)


def constant_pair(j: float, bminus: float, bplus: float, t_end: float) -> PulseProfile:
    return PulseProfile("ConstantPair", ConstantShape(j), ConstantShape(bminus), ConstantShape(bplus),
                        t_end, params={"J": j, "Bminus": bminus, "Bplus": bplus})


def proportional(lam: float, q: PulseShape, bplus_level: float, t_end: float) -> PulseProfile:
    """J = q(t) sin(lambda), B- = q(t) cos(lambda)"""
    return PulseProfile("Proportional", q.scaled(math.sin(lam)), q.scaled(math.cos(lam)),
                        ConstantShape(bplus_level), t_end, params={"lambda": lam, "q": q})


def sech_pulse(a: float, c: float, omega: float, bplus_level: float, t_end: float) -> PulseProfile:
    """J = a / cosh(omega t), B- = c"""
    if omega <= 0:
        raise ValueError(f"sech rate omega must be > 0, got {omega}")
    return PulseProfile("Sech", SechShape(a, omega), ConstantShape(c), ConstantShape(bplus_level),
                        t_end, params={"a": a, "c": c, "omega": omega})


def dual_sech_pulse(a: float, c: float, omega: float, bplus_level: float, t_end: float) -> PulseProfile:
    """J = c constant, B- = a / cosh(omega t): the sech family with the field axes exchanged"""
    if omega <= 0:
        raise ValueError(f"sech rate omega must be > 0, got {omega}")
    return PulseProfile("DualSech", ConstantShape(c), SechShape(a, omega), ConstantShape(bplus_level),
                        t_end, params={"a": a, "c": c, "omega": omega})


class _TrajectoryComponent(PulseShape):
    """One component of K(t) from a q trajectory; integral by quadrature"""

    def __init__(self, trajectory: QTrajectory, index: int):
        self.trajectory = trajectory
        self.index = index

    def value(self, t: float) -> float:
        q = np.asarray(self.trajectory.q(t), dtype=float)
        dq = np.asarray(self.trajectory.qdot(t), dtype=float)
        k = (dq + np.cross(q, dq)) / (1.0 + q @ q)
        return float(k[self.index])

    def integral(self, t: float) -> float:
        value, _ = quad(self.value, 0.0, t, limit=200, epsabs=1e-13, epsrel=1e-12)
        return value

    def describe(self) -> dict:
        return {"shape": "q-vector", "component": self.index + 1, "trajectory": self.trajectory.label}


def q_vector_pulse(trajectory: QTrajectory, bplus_level: float, t_end: float) -> PulseProfile:
    """J = K1(t), B- = K3(t) from the q-vector parametrization"""
    return PulseProfile("QVector", _TrajectoryComponent(trajectory, 0), _TrajectoryComponent(trajectory, 2),
                        ConstantShape(bplus_level), t_end, params={"trajectory": trajectory.label},
                        trajectory=trajectory)


def sampled_pulse(times, j_values, bminus_values, bplus_values) -> PulseProfile:
    times = np.asarray(times, dtype=float)
    return PulseProfile("Sampled", SampledShape(times, j_values), SampledShape(times, bminus_values),
                        SampledShape(times, bplus_values), float(times[-1]))
