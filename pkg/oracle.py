"""
Numerical Schrodinger integrator used as ground truth for every closed form
Dormand-Prince 5(4) (method "RK45") through scipy.integrate.solve_ivp, all columns at once
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from algebra import hermiticity_defect, unitarity_defect
from config import ORACLE_ATOL, ORACLE_MAX_STEP, ORACLE_RTOL

logger = logging.getLogger(__name__)

HamiltonianFunction = Callable[[float], np.ndarray]

# Relative sech amplitude below which the pulse counts as switched off
SECH_TAIL_CUTOFF = 1e-14

# Integrated propagators may drift from unitarity by this multiple of the tolerances
UNITARITY_SLACK = 10.0


class NonHermitianError(ValueError):
    """Raised when the Hamiltonian is not Hermitian at a sample time"""


class StiffnessError(RuntimeError):
    """Raised when the adaptive step size underflows"""


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances for the adaptive integrator"""
    rtol: float = ORACLE_RTOL
    atol: float = ORACLE_ATOL
    max_step: float = ORACLE_MAX_STEP
    renormalize: bool = False

    def __post_init__(self):
        for name in ("rtol", "atol"):
            value = getattr(self, name)
            if not (0.0 < value <= 1e-2):
                raise ValueError(f"IntegratorConfig.{name} must lie in (0, 1e-2], got {value}")
        if not self.max_step > 0:
            raise ValueError(f"IntegratorConfig.max_step must be > 0, got {self.max_step}")

    @property
    def unitarity_tol(self) -> float:
        """Unitarity defect an integration at these tolerances is allowed to leave"""
        return UNITARITY_SLACK * max(self.rtol, self.atol)


@dataclass(frozen=True)
class OracleRun:
    """Propagator from one integration plus diagnostics"""
    propagator: np.ndarray
    unitarity_defect: float
    steps: int
    truncation_time: Optional[float] = None


def _check_hermitian(h: HamiltonianFunction, times: Sequence[float]) -> int:
    dim = None
    for t in times:
        matrix = np.asarray(h(t), dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Hamiltonian at t = {t} is not square: {matrix.shape}")
        dim = matrix.shape[0]
        defect = hermiticity_defect(matrix)
        if defect > 1e-12 * max(1.0, float(np.linalg.norm(matrix))):
            raise NonHermitianError(f"Hamiltonian not Hermitian at t = {t:.6g}: ||H - H^dag|| = {defect:.3e}")
    return dim


def _closest_unitary(u: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(u)
    return w @ vh


def _solve(h: HamiltonianFunction, t0: float, t1: float, cfg: IntegratorConfig, t_eval=None):
    dim = _check_hermitian(h, (t0, 0.5 * (t0 + t1), t1))

    def rhs(t, y):
        u = y.reshape(dim, dim)
        return (-1j * (np.asarray(h(t), dtype=complex) @ u)).ravel()

    y0 = np.eye(dim, dtype=complex).ravel()
    result = solve_ivp(rhs, (t0, t1), y0, method="RK45", rtol=cfg.rtol, atol=cfg.atol,
                       max_step=cfg.max_step, t_eval=t_eval)
    if not result.success:
        if "step size" in result.message.lower():
            raise StiffnessError(f"Step size underflow on [{t0}, {t1}]: {result.message}")
        raise RuntimeError(f"Integration failed on [{t0}, {t1}]: {result.message}")
    return dim, result


def integrate_propagator(h: HamiltonianFunction, t0: float, t1: float,
                         cfg: Optional[IntegratorConfig] = None) -> OracleRun:
    """
    Propagator U(t1, t0) of i dU/dt = H(t) U with diagnostics

    Args:
        h: Hamiltonian time-function returning a Hermitian 2x2 or 4x4 matrix
        t0: Start time (ps)
        t1: End time (ps), t1 >= t0
        cfg: Integrator tolerances

    Returns:
        OracleRun with propagator, unitarity defect and step count
    """
    cfg = cfg or IntegratorConfig()
    if t1 < t0:
        raise ValueError(f"evolve_numeric needs t1 >= t0, got [{t0}, {t1}]")
    if t1 == t0:
        dim = _check_hermitian(h, (t0,))
        return OracleRun(np.eye(dim, dtype=complex), 0.0, 0)
    dim, result = _solve(h, t0, t1, cfg)
    u = result.y[:, -1].reshape(dim, dim)
    defect = unitarity_defect(u)
    if defect > cfg.unitarity_tol:
        logger.warning(f"Unitarity defect {defect:.3e} exceeds 10x tolerance on [{t0}, {t1}]")
    if cfg.renormalize:
        u = _closest_unitary(u)
    return OracleRun(u, defect, int(result.t.size))


def evolve_numeric(h: HamiltonianFunction, t0: float, t1: float,
                   cfg: Optional[IntegratorConfig] = None) -> np.ndarray:
    """Numerical propagator U(t1, t0) for any Hamiltonian time-function"""
    return integrate_propagator(h, t0, t1, cfg).propagator


def evolve_numeric_trajectory(h: HamiltonianFunction, times: Sequence[float],
                              cfg: Optional[IntegratorConfig] = None) -> list:
    """Propagators U(t_k, t_0) at every requested time, from a single integration"""
    cfg = cfg or IntegratorConfig()
    times = np.asarray(times, dtype=float)
    if times.size < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("Trajectory times must contain at least two strictly increasing values")
    dim, result = _solve(h, float(times[0]), float(times[-1]), cfg, t_eval=times)
    propagators = []
    for k in range(times.size):
        u = result.y[:, k].reshape(dim, dim)
        propagators.append(_closest_unitary(u) if cfg.renormalize else u)
    return propagators


def sech_truncation_time(rate: float, cutoff: float = SECH_TAIL_CUTOFF) -> float:
    """Time after which |sech(rate t)| < cutoff"""
    return math.acosh(1.0 / cutoff) / rate


def evolve_with_tail(h: HamiltonianFunction, t0: float, t1: float, t_cut: float,
                     h_tail: np.ndarray, cfg: Optional[IntegratorConfig] = None) -> OracleRun:
    """
    Integrate numerically up to t_cut, then apply exp(-i h_tail (t1 - t_cut))

    Used for pulses whose time dependence has died out after t_cut.
    """
    if t_cut >= t1:
        return integrate_propagator(h, t0, t1, cfg)
    head = integrate_propagator(h, t0, t_cut, cfg)
    tail = expm(-1j * np.asarray(h_tail, dtype=complex) * (t1 - t_cut))
    logger.info(f"Pulse tail truncated at t = {t_cut:.6g} ps (window ends at {t1:.6g} ps)")
    return OracleRun(tail @ head.propagator, head.unitarity_defect, head.steps, truncation_time=t_cut)
