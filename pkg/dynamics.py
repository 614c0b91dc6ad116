"""
Two-spin dynamics in parallel magnetic fields
Hamiltonians, the four-level to two-level reduction, closed-form propagators
for every pulse family, and the lift back to the 4x4 evolution operator
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import expit

from algebra import (
    IDENTITY2,
    SIGMA1,
    SIGMA3,
    big_sigma,
    embed_middle,
    field_dot_sigma,
    require_unitary,
    rho,
    sigma_dot_rho,
    swap_operator,
    unitarity_defect,
)
from config import UNITARITY_TOL
from oracle import IntegratorConfig, evolve_numeric, evolve_numeric_trajectory, evolve_with_tail, sech_truncation_time
from pulses import PulseProfile, QTrajectory
from specfun import hyp2f1

logger = logging.getLogger(__name__)

# Tolerance of the q-vector constraint q2' = q1 q3' - q3 q1'
Q_CONSTRAINT_TOL = 1e-8

# (sigma1 + sigma3) / sqrt(2) exchanges the roles of the field components K1 and K3
AXIS_EXCHANGE = (SIGMA1 + SIGMA3) / math.sqrt(2.0)


class ConstraintViolationError(ValueError):
    """Raised when a q trajectory breaks q2' = q1 q3' - q3 q1'"""

    def __init__(self, max_residual: float, at_time: float):
        super().__init__(
            f"q trajectory violates q2' = q1 q3' - q3 q1': max residual {max_residual:.3e} at t = {at_time:.6g}"
        )
        self.max_residual = max_residual
        self.at_time = at_time


@dataclass(frozen=True)
class EffectiveField:
    """K(t) = (J(t), 0, B-(t)) driving the reduced two-level problem"""
    K: Callable[[float], np.ndarray]

    def at(self, t: float) -> np.ndarray:
        return np.asarray(self.K(t), dtype=float)


@dataclass(frozen=True)
class EvolutionResult:
    """Propagator at time t with phases and diagnostics"""
    t: float
    propagator: np.ndarray
    gamma: float
    phi: float
    unitarity_defect: float
    oracle_deviation: Optional[float] = None


# ============================================================================
# Hamiltonians
# ============================================================================

def build_hamiltonian(G, F, J: float) -> np.ndarray:
    """H = rho.G + Sigma.F + (J/2)(Sigma.rho)"""
    G = np.asarray(G, dtype=float)
    F = np.asarray(F, dtype=float)
    h = sum(G[i] * rho(i + 1) + F[i] * big_sigma(i + 1) for i in range(3))
    return h + 0.5 * float(J) * sigma_dot_rho()


def build_parallel_hamiltonian(bplus: float, bminus: float, j: float) -> np.ndarray:
    """
    Parallel-field Hamiltonian

    H = (1/2)[(Sigma3 + rho3) B+ - (Sigma3 - rho3) B- - J] + A J
    """
    s3, r3 = big_sigma(3), rho(3)
    return (0.5 * ((s3 + r3) * bplus - (s3 - r3) * bminus - j * np.eye(4))
            + j * swap_operator())


def hamiltonian_function(profile: PulseProfile, dim: int = 4) -> Callable[[float], np.ndarray]:
    """
    H(t) for a pulse profile

    dim = 4 gives the full parallel-field Hamiltonian, dim = 2 the reduced
    single-spin Hamiltonian sigma.K(t).
    """
    if dim == 4:
        return lambda t: build_parallel_hamiltonian(profile.bplus(t), profile.bminus(t), profile.J(t))
    if dim == 2:
        return lambda t: field_dot_sigma((profile.J(t), 0.0, profile.bminus(t)))
    raise ValueError(f"dim must be 2 or 4, got {dim}")


def free_evolution(phi: float) -> np.ndarray:
    """R_t(0, 0, J) = exp(i Phi/2) [I cos Phi - i A sin Phi]"""
    return np.exp(0.5j * phi) * (np.cos(phi) * np.eye(4) - 1j * np.sin(phi) * swap_operator())


def propagator_tol(profile: PulseProfile, cfg: Optional[IntegratorConfig] = None) -> float:
    """Unitarity tolerance for the propagator of a profile: closed forms are exact, sampled pulses are integrated"""
    if profile.family == "Sampled":
        return (cfg or IntegratorConfig()).unitarity_tol
    return UNITARITY_TOL


def effective_field(profile: PulseProfile) -> EffectiveField:
    """K(t) = (J(t), 0, B-(t))"""
    return EffectiveField(lambda t: np.array([profile.J(t), 0.0, profile.bminus(t)]))


def lift_two_level(u: np.ndarray, gamma: float, phi: float, tol: float = UNITARITY_TOL) -> np.ndarray:
    """
    4x4 evolution operator from the 2x2 one

    R = exp(-(i/2)[(Sigma3 + rho3) Gamma + Sigma3 rho3 Phi]) M(u), where M
    embeds u in the middle block. The exponent puts exp(+i Phi/2) on the
    middle block, which undoes the transformation between psi' and psi.
    Integrated u carries a defect of order the integrator tolerance, so
    numerical callers pass their own tol.
    """
    u = require_unitary(u, "two-level propagator", tol)
    diagonal = np.exp(-0.5j * np.array([2.0 * gamma + phi, -phi, -phi, -2.0 * gamma + phi]))
    return diagonal[:, None] * embed_middle(u)


# ============================================================================
# Closed-form two-level propagators
# ============================================================================

def rotation(axis, angle: float) -> np.ndarray:
    """cos(angle) - i (sigma . axis) sin(angle) for a unit axis"""
    return math.cos(angle) * IDENTITY2 - 1j * math.sin(angle) * field_dot_sigma(axis)


def proportional_propagator(lam: float, omega: float) -> np.ndarray:
    """u_t = cos w - i(sigma1 sin(lambda) + sigma3 cos(lambda)) sin w"""
    return rotation((math.sin(lam), 0.0, math.cos(lam)), omega)


def _sech_parameters(a: float, c: float, omega: float) -> Tuple[complex, float]:
    if omega <= 0:
        raise ValueError(f"sech rate omega must be > 0, got {omega}")
    gamma = 0.5 + 1j * c / omega
    lam = abs(a) / omega
    return gamma, lam


def sech_boundary_values(a: float, c: float, omega: float) -> Tuple[complex, complex]:
    """(G1^0, G2^0) = (G1(1/2), G2(1/2)) of the sech solution"""
    gamma, lam = _sech_parameters(a, c, omega)
    g1 = (2.0 * c - 1j * omega) * hyp2f1(lam, -lam, gamma, 0.5)
    g2 = a * hyp2f1(1.0 + lam, 1.0 - lam, gamma + 1.0, 0.5)
    return g1, g2


def _sech_columns(a: float, c: float, omega: float, t: float) -> Tuple[complex, complex]:
    """G1(z(t)), G2(z(t)) with z = (1 - tanh(omega t)) / 2"""
    gamma, lam = _sech_parameters(a, c, omega)
    z = float(expit(-2.0 * omega * t))
    # z^(-nu) (1 - z)^nu = exp(-i c t) and sqrt(z (1 - z)) = sech(omega t) / 2
    carrier = np.exp(-1j * c * t)
    sech = 1.0 / math.cosh(omega * t) if omega * t < 700 else 0.0
    g1 = (2.0 * c - 1j * omega) * carrier * hyp2f1(lam, -lam, gamma, z)
    g2 = a * sech * carrier * hyp2f1(1.0 + lam, 1.0 - lam, gamma + 1.0, z)
    return g1, g2


def sech_propagator(a: float, c: float, omega: float, t: float) -> np.ndarray:
    """
    Closed-form u_t for J = a / cosh(omega t), B- = c, starting at t = 0

    u_t = 1/(|G2^0|^2 + |G1^0|^2) [[G1, -G2*], [G2, G1*]] [[G1^0*, G2^0*], [-G2^0, G1^0]]
    """
    if t < 0:
        raise ValueError(f"sech propagator is defined for t >= 0, got {t}")
    g10, g20 = sech_boundary_values(a, c, omega)
    g1, g2 = _sech_columns(a, c, omega, t)
    norm = abs(g10) ** 2 + abs(g20) ** 2
    current = np.array([[g1, -np.conj(g2)], [g2, np.conj(g1)]])
    initial_inverse = np.array([[np.conj(g10), np.conj(g20)], [-g20, g10]])
    return current @ initial_inverse / norm


def sech_limit_propagator(a: float, c: float, omega: float, t: float) -> np.ndarray:
    """
    Asymptote of the sech propagator when G2^0 = 0

    exp(-i sigma3 (c t + theta)) with theta = arg F(lambda, -lambda; gamma; 1/2).
    theta vanishes when that value is real and positive, leaving exp(-i sigma3 t c).
    """
    gamma, lam = _sech_parameters(a, c, omega)
    theta = float(np.angle(hyp2f1(lam, -lam, gamma, 0.5)))
    angle = c * t + theta
    return np.diag([np.exp(-1j * angle), np.exp(1j * angle)])


def sech_asymptotic_propagator(a: float, c: float, omega: float, t: float) -> np.ndarray:
    """
    Large omega t form of the sech propagator for any G2^0

    Once the pulse has died out the current columns are
    diag((2c - i omega) e^{-ict}, (2c + i omega) e^{ict}). The off-diagonal
    entries keep |G2^0| / sqrt(4c^2 + omega^2), so this equals
    sech_limit_propagator exactly when G2^0 = 0.
    """
    g10, g20 = sech_boundary_values(a, c, omega)
    head = (2.0 * c - 1j * omega) * np.exp(-1j * c * t)
    current = np.diag([head, np.conj(head)])
    initial_inverse = np.array([[np.conj(g10), np.conj(g20)], [-g20, g10]])
    return current @ initial_inverse / (abs(g10) ** 2 + abs(g20) ** 2)


def dual_sech_propagator(a: float, c: float, omega: float, t: float) -> np.ndarray:
    """u_t for J = c, B- = a / cosh(omega t), mapped from the sech solution"""
    return AXIS_EXCHANGE @ sech_propagator(a, c, omega, t) @ AXIS_EXCHANGE


def check_q_constraint(trajectory: QTrajectory, t_end: float, samples: int = 201,
                       tol: float = Q_CONSTRAINT_TOL) -> float:
    """Maximum constraint residual over a uniform grid on [0, t_end]"""
    worst, worst_t = 0.0, 0.0
    for t in np.linspace(0.0, t_end, samples):
        residual = abs(trajectory.constraint_residual(float(t)))
        if residual > worst:
            worst, worst_t = residual, float(t)
    if worst > tol:
        raise ConstraintViolationError(worst, worst_t)
    return worst


def q_evolution(trajectory: QTrajectory, t: float, samples: int = 201) -> Tuple[EffectiveField, np.ndarray]:
    """
    Effective field and u_t from a q-vector trajectory

    K = (q' + q x q') / (1 + q^2) and
    u_t = (1 + q.q0 - i sigma.p) / sqrt((1 + q^2)(1 + q0^2)), p = q - q0 + q0 x q.

    Raises:
        ConstraintViolationError: the trajectory breaks the K2 = 0 constraint
    """
    check_q_constraint(trajectory, t, samples)

    def field(s):
        q = np.asarray(trajectory.q(s), dtype=float)
        dq = np.asarray(trajectory.qdot(s), dtype=float)
        return (dq + np.cross(q, dq)) / (1.0 + q @ q)

    q0 = np.asarray(trajectory.q(0.0), dtype=float)
    q = np.asarray(trajectory.q(t), dtype=float)
    p = q - q0 + np.cross(q0, q)
    u = ((1.0 + q @ q0) * IDENTITY2 - 1j * field_dot_sigma(p)) / math.sqrt((1.0 + q @ q) * (1.0 + q0 @ q0))
    return EffectiveField(field), u


def two_level_propagator(profile: PulseProfile, t: float, cfg: Optional[IntegratorConfig] = None) -> np.ndarray:
    """
    u_t of the reduced problem i psi' = (sigma.K) psi for any profile

    Closed forms for every analytic family; the sampled family goes through
    the numerical integrator.
    """
    family = profile.family
    params = profile.params
    if family == "Free":
        return rotation((1.0, 0.0, 0.0), profile.phi(t))
    if family == "ConstantPair":
        k = np.array([params["J"], 0.0, params["Bminus"]])
        size = float(np.linalg.norm(k))
        if size == 0.0:
            return IDENTITY2.copy()
        return rotation(k / size, size * t)
    if family == "Proportional":
        return proportional_propagator(params["lambda"], params["q"].integral(t))
    if family == "Sech":
        return sech_propagator(params["a"], params["c"], params["omega"], t)
    if family == "DualSech":
        return dual_sech_propagator(params["a"], params["c"], params["omega"], t)
    if family == "QVector":
        return q_evolution(profile.trajectory, t)[1]
    if family == "Sampled":
        if t == 0.0:
            return IDENTITY2.copy()
        return evolve_numeric(hamiltonian_function(profile, 2), 0.0, t, cfg)
    raise ValueError(f"Unknown pulse family: {family}")


# ============================================================================
# Full evolution
# ============================================================================

def numeric_propagator(profile: PulseProfile, t: float, cfg: Optional[IntegratorConfig] = None) -> np.ndarray:
    """Direct 4x4 numerical propagator; sech tails are truncated"""
    if t == 0.0:
        return np.eye(4, dtype=complex)
    if profile.family == "Sech":
        p = profile.params
        return evolve_sech_truncated(p["a"], p["c"], p["omega"], t, profile.bplus(0.0), cfg)[0]
    return evolve_numeric(hamiltonian_function(profile, 4), 0.0, t, cfg)


def evolve_sech_truncated(a: float, c: float, omega: float, t: float, bplus_level: float = 0.0,
                          cfg: Optional[IntegratorConfig] = None) -> Tuple[np.ndarray, Optional[float]]:
    """
    Numerical 4x4 propagator of the sech pulse with its tail cut off

    Integrates up to the point where a / cosh(omega t) drops below the
    cutoff, then applies the exact constant-field propagator.

    Returns:
        (propagator, truncation_time or None when the window ends first)
    """
    def h(s):
        return build_parallel_hamiltonian(bplus_level, c, a / math.cosh(omega * s) if omega * s < 700 else 0.0)

    t_cut = sech_truncation_time(omega)
    h_tail = build_parallel_hamiltonian(bplus_level, c, 0.0)
    run = evolve_with_tail(h, 0.0, t, t_cut, h_tail, cfg)
    return run.propagator, run.truncation_time


def evolve(profile: PulseProfile, t: float, cfg: Optional[IntegratorConfig] = None,
           cross_check: bool = False) -> EvolutionResult:
    """
    Evolution operator R_t of a pulse profile

    Args:
        profile: Pulse profile
        t: Time (ps), 0 <= t
        cfg: Integrator tolerances for the numerical paths
        cross_check: Also integrate the 4x4 problem numerically and record
            the Frobenius deviation

    Returns:
        EvolutionResult
    """
    if t < 0:
        raise ValueError(f"Evolution time must be >= 0, got {t}")
    gamma, phi = profile.gamma(t), profile.phi(t)
    r = lift_two_level(two_level_propagator(profile, t, cfg), gamma, phi, propagator_tol(profile, cfg))
    deviation = None
    if cross_check:
        deviation = float(np.linalg.norm(r - numeric_propagator(profile, t, cfg), "fro"))
    return EvolutionResult(t, r, gamma, phi, unitarity_defect(r), deviation)


def propagator_trajectory(profile: PulseProfile, times, cfg: Optional[IntegratorConfig] = None) -> List[EvolutionResult]:
    """EvolutionResult at each requested time"""
    times = [float(t) for t in times]
    if profile.family == "Sampled" and len(times) > 1:
        h = hamiltonian_function(profile, 2)
        start = times[0]
        reduced = evolve_numeric_trajectory(h, times, cfg)
        results = []
        for t, u_from_start in zip(times, reduced):
            u = u_from_start @ two_level_propagator(profile, start, cfg) if start > 0 else u_from_start
            r = lift_two_level(u, profile.gamma(t), profile.phi(t), propagator_tol(profile, cfg))
            results.append(EvolutionResult(t, r, profile.gamma(t), profile.phi(t), unitarity_defect(r)))
        return results
    return [evolve(profile, t, cfg) for t in times]


def outer_phase_check(profile: PulseProfile, t: float) -> float:
    """|R11 - exp(-i int_0^t (J/2 + B+))| with the integral done by quadrature"""
    integrand, _ = quad(lambda s: 0.5 * profile.J(s) + profile.bplus(s), 0.0, t,
                        limit=400, epsabs=1e-13, epsrel=1e-13)
    r = evolve(profile, t).propagator
    return float(abs(r[0, 0] - np.exp(-1j * integrand)))


def swap_probability(lam: float, omega: float) -> float:
    """Probability of |up,down> -> |down,up>: sin^2(lambda) sin^2(omega)"""
    return math.sin(lam) ** 2 * math.sin(omega) ** 2


def swap_probability_from_propagator(r: np.ndarray) -> float:
    """|<3| R |2>|^2"""
    return float(abs(r[2, 1]) ** 2)
