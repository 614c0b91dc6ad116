"""
XOR gate targets and parallel-pulse designers
Solves the gate conditions for the proportional, constant and adiabatic sech pulse families
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import root

from algebra import big_sigma, fidelity_phase_invariant, matrix_to_json, rho
from config import ADIABATIC_MIN_FIDELITY, FIELD_CAP_TESLA, MATERIAL_PRESETS, UNITARITY_TOL, zeeman_rad_per_ps
from dynamics import (
    evolve,
    evolve_sech_truncated,
    free_evolution,
    numeric_propagator,
    sech_boundary_values,
    sech_propagator,
)
from oracle import IntegratorConfig
from pulses import PulseProfile, PulseShape, constant_pair, first_crossing, proportional, sech_pulse
from specfun import HypergeometricConvergenceError, SpecialFunctionDomainError, hyp2f1

logger = logging.getLogger(__name__)

ANALYTIC_MIN_FIDELITY = 1.0 - 1e-8
ORACLE_MIN_FIDELITY = 1.0 - 1e-6
IDENTITY_MIN_FIDELITY = 1.0 - 1e-6

# Root scan of the adiabatic condition
SCAN_POINTS = 400
SCAN_SPAN = 5.0
SCAN_MIN_OFFSET = 1e-9
ROOT_XTOL = 1e-12

# Joint solve of G2^0 = 0 over lambda = a / omega and kappa = c / omega
ADCOND_TOL = 1e-10
ADCOND_SEEDS = 5
KAPPA_MIN = 1e-3
BOX_SLACK = 1e-9

DEFAULT_G_FACTOR = MATERIAL_PRESETS["gaas"]["g1"]

# a ~ omega (1 + 4m) is expected to within this fraction once omega T exceeds LARGE_OMEGA_T
LARGE_OMEGA_T = 6.0
LARGE_OMEGA_T_TOL = 0.05


class DesignError(ValueError):
    """Raised for invalid design requests"""


class DesignInfeasibleError(RuntimeError):
    """Raised when no pulse of the family meets the gate conditions"""

    def __init__(self, message: str, trace: Optional[List[Tuple[float, complex]]] = None,
                 min_residual: Optional[float] = None):
        super().__init__(message)
        self.trace = trace or []
        self.min_residual = min_residual


@dataclass
class GateDesign:
    """A designed pulse with the fidelity it reaches"""
    family: str
    T: float
    bplus_level: float
    n: int
    m: int
    achieved_fidelity: float
    parameters: Dict[str, float] = field(default_factory=dict)
    target: str = "xor"
    oracle_fidelity: Optional[float] = None
    propagator: Optional[np.ndarray] = None
    profile: Optional[PulseProfile] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "family": self.family,
            "target": self.target,
            "n": self.n,
            "m": self.m,
            "T": self.T,
            "bplus_level": self.bplus_level,
            "parameters": dict(self.parameters),
            "achieved_fidelity": self.achieved_fidelity,
            "oracle_fidelity": self.oracle_fidelity,
            "notes": list(self.notes),
        }
        if self.propagator is not None:
            data["propagator"] = matrix_to_json(self.propagator)
        return data


# ============================================================================
# Targets
# ============================================================================

def xor_target() -> np.ndarray:
    """exp(-i(pi/4)(Sigma3 rho3 + Sigma3 + rho3)) = diag(e^{-3i pi/4}, e^{i pi/4}, e^{i pi/4}, e^{i pi/4})"""
    return np.diag(np.exp(1j * math.pi / 4.0 * np.array([-3.0, 1.0, 1.0, 1.0])))


def xor_sequence(sqrt_swap: Optional[np.ndarray] = None) -> np.ndarray:
    """
    XOR from two square-root-of-swap pulses and single-spin rotations

    exp(i pi rho3 / 4) exp(-i pi Sigma3 / 4) U_sw^1/2 exp(i pi rho3 / 2) U_sw^1/2
    """
    half_swap = free_evolution(math.pi / 4.0) if sqrt_swap is None else sqrt_swap
    return (expm(0.25j * math.pi * rho(3)) @ expm(-0.25j * math.pi * big_sigma(3))
            @ half_swap @ expm(0.5j * math.pi * rho(3)) @ half_swap)


def identity_block_fidelity(r: np.ndarray) -> float:
    """Phase-invariant fidelity of the middle 2x2 block with the identity"""
    block = np.asarray(r)[1:3, 1:3]
    return float(min(1.0, abs(np.trace(block)) / 2.0))


def _fidelity(r: np.ndarray, target: str, tol: float = UNITARITY_TOL) -> float:
    if target == "identity-block":
        return identity_block_fidelity(r)
    return fidelity_phase_invariant(r, xor_target(), tol)


# ============================================================================
# Shared helpers
# ============================================================================

def field_cap(g_factor: float = DEFAULT_G_FACTOR, cap_tesla: float = FIELD_CAP_TESLA) -> float:
    """Hardware cap of |B+| in rad/ps"""
    return abs(zeeman_rad_per_ps(cap_tesla, g_factor))


def bplus_level(target_gamma: float, T: float, cap: Optional[float] = None) -> Tuple[float, int]:
    """
    Constant B+ with Gamma(T) = target_gamma + 2 pi k, smallest |B+|

    Args:
        target_gamma: Required Gamma(T) modulo 2 pi
        T: Gate time (ps)
        cap: Hardware cap in rad/ps (a warning is logged when exceeded)

    Returns:
        (level in rad/ps, k)
    """
    if T <= 0:
        raise DesignError(f"Gate time must be > 0, got {T}")
    reduced = math.remainder(target_gamma, 2.0 * math.pi)
    k = int(round((reduced - target_gamma) / (2.0 * math.pi)))
    level = reduced / T
    cap = field_cap() if cap is None else cap
    if abs(level) > cap:
        logger.warning(f"B+ level {level:.4g} rad/ps exceeds the hardware cap {cap:.4g} rad/ps (T = {T:.4g} ps)")
    return level, k


def _xor_lambda(n: int, m: int) -> float:
    if n < 1 or m < 0:
        raise DesignError(f"Need n >= 1 and m >= 0, got n = {n}, m = {m}")
    if m >= n:
        raise DesignError(f"No valid lambda: sin(lambda) = (4m+1)/(4n) needs m < n, got n = {n}, m = {m}")
    return math.asin((4 * m + 1) / (4.0 * n))


def resimulate(design: GateDesign, cfg: Optional[IntegratorConfig] = None) -> float:
    """Fidelity of the design recomputed from scratch by the numerical integrator"""
    if design.profile is None:
        raise DesignError("Design carries no pulse profile to re-simulate")
    cfg = cfg or IntegratorConfig()
    return _fidelity(numeric_propagator(design.profile, design.T, cfg), design.target, cfg.unitarity_tol)


# ============================================================================
# Proportional and constant families
# ============================================================================

def design_proportional_xor(n: int, m: int, q: PulseShape, t_max: float = 1e5,
                            verify_oracle: bool = True, cfg: Optional[IntegratorConfig] = None,
                            g_factor: float = DEFAULT_G_FACTOR) -> GateDesign:
    """
    XOR with J = q sin(lambda), B- = q cos(lambda)

    Args:
        n: Number of full 2 pi turns of the pulse area, n >= 1
        m: Integer with sin(lambda) = (4m+1)/(4n), 0 <= m < n
        q: Common pulse shape
        t_max: Search window for the gate time (ps)
        verify_oracle: Re-simulate with the numerical integrator
        cfg: Integrator tolerances
        g_factor: g-factor setting the hardware cap on B+

    Returns:
        GateDesign of family Proportional
    """
    lam = _xor_lambda(n, m)
    T, monotone = first_crossing(q, 2.0 * n * math.pi, t_max)
    notes = []
    if not monotone:
        logger.warning("Pulse area is not monotone before it reaches 2 n pi: first crossing taken")
        notes.append("pulse area not monotone; first crossing taken")
    level, k = bplus_level(math.pi / 2.0, T, field_cap(g_factor))
    profile = proportional(lam, q, level, T)

    result = evolve(profile, T, cfg)
    fidelity = fidelity_phase_invariant(result.propagator, xor_target())
    if fidelity < ANALYTIC_MIN_FIDELITY:
        raise DesignError(f"Proportional design reached only {fidelity:.12f} for n = {n}, m = {m}")

    design = GateDesign("Proportional", T, level, n, m, fidelity,
                        parameters={"lambda": lam, "k": k}, propagator=result.propagator,
                        profile=profile, notes=notes)
    if verify_oracle:
        design.oracle_fidelity = resimulate(design, cfg)
        if design.oracle_fidelity < ORACLE_MIN_FIDELITY:
            logger.warning(f"Oracle fidelity {design.oracle_fidelity:.10f} below {ORACLE_MIN_FIDELITY}")
    logger.info(f"Proportional XOR n = {n}, m = {m}: T = {T:.6g} ps, fidelity = {fidelity:.12f}")
    return design


def constant_pulse_gate_time(j: float, bminus: float, n: int) -> float:
    """T = 2 n pi / sqrt(J^2 + B-^2)"""
    size = math.hypot(j, bminus)
    if size == 0.0:
        raise DesignError("J and B- cannot both vanish")
    return 2.0 * n * math.pi / size


def design_constant_xor(j: float, n: int, m: int, verify_oracle: bool = True,
                        cfg: Optional[IntegratorConfig] = None, g_factor: float = DEFAULT_G_FACTOR) -> GateDesign:
    """XOR from constant J with B- = J cot(lambda)"""
    if j <= 0:
        raise DesignError(f"Constant design needs J > 0, got {j}")
    lam = _xor_lambda(n, m)
    bminus = j / math.tan(lam)
    T = constant_pulse_gate_time(j, bminus, n)
    level, k = bplus_level(math.pi / 2.0, T, field_cap(g_factor))
    profile = constant_pair(j, bminus, level, T)
    result = evolve(profile, T, cfg)
    fidelity = fidelity_phase_invariant(result.propagator, xor_target())
    design = GateDesign("ConstantPair", T, level, n, m, fidelity,
                        parameters={"lambda": lam, "J": j, "Bminus": bminus, "k": k},
                        propagator=result.propagator, profile=profile)
    if verify_oracle:
        design.oracle_fidelity = resimulate(design, cfg)
    return design


# ============================================================================
# Adiabatic sech family
# ============================================================================

def adcond_residual(a: float, c: float, omega: float) -> complex:
    """G2^0 = a F(1 + lambda, 1 - lambda; gamma + 1; 1/2), zero when the pulse returns u to a diagonal"""
    if omega <= 0:
        raise DesignError(f"omega must be > 0, got {omega}")
    if a == 0.0:
        return 0.0 + 0.0j
    return sech_boundary_values(a, c, omega)[1]


def adiabatic_amplitude(omega: float, T: float, m: int) -> float:
    """a = omega pi (1 + 4m) / (4 arctan(exp(omega T)) - pi)"""
    x = omega * T
    if x <= 0:
        raise DesignError(f"omega T must be > 0, got {x}")
    # 4 arctan(e^x) - pi written without overflowing exp
    denominator = math.pi - 4.0 * math.atan(math.exp(-x))
    return omega * math.pi * (1 + 4 * m) / denominator


def _omega_t_for_lambda(lam: float, m: int) -> float:
    """Inverts the amplitude relation: omega T with a / omega = lam"""
    angle = math.pi / 4.0 + math.pi * (1 + 4 * m) / (4.0 * lam)
    return math.log(math.tan(angle))


def _lambda_grid(m: int) -> np.ndarray:
    base = 1.0 + 4.0 * m
    return base + base * np.logspace(math.log10(SCAN_MIN_OFFSET), math.log10(SCAN_SPAN / base), SCAN_POINTS)


def _sech_candidate(lam: float, c: float, n: int, m: int) -> Tuple[float, float, float]:
    T = n * math.pi / c
    omega = _omega_t_for_lambda(lam, m) / T
    return lam * omega, omega, T


def _amplitude_line_trace(c: float, n: int, m: int) -> List[Tuple[float, complex]]:
    """G2^0 along the amplitude relation with T = n pi / c"""
    trace = []
    for lam in _lambda_grid(m):
        a, omega, _ = _sech_candidate(float(lam), c, n, m)
        trace.append((float(lam), adcond_residual(a, c, omega)))
    return trace


def adcond_ratio(lam: float, kappa: float) -> complex:
    """G2^0 / a in terms of lambda = |a| / omega and kappa = c / omega"""
    return complex(hyp2f1(1.0 + lam, 1.0 - lam, 1.5 + 1j * kappa, 0.5))


def adcond_region(n: int, m: int) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """
    (lambda, kappa) box of adiabatic XOR candidates

    lambda lies within LARGE_OMEGA_T_TOL above 1 + 4m and omega T = n pi / kappa
    stays above LARGE_OMEGA_T.
    """
    if n < 1 or m < 0:
        raise DesignError(f"Need n >= 1 and m >= 0, got n = {n}, m = {m}")
    base = 1.0 + 4.0 * m
    return (base, base * (1.0 + LARGE_OMEGA_T_TOL)), (KAPPA_MIN, n * math.pi / LARGE_OMEGA_T)


@dataclass
class AdcondSearch:
    """Roots of Re G2^0 = Im G2^0 = 0 in a (lambda, kappa) box, and the smallest |G2^0 / a| met"""
    roots: List[Tuple[float, float]]
    min_residual: float
    at: Tuple[float, float]


def solve_adcond(lam_range: Tuple[float, float], kappa_range: Tuple[float, float],
                 seeds: int = ADCOND_SEEDS) -> AdcondSearch:
    """
    Solve both parts of G2^0 = 0 together over lambda and kappa

    scipy.optimize.root is started from a seeds x seeds grid of the box; a
    solution counts when it stays inside the box with |G2^0 / a| <= ADCOND_TOL.
    """
    (lam_lo, lam_hi), (kappa_lo, kappa_hi) = lam_range, kappa_range

    def inside(lam, kappa):
        return (lam_lo - BOX_SLACK <= lam <= lam_hi + BOX_SLACK
                and kappa_lo - BOX_SLACK <= kappa <= kappa_hi + BOX_SLACK)

    def equations(x):
        value = adcond_ratio(x[0], x[1])
        return [value.real, value.imag]

    roots = []
    best, best_at = math.inf, (lam_lo, kappa_lo)
    kappa_seeds = np.linspace(kappa_lo, kappa_hi, seeds)
    for lam0 in np.linspace(lam_lo, lam_hi, seeds):
        for kappa0 in kappa_seeds:
            points = [(float(lam0), float(kappa0))]
            try:
                solution = root(equations, [lam0, kappa0], method="hybr", options={"xtol": ROOT_XTOL})
                points.append((float(solution.x[0]), float(solution.x[1])))
            except (HypergeometricConvergenceError, SpecialFunctionDomainError) as e:
                logger.debug(f"adcond solve from ({lam0:.4g}, {kappa0:.4g}) left the series domain: {e}")
            for lam, kappa in points:
                if not (np.isfinite(lam) and np.isfinite(kappa) and inside(lam, kappa)):
                    continue
                size = abs(adcond_ratio(lam, kappa))
                if size < best:
                    best, best_at = size, (lam, kappa)
                if size <= ADCOND_TOL and not any(abs(lam - r[0]) <= 1e-6 and abs(kappa - r[1]) <= 1e-6 for r in roots):
                    roots.append((lam, kappa))
    return AdcondSearch(roots, best, best_at)


def check_amplitude_relation(a: float, omega: float, T: float, m: int) -> float:
    """
    Relative spread of a / omega from 1 + 4m

    Raises:
        DesignInfeasibleError: spread above LARGE_OMEGA_T_TOL while omega T > LARGE_OMEGA_T
    """
    base = 1 + 4 * m
    spread = abs(abs(a) / omega - base) / base
    if omega * T > LARGE_OMEGA_T and spread > LARGE_OMEGA_T_TOL:
        raise DesignInfeasibleError(
            f"a / omega = {abs(a) / omega:.6g} is {spread:.3%} away from 1 + 4m = {base} at omega T = {omega * T:.3g}"
        )
    return spread


def _adiabatic_candidate(lam: float, kappa: float, c: float, n: int, m: int,
                         cfg: Optional[IntegratorConfig], cap: float) -> Optional[GateDesign]:
    omega = c / kappa
    a = lam * omega
    theta = float(np.angle(hyp2f1(lam, -lam, 0.5 + 1j * kappa, 0.5)))
    # u_T -> exp(-i sigma3 (c T + theta)) is +-I once c T + theta = n pi
    T = (n * math.pi - theta) / c
    if T <= 0:
        return None
    u = sech_propagator(a, c, omega, T)
    # |tr u + 2 sin(Gamma)| / 4 is largest for Gamma = +-pi/2 following the sign of Re tr u
    gamma = math.copysign(math.pi / 2.0, np.trace(u).real)
    level, k = bplus_level(gamma, T, cap)
    profile = sech_pulse(a, c, omega, level, T)
    result = evolve(profile, T, cfg)
    fidelity = fidelity_phase_invariant(result.propagator, xor_target())
    residual = adcond_residual(a, c, omega)
    notes = [f"Gamma(T) = {'+' if gamma > 0 else '-'}pi/2 chosen from the measured middle block"]
    return GateDesign("AdiabaticSech", T, level, n, m, fidelity,
                      parameters={"a": a, "c": c, "omega": omega, "lambda": lam, "k": k, "theta": theta,
                                  "omega_T": omega * T, "residual_real": residual.real,
                                  "residual_imag": residual.imag},
                      propagator=result.propagator, profile=profile, notes=notes)


def _equal_field_infeasible(m: int) -> DesignInfeasibleError:
    trace = [(float(lam), adcond_residual(float(lam), 0.0, 1.0)) for lam in _lambda_grid(m)]
    odd = 1 + 4 * m
    return DesignInfeasibleError(
        f"c = 0: G2^0 vanishes only at even a / omega, where the pulse area is a multiple of pi; "
        f"the XOR needs a / omega = {odd}, where |G2^0 / a| = {1.0 / odd:.4g}",
        trace, min(abs(residual) / lam for lam, residual in trace),
    )


def design_adiabatic_xor(c: float, n: int, m: int, t_window: Optional[float] = None,
                         min_fidelity: float = ADIABATIC_MIN_FIDELITY, verify_oracle: bool = True,
                         cfg: Optional[IntegratorConfig] = None, g_factor: float = DEFAULT_G_FACTOR) -> GateDesign:
    """
    XOR from J = a / cosh(omega t) with constant B- = c

    Both parts of G2^0 = 0 are solved together in lambda = a / omega and
    kappa = c / omega inside adcond_region; c only sets the time scale. Each
    root gives omega = c / kappa and T = (n pi - theta) / c, with the
    neighbours n - 1 and n + 1 tried as well; the best design is kept.

    Raises:
        DesignError: invalid n or m
        DesignInfeasibleError: no root of G2^0 in the region, or no candidate reaches min_fidelity
    """
    lam_range, kappa_range = adcond_region(n + 1, m)
    if c == 0.0:
        raise _equal_field_infeasible(m)
    c = abs(c)
    search = solve_adcond(lam_range, kappa_range)
    if not search.roots:
        raise DesignInfeasibleError(
            f"No adiabatic XOR for c = {c}, n = {n}, m = {m}: |G2^0 / a| >= {search.min_residual:.3e} "
            f"for a / omega in [{lam_range[0]:.4g}, {lam_range[1]:.4g}] and c / omega in "
            f"[{kappa_range[0]:.3g}, {kappa_range[1]:.3g}] (smallest at {search.at[0]:.6g}, {search.at[1]:.6g})",
            _amplitude_line_trace(c, n, m), search.min_residual,
        )

    cap = field_cap(g_factor)
    best = None
    for lam, kappa in search.roots:
        for candidate_n in (n, n + 1, n - 1):
            if candidate_n < 1:
                continue
            design = _adiabatic_candidate(lam, kappa, c, candidate_n, m, cfg, cap)
            if design is None or (t_window is not None and design.T > t_window):
                continue
            if best is None or design.achieved_fidelity > best.achieved_fidelity:
                best = design
    if best is None or best.achieved_fidelity < min_fidelity:
        reached = "no candidate inside the window" if best is None else f"best fidelity {best.achieved_fidelity:.10f}"
        raise DesignInfeasibleError(f"No adiabatic XOR for c = {c}, n = {n}, m = {m}: {reached}",
                                    _amplitude_line_trace(c, n, m), search.min_residual)
    spread = check_amplitude_relation(best.parameters["a"], best.parameters["omega"], best.T, m)
    best.parameters["amplitude_spread"] = spread
    if best.n != n:
        logger.info(f"Adiabatic design moved from n = {n} to n = {best.n}")
        best.notes.append(f"requested n = {n}; n = {best.n} gave the best fidelity")
    if verify_oracle:
        cfg = cfg or IntegratorConfig()
        propagator, t_cut = evolve_sech_truncated(best.parameters["a"], c, best.parameters["omega"],
                                                  best.T, best.bplus_level, cfg)
        best.oracle_fidelity = fidelity_phase_invariant(propagator, xor_target(), cfg.unitarity_tol)
        if t_cut is not None:
            best.notes.append(f"oracle pulse tail truncated at t = {t_cut:.6g} ps")
    return best


def design_sech_identity(m: int, omega: float, t_window: Optional[float] = None,
                         cfg: Optional[IntegratorConfig] = None) -> GateDesign:
    """
    Equal fields (c = 0) with |a| = 2 m omega: the middle block returns to +-I

    The window defaults to omega t = 20, where the residual pulse area is negligible.
    """
    if m < 1:
        raise DesignError(f"Need m >= 1, got {m}")
    if omega <= 0:
        raise DesignError(f"omega must be > 0, got {omega}")
    T = t_window if t_window is not None else 20.0 / omega
    a = 2.0 * m * omega
    profile = sech_pulse(a, 0.0, omega, 0.0, T)
    result = evolve(profile, T, cfg)
    fidelity = identity_block_fidelity(result.propagator)
    if fidelity < IDENTITY_MIN_FIDELITY:
        logger.warning(f"Identity block fidelity {fidelity:.10f} at omega T = {omega * T:.3g}: widen the window")
    return GateDesign("AdiabaticSech", T, 0.0, 0, m, fidelity,
                      parameters={"a": a, "c": 0.0, "omega": omega, "lambda": 2.0 * m},
                      target="identity-block", propagator=result.propagator, profile=profile)
