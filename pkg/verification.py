"""
Verification suite for spingate
Closed forms against the numerical integrator, gate designs, special-function identities and exchange properties
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from scipy.integrate import dblquad

from algebra import fidelity_phase_invariant, swap_operator
from config import ADIABATIC_PRESETS, mev_to_rad_per_ps, zeeman_rad_per_ps
from designer import (
    ADCOND_TOL,
    DesignInfeasibleError,
    constant_pulse_gate_time,
    design_adiabatic_xor,
    design_proportional_xor,
    design_sech_identity,
    resimulate,
    xor_sequence,
    xor_target,
)
from dynamics import (
    evolve,
    free_evolution,
    hamiltonian_function,
    lift_two_level,
    numeric_propagator,
    outer_phase_check,
    sech_asymptotic_propagator,
    sech_limit_propagator,
    sech_propagator,
    swap_probability,
    swap_probability_from_propagator,
)
from exchange import DotParameters, FieldPair, c_matrix_elements, delta_from_fields, dot_frequencies, equal_field_exchange, exchange_J
from oracle import IntegratorConfig, evolve_numeric
from pulses import ConstantShape, SinSquaredShape, constant_pair, dual_sech_pulse, planar_loop, proportional, q_vector_pulse, sech_pulse
from specfun import hyp2f1

logger = logging.getLogger(__name__)

SEED = 20240611
PROPORTIONAL_CASES = [(1, 0), (2, 0), (2, 1), (3, 2)]
HYPERGEOMETRIC_LAMBDAS = [0.5, 1.0, 1.5, 2.0, 3.0, 4.5]


@dataclass
class Check:
    """One verification item: a measured value against its threshold"""
    name: str
    value: float
    threshold: float
    passed: bool
    required: bool = True
    detail: Dict[str, Any] = field(default_factory=dict)


@dataclass
class VerificationReport:
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    def add(self, check: Check) -> Check:
        status = "pass" if check.passed else ("FAIL" if check.required else "not met (informational)")
        logger.info(f"{check.name}: {check.value:.3e} vs {check.threshold:.1e} -> {status}")
        self.checks.append(check)
        return check

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def _at_most(name: str, value: float, threshold: float, **detail) -> Check:
    return Check(name, float(value), threshold, bool(value <= threshold), detail=detail)


def _at_least(name: str, value: float, threshold: float, **detail) -> Check:
    return Check(name, float(value), threshold, bool(value > threshold), detail=detail)


# ============================================================================
# Random pulses
# ============================================================================

def _random_constant(rng):
    T = rng.uniform(1.0, 20.0)
    return constant_pair(rng.uniform(0.05, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5), T), T


def _random_proportional(rng):
    T = rng.uniform(2.0, 20.0)
    q = SinSquaredShape(rng.uniform(0.2, 1.0), T)
    return proportional(rng.uniform(0.0, math.pi), q, rng.uniform(-0.5, 0.5), T), T


def _random_sech(rng):
    omega = rng.uniform(0.2, 1.0)
    a = rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 6.0) * omega
    T = rng.uniform(0.1, 1.0) * 20.0 / omega
    return sech_pulse(a, rng.uniform(-0.5, 0.5), omega, rng.uniform(-0.5, 0.5), T), T


def _random_q_vector(rng):
    duration = rng.uniform(5.0, 20.0)
    loop = planar_loop(rng.uniform(0.2, 1.0), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 3.0), duration)
    return q_vector_pulse(loop, rng.uniform(-0.5, 0.5), duration), rng.uniform(0.2, 1.0) * duration


RANDOM_FAMILIES: Dict[str, Callable] = {
    "ConstantPair": _random_constant,
    "Proportional": _random_proportional,
    "Sech": _random_sech,
    "QVector": _random_q_vector,
}


def closed_form_deviations(count: int, cfg: Optional[IntegratorConfig] = None, seed: int = SEED) -> Dict[str, float]:
    """Largest Frobenius deviation between closed form and 4x4 integration, per family"""
    rng = np.random.default_rng(seed)
    worst = {name: 0.0 for name in RANDOM_FAMILIES}
    names = list(RANDOM_FAMILIES)
    for i in range(count):
        name = names[i % len(names)]
        profile, t = RANDOM_FAMILIES[name](rng)
        r = evolve(profile, t, cfg).propagator
        deviation = float(np.linalg.norm(r - numeric_propagator(profile, t, cfg), "fro"))
        worst[name] = max(worst[name], deviation)
    return worst


# ============================================================================
# Individual checks
# ============================================================================

def check_sequence(report: VerificationReport):
    fidelity = fidelity_phase_invariant(xor_sequence(), xor_target())
    report.add(_at_most("xor sequence equals parallel XOR", 1.0 - fidelity, 1e-12))


def check_free_evolution(report: VerificationReport, cfg: IntegratorConfig):
    r = free_evolution(math.pi / 2.0)
    report.add(_at_most("free evolution at pi/2 is the swap", 1.0 - fidelity_phase_invariant(r, swap_operator()), 1e-12))
    profile = constant_pair(1.0, 0.0, 0.0, math.pi / 4.0)
    numeric = evolve_numeric(hamiltonian_function(profile, 4), 0.0, math.pi / 4.0, cfg)
    report.add(_at_most("sqrt-swap matches integration", np.linalg.norm(free_evolution(math.pi / 4.0) - numeric), 1e-8))


def check_closed_forms(report: VerificationReport, count: int, cfg: IntegratorConfig):
    worst = closed_form_deviations(count, cfg)
    for name, deviation in worst.items():
        report.add(_at_most(f"closed form vs integration: {name}", deviation, 1e-7, samples=count // len(worst)))

    dual = dual_sech_pulse(0.8, 0.3, 0.5, 0.1, 30.0)
    deviation = np.linalg.norm(evolve(dual, 30.0, cfg).propagator - numeric_propagator(dual, 30.0, cfg))
    report.add(_at_most("closed form vs integration: DualSech", deviation, 1e-7))


def check_reduction(report: VerificationReport, cfg: IntegratorConfig):
    rng = np.random.default_rng(SEED + 1)
    worst_lift, worst_phase = 0.0, 0.0
    for _ in range(5):
        profile, t = _random_constant(rng)
        u = evolve_numeric(hamiltonian_function(profile, 2), 0.0, t, cfg)
        lifted = lift_two_level(u, profile.gamma(t), profile.phi(t), cfg.unitarity_tol)
        worst_lift = max(worst_lift, float(np.linalg.norm(lifted - numeric_propagator(profile, t, cfg))))
        worst_phase = max(worst_phase, outer_phase_check(profile, t))
    report.add(_at_most("lift of 2x2 integration equals 4x4 integration", worst_lift, 1e-8))
    report.add(_at_most("outer component phase matches quadrature", worst_phase, 1e-9))


def check_swap_probability(report: VerificationReport):
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(50):
        lam, omega = rng.uniform(0.0, math.pi), rng.uniform(0.0, 2.0 * math.pi)
        profile = proportional(lam, ConstantShape(1.0), 0.0, omega)
        r = evolve(profile, omega).propagator
        worst = max(worst, abs(swap_probability_from_propagator(r) - swap_probability(lam, omega)))
    report.add(_at_most("swap probability sin^2(lambda) sin^2(omega)", worst, 1e-10))


def check_proportional_designs(report: VerificationReport, cfg: IntegratorConfig):
    for n, m in PROPORTIONAL_CASES:
        design = design_proportional_xor(n, m, ConstantShape(0.5), cfg=cfg)
        report.add(_at_most(f"proportional XOR n={n} m={m} (closed form)", 1.0 - design.achieved_fidelity, 1e-8, T=design.T))
        report.add(_at_most(f"proportional XOR n={n} m={m} (integration)", 1.0 - design.oracle_fidelity, 1e-6, T=design.T))


def gaas_gate_time() -> float:
    """Constant-pulse XOR time for J = 50 ueV and B- from 10 mT with g = -0.44"""
    j = mev_to_rad_per_ps(0.050)
    bminus = abs(zeeman_rad_per_ps(0.010, -0.44))
    return constant_pulse_gate_time(j, bminus, 1)


def check_gaas_time(report: VerificationReport):
    T = gaas_gate_time()
    report.add(Check("GaAs constant-pulse gate time (ps) within [1, 100]", T, 100.0, 1.0 <= T <= 100.0, detail={"T_ps": T}))


def check_hypergeometric(report: VerificationReport):
    worst = 0.0
    for lam in HYPERGEOMETRIC_LAMBDAS:
        value = hyp2f1(1.0 + lam, 1.0 - lam, 1.5, 0.5)
        worst = max(worst, abs(value - math.sin(lam * math.pi / 2.0) / lam))
    report.add(_at_most("2F1(1+l, 1-l; 3/2; 1/2) = sin(l pi/2)/l", worst, 1e-11))


def check_sech_limit(report: VerificationReport):
    omega = 1.0
    worst = 0.0
    for lam in (2.0, 4.0):
        a = lam * omega
        for t in (15.0, 20.0, 30.0):
            u = sech_propagator(a, 0.0, omega, t)
            worst = max(worst, float(np.linalg.norm(u - sech_limit_propagator(a, 0.0, omega, t))))
    report.add(_at_most("sech propagator approaches its limit for omega t >= 15", worst, 1e-5))

    worst = 0.0
    for lam, c in ((2.0, 0.3), (3.0, 0.3)):
        for t in (15.0, 20.0, 30.0):
            u = sech_propagator(lam * omega, c, omega, t)
            worst = max(worst, float(np.linalg.norm(u - sech_asymptotic_propagator(lam * omega, c, omega, t))))
    report.add(_at_most("sech propagator with field difference approaches its asymptote for omega t >= 15", worst, 1e-5))


def check_identity_design(report: VerificationReport, cfg: IntegratorConfig):
    design = design_sech_identity(2, 0.5, cfg=cfg)
    report.add(_at_most("equal-field sech pulse returns the middle block to identity", 1.0 - design.achieved_fidelity, 1e-6))
    report.add(_at_most("identity design re-simulated", abs(resimulate(design, cfg) - design.achieved_fidelity), 1e-6))


def check_adiabatic_designs(report: VerificationReport, cfg: IntegratorConfig):
    """
    Adiabatic sech XOR for each preset

    A design must pass re-simulation; a preset without one must keep
    |G2^0 / a| clear of ADCOND_TOL over the whole candidate region.
    """
    for preset in ADIABATIC_PRESETS:
        name = f"adiabatic XOR c={preset['c']} n={preset['n']} m={preset['m']}"
        try:
            design = design_adiabatic_xor(preset["c"], preset["n"], preset["m"], cfg=cfg)
        except DesignInfeasibleError as e:
            residual = e.min_residual if e.min_residual is not None else 0.0
            report.add(_at_least(f"{name}: smallest |G2^0 / a| without a design", residual, ADCOND_TOL, reason=str(e)))
            continue
        report.add(_at_most(f"{name} (integration)", 1.0 - design.oracle_fidelity, 1e-5,
                            a=float(design.parameters["a"]), omega=float(design.parameters["omega"]), T=float(design.T)))


def coulomb_quadrature(p: DotParameters) -> float:
    """Zero-field C element from two-dimensional quadrature of the Gaussian Coulomb averages (meV)"""
    mu = 2.0 * p.d

    def mean_inverse_distance(shift):
        value, _ = dblquad(lambda phi, r: math.exp(-0.5 * (r * r + shift * shift - 2.0 * r * shift * math.cos(phi))) / (2.0 * math.pi),
                           0.0, shift + 12.0, 0.0, 2.0 * math.pi, epsabs=1e-12, epsrel=1e-10)
        return value

    return p.coulomb_scale_mev * (mean_inverse_distance(mu) - mean_inverse_distance(0.0))


def check_exchange(report: VerificationReport):
    p = DotParameters.from_preset("gaas")
    report.add(_at_most("Delta vanishes without field difference", abs(delta_from_fields(p, 3.0, 0.0)), 0.0))
    odd = abs(delta_from_fields(p, 4.0, 0.02) + delta_from_fields(p, 4.0, -0.02))
    report.add(_at_most("Delta is odd in the field difference", odd, 1e-20))

    reference = exchange_J(p, FieldPair.from_sum_difference(2.0, 0.0)).J
    worst = 0.0
    for bminus_prime in np.linspace(0.0, 0.2, 11):
        value = exchange_J(p, FieldPair.from_sum_difference(2.0, float(bminus_prime))).J
        worst = max(worst, abs(value - reference) / abs(reference))
    report.add(_at_most("J insensitive to small field differences at 2 T", worst, 0.01))

    equal = max(abs(exchange_J(p, FieldPair(b, b)).J - equal_field_exchange(p, b)) / abs(equal_field_exchange(p, b))
                for b in (0.0, 1.0, 5.0))
    report.add(_at_most("equal-field J matches the same-field formula", equal, 1e-10))

    bminus, bplus, d = dot_frequencies(p, FieldPair(0.0, 0.0))
    closed = c_matrix_elements(p.coulomb_scale_mev, bminus, bplus, d)
    quadrature = coulomb_quadrature(p)
    report.add(_at_most("zero-field Coulomb element matches quadrature", abs(closed - quadrature) / abs(quadrature), 0.01))


def run_suite(quick: bool = False, cfg: Optional[IntegratorConfig] = None) -> VerificationReport:
    """
    Run every verification check

    Args:
        quick: Fewer random pulses
        cfg: Integrator tolerances

    Returns:
        VerificationReport (deterministic for fixed arguments)
    """
    cfg = cfg or IntegratorConfig()
    report = VerificationReport()
    check_sequence(report)
    check_free_evolution(report, cfg)
    check_closed_forms(report, 20 if quick else 200, cfg)
    check_reduction(report, cfg)
    check_swap_probability(report)
    check_proportional_designs(report, cfg)
    check_gaas_time(report)
    check_hypergeometric(report)
    check_sech_limit(report)
    check_identity_design(report, cfg)
    check_exchange(report)
    check_adiabatic_designs(report, cfg)
    return report
