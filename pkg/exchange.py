"""
Heitler-London exchange coupling for two quantum dots in unequal fields
Closed-form overlap, W and C matrix elements, and the field-difference parameter Delta
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from config import (
    BOHR_MAGNETON,
    ELECTRON_CHARGE,
    ELECTRON_MASS,
    HBAR,
    MATERIAL_PRESETS,
    THREADS,
    VACUUM_PERMITTIVITY,
    mev_to_rad_per_ps,
    rad_per_ps_to_mev,
)
from specfun import bessel_i0_scaled

logger = logging.getLogger(__name__)

# Heitler-London becomes unreliable below this d or above this J / (hbar omega0)
MIN_RELIABLE_D = 0.7
MAX_RELIABLE_J_RATIO = 0.1

# Rounding noise allowed in the K radicand before it counts as negative
RADICAND_TOL = 1e-14


class SingularConfigurationError(ValueError):
    """Raised when the overlap factor denominator vanishes"""


class ExchangeDomainError(ValueError):
    """Raised when a closed-form element leaves its real domain"""


@dataclass(frozen=True)
class DotParameters:
    """
    Material and geometry of the double dot

    omega0 is the confinement frequency in rad/ps, a the half inter-dot
    distance in nm, mass the effective mass in units of the electron mass.
    """
    omega0: float
    a: float
    kappa: float
    mass: float
    g1: float = -0.44
    g2: float = -0.44

    def __post_init__(self):
        for name in ("omega0", "a", "kappa", "mass"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"DotParameters.{name} must be finite and > 0, got {value}")

    @property
    def hbar_omega0_mev(self) -> float:
        return rad_per_ps_to_mev(self.omega0)

    @property
    def bohr_radius_nm(self) -> float:
        """Effective Bohr radius a0 = sqrt(hbar / m omega0)"""
        return math.sqrt(HBAR / (self.mass * ELECTRON_MASS * self.omega0 * 1e12)) * 1e9

    @property
    def d(self) -> float:
        return self.a / self.bohr_radius_nm

    @property
    def coulomb_scale_mev(self) -> float:
        """e^2 / (4 pi eps0 kappa a0) in meV"""
        a0 = self.bohr_radius_nm * 1e-9
        energy = ELECTRON_CHARGE ** 2 / (4.0 * math.pi * VACUUM_PERMITTIVITY * self.kappa * a0)
        return energy / (ELECTRON_CHARGE * 1e-3)

    def larmor(self, field_tesla: float) -> float:
        """Orbital Larmor frequency e B / 2m in rad/ps"""
        return ELECTRON_CHARGE * field_tesla / (2.0 * self.mass * ELECTRON_MASS) * 1e-12

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "DotParameters":
        """
        Build parameters from a material preset in config.MATERIAL_PRESETS

        Args:
            name: Preset name (e.g. "gaas")
            **overrides: Replace single fields (a, kappa, mass, g1, g2, omega0)
        """
        if name not in MATERIAL_PRESETS:
            raise ValueError(f"Unknown material preset '{name}'. Available: {', '.join(sorted(MATERIAL_PRESETS))}")
        preset = MATERIAL_PRESETS[name]
        values = {
            "omega0": mev_to_rad_per_ps(preset["hbar_omega0_mev"]),
            "a": preset["a_nm"],
            "kappa": preset["kappa"],
            "mass": preset["mass"],
            "g1": preset["g1"],
            "g2": preset["g2"],
        }
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class FieldPair:
    """Fields at dot 1 and dot 2 (tesla)"""
    b1: float
    b2: float

    def __post_init__(self):
        if not (math.isfinite(self.b1) and math.isfinite(self.b2)):
            raise ValueError(f"FieldPair values must be finite, got ({self.b1}, {self.b2})")

    @property
    def sum_prime(self) -> float:
        """B+' = B1 + B2, without the g-factor"""
        return self.b1 + self.b2

    @property
    def difference_prime(self) -> float:
        """B-' = B1 - B2, without the g-factor"""
        return self.b1 - self.b2

    @classmethod
    def from_sum_difference(cls, bplus_prime: float, bminus_prime: float) -> "FieldPair":
        return cls(0.5 * (bplus_prime + bminus_prime), 0.5 * (bplus_prime - bminus_prime))

    def swapped(self) -> "FieldPair":
        return FieldPair(self.b2, self.b1)


@dataclass(frozen=True)
class ExchangeBreakdown:
    """Exchange energy J (meV) with the pieces it is assembled from"""
    b1: float
    b2: float
    d: float
    delta: float
    J: float
    S2factor: float
    Wterm: float
    Cterm: float
    bplus: float
    bminus: float

    CSV_COLUMNS = ("B1", "B2", "d", "delta", "J_meV", "S2factor", "Wterm", "Cterm")

    def csv_row(self) -> Tuple[float, ...]:
        return (self.b1, self.b2, self.d, self.delta, self.J, self.S2factor, self.Wterm, self.Cterm)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def dot_frequencies(p: DotParameters, f: FieldPair) -> Tuple[float, float, float]:
    """
    Dimensionless frequencies of the two dots

    B1 feeds the b- branch and B2 the b+ branch, b = sqrt(1 + (omega_L / omega0)^2).

    Returns:
        (bminus, bplus, d)
    """
    bminus = math.hypot(1.0, p.larmor(f.b1) / p.omega0)
    bplus = math.hypot(1.0, p.larmor(f.b2) / p.omega0)
    return bminus, bplus, p.d


def frequency_asymmetry(bminus: float, bplus: float) -> float:
    """Delta = (b- - b+) / (b- + b+)"""
    return (bminus - bplus) / (bminus + bplus)


def delta_from_fields(p: DotParameters, bplus_prime: float, bminus_prime: float) -> float:
    """
    Delta from the sum and difference of the fields (tesla, no g-factor)

    Delta = B+'B-' / (2[X^2 + B+'^2 + B-'^2 + sqrt((X^2 + B+'^2 + B-'^2)^2 - (2 B+'B-')^2)])
    with X = 2 hbar omega0 / mu_B.
    """
    x = 2.0 * HBAR * p.omega0 * 1e12 / BOHR_MAGNETON
    total = x * x + bplus_prime ** 2 + bminus_prime ** 2
    root = math.sqrt(max(total * total - (2.0 * bplus_prime * bminus_prime) ** 2, 0.0))
    return bplus_prime * bminus_prime / (2.0 * (total + root))


def overlap_mass_term(p: DotParameters, f: FieldPair) -> float:
    """M = (2 d^2 / (b+ + b-)) [b- b+ + (omega_L+ + omega_L-)^2 / (4 omega0^2)]"""
    bminus, bplus, d = dot_frequencies(p, f)
    larmor_sum = p.larmor(f.b1) + p.larmor(f.b2)
    return 2.0 * d * d / (bplus + bminus) * (bminus * bplus + larmor_sum ** 2 / (4.0 * p.omega0 ** 2))


def overlap_factor(m_term: float, delta: float) -> float:
    """
    S^2 / (1 - S^4) = (1 - Delta^2) / (2 sinh(2M) + Delta exp(-2M)(2 - Delta^3))

    Raises:
        SingularConfigurationError: the denominator vanishes
    """
    if m_term <= 0:
        raise ValueError(f"overlap exponent M must be > 0, got {m_term}")
    denominator = 2.0 * math.sinh(2.0 * m_term) + delta * math.exp(-2.0 * m_term) * (2.0 - delta ** 3)
    if not math.isfinite(denominator) or abs(denominator) < 1e-300:
        raise SingularConfigurationError(f"overlap denominator vanishes at M = {m_term}, Delta = {delta}")
    return (1.0 - delta * delta) / denominator


def w_matrix_elements(hbar_omega0: float, bminus: float, bplus: float, d: float) -> float:
    """<12|W|12> - <12|W|21>/S^2 in the units of hbar_omega0"""
    delta = frequency_asymmetry(bminus, bplus)
    if abs(delta) >= 1.0:
        raise ExchangeDomainError(f"|Delta| must be < 1, got {delta}")
    s = bminus + bplus
    d2 = delta * delta
    confinement = 3.0 / (2.0 * d * d * s * s) * ((1.0 + d2) / (1.0 - d2) ** 2 - 1.0)
    return 0.5 * hbar_omega0 * (confinement - 3.0 * (d2 - 1.0) / s - 0.5 * d * d * (d2 * d2 - 6.0 * d2 - 3.0))


def _k_term(bmean: float, delta: float) -> float:
    d2 = delta * delta
    radicand = ((1.0 - d2) * bmean) ** 2 - 2.0 * (1.0 + d2) + 1.0 / (bmean * bmean)
    if radicand < 0.0:
        if radicand < -RADICAND_TOL:
            raise ExchangeDomainError(
                f"negative radicand {radicand:.3e} in K at b_mean = {bmean}, Delta = {delta}"
            )
        radicand = 0.0
    return bmean * (1.0 + d2) - 1.0 / bmean + math.sqrt(radicand)


def c_matrix_elements(coulomb_scale: float, bminus: float, bplus: float, d: float) -> float:
    """
    <12|C|12> - Re<12|C|21>/S^2 in the units of coulomb_scale (e^2 / kappa a0)

    Both Bessel products are formed from exp(-x) I0(x) so large arguments stay finite.
    """
    delta = frequency_asymmetry(bminus, bplus)
    bmean = 0.5 * (bminus + bplus)
    x = d * d * (1.0 - delta * delta) * bmean
    y = 0.5 * d * d * _k_term(bmean, delta)
    direct = math.sqrt(1.0 - delta * delta) * bessel_i0_scaled(x)
    exchange = math.exp(2.0 * y) * bessel_i0_scaled(y)
    return coulomb_scale * math.sqrt(0.5 * math.pi * bmean) * (direct - exchange)


def exchange_J(p: DotParameters, f: FieldPair) -> ExchangeBreakdown:
    """
    Heitler-London exchange energy for fields B1, B2

    J = 2 S^2/(1 - S^4) [L - (hbar omega0 / 4)(b+^2 - b-^2)(b- - b+)/(b+ b-)]
    with L the W and C matrix-element combination.

    Args:
        p: Dot parameters
        f: Fields at the two dots

    Returns:
        ExchangeBreakdown with J and its parts in meV
    """
    bminus, bplus, d = dot_frequencies(p, f)
    delta = frequency_asymmetry(bminus, bplus)
    hbar_omega0 = p.hbar_omega0_mev

    s2factor = overlap_factor(overlap_mass_term(p, f), delta)
    w_term = w_matrix_elements(hbar_omega0, bminus, bplus, d)
    c_term = c_matrix_elements(p.coulomb_scale_mev, bminus, bplus, d)
    asymmetry = 0.25 * hbar_omega0 * (bplus ** 2 - bminus ** 2) * (bminus - bplus) / (bplus * bminus)
    j = 2.0 * s2factor * (w_term + c_term - asymmetry)

    if d < MIN_RELIABLE_D:
        logger.warning(f"d = {d:.3f} < {MIN_RELIABLE_D}: Heitler-London estimate is unreliable")
    if abs(j) > MAX_RELIABLE_J_RATIO * hbar_omega0:
        logger.debug(f"J = {j:.4g} meV exceeds {MAX_RELIABLE_J_RATIO} hbar omega0 at B = ({f.b1}, {f.b2}) T")
    return ExchangeBreakdown(f.b1, f.b2, d, delta, j, s2factor, w_term, c_term, bplus, bminus)


def equal_field_exchange(p: DotParameters, field_tesla: float) -> float:
    """
    J (meV) for the same field at both dots

    J = hbar omega0 / sinh(2 d^2 (2b - 1/b)) [c sqrt(b)(exp(-b d^2) I0(b d^2)
        - exp(d^2 (b - 1/b)) I0(d^2 (b - 1/b))) + (3/(4b))(1 + b d^2)]
    with c = sqrt(pi/2) (e^2 / kappa a0) / (hbar omega0).
    """
    b, d2, coulomb_ratio = equal_field_inputs(p, field_tesla)
    return p.hbar_omega0_mev * equal_field_reduced(b, d2, coulomb_ratio)


def equal_field_inputs(p: DotParameters, field_tesla: float) -> Tuple[float, float, float]:
    """(b, d^2, c) entering the same-field formula"""
    b = math.hypot(1.0, p.larmor(field_tesla) / p.omega0)
    return b, p.d ** 2, math.sqrt(0.5 * math.pi) * p.coulomb_scale_mev / p.hbar_omega0_mev


def equal_field_reduced(b: float, d2: float, coulomb_ratio: float) -> float:
    """Same-field J in units of hbar omega0, free of physical constants"""
    shifted = d2 * (b - 1.0 / b)
    coulomb = coulomb_ratio * math.sqrt(b) * (bessel_i0_scaled(b * d2) - math.exp(2.0 * shifted) * bessel_i0_scaled(shifted))
    return (coulomb + 0.75 / b * (1.0 + b * d2)) / math.sinh(2.0 * d2 * (2.0 * b - 1.0 / b))


def exchange_sweep(p: DotParameters, fields: Sequence[FieldPair], threads: Optional[int] = None) -> List[ExchangeBreakdown]:
    """exchange_J over many field pairs, results in input order"""
    fields = list(fields)
    workers = max(1, min(threads or THREADS, len(fields) or 1))
    logger.info(f"Exchange sweep over {len(fields)} field pairs with {workers} worker(s)")
    if workers == 1:
        return [exchange_J(p, f) for f in fields]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda f: exchange_J(p, f), fields))


def symmetry_defect(p: DotParameters, f: FieldPair) -> float:
    """|J(B1, B2) - J(B2, B1)| / |J(B1, B2)|, nonzero through the odd-Delta overlap term"""
    forward = exchange_J(p, f).J
    backward = exchange_J(p, f.swapped()).J
    if forward == 0.0:
        return abs(backward)
    return abs(forward - backward) / abs(forward)
