"""
Special functions for the sech-pulse solution and the exchange calculator
Gauss hypergeometric 2F1 with complex parameters on [0, 1), modified Bessel I0
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

logger = logging.getLogger(__name__)

MAX_TERMS = 10000
SERIES_EPS = 1e-17
# Beyond this the z -> 1 - z transformation is used
TRANSFORM_THRESHOLD = 0.5
# Parameter sums closer than this to an integer count as degenerate
INTEGER_TOL = 1e-9
# Largest z the direct series is trusted with for nearly degenerate parameters
DIRECT_SERIES_LIMIT = 0.995


class SpecialFunctionDomainError(ValueError):
    """Raised for arguments outside the supported domain"""


class HypergeometricConvergenceError(RuntimeError):
    """Raised when a series does not converge within MAX_TERMS"""

    def __init__(self, message: str, bound: float):
        super().__init__(f"{message} (achieved relative bound {bound:.3e})")
        self.bound = bound


@dataclass(frozen=True)
class HyperParams:
    """Arguments of 2F1(alpha, beta; gamma; z)"""
    alpha: complex
    beta: complex
    gamma: complex
    z: float


def _is_nonpositive_integer(value: complex, tol: float = 1e-14) -> bool:
    value = complex(value)
    if abs(value.imag) > tol:
        return False
    nearest = round(value.real)
    return nearest <= 0 and abs(value.real - nearest) <= tol


def _nearest_integer(value: complex):
    """Return the integer value is (nearly) equal to, else None"""
    value = complex(value)
    nearest = round(value.real)
    if abs(value.imag) <= INTEGER_TOL and abs(value.real - nearest) <= INTEGER_TOL:
        return int(nearest)
    return None


def _direct_series(a: complex, b: complex, c: complex, z: float) -> complex:
    """Sum the defining series with a term-ratio convergence test"""
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    scale = 1.0
    small_in_a_row = 0
    for k in range(MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        magnitude = abs(term)
        scale = max(scale, magnitude)
        if magnitude == 0.0:
            return total
        if magnitude <= SERIES_EPS * abs(total) or magnitude <= SERIES_EPS * SERIES_EPS * scale:
            small_in_a_row += 1
            if small_in_a_row >= 2:
                return total
        else:
            small_in_a_row = 0
    bound = abs(term) / max(abs(total), 1e-300)
    raise HypergeometricConvergenceError(
        f"2F1({a}, {b}; {c}; {z}) did not converge in {MAX_TERMS} terms", bound
    )


def _log_series(a: complex, b: complex, m: int, w: float) -> complex:
    """
    2F1(a, b; a + b + m; 1 - w) for integer m >= 0 (logarithmic case)

    Finite part plus the digamma series in w = 1 - z.
    """
    c = a + b + m
    log_w = math.log(w)

    finite = 0.0 + 0.0j
    if m > 0:
        term = 1.0 + 0.0j
        for n in range(m):
            finite += term
            if n < m - 1:
                term *= (a + n) * (b + n) / ((n + 1) * (1 - m + n)) * w
        finite *= special.gamma(m) * special.gamma(c) * special.rgamma(a + m) * special.rgamma(b + m)

    prefactor = ((-w) ** m) * special.gamma(c) * special.rgamma(a) * special.rgamma(b)
    if prefactor == 0:
        return finite

    coeff = 1.0 / math.factorial(m) + 0.0j
    total = 0.0 + 0.0j
    small_in_a_row = 0
    for n in range(MAX_TERMS):
        bracket = (log_w - special.psi(n + 1) - special.psi(n + m + 1)
                   + special.psi(a + n + m) + special.psi(b + n + m))
        contribution = coeff * bracket
        total += contribution
        if abs(contribution) <= SERIES_EPS * abs(total) or coeff == 0:
            small_in_a_row += 1
            if small_in_a_row >= 2:
                return finite - prefactor * total
        else:
            small_in_a_row = 0
        coeff *= (a + m + n) * (b + m + n) / ((n + 1) * (n + m + 1)) * w
    bound = abs(contribution) / max(abs(total), 1e-300)
    raise HypergeometricConvergenceError(
        f"logarithmic 2F1 series for ({a}, {b}; m={m}; w={w}) did not converge", bound
    )


def _one_minus_z(a: complex, b: complex, c: complex, z: float) -> complex:
    """Evaluate 2F1 for z > 1/2 through the z -> 1 - z linear transformation"""
    s = c - a - b
    w = 1.0 - z
    m = _nearest_integer(s)

    if m is None:
        first = (special.gamma(c) * special.gamma(s) * special.rgamma(c - a) * special.rgamma(c - b)
                 * _direct_series(a, b, 1 - s, w))
        second = ((w ** s) * special.gamma(c) * special.gamma(-s) * special.rgamma(a) * special.rgamma(b)
                  * _direct_series(c - a, c - b, 1 + s, w))
        return first + second

    if s != m:
        # Nearly degenerate: both gamma terms blow up and cancel, so sum directly
        if z <= DIRECT_SERIES_LIMIT:
            return _direct_series(a, b, c, z)
        logger.warning(f"2F1 with c-a-b = {s} close to integer {m} at z = {z}: accuracy reduced")
        return _one_minus_z(a, b, a + b + m, z)

    if m >= 0:
        return _log_series(a, b, m, w)
    # Euler's transformation maps c - a - b = -m onto +m
    return (w ** m) * _log_series(c - a, c - b, -m, w)


def gauss_2f1(p: HyperParams) -> complex:
    """
    Gauss hypergeometric function 2F1(alpha, beta; gamma; z)

    Args:
        p: Complex parameters and a real argument z in [0, 1)

    Returns:
        Complex value, relative error about 1e-11 or better

    Raises:
        SpecialFunctionDomainError: gamma at a series pole or z outside [0, 1)
        HypergeometricConvergenceError: the series did not converge
    """
    a, b, c = complex(p.alpha), complex(p.beta), complex(p.gamma)
    z = float(p.z)
    if not (0.0 <= z < 1.0):
        raise SpecialFunctionDomainError(f"2F1 argument z = {z} outside [0, 1)")
    if _is_nonpositive_integer(c):
        raise SpecialFunctionDomainError(f"2F1 third parameter gamma = {c} is a non-positive integer")
    if not all(np.isfinite(x) for x in (a, b, c)):
        raise SpecialFunctionDomainError(f"2F1 parameters must be finite: {a}, {b}, {c}")
    if z == 0.0:
        return 1.0 + 0.0j
    if z <= TRANSFORM_THRESHOLD:
        return _direct_series(a, b, c, z)
    return _one_minus_z(a, b, c, z)


def hyp2f1(alpha: complex, beta: complex, gamma: complex, z: float) -> complex:
    """Shorthand for gauss_2f1(HyperParams(alpha, beta, gamma, z))"""
    return gauss_2f1(HyperParams(alpha, beta, gamma, z))


def bessel_i0(x: float) -> float:
    """Modified Bessel function I0(x) for x >= 0"""
    x = float(x)
    if not np.isfinite(x) or x < 0:
        raise SpecialFunctionDomainError(f"I0 argument must be finite and >= 0, got {x}")
    return float(special.i0(x))


def bessel_i0_scaled(x: float) -> float:
    """exp(-x) I0(x) for x >= 0, finite for any large x"""
    x = float(x)
    if not np.isfinite(x) or x < 0:
        raise SpecialFunctionDomainError(f"I0 argument must be finite and >= 0, got {x}")
    return float(special.i0e(x))
