"""
Configuration file for the spingate parallel-pulse toolkit
Loads configuration from environment variables (.env file)
"""

import os
from dotenv import load_dotenv
from scipy import constants

# Load environment variables from .env file
load_dotenv()

VERSION = "1.0.0"

# Worker threads for parameter sweeps
THREADS = int(os.getenv("SPINGATE_THREADS", "0")) or (os.cpu_count() or 1)

# Log directory (the CLI writes spingate.log here)
LOG_DIR = os.getenv("SPINGATE_LOG_DIR", "logs")

# Numerical integrator defaults
ORACLE_RTOL = float(os.getenv("SPINGATE_RTOL", "1e-10"))
ORACLE_ATOL = float(os.getenv("SPINGATE_ATOL", "1e-12"))
ORACLE_MAX_STEP = float(os.getenv("SPINGATE_MAX_STEP", "inf"))

# Unitarity tolerance for values flagged unitary (Frobenius norm)
UNITARITY_TOL = 1e-10

# Hardware cap for the B+ level, expressed as a field in tesla
FIELD_CAP_TESLA = float(os.getenv("SPINGATE_FIELD_CAP_TESLA", "5.0"))

# Designs from the adiabatic family are accepted above this fidelity
ADIABATIC_MIN_FIDELITY = float(os.getenv("SPINGATE_ADIABATIC_MIN_FIDELITY", "0.99999"))

# ============================================================================
# Units: hbar = 1, energies in rad/ps, times in ps (CODATA via scipy)
# ============================================================================

HBAR = constants.hbar                      # J s
ELECTRON_CHARGE = constants.e              # C
ELECTRON_MASS = constants.m_e              # kg
BOHR_MAGNETON = constants.physical_constants["Bohr magneton"][0]  # J/T
VACUUM_PERMITTIVITY = constants.epsilon_0  # F/m

HBAR_MEV_PS = HBAR / (ELECTRON_CHARGE * 1e-3) * 1e12   # meV ps
MEV_TO_RAD_PER_PS = 1.0 / HBAR_MEV_PS
BOHR_MAGNETON_MEV_PER_T = BOHR_MAGNETON / (ELECTRON_CHARGE * 1e-3)

UNIT_CONVENTIONS = "hbar=1; energy=rad/ps; time=ps; field=T; exchange=meV; length=nm"


def mev_to_rad_per_ps(energy_mev: float) -> float:
    """Convert an energy in meV to an angular frequency in rad/ps"""
    return energy_mev * MEV_TO_RAD_PER_PS


def rad_per_ps_to_mev(omega: float) -> float:
    """Convert an angular frequency in rad/ps to an energy in meV"""
    return omega * HBAR_MEV_PS


def zeeman_rad_per_ps(field_tesla: float, g_factor: float) -> float:
    """
    Zeeman energy mu_B * g * B in rad/ps

    Args:
        field_tesla: Magnetic field in tesla
        g_factor: Dimensionless g-factor (sign kept)

    Returns:
        Energy as an angular frequency in rad/ps
    """
    return BOHR_MAGNETON_MEV_PER_T * g_factor * field_tesla * MEV_TO_RAD_PER_PS


# ============================================================================
# Material presets
# ============================================================================

# gaas: the effective mass is the GaAs value; hbar*omega0, kappa and the
# half-distance are conventional defaults, not derived from data.
# si: transverse effective mass, dielectric constant and g of bulk silicon;
# hbar*omega0 and the half-distance are the same conventional defaults.
MATERIAL_PRESETS = {
    "gaas": {
        "hbar_omega0_mev": 3.0,
        "a_nm": 14.0,
        "kappa": 13.1,
        "mass": 0.067,
        "g1": -0.44,
        "g2": -0.44,
    },
    "si": {
        "hbar_omega0_mev": 3.0,
        "a_nm": 14.0,
        "kappa": 11.7,
        "mass": 0.19,
        "g1": 2.0,
        "g2": 2.0,
    },
}

# Adiabatic design presets (c in rad/ps), exercised by `verify`
ADIABATIC_PRESETS = [
    {"c": 0.05, "n": 3, "m": 1},
    {"c": 0.05, "n": 5, "m": 1},
    {"c": 0.08, "n": 7, "m": 2},
]
