"""
Fixed-size complex linear algebra for two spin-1/2 particles
Pauli and Dirac operators, the swap operator and phase-invariant gate metrics

Basis ordering: |1> = |up,up>, |2> = |up,down>, |3> = |down,up>, |4> = |down,down>.
rho acts on the first arrow (first Kronecker factor), Sigma on the second.
"""

from typing import List

import numpy as np

from config import UNITARITY_TOL

# 2x2 and 4x4 complex matrices are plain numpy arrays of dtype complex128
ComplexMatrix = np.ndarray

IDENTITY2 = np.eye(2, dtype=complex)
IDENTITY4 = np.eye(4, dtype=complex)

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA = (SIGMA1, SIGMA2, SIGMA3)


class NonUnitaryError(ValueError):
    """Raised when an operator that must be unitary is not"""

    def __init__(self, name: str, defect: float, tol: float):
        super().__init__(f"{name} is not unitary: ||U^dag U - I||_F = {defect:.3e} > {tol:.1e}")
        self.defect = defect


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product of two 2x2 matrices"""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError(f"kron expects two 2x2 matrices, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def rho(i: int) -> ComplexMatrix:
    """rho_i = sigma_i (x) I, acting on the first spin (i = 1, 2, 3)"""
    return kron(SIGMA[i - 1], IDENTITY2)


def big_sigma(i: int) -> ComplexMatrix:
    """Sigma_i = I (x) sigma_i, acting on the second spin (i = 1, 2, 3)"""
    return kron(IDENTITY2, SIGMA[i - 1])


def sigma_dot_rho() -> ComplexMatrix:
    """(Sigma . rho) = sum_i sigma_i (x) sigma_i"""
    return sum(kron(s, s) for s in SIGMA)


def swap_operator() -> ComplexMatrix:
    """A = (I + Sigma . rho) / 2, exchanges |up,down> and |down,up>"""
    return 0.5 * (IDENTITY4 + sigma_dot_rho())


def field_dot_sigma(k) -> ComplexMatrix:
    """sigma . K for a real 3-vector K"""
    k1, k2, k3 = (float(x) for x in k)
    return k1 * SIGMA1 + k2 * SIGMA2 + k3 * SIGMA3


def embed_middle(u: ComplexMatrix) -> ComplexMatrix:
    """Embed a 2x2 block in rows/columns 2, 3 of the 4x4 identity"""
    m = IDENTITY4.copy()
    m[1:3, 1:3] = u
    return m


def dagger(u: ComplexMatrix) -> ComplexMatrix:
    return np.conj(np.transpose(u))


def unitarity_defect(u: ComplexMatrix) -> float:
    """Frobenius norm of U^dag U - I"""
    u = np.asarray(u, dtype=complex)
    return float(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0]), "fro"))


def hermiticity_defect(h: ComplexMatrix) -> float:
    """Frobenius norm of H - H^dag"""
    h = np.asarray(h, dtype=complex)
    return float(np.linalg.norm(h - dagger(h), "fro"))


def require_unitary(u: ComplexMatrix, name: str = "matrix", tol: float = UNITARITY_TOL) -> ComplexMatrix:
    """Return u as a complex array, raising NonUnitaryError if it is not unitary"""
    u = np.asarray(u, dtype=complex)
    defect = unitarity_defect(u)
    if not np.isfinite(defect) or defect > tol:
        raise NonUnitaryError(name, defect, tol)
    return u


def fidelity_phase_invariant(u: ComplexMatrix, v: ComplexMatrix, tol: float = UNITARITY_TOL) -> float:
    """
    Phase-invariant gate fidelity |Tr(u^dag v)| / d

    Equals 1 exactly when u = exp(i phi) v for some real phi.

    Args:
        u: Unitary d x d matrix
        v: Unitary d x d matrix
        tol: Unitarity tolerance for both inputs

    Returns:
        Fidelity in [0, 1]
    """
    u = require_unitary(u, "first gate", tol)
    v = require_unitary(v, "second gate", tol)
    if u.shape != v.shape:
        raise ValueError(f"Shape mismatch: {u.shape} vs {v.shape}")
    value = abs(np.trace(dagger(u) @ v)) / u.shape[0]
    return float(min(1.0, value))


def phase_aligned_deviation(u: ComplexMatrix, v: ComplexMatrix) -> float:
    """Frobenius distance between u and v after removing the best global phase"""
    inner = np.trace(dagger(v) @ u)
    phase = inner / abs(inner) if abs(inner) > 1e-15 else 1.0
    return float(np.linalg.norm(u - phase * v, "fro"))


def matrix_to_json(m: ComplexMatrix) -> List[List[List[float]]]:
    """Row-major nested list of [re, im] pairs"""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data: List[List[List[float]]]) -> ComplexMatrix:
    return np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)
