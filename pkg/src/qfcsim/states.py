"""Two-qubit states and entanglement / nonlocality metrics.

Density matrices are plain complex ndarrays in the computational basis,
with two-qubit indices ordered as 2*q1 + q2 (qubit 1 major).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidState, ShapeMismatch, UnknownLabel
from .linalg import as_complex, dagger, func_psd, kron, partial_trace

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

_SYSY = kron(SY, SY)

_BELL_KETS = {
    "phi+": np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    "psi-": np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2),
}


def assert_density_matrix(rho, dim: int | None = None, tol: float = 1e-10) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return as ndarray."""
    rho = as_complex(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidState(f"density matrix must be square, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise InvalidState(f"expected dimension {dim}, got {rho.shape[0]}")
    if np.max(np.abs(rho - dagger(rho))) > tol:
        raise InvalidState("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise InvalidState(f"trace is {np.trace(rho)}, expected 1")
    w = np.linalg.eigvalsh((rho + dagger(rho)) / 2)
    if w[0] < -tol:
        raise InvalidState(f"density matrix has eigenvalue {w[0]} < -{tol}")
    return rho


def bell_state(label: str) -> np.ndarray:
    """Density matrix of one of the four Bell states ('phi+', 'phi-', 'psi+', 'psi-')."""
    key = label.lower()
    if key not in _BELL_KETS:
        raise UnknownLabel(f"unknown Bell label {label!r}; use one of {sorted(_BELL_KETS)}")
    ket = _BELL_KETS[key]
    return np.outer(ket, ket.conj())


def werner_state(p: float) -> np.ndarray:
    """p |phi+><phi+| + (1-p) I/4."""
    return p * bell_state("phi+") + (1 - p) * np.eye(4, dtype=complex) / 4


def purity(rho) -> float:
    rho = assert_density_matrix(rho)
    return float(np.trace(rho @ rho).real)


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    C = max(0, l1 - l2 - l3 - l4) with l_k the descending square roots of
    the eigenvalues of rho (sy x sy) rho* (sy x sy); conjugation is
    element-wise in the computational basis.  The l_k are evaluated as the
    singular values of sqrt(rho) (sy x sy) sqrt(rho)^T, which avoids the
    square-root amplification of rounding noise near rank-deficient states.
    """
    rho = assert_density_matrix(rho, dim=4)
    sqrt_rho = func_psd(rho, np.sqrt)
    lam = np.linalg.svd(sqrt_rho @ _SYSY @ sqrt_rho.T, compute_uv=False)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(c, 0.0), 1.0))


def fidelity(rho, sigma, squared: bool = True) -> float:
    """Uhlmann fidelity.

    Returns (Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2 by default; pass
    squared=False for the square-root convention.
    """
    rho = assert_density_matrix(rho)
    sigma = assert_density_matrix(sigma)
    if rho.shape != sigma.shape:
        raise ShapeMismatch(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    sqrt_rho = func_psd(rho, np.sqrt)
    inner = sqrt_rho @ sigma @ sqrt_rho
    w = np.linalg.eigvalsh((inner + dagger(inner)) / 2)
    root = float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
    f = root ** 2 if squared else root
    return float(min(max(f, 0.0), 1.0))


def pauli_correlations(rho) -> np.ndarray:
    """3x3 matrix T_ij = Tr[rho (sigma_i x sigma_j)]."""
    rho = assert_density_matrix(rho, dim=4)
    paulis = (SX, SY, SZ)
    t = np.empty((3, 3), dtype=float)
    for i, si in enumerate(paulis):
        for j, sj in enumerate(paulis):
            t[i, j] = np.trace(rho @ kron(si, sj)).real
    return t


def chsh_max(rho) -> float:
    """Horodecki maximum of the CHSH polynomial: 2 sqrt(m1 + m2).

    m1 >= m2 are the two largest eigenvalues of T^T T with T the Pauli
    correlation matrix.
    """
    t = pauli_correlations(rho)
    m = np.linalg.eigvalsh(t.T @ t)
    return float(2.0 * np.sqrt(max(m[-1] + m[-2], 0.0)))


def pure_state_concurrence_from_marginal(rho) -> float:
    """For pure two-qubit states, C = 2 sqrt(det of either marginal)."""
    reduced = partial_trace(assert_density_matrix(rho, dim=4), keep=1)
    det = np.linalg.det(reduced).real
    return float(2.0 * np.sqrt(max(det, 0.0)))
