"""CHSH Bell test: correlation estimator, polynomial, and the phi sweep.

Measurement bases follow the two-colour experiment: qubit 1 (heralding
polarization) is measured in the computational and the pi/4-rotated
basis; qubit 2 (converted spatial mode) in bases rotated by phi and
phi + pi/4.  R(phi) = exp(i phi Y) rotates around the Bloch y axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroTotalCounts
from .linalg import kron
from .states import SY, assert_density_matrix

I2 = np.eye(2, dtype=complex)


def rotation_r(phi: float) -> np.ndarray:
    """exp(i phi Y) in closed form: cos(phi) I + i sin(phi) Y."""
    return np.cos(phi) * I2 + 1j * np.sin(phi) * SY


@dataclass(frozen=True)
class ChshBases:
    """Four measurement bases; columns of each 2x2 array are the basis states."""

    basis_a: np.ndarray
    basis_a_prime: np.ndarray
    basis_b: np.ndarray
    basis_b_prime: np.ndarray
    phi: float


def standard_chsh_bases(phi: float) -> ChshBases:
    """a computational, a' = R(pi/4), b = R(phi), b' = R(phi + pi/4)."""
    return ChshBases(
        basis_a=I2.copy(),
        basis_a_prime=rotation_r(np.pi / 4),
        basis_b=rotation_r(phi),
        basis_b_prime=rotation_r(phi + np.pi / 4),
        phi=phi,
    )


def correlation_e(counts) -> float:
    """Correlation estimator (N00 + N11 - N01 - N10) / total."""
    n = np.asarray(counts, dtype=float)
    total = n.sum()
    if total <= 0:
        raise ZeroTotalCounts("no coincidences recorded for this basis pair")
    return float((n[0, 0] + n[1, 1] - n[0, 1] - n[1, 0]) / total)


def chsh_polynomial(e_ab: float, e_abp: float, e_apb: float, e_apbp: float) -> float:
    """|E(a,b) - E(a,b') + E(a',b) + E(a',b')|."""
    return float(abs(e_ab - e_abp + e_apb + e_apbp))


def _pair_probabilities(rho: np.ndarray, basis_1: np.ndarray, basis_2: np.ndarray) -> np.ndarray:
    """2x2 matrix of joint projection probabilities in the given bases."""
    p = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            ket = kron(basis_1[:, i].reshape(2, 1), basis_2[:, j].reshape(2, 1)).reshape(4)
            p[i, j] = max(float(np.real(ket.conj() @ rho @ ket)), 0.0)
    return p


def chsh_sweep(rho, phi_list, mean_pairs: float | None = None, seed: int | None = None):
    """CHSH polynomial versus phi.

    Exact mode (mean_pairs is None) evaluates the four correlations
    directly from rho.  Sampled mode draws Poisson coincidence counts with
    the given expected total per basis pair; each (phi, basis-pair) uses an
    independent generator derived from (seed, indices).  Returns a list of
    (phi, B) tuples, or (phi, B, B_std) in sampled mode with a
    Poisson-propagated standard deviation.
    """
    rho = assert_density_matrix(rho, dim=4)
    if mean_pairs is not None and mean_pairs <= 0:
        raise ZeroTotalCounts(f"mean_pairs must be positive, got {mean_pairs}")
    if mean_pairs is not None and seed is None:
        seed = 0
    out = []
    for i_phi, phi in enumerate(phi_list):
        bases = standard_chsh_bases(phi)
        pairs = [
            (bases.basis_a, bases.basis_b),
            (bases.basis_a, bases.basis_b_prime),
            (bases.basis_a_prime, bases.basis_b),
            (bases.basis_a_prime, bases.basis_b_prime),
        ]
        es = []
        variances = []
        for i_pair, (b1, b2) in enumerate(pairs):
            p = _pair_probabilities(rho, b1, b2)
            if mean_pairs is None:
                es.append(correlation_e(p))
            else:
                rng = np.random.default_rng([seed, i_phi, i_pair])
                counts = rng.poisson(mean_pairs * p)
                e = correlation_e(counts)
                es.append(e)
                variances.append(max(1.0 - e ** 2, 1.0 / counts.sum()) / counts.sum())
        b_val = chsh_polynomial(es[0], es[1], es[2], es[3])
        if mean_pairs is None:
            out.append((float(phi), b_val))
        else:
            out.append((float(phi), b_val, float(np.sqrt(sum(variances)))))
    return out
