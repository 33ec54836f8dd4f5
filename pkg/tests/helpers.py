"""Shared random-object generators for the test suite."""

import numpy as np


def random_unitary(rng, dim=2):
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (z + z.conj().T) / 2


def random_density_matrix(rng, dim, rank=None):
    rank = rank or dim
    z = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def random_pure_state(rng, dim):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_drive(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return a / np.linalg.norm(a)


def random_bell_diagonal_rotated(rng):
    """Mixture of Bell states under random local unitaries.

    These states have maximally mixed single-qubit marginals.
    """
    from qfcsim.states import bell_state

    w = rng.dirichlet(np.ones(4))
    rho = sum(wi * bell_state(lbl) for wi, lbl in zip(w, ("phi+", "phi-", "psi+", "psi-")))
    u = np.kron(random_unitary(rng), random_unitary(rng))
    return u @ rho @ u.conj().T
