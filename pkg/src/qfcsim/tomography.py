"""Simulated two-qubit tomography: projective settings, Poisson counts,
maximum-likelihood reconstruction, and Monte-Carlo error bars.

The projector catalog uses the standard photonic states
H=(1,0), V=(0,1), D=(H+V)/sqrt2, A=(H-V)/sqrt2, R=(H-iV)/sqrt2, L=(H+iV)/sqrt2.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import (InvalidState, NoConvergence, NotInformationallyComplete,
                     NotNormalized, ShapeMismatch)
from .linalg import dagger, kron
from .states import assert_density_matrix

STATE_VECTORS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2),
    "A": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2),
    "R": np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2),
    "L": np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2),
}


def _check_unit(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(2)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise NotNormalized(f"{name} is not unit norm")
    return v


@dataclass(frozen=True)
class MeasurementSetting:
    """Projector states for qubit 1 and qubit 2."""

    proj_a: np.ndarray
    proj_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "proj_a", _check_unit(self.proj_a, "proj_a"))
        object.__setattr__(self, "proj_b", _check_unit(self.proj_b, "proj_b"))

    @classmethod
    def from_names(cls, name_a: str, name_b: str) -> "MeasurementSetting":
        return cls(STATE_VECTORS[name_a], STATE_VECTORS[name_b])

    @property
    def ket(self) -> np.ndarray:
        return kron(self.proj_a.reshape(2, 1), self.proj_b.reshape(2, 1)).reshape(4)


@dataclass(frozen=True)
class CountRecord:
    setting: MeasurementSetting
    counts: int
    integration_time_s: float = 1.0
    rate_scale_hz: float = 1.0

    def __post_init__(self):
        if self.counts < 0:
            raise InvalidState(f"counts must be >= 0, got {self.counts}")


@dataclass(frozen=True)
class MetricWithError:
    value: float
    std: float
    n_samples: int


def projector_set(kind: int) -> list:
    """16 settings (pairs from H,V,D,R) or the overcomplete 36 (H,V,D,A,R,L)."""
    if kind == 16:
        names = ("H", "V", "D", "R")
    elif kind == 36:
        names = ("H", "V", "D", "A", "R", "L")
    else:
        raise ShapeMismatch(f"kind must be 16 or 36, got {kind}")
    return [MeasurementSetting.from_names(a, b)
            for a, b in itertools.product(names, names)]


def expected_probability(rho, setting: MeasurementSetting) -> float:
    ket = setting.ket
    return max(float(np.real(ket.conj() @ np.asarray(rho) @ ket)), 0.0)


def simulate_counts(rho, settings, mean_pairs: float, seed: int) -> list:
    """Poisson coincidence counts for each setting, deterministic per seed."""
    rho = assert_density_matrix(rho, dim=4)
    if mean_pairs <= 0:
        raise InvalidState(f"mean_pairs must be positive, got {mean_pairs}")
    rng = np.random.default_rng(seed)
    records = []
    for setting in settings:
        mu = mean_pairs * expected_probability(rho, setting)
        records.append(CountRecord(setting=setting, counts=int(rng.poisson(mu)),
                                   integration_time_s=1.0, rate_scale_hz=mean_pairs))
    return records


# ---------------------------------------------------------------------------
# maximum likelihood
# ---------------------------------------------------------------------------

# lower-triangle layout of the Cholesky-like factor: 4 real diagonal entries,
# then (re, im) pairs for the off-diagonal positions below the diagonal
_LOWER = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)]


def _t_from_params(t: np.ndarray) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    m[np.diag_indices(4)] = t[:4]
    for i, (r, c) in enumerate(_LOWER):
        m[r, c] = t[4 + 2 * i] + 1j * t[5 + 2 * i]
    return m


def _rho_from_params(t: np.ndarray) -> np.ndarray:
    m = _t_from_params(t)
    rho = dagger(m) @ m
    return rho / np.trace(rho).real


def _check_informationally_complete(kets: np.ndarray) -> None:
    # rank of the projector set as vectors in Hermitian-operator space
    projs = np.einsum("ki,kj->kij", kets, kets.conj()).reshape(len(kets), 16)
    design = np.hstack([projs.real, projs.imag])
    rank = np.linalg.matrix_rank(design, tol=1e-10)
    if rank < 16:
        raise NotInformationallyComplete(
            f"projector set spans only {rank}/16 operator dimensions")


def mle_reconstruct(records, max_iter: int = 5000, tol: float = 1e-10) -> np.ndarray:
    """Density matrix maximizing the Poisson likelihood of the records.

    The predicted mean for record k is s * <proj_k| rho |proj_k> with the
    overall rate s profiled out analytically; rho is parameterized as
    T^dag T / Tr(T^dag T) to stay physical.  With the profiled scale the
    objective reduces to f = -sum n_k log q_k + N log(sum q_k) with
    q_k = |T psi_k|^2, which is scale invariant in T.
    """
    if not records:
        raise NotInformationallyComplete("empty record list")
    kets = np.array([rec.setting.ket for rec in records])
    counts = np.array([rec.counts for rec in records], dtype=float)
    _check_informationally_complete(kets)
    n_tot = counts.sum()
    if n_tot <= 0:
        raise NoConvergence("all counts are zero; likelihood is flat")

    def objective(t):
        m = _t_from_params(t)
        amps = kets @ m.T                    # row k: T psi_k
        q = np.sum(np.abs(amps) ** 2, axis=1)
        q = np.maximum(q, 1e-300)
        f = -float(counts @ np.log(q)) + n_tot * np.log(q.sum())
        # gradient: df/dT* = T B, B = sum_k c_k psi_k psi_k^dag
        c = n_tot / q.sum() - counts / q
        b = np.einsum("k,ki,kj->ij", c, kets, kets.conj())
        g_mat = m @ b
        grad = np.empty(16)
        grad[:4] = 2 * np.real(np.diag(g_mat))
        for i, (r, ccol) in enumerate(_LOWER):
            grad[4 + 2 * i] = 2 * np.real(g_mat[r, ccol])
            grad[5 + 2 * i] = 2 * np.imag(g_mat[r, ccol])
        return f, grad

    t0 = np.zeros(16)
    t0[:4] = 0.5  # maximally mixed start
    res = minimize(objective, t0, jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iter, "ftol": tol, "gtol": 1e-12})
    if not res.success:
        grad_norm = float(np.linalg.norm(res.jac))
        if res.nit >= max_iter or grad_norm > 1e-4 * max(n_tot, 1.0):
            raise NoConvergence(f"MLE did not converge: {res.message}")
    rho = _rho_from_params(res.x)
    rho = (rho + dagger(rho)) / 2
    return assert_density_matrix(rho / np.trace(rho).real, dim=4)


def monte_carlo_metric(records, metric, n_samples: int, seed: int) -> MetricWithError:
    """Mean and standard deviation of a state metric under Poisson resampling.

    Each sample redraws every record's counts as Poisson(observed counts),
    re-runs the MLE, and evaluates ``metric`` on the result.  Sample i uses
    an independent generator derived from (seed, i), so evaluation order
    does not matter.
    """
    if n_samples < 2:
        raise InvalidState(f"n_samples must be >= 2, got {n_samples}")
    values = np.empty(n_samples)
    observed = np.array([rec.counts for rec in records], dtype=float)
    for i in range(n_samples):
        rng = np.random.default_rng([seed, i])
        resampled = rng.poisson(observed)
        new_records = [
            CountRecord(setting=rec.setting, counts=int(n),
                        integration_time_s=rec.integration_time_s,
                        rate_scale_hz=rec.rate_scale_hz)
            for rec, n in zip(records, resampled)
        ]
        values[i] = metric(mle_reconstruct(new_records))
    return MetricWithError(value=float(values.mean()),
                           std=float(values.std(ddof=1)),
                           n_samples=n_samples)


# ---------------------------------------------------------------------------
# record serialization
# ---------------------------------------------------------------------------

def _vector_spec(v: np.ndarray) -> str:
    for name, ref in STATE_VECTORS.items():
        if np.max(np.abs(v - ref)) < 1e-12:
            return name
    return ";".join(f"{float(x.real):.17g}{float(x.imag):+.17g}j" for x in v)


def _parse_vector_spec(spec: str) -> np.ndarray:
    if spec in STATE_VECTORS:
        return STATE_VECTORS[spec]
    return np.array([complex(part) for part in spec.split(";")], dtype=complex)


def records_to_csv(records, path) -> None:
    """CSV columns: proj_a_spec, proj_b_spec, counts, integration_time_s."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["proj_a_spec", "proj_b_spec", "counts", "integration_time_s"])
        for rec in records:
            writer.writerow([_vector_spec(rec.setting.proj_a),
                             _vector_spec(rec.setting.proj_b),
                             rec.counts, f"{rec.integration_time_s!r}"])


def records_from_csv(path) -> list:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            setting = MeasurementSetting(_parse_vector_spec(row["proj_a_spec"]),
                                         _parse_vector_spec(row["proj_b_spec"]))
            records.append(CountRecord(setting=setting, counts=int(row["counts"]),
                                       integration_time_s=float(row["integration_time_s"])))
    return records
