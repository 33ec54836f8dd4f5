"""Joint spectral amplitude of quasi-phase-matched photon pairs.

Builds the JSA of a pulse-pumped, periodically poled crystal,
pump_envelope * sinc(dk L / 2) * filter(w_s) * filter(w_i), and derives
from it the Schmidt decomposition, heralded spectral purity, temporal
Hermite-Gauss mode content, pump overlap, and the coincidence-delay
profile against the drive pulse.

Conventions:
  * Frequency grids are uniform in angular frequency (rad/s).
  * A "duration" D parameterizes a Gaussian field envelope exp(-(t/D)^2):
    the pump spectral amplitude is exp(-D^2 (w_s + w_i - w_p)^2 / 4) and
    temporal modes are H_n(sqrt(2) t / D) exp(-(t/D)^2).
  * Bandpass filters are Gaussian in intensity with the quoted FWHM in
    wavelength; the amplitude filter is its square root.
  * Time-domain quantities use the forward transform exp(-i w t).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.special import eval_hermite, gammaln

from .errors import (DivisionByZero, GridTooCoarse, NoConvergence, OutOfRange,
                     ShapeMismatch)

C_M_S = 299792458.0  # speed of light, m/s


# ---------------------------------------------------------------------------
# dispersion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DispersionModel:
    """One refractive-index model n(lambda, T) for a single crystal axis."""

    name: str
    form: str
    sellmeier: tuple
    thermo: tuple
    valid_um: tuple  # (min, max) wavelength in micrometers

    def __post_init__(self):
        if self.form not in ("gayer",):
            raise OutOfRange(f"unknown dispersion form {self.form!r}")
        if self.form == "gayer" and (len(self.sellmeier) != 6 or len(self.thermo) != 4):
            raise OutOfRange("gayer form needs 6 sellmeier and 4 thermo coefficients")


def refractive_index(model: DispersionModel, wavelength_um, temperature_c: float):
    """Sellmeier refractive index with temperature correction.

    ``wavelength_um`` may be a scalar or an ndarray; raises OutOfRange when
    any wavelength falls outside the model's validity window.
    """
    lam = np.asarray(wavelength_um, dtype=float)
    lo, hi = model.valid_um
    if np.min(lam) < lo or np.max(lam) > hi:
        raise OutOfRange(
            f"wavelength range [{np.min(lam):.4g}, {np.max(lam):.4g}] um outside "
            f"validity [{lo}, {hi}] um of model {model.name}")
    a1, a2, a3, a4, a5, a6 = model.sellmeier
    b1, b2, b3, b4 = model.thermo
    f = (temperature_c - 24.5) * (temperature_c + 570.82)
    lam2 = lam ** 2
    n2 = (a1 + b1 * f
          + (a2 + b2 * f) / (lam2 - (a3 + b3 * f) ** 2)
          + (a4 + b4 * f) / (lam2 - a5 ** 2)
          - a6 * lam2)
    n = np.sqrt(n2)
    return float(n) if np.isscalar(wavelength_um) else n


def load_dispersion_models(text: str) -> dict:
    """Parse the versioned key-value dispersion file format."""
    models = {}
    current: dict | None = None

    def flush():
        if current is not None:
            m = DispersionModel(
                name=current["model"], form=current["form"],
                sellmeier=tuple(current["sellmeier"]), thermo=tuple(current["thermo"]),
                valid_um=tuple(current["valid_um"]))
            models[m.name] = m

    version = None
    for raw in io.StringIO(text):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "format_version":
            version = int(rest[0])
        elif key == "model":
            flush()
            current = {"model": rest[0]}
        elif current is not None and key in ("form",):
            current[key] = rest[0]
        elif current is not None and key in ("sellmeier", "thermo", "valid_um"):
            current[key] = [float(x) for x in rest]
        else:
            raise OutOfRange(f"unrecognized dispersion-file line: {line!r}")
    flush()
    if version != 1:
        raise OutOfRange(f"unsupported dispersion file version {version}")
    return models


def builtin_lithium_niobate() -> dict:
    """Bundled MgO-doped congruent lithium niobate models keyed by name."""
    text = resources.files("qfcsim.data").joinpath("lithium_niobate.txt").read_text()
    return load_dispersion_models(text)


# ---------------------------------------------------------------------------
# crystal / pump / grid specifications
# ---------------------------------------------------------------------------

INTERACTIONS = ("type0_eee", "type1_ooe")


@dataclass(frozen=True)
class CrystalSpec:
    """Quasi-phase-matched crystal for collinear three-wave mixing."""

    length_mm: float
    poling_period_um: float
    temperature_c: float
    interaction: str  # "type0_eee" (all extraordinary) or "type1_ooe" (pair ordinary, pump extraordinary)
    ordinary: DispersionModel | None = None
    extraordinary: DispersionModel | None = None

    def __post_init__(self):
        if self.length_mm <= 0 or self.poling_period_um <= 0:
            raise OutOfRange("crystal length and poling period must be positive")
        if self.interaction not in INTERACTIONS:
            raise OutOfRange(f"interaction must be one of {INTERACTIONS}")
        models = builtin_lithium_niobate()
        if self.ordinary is None:
            object.__setattr__(self, "ordinary", models["mgcln_o"])
        if self.extraordinary is None:
            object.__setattr__(self, "extraordinary", models["mgcln_e"])


@dataclass(frozen=True)
class PumpSpec:
    """Transform-limited Gaussian pump/drive pulse.

    ``duration_fs`` is the Gaussian envelope duration D in
    E(t) ~ exp(-(t/D)^2); the intensity FWHM is sqrt(2 ln 2) * D.
    """

    center_wavelength_nm: float
    duration_fs: float
    shape: str = "gaussian"

    def __post_init__(self):
        if self.duration_fs <= 0 or self.center_wavelength_nm <= 0:
            raise OutOfRange("pump duration and wavelength must be positive")
        if self.shape != "gaussian":
            raise OutOfRange("only gaussian pumps are modeled")

    @property
    def omega_rad_s(self) -> float:
        return 2 * np.pi * C_M_S / (self.center_wavelength_nm * 1e-9)


@dataclass(frozen=True)
class GridSpec:
    """Uniform angular-frequency grid around a center wavelength."""

    points: int = 512
    span_nm: float = 80.0
    center_nm: float | None = None  # default: degenerate wavelength of the pump

    def axis(self, center_nm: float) -> np.ndarray:
        lam_lo = (center_nm - self.span_nm / 2) * 1e-9
        lam_hi = (center_nm + self.span_nm / 2) * 1e-9
        w_lo = 2 * np.pi * C_M_S / lam_hi
        w_hi = 2 * np.pi * C_M_S / lam_lo
        return np.linspace(w_lo, w_hi, self.points)


@dataclass
class JSAGrid:
    """Discretized joint spectral amplitude, rows = signal, cols = idler."""

    signal_axis: np.ndarray
    idler_axis: np.ndarray
    amp: np.ndarray

    def __post_init__(self):
        if self.amp.shape != (len(self.signal_axis), len(self.idler_axis)):
            raise ShapeMismatch("amp shape does not match axis lengths")
        for axis in (self.signal_axis, self.idler_axis):
            if np.any(np.diff(axis) <= 0):
                raise OutOfRange("frequency axes must be strictly increasing")


@dataclass
class SchmidtDecomposition:
    probabilities: np.ndarray       # descending, sums to 1
    signal_modes: np.ndarray        # columns, orthonormal on the grid
    idler_modes: np.ndarray


@dataclass
class SpectralDensity:
    """Single-photon spectral density matrix on a frequency axis."""

    axis: np.ndarray
    mat: np.ndarray


# ---------------------------------------------------------------------------
# phase matching and the JSA
# ---------------------------------------------------------------------------

def _wavevector(crystal: CrystalSpec, omega, pol: str):
    lam_um = 2 * np.pi * C_M_S / np.asarray(omega, dtype=float) * 1e6
    model = crystal.ordinary if pol == "o" else crystal.extraordinary
    n = refractive_index(model, lam_um, crystal.temperature_c)
    return n * np.asarray(omega, dtype=float) / C_M_S  # rad/m


def phase_mismatch(crystal: CrystalSpec, omega_s, omega_i):
    """Quasi-phase-matched wavevector mismatch in rad/m.

    dk = k_p - k_s - k_i -/+ 2 pi / poling period, taking the first-order
    grating component whose sign best compensates the material mismatch
    (a poled crystal provides both +-1 orders).
    """
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    if np.any(omega_s <= 0) or np.any(omega_i <= 0):
        raise OutOfRange("frequencies must be positive")
    pair_pol = "o" if crystal.interaction == "type1_ooe" else "e"
    dk_mat = (_wavevector(crystal, omega_s + omega_i, "e")
              - _wavevector(crystal, omega_s, pair_pol)
              - _wavevector(crystal, omega_i, pair_pol))
    grating = 2 * np.pi / (crystal.poling_period_um * 1e-6)
    plus = dk_mat - grating
    minus = dk_mat + grating
    out = np.where(np.abs(plus) <= np.abs(minus), plus, minus)
    return float(out) if out.ndim == 0 else out


def compute_jsa(pump: PumpSpec, crystal: CrystalSpec, filter_fwhm_nm: float,
                grid: GridSpec = GridSpec()) -> JSAGrid:
    """Joint spectral amplitude with per-photon Gaussian bandpass filters."""
    if grid.points < 64:
        raise GridTooCoarse(f"need at least 64 points per axis, got {grid.points}")
    if filter_fwhm_nm <= 0:
        raise OutOfRange("filter FWHM must be positive")
    center_nm = grid.center_nm if grid.center_nm is not None else 2 * pump.center_wavelength_nm
    # +-3 sigma of the amplitude filter must fit on the grid
    sigma_nm = filter_fwhm_nm / (2 * np.sqrt(np.log(2)))
    if grid.span_nm < 6 * sigma_nm:
        raise OutOfRange(
            f"grid span {grid.span_nm} nm narrower than +-3 filter sigma ({6 * sigma_nm:.1f} nm)")

    w_ax = grid.axis(center_nm)
    ws = w_ax[:, None]
    wi = w_ax[None, :]

    t_pump = pump.duration_fs * 1e-15
    envelope = np.exp(-t_pump ** 2 * (ws + wi - pump.omega_rad_s) ** 2 / 4.0)

    dk = phase_mismatch(crystal, ws, wi)
    pm = np.sinc(dk * (crystal.length_mm * 1e-3 / 2.0) / np.pi)

    lam_s_nm = 2 * np.pi * C_M_S / ws * 1e9
    lam_i_nm = 2 * np.pi * C_M_S / wi * 1e9
    log2 = np.log(2)
    filt = (np.exp(-2 * log2 * ((lam_s_nm - center_nm) / filter_fwhm_nm) ** 2)
            * np.exp(-2 * log2 * ((lam_i_nm - center_nm) / filter_fwhm_nm) ** 2))

    amp = envelope * pm * filt
    norm = np.linalg.norm(amp)
    if norm == 0:
        raise OutOfRange("JSA vanished on the grid; check phase matching")
    return JSAGrid(signal_axis=w_ax, idler_axis=w_ax.copy(), amp=(amp / norm).astype(complex))


# ---------------------------------------------------------------------------
# Schmidt analysis
# ---------------------------------------------------------------------------

def schmidt(grid: JSAGrid) -> SchmidtDecomposition:
    """Schmidt decomposition: SVD of the JSA."""
    try:
        u, s, vh = np.linalg.svd(grid.amp)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    p = s ** 2
    p = p / p.sum()
    return SchmidtDecomposition(probabilities=p, signal_modes=u, idler_modes=vh.conj().T)


def heralded_purity(decomp: SchmidtDecomposition) -> float:
    """Spectral purity of either heralded photon: sum of squared Schmidt weights."""
    return float(np.sum(decomp.probabilities ** 2))


def reduced_density(grid: JSAGrid, which: str = "idler") -> SpectralDensity:
    """Single-photon spectral density matrix from the JSA."""
    if which == "idler":
        mat = grid.amp.T @ grid.amp.conj()
        axis = grid.idler_axis
    elif which == "signal":
        mat = grid.amp @ grid.amp.conj().T
        axis = grid.signal_axis
    else:
        raise ShapeMismatch(f"which must be 'signal' or 'idler', got {which!r}")
    mat = (mat + mat.conj().T) / 2
    mat = mat / np.trace(mat).real
    return SpectralDensity(axis=axis, mat=mat)


def spectral_purity(rho: SpectralDensity) -> float:
    return float(np.trace(rho.mat @ rho.mat).real)


# ---------------------------------------------------------------------------
# temporal modes
# ---------------------------------------------------------------------------

def _central_frequency(rho: SpectralDensity) -> float:
    weights = np.clip(np.diag(rho.mat).real, 0.0, None)
    return float(np.sum(rho.axis * weights) / np.sum(weights))


def _hg_mode(axis: np.ndarray, n: int, tau_s: float, omega0: float) -> np.ndarray:
    """Discretized Hermite-Gauss spectral amplitude, unit norm on the grid."""
    dw = axis[1] - axis[0]
    x = tau_s * (axis - omega0)
    log_norm = 0.5 * (np.log(tau_s) - (n * np.log(2) + gammaln(n + 1) + 0.5 * np.log(np.pi)))
    psi = np.exp(log_norm) * eval_hermite(n, x) * np.exp(-0.5 * x ** 2)
    return psi * np.sqrt(dw)


def _check_mode_resolution(rho: SpectralDensity, tau_s: float, n_modes: int) -> None:
    dw = rho.axis[1] - rho.axis[0]
    sigma = 1.0 / tau_s  # spectral std of the fundamental mode
    if sigma < 4 * dw:
        raise GridTooCoarse("grid spacing too coarse for the requested mode duration")
    # mode n extends to its classical turning point sqrt(2n+1) sigma
    span = rho.axis[-1] - rho.axis[0]
    if span < 2 * sigma * np.sqrt(2 * n_modes):
        raise GridTooCoarse("grid span too narrow for the requested mode set")


def hg_mode_probabilities(rho: SpectralDensity, mode_duration_fs: float,
                          n_modes: int) -> np.ndarray:
    """Populations of temporal Hermite-Gauss modes of the given duration.

    Modes are centered on the photon's mean frequency; mode n has the
    spectral amplitude H_n(tau dw) exp(-tau^2 dw^2 / 2) with
    tau = duration / sqrt(2), matching the envelope convention above.
    """
    if mode_duration_fs <= 0 or n_modes < 1:
        raise OutOfRange("mode duration must be positive and n_modes >= 1")
    tau_s = mode_duration_fs * 1e-15 / np.sqrt(2)
    _check_mode_resolution(rho, tau_s, n_modes)
    omega0 = _central_frequency(rho)
    probs = np.empty(n_modes)
    for n in range(n_modes):
        v = _hg_mode(rho.axis, n, tau_s, omega0)
        probs[n] = max(float(np.real(v @ rho.mat @ v)), 0.0)
    return probs


def pump_overlap(rho: SpectralDensity, pump: PumpSpec) -> float:
    """Population of the transform-limited Gaussian mode of the pump duration.

    The mode is centered at the photon's central frequency, so this is the
    temporal-waveform overlap between photon and pump/drive pulse.
    """
    return float(hg_mode_probabilities(rho, pump.duration_fs, 1)[0])


# ---------------------------------------------------------------------------
# time-domain analysis
# ---------------------------------------------------------------------------

def _fwhm(x: np.ndarray, y: np.ndarray) -> float:
    """Full width at half maximum with linear interpolation at the crossings."""
    ymax = y.max()
    half = ymax / 2.0
    above = y >= half
    idx = np.where(above)[0]
    if len(idx) == 0 or idx[0] == 0 or idx[-1] == len(y) - 1:
        raise GridTooCoarse("half-maximum crossings fall outside the time window")
    i0, i1 = idx[0], idx[-1]
    # interpolate the left and right half crossings
    left = x[i0 - 1] + (x[i0] - x[i0 - 1]) * (half - y[i0 - 1]) / (y[i0] - y[i0 - 1])
    right = x[i1] + (x[i1 + 1] - x[i1]) * (half - y[i1]) / (y[i1 + 1] - y[i1])
    return float(right - left)


def temporal_intensity(rho: SpectralDensity, t_s: np.ndarray) -> np.ndarray:
    """Photon temporal intensity I(t), the time-domain diagonal of rho."""
    w, v = np.linalg.eigh(rho.mat)
    keep = w > 1e-9
    w = w[keep]
    modes = v[:, keep]
    # psi_k(t) = sum_j modes[j,k] exp(-i w_j t); overall dw/2pi factor dropped
    out = np.empty(len(t_s))
    for lo in range(0, len(t_s), 2048):  # chunked to bound the phase matrix
        chunk = t_s[lo:lo + 2048]
        psi_t = np.exp(-1j * np.outer(chunk, rho.axis)) @ modes
        out[lo:lo + 2048] = np.einsum("k,tk->t", w, np.abs(psi_t) ** 2)
    return out


def coincidence_delay_width(rho: SpectralDensity, drive: PumpSpec,
                            window_ps: float = 12.0, step_fs: float = 2.0) -> float:
    """FWHM (fs) of the photon/drive intensity cross-correlation.

    Cross-correlates the photon's temporal intensity with the drive-pulse
    intensity exp(-2 (t/D)^2); this is the shape of the upconversion
    signal versus the relative delay of photon and drive.
    """
    t = np.arange(-window_ps * 500, window_ps * 500 + 1) * step_fs * 1e-15
    photon = temporal_intensity(rho, t)
    d = drive.duration_fs * 1e-15
    drive_int = np.exp(-2.0 * (t / d) ** 2)
    cc = np.convolve(photon, drive_int, mode="same")
    return _fwhm(t, cc) / 1e-15


# ---------------------------------------------------------------------------
# efficiency arithmetic
# ---------------------------------------------------------------------------

def estimate_efficiency(r_up_hz: float, r_herald_hz: float,
                        eta_snspd: float, eta_apd: float) -> float:
    """Upconversion efficiency from single/coincidence rates.

    eta = 2 r_up eta_snspd / (r_herald eta_apd); the factor 2 undoes the
    50% loss of projecting the upconverted polarization.
    """
    denom = r_herald_hz * eta_apd
    if denom == 0:
        raise DivisionByZero("herald rate times APD efficiency is zero")
    for name, val in (("r_up_hz", r_up_hz), ("r_herald_hz", r_herald_hz)):
        if val <= 0:
            raise OutOfRange(f"{name} must be positive, got {val}")
    for name, val in (("eta_snspd", eta_snspd), ("eta_apd", eta_apd)):
        if not 0 < val <= 1:
            raise OutOfRange(f"{name} must be in (0, 1], got {val}")
    return 2.0 * r_up_hz * eta_snspd / denom


# ---------------------------------------------------------------------------
# JSA export
# ---------------------------------------------------------------------------

def jsa_to_csv(grid: JSAGrid, path) -> None:
    """CSV dump with header row (omega_s, omega_i, re, im)."""
    ns, ni = grid.amp.shape
    ws = np.repeat(grid.signal_axis, ni)
    wi = np.tile(grid.idler_axis, ns)
    flat = grid.amp.reshape(-1)
    data = np.column_stack([ws, wi, flat.real, flat.imag])
    np.savetxt(path, data, delimiter=",", fmt="%.17g",
               header="omega_s,omega_i,re,im", comments="")


def jsa_to_binary(grid: JSAGrid, path) -> None:
    """Compact dump: two little-endian int32 axis lengths, then the signal
    axis, idler axis, and row-major (re, im) pairs, all little-endian f64."""
    with open(path, "wb") as fh:
        np.array(grid.amp.shape, dtype="<i4").tofile(fh)
        grid.signal_axis.astype("<f8").tofile(fh)
        grid.idler_axis.astype("<f8").tofile(fh)
        grid.amp.astype("<c16").tofile(fh)


def jsa_from_binary(path) -> JSAGrid:
    with open(path, "rb") as fh:
        ns, ni = (int(x) for x in np.fromfile(fh, dtype="<i4", count=2))
        sig = np.fromfile(fh, dtype="<f8", count=ns)
        idl = np.fromfile(fh, dtype="<f8", count=ni)
        amp = np.fromfile(fh, dtype="<c16", count=ns * ni).reshape(ns, ni)
    return JSAGrid(signal_axis=sig, idler_axis=idl, amp=amp)
