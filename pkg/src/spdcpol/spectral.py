"""Joint spectral amplitude of a photon pair from type-II down-conversion.

A monochromatic pump at twice the degeneracy frequency produces strictly
anti-correlated pair frequencies omega0 +/- Omega, where the H (TE) photon
carries omega0 + Omega and the V (TM) photon omega0 - Omega. Expanding the
collinear phase mismatch to second order in the detuning,

    dk(Omega) = delta0 - delta * Omega - beta_plus * Omega**2,

with delta = 1/v_te - 1/v_tm the group-velocity mismatch and beta_plus the
mean of the two group-velocity-dispersion coefficients.  Integrating the
nonlinear interaction over the guide length L gives the sampled amplitude

    F(Omega) = sinc(phi) * exp(i * phi) * g(omega0 + Omega) * g(omega0 - Omega),
    phi(Omega) = dk(Omega) * L / 2,

where g is the amplitude transmission of the spectral filter in front of the
detectors.  The exp(i*phi) factor is what carries the temporal walk-off
information; dropping it silently erases the physics the delay line is
there to compensate.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from .errors import ConfigurationError
from .units import C_LIGHT, TWO_PI, omega_from_lambda

__all__ = [
    "WaveguideDispersion",
    "FilterShape",
    "SpectralFilter",
    "SpectralGrid",
    "JointSpectralAmplitude",
    "beta2_from_d",
    "gvm_delta",
    "phase_mismatch",
    "filter_amplitude",
    "build_jsa",
    "default_grid",
]


def beta2_from_d(d: float, lam: float) -> float:
    """Convert the dispersion parameter D (s/m^2) at wavelength lam (m) to
    beta2 = -D * lam**2 / (2 pi c), in s^2/m."""
    if lam <= 0:
        raise ValueError(f"wavelength must be positive, got {lam}")
    return -d * lam**2 / (TWO_PI * C_LIGHT)


@dataclass(frozen=True)
class WaveguideDispersion:
    """Guided-mode dispersion data of the pair source.

    Group velocities are for the two cross-polarized down-converted modes
    (TE carries H, TM carries V). A single D applies to both polarizations
    unless overridden per mode; delta0 is a residual phase mismatch at
    degeneracy (1/m).
    """

    length_L: float  # m
    v_te: float  # m/s
    v_tm: float  # m/s
    gvd_D: float  # s/m^2 (D convention, negative = normal at telecom here)
    lambda_deg: float = 1555.9e-9  # m, degenerate pair wavelength
    delta0: float = 0.0  # 1/m
    gvd_D_te: float | None = None  # optional per-polarization override
    gvd_D_tm: float | None = None

    def __post_init__(self) -> None:
        if self.length_L <= 0:
            raise ValueError(f"length_L must be positive, got {self.length_L}")
        if self.v_te <= 0 or self.v_tm <= 0:
            raise ValueError("group velocities must be positive")
        if self.lambda_deg <= 0:
            raise ValueError(f"lambda_deg must be positive, got {self.lambda_deg}")
        if not np.isfinite(self.delta0):
            raise ValueError("delta0 must be finite")

    @property
    def delta(self) -> float:
        """Group-velocity mismatch 1/v_te - 1/v_tm (s/m)."""
        return gvm_delta(self)

    @property
    def omega_deg(self) -> float:
        """Degenerate angular frequency omega0 (rad/s)."""
        return omega_from_lambda(self.lambda_deg)

    @property
    def beta2_te(self) -> float:
        d = self.gvd_D if self.gvd_D_te is None else self.gvd_D_te
        return beta2_from_d(d, self.lambda_deg)

    @property
    def beta2_tm(self) -> float:
        d = self.gvd_D if self.gvd_D_tm is None else self.gvd_D_tm
        return beta2_from_d(d, self.lambda_deg)

    @property
    def beta2_mean(self) -> float:
        """beta_plus, the polarization-averaged GVD coefficient (s^2/m)."""
        return 0.5 * (self.beta2_te + self.beta2_tm)


def gvm_delta(disp: WaveguideDispersion) -> float:
    """Group-velocity mismatch delta = 1/v_te - 1/v_tm (s/m)."""
    return 1.0 / disp.v_te - 1.0 / disp.v_tm


def phase_mismatch(omega, disp: WaveguideDispersion):
    """Accumulated phase phi(Omega) = dk(Omega) * L / 2 at detuning Omega.

    dk is expanded to second order around degeneracy:
    dk = delta0 - delta*Omega - beta_plus*Omega**2. Accepts scalars or arrays.
    """
    omega = np.asarray(omega, dtype=float)
    dk = disp.delta0 - disp.delta * omega - disp.beta2_mean * omega**2
    phi = dk * (disp.length_L / 2.0)
    return phi if phi.ndim else float(phi)


class FilterShape(str, Enum):
    TOP_HAT = "top_hat"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class SpectralFilter:
    """Band-pass filter, specified in wavelength like its datasheet.

    fwhm_lambda is the full width at half maximum of the *intensity*
    transmission. The gaussian profile is gaussian in wavelength; amplitude
    transmission is the square root of the intensity profile.
    """

    shape: FilterShape
    center_lambda: float  # m
    fwhm_lambda: float  # m

    def __post_init__(self) -> None:
        object.__setattr__(self, "shape", FilterShape(self.shape))
        if self.fwhm_lambda <= 0:
            raise ValueError(f"fwhm_lambda must be positive, got {self.fwhm_lambda}")
        if self.center_lambda <= 0:
            raise ValueError(f"center_lambda must be positive, got {self.center_lambda}")

    def band_edges_lambda(self) -> tuple[float, float]:
        """Half-maximum band edges in wavelength (m), (low, high)."""
        half = 0.5 * self.fwhm_lambda
        return self.center_lambda - half, self.center_lambda + half

    def band_edges_omega(self) -> tuple[float, float]:
        """Half-maximum band edges in angular frequency (rad/s), (low, high)."""
        lam_lo, lam_hi = self.band_edges_lambda()
        if lam_lo <= 0:
            raise ValueError("filter band extends to non-positive wavelengths")
        return omega_from_lambda(lam_hi), omega_from_lambda(lam_lo)


def filter_amplitude(omega_abs, filt: SpectralFilter):
    """Amplitude transmission g(omega) in [0, 1] at absolute frequency omega.

    top_hat: 1 inside the half-maximum band, 0 outside.
    gaussian: |g|^2 = exp(-4 ln2 ((lambda - center)/fwhm)^2), so the
    intensity hits 1/2 exactly half an FWHM from center.
    """
    omega_abs = np.asarray(omega_abs, dtype=float)
    if np.any(omega_abs <= 0):
        raise ValueError("filter_amplitude requires positive absolute frequencies")
    lam = TWO_PI * C_LIGHT / omega_abs
    u = (lam - filt.center_lambda) / filt.fwhm_lambda
    if filt.shape is FilterShape.TOP_HAT:
        g = (np.abs(u) <= 0.5).astype(float)
    else:
        g = np.exp(-2.0 * np.log(2.0) * u**2)
    return g if g.ndim else float(g)


@dataclass(frozen=True)
class SpectralGrid:
    """Symmetric detuning grid Omega_k, k = 0..n-1, with Omega = 0 a sample.

    Built from integer indices so that Omega_k == -Omega_{n-1-k} holds
    exactly in floating point, which the reflection Omega -> -Omega relies
    on downstream.
    """

    omega_max: float  # rad/s, half-width of the span
    n_points: int

    def __post_init__(self) -> None:
        if self.omega_max <= 0:
            raise ValueError(f"omega_max must be positive, got {self.omega_max}")
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ValueError(f"n_points must be odd and >= 3, got {self.n_points}")

    @property
    def step(self) -> float:
        return self.omega_max / ((self.n_points - 1) // 2)

    @property
    def omegas(self) -> NDArray[np.float64]:
        half = (self.n_points - 1) // 2
        idx = np.arange(self.n_points) - half
        return idx * self.step

    def refined(self) -> "SpectralGrid":
        """Same span with the step halved (n -> 2n - 1)."""
        return SpectralGrid(self.omega_max, 2 * self.n_points - 1)


@dataclass(frozen=True)
class JointSpectralAmplitude:
    """Complex pair amplitude F(Omega_k) sampled on a symmetric grid."""

    grid: SpectralGrid
    amplitude: NDArray[np.complex128]

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitude, dtype=np.complex128)
        if amp.shape != (self.grid.n_points,):
            raise ValueError(
                f"amplitude shape {amp.shape} does not match grid ({self.grid.n_points},)"
            )
        object.__setattr__(self, "amplitude", amp)

    def reflected(self) -> NDArray[np.complex128]:
        """F(-Omega_k), read off by index reflection (no interpolation)."""
        return self.amplitude[::-1]

    def norm_sq(self) -> float:
        """Trapezoid-rule integral of |F|^2 over the grid."""
        return float(np.trapezoid(np.abs(self.amplitude) ** 2, dx=self.grid.step))


def default_grid(filt: SpectralFilter, n_points: int = 8193, width_factor: float = 3.0) -> SpectralGrid:
    """Grid spanning width_factor times the filter's angular half-width.

    The default (3x, 8193 points) resolves the sinc oscillations of a
    mm-scale guide at well below 0.05 rad of phase per step.
    """
    w_lo, w_hi = filt.band_edges_omega()
    half_width = 0.5 * (w_hi - w_lo)
    return SpectralGrid(width_factor * half_width, n_points)


def _check_band_inside_grid(disp: WaveguideDispersion, filt: SpectralFilter, grid: SpectralGrid) -> None:
    w_lo, w_hi = filt.band_edges_omega()
    omega0 = disp.omega_deg
    det_lo, det_hi = w_lo - omega0, w_hi - omega0
    extent = max(abs(det_lo), abs(det_hi))
    if extent > grid.omega_max:
        raise ConfigurationError(
            "spectral grid narrower than the filter band: band detunings "
            f"[{det_lo:.3e}, {det_hi:.3e}] rad/s exceed omega_max={grid.omega_max:.3e}"
        )


def build_jsa(
    disp: WaveguideDispersion, filt: SpectralFilter, grid: SpectralGrid
) -> JointSpectralAmplitude:
    """Sample F(Omega) = sinc(phi) * exp(i phi) * g(omega0+Omega) * g(omega0-Omega).

    sinc(x) = sin(x)/x with sinc(0) = 1. Raises ConfigurationError when the
    filter band does not fit inside the grid span.
    """
    _check_band_inside_grid(disp, filt, grid)
    omega0 = disp.omega_deg
    if grid.omega_max >= omega0:
        raise ConfigurationError(
            "grid span reaches non-positive absolute frequencies; "
            f"omega_max={grid.omega_max:.3e} >= omega0={omega0:.3e}"
        )
    om = grid.omegas
    phi = phase_mismatch(om, disp)
    # np.sinc is sin(pi x)/(pi x); rescale to sin(x)/x
    pm = np.sinc(phi / np.pi) * np.exp(1j * phi)
    g_pair = filter_amplitude(omega0 + om, filt) * filter_amplitude(omega0 - om, filt)
    return JointSpectralAmplitude(grid=grid, amplitude=pm * g_pair)
