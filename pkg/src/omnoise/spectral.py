"""Welch spectra of position trajectories and resonance peak metrics.

Frequencies are ordinary (cycles per unit time): a drive at angular
frequency ``w`` produces a line at ``w / (2 pi)``.  Peak quality is
summarized by the height above local background, the full width at half
that height, and the coherence factor ``beta = nu_peak * height / width``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal as _signal

from .sde import Trajectory


@dataclass(frozen=True)
class WelchConfig:
    """Welch estimator settings; the defaults resolve millihertz-scale peaks."""

    segment_len: int = 16384
    overlap: float = 0.5
    window: str = "hann"

    def __post_init__(self):
        if self.segment_len < 8:
            raise ValueError("segment_len too small")
        if not (0.0 <= self.overlap < 1.0):
            raise ValueError("overlap must be in [0, 1)")


@dataclass
class Spectrum:
    """One-sided power spectral density on a uniform frequency grid."""

    freq: np.ndarray
    psd: np.ndarray
    resolution: float
    n_segments: int
    meta: dict = field(default_factory=dict)

    @property
    def nyquist(self) -> float:
        return float(self.freq[-1])


@dataclass(frozen=True)
class PeakMetrics:
    nu_peak: float
    h_omega: float        # peak height above the in-band background
    delta_omega: float    # full width at half of h_omega
    beta: float           # nu_peak * h_omega / delta_omega
    background: float
    below_background: bool = False


@dataclass(frozen=True)
class SnrResult:
    nu_signal: float
    snr_db: float
    peak_power: float
    background_power: float


def psd(traj: Trajectory, cfg: WelchConfig = WelchConfig(),
        check_parseval: bool = False) -> Spectrum:
    """Welch-averaged one-sided PSD of the mean-removed position series."""
    x = np.asarray(traj.x, dtype=float)
    if len(x) < 2 * cfg.segment_len:
        raise ValueError(
            f"trajectory too short for segment_len={cfg.segment_len}: "
            f"need at least {2 * cfg.segment_len} samples, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise ValueError("trajectory contains non-finite samples")

    fs = 1.0 / traj.dt_sample
    noverlap = int(cfg.overlap * cfg.segment_len)
    x = x - x.mean()
    freq, pxx = _signal.welch(x, fs=fs, window=cfg.window,
                              nperseg=cfg.segment_len, noverlap=noverlap,
                              detrend="constant", scaling="density")
    n_segments = 1 + (len(x) - cfg.segment_len) // (cfg.segment_len - noverlap)
    spec = Spectrum(freq=freq, psd=pxx, resolution=float(freq[1] - freq[0]),
                    n_segments=n_segments,
                    meta={"dt_sample": traj.dt_sample,
                          "segment_len": cfg.segment_len,
                          "overlap": cfg.overlap,
                          "window": cfg.window,
                          "n_source_samples": len(x)})
    if check_parseval:
        total = float(np.sum(pxx) * spec.resolution)
        var = float(np.var(x))
        if var > 0 and abs(total - var) > 0.01 * var:
            raise AssertionError(
                f"Parseval check failed: integrated PSD {total:.6g} vs variance {var:.6g}")
    return spec


def average_spectra(spectra: list[Spectrum]) -> Spectrum:
    """Pointwise mean of spectra sharing one frequency grid."""
    if not spectra:
        raise ValueError("no spectra to average")
    ref = spectra[0]
    for s in spectra[1:]:
        if len(s.freq) != len(ref.freq) or not np.allclose(s.freq, ref.freq):
            raise ValueError("spectra are on different frequency grids")
    mean = np.mean([s.psd for s in spectra], axis=0)
    return Spectrum(freq=ref.freq.copy(), psd=mean, resolution=ref.resolution,
                    n_segments=sum(s.n_segments for s in spectra),
                    meta={**ref.meta, "n_averaged": len(spectra)})


def _interp_crossing(freq, pxx, inner: int, outer: int, level: float) -> float:
    # linear interpolation of the half-power crossing between two bins
    p_in, p_out = pxx[inner], pxx[outer]
    if p_in == p_out:
        return float(freq[inner])
    frac = (p_in - level) / (p_in - p_out)
    return float(freq[inner] + frac * (freq[outer] - freq[inner]))


def peak_metrics(spec: Spectrum, band: tuple[float, float]) -> PeakMetrics:
    """Locate the dominant in-band peak and measure its height, width and beta.

    The band constrains the peak search and the background estimate (median
    of the in-band PSD, excluding three bins either side of the peak); the
    half-height width is walked on the full spectrum so that shoulders
    extending past the band edge are measured, not clipped.
    """
    freq, pxx = spec.freq, spec.psd
    lo_nu, hi_nu = band
    if not (freq[0] <= lo_nu < hi_nu <= freq[-1]):
        raise ValueError(f"band {band} outside spectrum range [{freq[0]}, {freq[-1]}]")
    if hi_nu - lo_nu <= 5 * spec.resolution:
        raise ValueError("search band must be wider than 5 bins")

    lo = int(np.searchsorted(freq, lo_nu, side="left"))
    hi = int(np.searchsorted(freq, hi_nu, side="right"))
    ipk = lo + int(np.argmax(pxx[lo:hi]))

    keep = np.ones(hi - lo, dtype=bool)
    keep[max(0, ipk - lo - 3):ipk - lo + 4] = False
    background = float(np.median(pxx[lo:hi][keep])) if keep.any() else float(np.min(pxx[lo:hi]))

    height = float(pxx[ipk] - background)
    if height <= 0.0:
        return PeakMetrics(nu_peak=float(freq[ipk]), h_omega=0.0,
                           delta_omega=float("nan"), beta=0.0,
                           background=background, below_background=True)

    half = background + 0.5 * height
    i0 = ipk
    while i0 > 0 and pxx[i0 - 1] >= half:
        i0 -= 1
    nu_lo = float(freq[0]) if i0 == 0 else _interp_crossing(freq, pxx, i0, i0 - 1, half)
    i1 = ipk
    while i1 < len(freq) - 1 and pxx[i1 + 1] >= half:
        i1 += 1
    nu_hi = float(freq[-1]) if i1 == len(freq) - 1 else _interp_crossing(freq, pxx, i1, i1 + 1, half)

    width = max(nu_hi - nu_lo, spec.resolution)
    nu_peak = float(freq[ipk])
    return PeakMetrics(nu_peak=nu_peak, h_omega=height, delta_omega=width,
                       beta=nu_peak * height / width, background=background)


def snr_db(spec: Spectrum, nu_signal: float) -> SnrResult:
    """Signal-to-background ratio (dB) at an expected line frequency.

    Peak power is the PSD maximum within two bins of the line; background is
    the median over a 21-bin window centered there, excluding the 5-bin core.
    """
    freq, pxx = spec.freq, spec.psd
    if not (freq[1] <= nu_signal <= freq[-1]):
        raise ValueError(
            f"nu_signal={nu_signal} outside measurable range [{freq[1]}, {freq[-1]}]")
    i = int(np.argmin(np.abs(freq - nu_signal)))
    if i - 10 < 0 or i + 10 >= len(freq):
        raise ValueError("signal frequency too close to the spectrum edge")

    peak = float(np.max(pxx[i - 2:i + 3]))
    window = np.r_[pxx[i - 10:i - 2], pxx[i + 3:i + 11]]
    background = float(np.median(window))
    if background <= 0.0:
        raise ValueError("background power is not positive")
    return SnrResult(nu_signal=float(nu_signal),
                     snr_db=10.0 * math.log10(peak / background),
                     peak_power=peak, background_power=background)
