"""Two-state dwell statistics via a hysteretic amplitude-envelope discriminator.

The envelope is the rolling maximum of |x - x_eq| over two mechanical
periods, where x_eq is the quiescent fixed-point position.  A trajectory is
"high" while the envelope exceeds 70% of the noise-free limit-cycle
amplitude and "low" once it drops below 30%; the gap gives hysteresis
against threshold chatter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .model import OMEGA_M

MECH_PERIOD = 2.0 * math.pi / OMEGA_M


class DiscriminatorError(RuntimeError):
    """The envelope discriminator cannot be set up (degenerate thresholds)."""


@dataclass
class DwellStats:
    n_transitions: int
    fraction_high: float
    fraction_low: float
    mean_dwell_high: float   # NaN when the state was never left/entered
    mean_dwell_low: float
    threshold_low: float
    threshold_high: float
    reference_amplitude: float
    states_seen: int
    dwell_high: list = field(default_factory=list)
    dwell_low: list = field(default_factory=list)


def amplitude_envelope(x: np.ndarray, dt_sample: float, x_eq: float,
                       window_periods: float = 2.0) -> np.ndarray:
    """Rolling maximum of |x - x_eq| over a window of mechanical periods."""
    win = max(1, int(round(window_periods * MECH_PERIOD / dt_sample)))
    return ndimage.maximum_filter1d(np.abs(np.asarray(x, float) - x_eq), win,
                                    mode="nearest")


def reference_amplitude(x_noise_free: np.ndarray, dt_sample: float, x_eq: float,
                        window_periods: float = 2.0) -> float:
    """Noise-free limit-cycle amplitude as the median envelope value."""
    env = amplitude_envelope(x_noise_free, dt_sample, x_eq, window_periods)
    return float(np.median(env))


def dwell_statistics(x: np.ndarray, dt_sample: float, x_eq: float,
                     ref_amplitude: float, low_frac: float = 0.3,
                     high_frac: float = 0.7,
                     window_periods: float = 2.0) -> DwellStats:
    """Hysteretic two-threshold dwell analysis of a position trajectory."""
    if not (ref_amplitude > 0):
        raise DiscriminatorError(f"reference amplitude must be positive, got {ref_amplitude}")
    lo_thr = low_frac * ref_amplitude
    hi_thr = high_frac * ref_amplitude
    if not (0 < lo_thr < hi_thr):
        raise DiscriminatorError(f"thresholds not separated: {lo_thr} / {hi_thr}")

    env = amplitude_envelope(x, dt_sample, x_eq, window_periods)
    high = env[0] >= 0.5 * (lo_thr + hi_thr)
    state = np.empty(len(env), dtype=bool)
    for k, v in enumerate(env):
        if high and v <= lo_thr:
            high = False
        elif (not high) and v >= hi_thr:
            high = True
        state[k] = high

    changes = np.flatnonzero(np.diff(state.astype(np.int8)))
    n_transitions = len(changes)
    frac_high = float(np.mean(state))

    dwell_high, dwell_low = [], []
    bounds = np.r_[0, changes + 1, len(state)]
    for a, b in zip(bounds[:-1], bounds[1:]):
        (dwell_high if state[a] else dwell_low).append((b - a) * dt_sample)

    def _interior_mean(spans: list, n_segments: int) -> float:
        # drop the censored first/last segments when enough interior ones exist
        if n_segments >= 3 and len(spans) > 2:
            return float(np.mean(spans[1:-1]))
        return float(np.mean(spans)) if spans else float("nan")

    n_segments = len(bounds) - 1
    return DwellStats(
        n_transitions=n_transitions,
        fraction_high=frac_high,
        fraction_low=1.0 - frac_high,
        mean_dwell_high=_interior_mean(dwell_high, n_segments),
        mean_dwell_low=_interior_mean(dwell_low, n_segments),
        threshold_low=lo_thr,
        threshold_high=hi_thr,
        reference_amplitude=ref_amplitude,
        states_seen=int(len(dwell_high) > 0) + int(len(dwell_low) > 0),
        dwell_high=dwell_high,
        dwell_low=dwell_low)
