"""Driven optomechanical cavity: stability analysis and stochastic dynamics."""

from .model import (DynamicalState, NoiseParams, SignalParams, SystemParams,
                    diffusion, drift)
from .sde import IntegrationConfig, Scheme, Trajectory, ensemble, integrate, rng_stream
from .spectral import (PeakMetrics, SnrResult, Spectrum, WelchConfig,
                       average_spectra, peak_metrics, psd, snr_db)
from .stability import (HopfCheck, RegionClass, RegionScan, StabilityReport,
                        SteadyState, Verdict, char_coeffs, classify_fixed_point,
                        classify_region, find_hopf, hopf_condition, hurwitz,
                        jacobian, quartic_eigenvalues, scan_plane, steady_states)

__all__ = [
    "DynamicalState", "NoiseParams", "SignalParams", "SystemParams",
    "diffusion", "drift",
    "IntegrationConfig", "Scheme", "Trajectory", "ensemble", "integrate", "rng_stream",
    "PeakMetrics", "SnrResult", "Spectrum", "WelchConfig",
    "average_spectra", "peak_metrics", "psd", "snr_db",
    "HopfCheck", "RegionClass", "RegionScan", "StabilityReport", "SteadyState",
    "Verdict", "char_coeffs", "classify_fixed_point", "classify_region",
    "find_hopf", "hopf_condition", "hurwitz", "jacobian", "quartic_eigenvalues",
    "scan_plane", "steady_states",
]

__version__ = "0.1.0"
