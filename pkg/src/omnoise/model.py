"""Dimensionless mean-field model of a driven optomechanical cavity.

All rates are expressed in units of the mechanical frequency, which is fixed
to 1 and sets the unit of time.  The dynamical variables are the complex
optical amplitude ``a`` and the mechanical position/momentum pair ``(x, p)``.
Noise enters additively in the momentum only; the optical mode is treated as
noise-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

OMEGA_M = 1.0  # mechanical frequency; fixes the unit system


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless cavity/mechanics constants (units of the mechanical frequency)."""

    g: float        # optomechanical coupling
    kappa: float    # optical decay rate
    gamma_m: float  # mechanical decay rate
    delta: float    # detuning, cavity resonance minus drive frequency (signed)
    e_d: float      # drive amplitude, >= 0

    def __post_init__(self):
        if not (self.g > 0):
            raise ValueError(f"g must be positive, got {self.g}")
        if not (self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not (self.gamma_m >= 0):
            raise ValueError(f"gamma_m must be non-negative, got {self.gamma_m}")
        if not (self.e_d >= 0):
            raise ValueError(f"e_d must be non-negative, got {self.e_d}")


@dataclass(frozen=True)
class SignalParams:
    """Weak periodic force acting on the mechanics: ``-f_s cos(omega_f t)`` in dp/dt."""

    f_s: float = 0.0        # force amplitude; 0 switches the signal off
    omega_f: float = 0.05   # angular frequency of the force

    def __post_init__(self):
        if not (self.f_s >= 0):
            raise ValueError(f"f_s must be non-negative, got {self.f_s}")
        if not (self.omega_f > 0):
            raise ValueError(f"omega_f must be positive, got {self.omega_f}")


@dataclass(frozen=True)
class NoiseParams:
    """Mechanical white-noise strength and the master RNG seed."""

    d_m: float = 0.0  # noise strength; autocorrelation of the force is 2*d_m*delta(t-t')
    seed: int = 0

    def __post_init__(self):
        if not (self.d_m >= 0):
            raise ValueError(f"d_m must be non-negative, got {self.d_m}")
        if self.seed < 0 or int(self.seed) != self.seed:
            raise ValueError(f"seed must be an unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class DynamicalState:
    """Instantaneous mean-field state (also used for state derivatives)."""

    a: complex
    x: float
    p: float


def drift(state: DynamicalState, t: float, sys: SystemParams,
          sig: SignalParams = SignalParams()) -> DynamicalState:
    """Deterministic time derivative of the mean-field equations of motion.

    da/dt = -(-i*delta + kappa/2 - i*g*x) a - e_d
    dp/dt = -gamma_m*p - x + g*|a|^2 - f_s*cos(omega_f*t)
    dx/dt = p

    The conjugate-amplitude equation is redundant (it is the complex
    conjugate of da/dt for real drive amplitude) and is never integrated
    separately.
    """
    da = -(-1j * sys.delta + 0.5 * sys.kappa - 1j * sys.g * state.x) * state.a - sys.e_d
    dp = (-sys.gamma_m * state.p - OMEGA_M * state.x
          + sys.g * (state.a.real ** 2 + state.a.imag ** 2)
          - sig.f_s * math.cos(sig.omega_f * t))
    dx = OMEGA_M * state.p
    return DynamicalState(a=da, x=dx, p=dp)


def diffusion(noise: NoiseParams) -> tuple[float, float, float]:
    """Additive noise amplitudes per component, ordered (a, x, p).

    Only the momentum is driven: a Wiener increment dW contributes
    ``sqrt(2*d_m) dW`` to p.  Optical and positional noise are exactly zero.
    """
    return (0.0, 0.0, math.sqrt(2.0 * noise.d_m))
