"""Compiled time-stepping loops.

The optical amplitude is carried as a split real/imaginary pair; both
schemes draw their Gaussian increments in-stream from the passed Generator,
so a trajectory is a pure function of (initial state, parameters, generator
state).  Plain-Python mirrors of these loops live in the test suite and must
stay expression-for-expression identical.
"""

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def euler_maruyama(rng, ar, ai, x, p, dt, g, kappa, gamma_m, delta, e_d,
                   f_s, omega_f, noise_amp, n_transient, stride, guard,
                   out_x, out_p, out_ar, out_ai, record_full):
    half_kappa = 0.5 * kappa
    n_rec = out_x.shape[0]
    total = n_transient + (n_rec - 1) * stride
    rec = 0
    nxt = n_transient
    for k in range(total + 1):
        if k == nxt:
            out_x[rec] = x
            if record_full:
                out_p[rec] = p
                out_ar[rec] = ar
                out_ai[rec] = ai
            rec += 1
            if rec == n_rec:
                break
            nxt += stride
        t = k * dt
        shifted = delta + g * x
        dar = -half_kappa * ar - shifted * ai - e_d
        dai = shifted * ar - half_kappa * ai
        dp = -gamma_m * p - x + g * (ar * ar + ai * ai) - f_s * np.cos(omega_f * t)
        dx = p
        ar += dt * dar
        ai += dt * dai
        p += dt * dp + noise_amp * rng.standard_normal()
        x += dt * dx
        if not (np.abs(x) <= guard and np.abs(p) <= guard
                and ar * ar + ai * ai <= guard * guard):
            return rec, k + 1, ar, ai, x, p
    return rec, -1, ar, ai, x, p


@numba.njit(cache=True, nogil=True)
def heun_drift(rng, ar, ai, x, p, dt, g, kappa, gamma_m, delta, e_d,
               f_s, omega_f, noise_amp, n_transient, stride, guard,
               out_x, out_p, out_ar, out_ai, record_full):
    # Trapezoidal predictor-corrector on the drift; the additive noise term is
    # unchanged (Ito and Stratonovich coincide for additive noise).
    half_kappa = 0.5 * kappa
    n_rec = out_x.shape[0]
    total = n_transient + (n_rec - 1) * stride
    rec = 0
    nxt = n_transient
    for k in range(total + 1):
        if k == nxt:
            out_x[rec] = x
            if record_full:
                out_p[rec] = p
                out_ar[rec] = ar
                out_ai[rec] = ai
            rec += 1
            if rec == n_rec:
                break
            nxt += stride
        t = k * dt
        shifted = delta + g * x
        dar1 = -half_kappa * ar - shifted * ai - e_d
        dai1 = shifted * ar - half_kappa * ai
        dp1 = -gamma_m * p - x + g * (ar * ar + ai * ai) - f_s * np.cos(omega_f * t)
        dx1 = p
        ar_e = ar + dt * dar1
        ai_e = ai + dt * dai1
        p_e = p + dt * dp1
        x_e = x + dt * dx1
        t2 = (k + 1) * dt
        shifted2 = delta + g * x_e
        dar2 = -half_kappa * ar_e - shifted2 * ai_e - e_d
        dai2 = shifted2 * ar_e - half_kappa * ai_e
        dp2 = (-gamma_m * p_e - x_e + g * (ar_e * ar_e + ai_e * ai_e)
               - f_s * np.cos(omega_f * t2))
        dx2 = p_e
        ar += 0.5 * dt * (dar1 + dar2)
        ai += 0.5 * dt * (dai1 + dai2)
        p += 0.5 * dt * (dp1 + dp2) + noise_amp * rng.standard_normal()
        x += 0.5 * dt * (dx1 + dx2)
        if not (np.abs(x) <= guard and np.abs(p) <= guard
                and ar * ar + ai * ai <= guard * guard):
            return rec, k + 1, ar, ai, x, p
    return rec, -1, ar, ai, x, p
