"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they complete.  Criteria 5-7 integrate large trajectory ensembles
and take a few minutes each (marked ``slow``); they run by default.
"""

import csv
import json
import math
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy import stats as sstats

import mirrors
from omnoise.model import DynamicalState, NoiseParams, SignalParams, SystemParams
from omnoise.sde import IntegrationConfig, integrate
from omnoise.scenarios import default_config, resolve_initial_state, run_scenario
from omnoise.spectral import WelchConfig, peak_metrics, psd
from omnoise.stability import (RegionClass, char_coeffs, find_hopf, hurwitz,
                               jacobian, scan_plane, steady_states)

REF = dict(g=0.21, kappa=1.0, gamma_m=0.25, delta=-1.38)


def report(n, ok, detail):
    print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")


# ---------------------------------------------------------------------------
# 1. Stability-engine equivalence on random parameter draws
# ---------------------------------------------------------------------------

def test_criterion_1_stability_engine_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240817)
    n_draws = 10_000

    jacobians = []
    closed = []
    hurwitz_stable = []
    for _ in range(n_draws):
        g, kappa, gamma_m = rng.uniform(1e-6, 2.0, size=3)
        sys = SystemParams(g=g, kappa=kappa, gamma_m=gamma_m,
                           delta=rng.uniform(-3.0, 0.0), e_d=rng.uniform(0.0, 5.0))
        for ss in steady_states(sys):
            c = char_coeffs(sys, ss)
            closed.append(c)
            jacobians.append(jacobian(sys, ss))
            hurwitz_stable.append(all(dj > 0 for dj in hurwitz(c)))

    closed = np.asarray(closed)
    ev = np.linalg.eigvals(np.asarray(jacobians))

    # expand characteristic coefficients from the eigenvalues (Newton identities)
    p1 = ev.sum(axis=1)
    p2 = (ev ** 2).sum(axis=1)
    p3 = (ev ** 3).sum(axis=1)
    p4 = (ev ** 4).sum(axis=1)
    e1 = p1
    e2 = (e1 * p1 - p2) / 2.0
    e3 = (e2 * p1 - e1 * p2 + p3) / 3.0
    e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4.0
    expanded = np.column_stack([-e1, e2, -e3, e4])

    assert np.max(np.abs(expanded.imag)) < 1e-7
    rel_err = np.abs(expanded.real - closed) / (1.0 + np.abs(closed))
    coeff_ok = float(np.max(rel_err))
    assert coeff_ok < 1e-8, f"coefficient mismatch up to {coeff_ok:.2e}"

    max_re = ev.real.max(axis=1)
    outside_margin = np.abs(max_re) >= 1e-8
    eig_stable = max_re < 0.0
    agree = np.asarray(hurwitz_stable) == eig_stable
    n_checked = int(outside_margin.sum())
    assert np.all(agree[outside_margin]), "verdict disagreement outside margin band"

    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"runtime budget exceeded: {elapsed:.1f}s"
    report(1, True, f"{n_draws} draws / {len(closed)} fixed points, "
                    f"max coeff err {coeff_ok:.2e}, verdicts agree on "
                    f"{n_checked} points ({elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# 2. Hopf location on the reference detuning cut
# ---------------------------------------------------------------------------

def test_criterion_2_hopf_location():
    t0 = time.perf_counter()
    sys = SystemParams(**REF, e_d=3.0)
    e_star, check, ss = find_hopf(sys, parameter="e_d", lo=2.5, hi=3.5,
                                  branch="highest")
    ok = abs(e_star - 3.0) <= 0.1
    detail = (f"bisection on D3 gives e_d* = {e_star:.6f} "
              f"(|D3| = {abs(check.d3):.2e}, {time.perf_counter() - t0:.2f}s)")
    report(2, ok, detail)
    assert ok, detail
    assert check.satisfied


# ---------------------------------------------------------------------------
# 3. Phase-diagram topology on the reference plane
# ---------------------------------------------------------------------------

def test_criterion_3_phase_diagram_topology():
    t0 = time.perf_counter()
    base = SystemParams(**REF, e_d=1.0)
    scan = scan_plane(base, np.linspace(-3.0, 0.0, 200), np.linspace(0.0, 5.0, 200))

    found = set(np.unique(scan.codes).tolist())
    expected = {int(RegionClass.MONOSTABLE_FIXED), int(RegionClass.BISTABLE),
                int(RegionClass.PARAMETRIC_INSTABILITY), int(RegionClass.OVERLAP)}
    assert found == expected, f"region types found: {found}"

    overlap = scan.codes == int(RegionClass.OVERLAP)
    three_root = scan.n_roots == 3
    intersection = three_root & scan.top_hopf
    assert np.array_equal(overlap, intersection), (
        "overlap cells differ from (three roots) AND (Hopf-unstable top root)")

    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0, f"runtime budget exceeded: {elapsed:.1f}s"
    counts = {RegionClass(c).name: int((scan.codes == c).sum()) for c in found}
    report(3, True, f"exactly four region types {counts}, overlap == "
                    f"intersection ({elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# 4. Noise-free dynamics: quiescence below threshold, limit cycle above
# ---------------------------------------------------------------------------

def test_criterion_4_noise_free_dynamics():
    t0 = time.perf_counter()
    # (a) equilibrium hold at e_d = 2.85 over t in [0, 1e4]
    sys = SystemParams(**REF, e_d=2.85)
    low = steady_states(sys)[0]
    cfg = IntegrationConfig(dt=1e-3, t_total=10_000.0, t_transient=0.0,
                            sample_stride=100)
    traj = integrate(sys, SignalParams(), NoiseParams(),
                     DynamicalState(a=low.alpha_s, x=low.x_s, p=0.0), cfg)
    drift_from_eq = float(np.max(np.abs(traj.x - low.x_s)))
    assert drift_from_eq < 1e-6, f"|x - x_s| reached {drift_from_eq:.2e}"

    # (b) limit cycle at e_d = 3.11 from the upper branch
    sys_lc = replace(sys, e_d=3.11)
    init = resolve_initial_state(sys_lc, "highest")
    cfg_lc = IntegrationConfig(dt=1e-3, t_total=6553.6, t_transient=2000.0,
                               sample_stride=100)
    traj_lc = integrate(sys_lc, SignalParams(), NoiseParams(), init, cfg_lc)
    spec = psd(traj_lc, WelchConfig())
    fund = peak_metrics(spec, (0.05, 0.4))
    assert abs(fund.nu_peak - 0.15) <= 0.02, f"fundamental at {fund.nu_peak:.4f}"

    harm = peak_metrics(spec, (1.75 * fund.nu_peak, 2.25 * fund.nu_peak))
    harmonic_above_bg_db = 10.0 * math.log10(
        (harm.h_omega + harm.background) / harm.background)
    assert harmonic_above_bg_db >= 10.0, (
        f"harmonic only {harmonic_above_bg_db:.1f} dB above background")

    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"runtime budget exceeded: {elapsed:.1f}s"
    report(4, True, f"equilibrium drift {drift_from_eq:.1e}; fundamental at "
                    f"{fund.nu_peak:.4f}, harmonic +{harmonic_above_bg_db:.0f} dB "
                    f"({elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# 5. Coherence resonance over the default noise sweep
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_5_coherence_resonance(tmp_path):
    t0 = time.perf_counter()
    cfg = default_config("cr", output_dir=str(tmp_path))
    run_scenario(cfg)

    with open(tmp_path / "cr_curve.csv") as fh:
        rows = list(csv.DictReader(fh))
    d_m = np.array([float(r["d_m"]) for r in rows])
    beta = np.array([float(r["beta"]) for r in rows])
    width = np.array([float(r["delta_omega"]) for r in rows])

    i_max = int(np.argmax(beta))
    in_window = 0.03 <= d_m[i_max] <= 0.2
    dominates = beta[i_max] >= 2.0 * beta[0] and beta[i_max] >= 2.0 * beta[-1]
    rho = float(sstats.spearmanr(d_m, width).statistic)

    detail = (f"beta max {beta[i_max]:.1f} at d_m = {d_m[i_max]:.3f} "
              f"(endpoints {beta[0]:.2f} / {beta[-1]:.2f}), width Spearman "
              f"{rho:.3f} ({time.perf_counter() - t0:.0f}s)")
    ok = in_window and dominates and rho > 0.9
    report(5, ok, detail)
    assert in_window, detail
    assert dominates, detail
    assert rho > 0.9, detail


# ---------------------------------------------------------------------------
# 6. Noise-induced switching statistics and harmonic suppression
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_6_noise_induced_switching(tmp_path):
    t0 = time.perf_counter()
    cfg = default_config("switching", output_dir=str(tmp_path))
    assert cfg.noise.d_m == 0.55 and cfg.integration.t_total == 20_000.0
    result = run_scenario(cfg)

    noisy = result["noisy"]
    occupancy = min(noisy["fraction_high"], noisy["fraction_low"])
    assert noisy["n_transitions"] >= 10, f"only {noisy['n_transitions']} transitions"
    assert occupancy >= 0.10, f"minority state occupied only {occupancy:.3f}"

    nf = result["harmonics_noise_free"]
    nz = result["harmonics_noisy"]
    assert nf["harmonic_detected"], "noise-free run must show a distinct harmonic"
    noisy_ratio = nz["ratio_db"] if nz["ratio_db"] is not None else -math.inf
    suppressed = noisy_ratio <= nf["ratio_db"] - 10.0

    detail = (f"{noisy['n_transitions']} transitions, minority occupancy "
              f"{occupancy:.2f}; harmonic/fundamental {nf['ratio_db']:.1f} dB "
              f"noise-free vs {noisy_ratio:.1f} dB noisy "
              f"({time.perf_counter() - t0:.0f}s)")
    report(6, suppressed, detail)
    # The transition/occupancy clauses hold with wide margins.  The harmonic
    # clause demands the noisy second-harmonic content measure at least
    # 10 dB below the noise-free -28 dB line ratio, i.e. below -38 dB, while
    # the noisy spectrum's own broadband switching floor sits near -13 dB
    # relative to the fundamental; no spectral estimator can report harmonic
    # content 25 dB beneath the surrounding floor.  The assertion is kept
    # as stated and is expected to fail.
    assert suppressed, (
        "harmonic suppression clause unattainable at these parameters: "
        f"noisy ratio {noisy_ratio:.1f} dB > required "
        f"{nf['ratio_db'] - 10.0:.1f} dB (broadband switching floor at "
        f"{10.0 * math.log10(nz['h_fundamental'] / nf['h_fundamental']):.1f} dB "
        "masks any residual harmonic)")


# ---------------------------------------------------------------------------
# 7. Stochastic resonance of the subthreshold signal
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_7_stochastic_resonance(tmp_path):
    t0 = time.perf_counter()
    cfg = default_config("sr", output_dir=str(tmp_path))
    nu_s = cfg.signal.omega_f / (2.0 * math.pi)
    assert nu_s == pytest.approx(0.00796, abs=2e-5)
    run_scenario(cfg)

    with open(tmp_path / "sr_curve.csv") as fh:
        rows = list(csv.DictReader(fh))
    d_m = np.array([float(r["d_m"]) for r in rows])
    snr = np.array([float(r["snr_db"]) for r in rows])
    i_max = int(np.argmax(snr))

    interior = 0 < i_max < len(d_m) - 1
    margin_lo = snr[i_max] - snr[0]
    margin_hi = snr[i_max] - snr[-1]

    tags = json.loads((tmp_path / "sr_metrics.json").read_text())["tagged"]
    double_peak_ok = True
    tag_info = []
    for label, entry in tags.items():
        narrow, broad = entry["narrow_peak"], entry["broad_peak"]
        ok = (not narrow["below_background"]
              and abs(narrow["nu_peak"] - 0.008) <= 0.002
              and not broad["below_background"]
              and abs(broad["nu_peak"] - 0.15) <= 0.03)
        double_peak_ok &= ok
        tag_info.append(f"d_m={label}: narrow@{narrow['nu_peak']:.4f} "
                        f"broad@{broad['nu_peak']:.3f}")

    detail = (f"SNR max {snr[i_max]:.1f} dB at d_m = {d_m[i_max]:.3f}, margins "
              f"+{margin_lo:.1f}/+{margin_hi:.1f} dB over endpoints; "
              + "; ".join(tag_info) + f" ({time.perf_counter() - t0:.0f}s)")
    ok = interior and margin_lo >= 3.0 and margin_hi >= 3.0 and double_peak_ok
    report(7, ok, detail)
    assert interior, detail
    assert margin_lo >= 3.0 and margin_hi >= 3.0, detail
    assert double_peak_ok, detail


# ---------------------------------------------------------------------------
# 8. SDE correctness on the linear problem
# ---------------------------------------------------------------------------

def test_criterion_8_sde_correctness():
    t0 = time.perf_counter()
    # with the drive off the cavity stays dark and the mechanics is the
    # noise-driven damped oscillator with stationary variance d_m / gamma_m
    d_m, gamma_m = 0.5, 0.25
    sys = SystemParams(g=0.21, kappa=1.0, gamma_m=gamma_m, delta=-1.38, e_d=0.0)
    dark = DynamicalState(a=0j, x=0.0, p=0.0)
    cfg = IntegrationConfig(dt=1e-3, t_total=20_000.0, t_transient=200.0,
                            sample_stride=10)
    samples = [integrate(sys, SignalParams(), NoiseParams(d_m=d_m, seed=404),
                         dark, cfg, stream_id=sid).x for sid in range(4)]
    var = float(np.var(np.concatenate(samples)))
    var_err = abs(var - d_m / gamma_m) / (d_m / gamma_m)
    assert var_err < 0.05, f"stationary variance off by {var_err:.1%}"

    # noise-free path equals the same-scheme deterministic reference exactly
    cfg_ode = IntegrationConfig(dt=1e-3, t_total=50.0, t_transient=5.0,
                                sample_stride=10)
    init = DynamicalState(a=0.3 - 0.4j, x=1.0, p=0.0)
    sys_full = SystemParams(**REF, e_d=2.85)
    traj = integrate(sys_full, SignalParams(), NoiseParams(d_m=0.0, seed=1),
                     init, cfg_ode)
    n_steps = cfg_ode.n_transient_steps + (cfg_ode.n_samples - 1) * cfg_ode.sample_stride
    ref_x, _ = mirrors.euler_maruyama(
        np.zeros(n_steps), init.a.real, init.a.imag, init.x, init.p,
        cfg_ode.dt, sys_full.g, sys_full.kappa, sys_full.gamma_m,
        sys_full.delta, sys_full.e_d, 0.0, 0.05, 0.0,
        cfg_ode.n_transient_steps, cfg_ode.sample_stride,
        cfg_ode.divergence_guard, cfg_ode.n_samples)
    assert traj.x.tobytes() == ref_x.tobytes(), "noise-free path deviates from ODE"

    # fixed seed reproduces byte-identical trajectories
    noisy_cfg = IntegrationConfig(dt=1e-3, t_total=100.0, t_transient=10.0,
                                  sample_stride=10)
    a = integrate(sys_full, SignalParams(), NoiseParams(d_m=0.3, seed=777),
                  init, noisy_cfg)
    b = integrate(sys_full, SignalParams(), NoiseParams(d_m=0.3, seed=777),
                  init, noisy_cfg)
    assert a.x.tobytes() == b.x.tobytes()

    report(8, True, f"stationary variance within {var_err:.1%} of d_m/gamma_m; "
                    f"ODE reduction exact; byte-reproducible "
                    f"({time.perf_counter() - t0:.0f}s)")
