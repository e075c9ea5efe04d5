"""Scenario configs and end-to-end experiment runners.

Each scenario consumes one validated ScenarioConfig, writes deterministic
data artifacts (CSV/JSON) plus a timestamped run log into its output
directory, and returns a summary dict.  Re-running a scenario from its
emitted ``resolved_config.json`` reproduces the data files byte for byte.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import dataio, dwell
from .model import DynamicalState, NoiseParams, SignalParams, SystemParams
from .sde import IntegrationConfig, Scheme, ensemble, integrate
from .spectral import Spectrum, WelchConfig, average_spectra, peak_metrics, psd, snr_db
from .stability import find_hopf, scan_plane, scan_to_csv, steady_states, RegionClass

SCHEMA_VERSION = 1
SCENARIOS = ("phase_diagram", "cr", "switching", "sr", "single")

# Reference parameter set shared by the bundled scenario defaults.
REFERENCE_SYSTEM = dict(g=0.21, kappa=1.0, gamma_m=0.25, delta=-1.38, e_d=2.85)


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


class NumericFailure(RuntimeError):
    """A required run diverged or a sweep cell failed."""


def _take(mapping: dict, allowed: set[str], context: str) -> dict:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {context}: {sorted(unknown)}")
    return mapping


@dataclass(frozen=True)
class SweepSpec:
    """Sweep over one scalar: explicit values or a log/linear range."""

    variable: str                      # d_m | e_d | delta
    values: tuple[float, ...] | None = None
    grid: str | None = None            # "log" | "linear"
    start: float | None = None
    stop: float | None = None
    points_per_decade: int | None = None  # log grids
    count: int | None = None              # linear grids

    def __post_init__(self):
        if self.variable not in ("d_m", "e_d", "delta"):
            raise ConfigError(f"sweep variable must be d_m, e_d or delta, got {self.variable!r}")
        if (self.values is None) == (self.grid is None):
            raise ConfigError("sweep needs either explicit values or a grid spec")
        if self.grid is not None:
            if self.grid not in ("log", "linear"):
                raise ConfigError(f"sweep grid must be 'log' or 'linear', got {self.grid!r}")
            if self.start is None or self.stop is None:
                raise ConfigError("grid sweep needs start and stop")
            if self.grid == "log" and not self.points_per_decade:
                raise ConfigError("log sweep needs points_per_decade")
            if self.grid == "linear" and not self.count:
                raise ConfigError("linear sweep needs count")

    def resolve(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.grid == "log":
            if not (0 < self.start < self.stop):
                raise ConfigError("log sweep needs 0 < start < stop")
            n = int(round(self.points_per_decade * math.log10(self.stop / self.start))) + 1
            return np.geomspace(self.start, self.stop, max(n, 2))
        return np.linspace(self.start, self.stop, max(self.count, 2))

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        _take(d, {"variable", "values", "grid", "start", "stop",
                  "points_per_decade", "count"}, "sweep")
        vals = d.get("values")
        return cls(variable=d["variable"],
                   values=tuple(float(v) for v in vals) if vals is not None else None,
                   grid=d.get("grid"), start=d.get("start"), stop=d.get("stop"),
                   points_per_decade=d.get("points_per_decade"), count=d.get("count"))

    def to_dict(self) -> dict:
        out: dict = {"variable": self.variable}
        if self.values is not None:
            out["values"] = list(self.values)
        else:
            out["grid"] = self.grid
            out["start"] = self.start
            out["stop"] = self.stop
            if self.grid == "log":
                out["points_per_decade"] = self.points_per_decade
            else:
                out["count"] = self.count
        return out


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (delta, e_d) grid for the phase diagram."""

    delta_min: float
    delta_max: float
    delta_count: int
    e_d_min: float
    e_d_max: float
    e_d_count: int

    def __post_init__(self):
        if self.delta_count < 1 or self.e_d_count < 1:
            raise ConfigError("grid resolutions must be positive")
        for v in (self.delta_min, self.delta_max, self.e_d_min, self.e_d_max):
            if not math.isfinite(v):
                raise ConfigError("grid ranges must be finite")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(self.delta_min, self.delta_max, self.delta_count),
                np.linspace(self.e_d_min, self.e_d_max, self.e_d_count))

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        _take(d, {"delta_min", "delta_max", "delta_count",
                  "e_d_min", "e_d_max", "e_d_count"}, "grid")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class HopfCutSpec:
    """1-D cut at fixed detuning along which the Hopf crossing is bisected."""

    delta: float
    e_d_lo: float
    e_d_hi: float

    @classmethod
    def from_dict(cls, d: dict) -> "HopfCutSpec":
        _take(d, {"delta", "e_d_lo", "e_d_hi"}, "hopf_cut")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    system: SystemParams
    signal: SignalParams = SignalParams()
    noise: NoiseParams = NoiseParams()
    integration: IntegrationConfig = IntegrationConfig()
    n_runs: int = 1
    init_state: str = "lowest"             # lowest | highest
    sweep: SweepSpec | None = None
    grid: GridSpec | None = None
    hopf_cut: HopfCutSpec | None = None
    welch: WelchConfig = WelchConfig()
    peak_band: tuple[float, float] = (0.05, 0.4)    # oscillation peak search band
    signal_band: tuple[float, float] = (0.004, 0.02)  # narrow signal-line band
    tagged: tuple[float, ...] | None = None  # sweep values whose spectra/traces are dumped
    output_dir: str = "runs/out"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.n_runs < 1:
            raise ConfigError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.init_state not in ("lowest", "highest"):
            raise ConfigError(f"init_state must be 'lowest' or 'highest', got {self.init_state!r}")
        needs_sweep = self.scenario in ("cr", "sr")
        if needs_sweep and self.sweep is None:
            raise ConfigError(f"scenario {self.scenario!r} requires a sweep")
        if not needs_sweep and self.sweep is not None:
            raise ConfigError(f"scenario {self.scenario!r} does not take a sweep")
        if self.scenario == "phase_diagram" and self.grid is None:
            raise ConfigError("phase_diagram requires a grid")
        if self.scenario != "phase_diagram" and self.grid is not None:
            raise ConfigError("grid is only valid for phase_diagram")
        if self.scenario in ("cr", "sr"):
            if self.sweep.variable != "d_m":
                raise ConfigError(f"{self.scenario} sweeps d_m, got {self.sweep.variable!r}")
            if self.scenario == "cr" and np.any(self.sweep.resolve() <= 0):
                raise ConfigError("cr sweep values must be positive (d_m = 0 has no peak)")
        if self.scenario == "sr" and not (self.signal.f_s > 0):
            raise ConfigError("sr requires a non-zero signal amplitude f_s")
        if self.scenario in ("cr", "sr", "single", "switching"):
            if self.integration.n_samples < 2 * self.welch.segment_len:
                raise ConfigError(
                    f"t_total too short for welch segment_len={self.welch.segment_len}: "
                    f"{self.integration.n_samples} samples recorded, "
                    f"{2 * self.welch.segment_len} needed")

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        _take(d, {"schema_version", "scenario", "system", "signal", "noise",
                  "integration", "n_runs", "init_state", "sweep", "grid", "hopf_cut",
                  "welch", "peak_band", "signal_band", "tagged", "output_dir"},
              "config")
        version = d.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
        try:
            system = SystemParams(**_take(dict(d["system"]),
                                          {"g", "kappa", "gamma_m", "delta", "e_d"}, "system"))
            signal = SignalParams(**_take(dict(d.get("signal", {})),
                                          {"f_s", "omega_f"}, "signal"))
            noise = NoiseParams(**_take(dict(d.get("noise", {})), {"d_m", "seed"}, "noise"))
            integ_raw = _take(dict(d.get("integration", {})),
                              {"dt", "t_total", "t_transient", "sample_stride",
                               "scheme", "record_full", "divergence_guard"}, "integration")
            if "scheme" in integ_raw:
                integ_raw["scheme"] = Scheme(integ_raw["scheme"])
            integration = IntegrationConfig(**integ_raw)
            welch = WelchConfig(**_take(dict(d.get("welch", {})),
                                        {"segment_len", "overlap", "window"}, "welch"))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        return cls(
            scenario=d["scenario"], system=system, signal=signal, noise=noise,
            integration=integration, n_runs=int(d.get("n_runs", 1)),
            init_state=d.get("init_state", "lowest"),
            sweep=SweepSpec.from_dict(dict(d["sweep"])) if d.get("sweep") else None,
            grid=GridSpec.from_dict(dict(d["grid"])) if d.get("grid") else None,
            hopf_cut=HopfCutSpec.from_dict(dict(d["hopf_cut"])) if d.get("hopf_cut") else None,
            welch=welch,
            peak_band=tuple(d.get("peak_band", (0.05, 0.4))),
            signal_band=tuple(d.get("signal_band", (0.004, 0.02))),
            tagged=tuple(d["tagged"]) if d.get("tagged") else None,
            output_dir=d.get("output_dir", "runs/out"))

    def to_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "system": asdict(self.system),
            "signal": asdict(self.signal),
            "noise": asdict(self.noise),
            "integration": {**asdict(self.integration),
                            "scheme": self.integration.scheme.value},
            "n_runs": self.n_runs,
            "init_state": self.init_state,
            "welch": asdict(self.welch),
            "peak_band": list(self.peak_band),
            "signal_band": list(self.signal_band),
            "output_dir": self.output_dir,
        }
        if self.sweep is not None:
            out["sweep"] = self.sweep.to_dict()
        if self.grid is not None:
            out["grid"] = self.grid.to_dict()
        if self.hopf_cut is not None:
            out["hopf_cut"] = self.hopf_cut.to_dict()
        if self.tagged is not None:
            out["tagged"] = list(self.tagged)
        return out


def load_config(path) -> ScenarioConfig:
    import json
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be an object: {path}")
    return ScenarioConfig.from_dict(raw)


def default_config(scenario: str, output_dir: str | None = None) -> ScenarioConfig:
    """Bundled scenario defaults on the reference parameter set."""
    out = output_dir or f"runs/{scenario}"
    base = dict(system=SystemParams(**REFERENCE_SYSTEM),
                noise=NoiseParams(d_m=0.0, seed=20240817),
                output_dir=out)
    if scenario == "phase_diagram":
        return ScenarioConfig(
            scenario="phase_diagram",
            grid=GridSpec(delta_min=-3.0, delta_max=0.0, delta_count=200,
                          e_d_min=0.0, e_d_max=5.0, e_d_count=200),
            hopf_cut=HopfCutSpec(delta=-1.38, e_d_lo=2.5, e_d_hi=3.5),
            **base)
    if scenario == "cr":
        return ScenarioConfig(
            scenario="cr", n_runs=16, init_state="highest",
            sweep=SweepSpec(variable="d_m", grid="log", start=1e-3, stop=2.0,
                            points_per_decade=20),
            # longer traces than the global default: half-height widths of the
            # broad high-noise peaks need well-averaged spectra
            integration=IntegrationConfig(t_total=13107.2),
            **base)
    if scenario == "switching":
        base["noise"] = NoiseParams(d_m=0.55, seed=20240817)
        return ScenarioConfig(
            scenario="switching", init_state="highest",
            system=SystemParams(**{**REFERENCE_SYSTEM, "e_d": 3.11}),
            integration=IntegrationConfig(t_total=20000.0),
            noise=base["noise"], output_dir=out)
    if scenario == "sr":
        return ScenarioConfig(
            scenario="sr", n_runs=16, init_state="highest",
            system=SystemParams(**{**REFERENCE_SYSTEM, "e_d": 3.11}),
            signal=SignalParams(f_s=1.5, omega_f=0.05),
            sweep=SweepSpec(variable="d_m", grid="log", start=0.05, stop=10.0,
                            points_per_decade=20),
            noise=base["noise"], output_dir=out)
    if scenario == "single":
        base["noise"] = NoiseParams(d_m=0.08, seed=20240817)
        return ScenarioConfig(scenario="single", init_state="highest", **base)
    raise ConfigError(f"unknown scenario {scenario!r}")


class _RunLog:
    """Append-only plain-text log; the one artifact allowed to carry timestamps."""

    def __init__(self, path, echo: bool = False):
        self.path = Path(path)
        self.echo = echo
        self.t0 = time.perf_counter()
        self.path.write_text("")

    def __call__(self, msg: str) -> None:
        line = f"[{time.perf_counter() - self.t0:9.2f}s] {msg}"
        with self.path.open("a") as fh:
            fh.write(line + "\n")
        if self.echo:
            print(line, flush=True)


def resolve_initial_state(sys: SystemParams, which: str) -> DynamicalState:
    """Initial condition on a steady branch.

    'lowest' starts exactly at the low fixed point; 'highest' starts at the
    top root with a relative 1e-6 position offset so that an unstable focus
    can actually leave it (an exact fixed point is absorbing in floating
    point).  The offset decays immediately when the top root is stable.
    """
    roots = steady_states(sys)
    if which == "lowest":
        ss = roots[0]
        return DynamicalState(a=ss.alpha_s, x=ss.x_s, p=0.0)
    ss = roots[-1]
    return DynamicalState(a=ss.alpha_s, x=ss.x_s + 1e-6 * (1.0 + abs(ss.x_s)), p=0.0)


def _tag_label(value: float) -> str:
    return format(value, "g").replace(".", "p").replace("-", "m")


def _write_common(cfg: ScenarioConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    dataio.write_json(cfg.to_dict(), out / "resolved_config.json")


def run_single(cfg: ScenarioConfig, echo: bool = False) -> dict:
    out = Path(cfg.output_dir)
    _write_common(cfg, out)
    log = _RunLog(out / "run.log", echo)
    log(f"single run: d_m={cfg.noise.d_m}, e_d={cfg.system.e_d}, init={cfg.init_state}")

    init = resolve_initial_state(cfg.system, cfg.init_state)
    traj = integrate(cfg.system, cfg.signal, cfg.noise, init, cfg.integration, stream_id=0)
    dataio.trajectory_to_csv(traj, out / "trajectory.csv")
    dataio.trajectory_to_binary(traj, out / "trajectory.bin")
    if traj.diverged:
        log("run diverged; artifacts truncated")
        raise NumericFailure(f"trajectory diverged at step {traj.meta['diverged_step']}")

    spec = psd(traj, cfg.welch)
    dataio.spectrum_to_csv(spec, out / "spectrum.csv")
    pk = peak_metrics(spec, cfg.peak_band)
    metrics = {
        "meta_hash": dataio.meta_hash(traj.meta),
        "peak": asdict(pk),
        "peak_band": list(cfg.peak_band),
    }
    if cfg.signal.f_s > 0:
        nu_s = cfg.signal.omega_f / (2.0 * math.pi)
        metrics["snr"] = asdict(snr_db(spec, nu_s))
    dataio.write_json(metrics, out / "metrics.json")
    log(f"done: peak at nu={pk.nu_peak:.5g}, beta={pk.beta:.5g}")
    return metrics


def run_phase_diagram(cfg: ScenarioConfig, echo: bool = False) -> dict:
    out = Path(cfg.output_dir)
    _write_common(cfg, out)
    log = _RunLog(out / "run.log", echo)
    deltas, e_ds = cfg.grid.axes()
    log(f"scanning {len(deltas)}x{len(e_ds)} grid")

    scan = scan_plane(cfg.system, deltas, e_ds)
    scan_to_csv(scan, out / "regions.csv")

    counts = {RegionClass(code).name.lower(): int(n)
              for code, n in zip(*np.unique(scan.codes, return_counts=True))}
    summary: dict = {"grid": cfg.grid.to_dict(), "region_counts": counts}

    if cfg.hopf_cut is not None:
        cut = cfg.hopf_cut
        sys_cut = replace(cfg.system, delta=cut.delta)
        e_star, check, ss = find_hopf(sys_cut, parameter="e_d",
                                      lo=cut.e_d_lo, hi=cut.e_d_hi, branch="highest")
        summary["hopf_cut"] = {
            "delta": cut.delta, "e_d_lo": cut.e_d_lo, "e_d_hi": cut.e_d_hi,
            "e_d_star": e_star, "x_s": ss.x_s, **asdict(check)}
        log(f"Hopf crossing at e_d={e_star:.6f} (delta={cut.delta})")

    dataio.write_json(summary, out / "summary.json")
    log(f"region counts: {counts}")
    return summary


def _sweep_ensemble(cfg: ScenarioConfig, d_m: float) -> tuple[list[Spectrum], int]:
    noise = replace(cfg.noise, d_m=float(d_m))
    init = resolve_initial_state(cfg.system, cfg.init_state)
    trajs = ensemble(cfg.system, cfg.signal, noise, init, cfg.integration, cfg.n_runs)
    ok = [t for t in trajs if not t.diverged]
    specs = [psd(t, cfg.welch) for t in ok]
    return specs, len(trajs) - len(ok)


def _dump_tagged(cfg: ScenarioConfig, out: Path, d_m: float) -> tuple[Spectrum, str]:
    noise = replace(cfg.noise, d_m=float(d_m))
    init = resolve_initial_state(cfg.system, cfg.init_state)
    traj = integrate(cfg.system, cfg.signal, noise, init, cfg.integration, stream_id=0)
    label = _tag_label(d_m)
    dataio.trajectory_to_csv(traj, out / f"trajectory_dm{label}.csv")
    spec = psd(traj, cfg.welch)
    dataio.spectrum_to_csv(spec, out / f"spectrum_dm{label}.csv")
    return spec, dataio.meta_hash(traj.meta)


def run_cr(cfg: ScenarioConfig, echo: bool = False) -> dict:
    """Noise sweep of the oscillation peak: height, width and coherence factor.

    Per sweep value the peak metrics are evaluated both per run (mean and
    stdev columns) and on the ensemble-averaged spectrum (the quoted curve;
    single-run Welch noise biases the half-height width of broad peaks).
    """
    out = Path(cfg.output_dir)
    _write_common(cfg, out)
    log = _RunLog(out / "run.log", echo)
    values = cfg.sweep.resolve()
    log(f"coherence sweep over {len(values)} noise strengths, n_runs={cfg.n_runs}")

    rows = []
    curve = []
    failed = []
    nan = float("nan")
    for d_m in values:
        specs, n_div = _sweep_ensemble(cfg, d_m)
        if not specs:
            failed.append(float(d_m))
            rows.append([float(d_m)] + [nan] * 10 + [n_div])
            log(f"d_m={d_m:g}: all {cfg.n_runs} runs diverged")
            continue
        per_run = [peak_metrics(s, cfg.peak_band) for s in specs]
        avg = peak_metrics(average_spectra(specs), cfg.peak_band)
        h = [m.h_omega for m in per_run]
        w = [m.delta_omega for m in per_run]
        b = [m.beta for m in per_run]
        rows.append([float(d_m), avg.nu_peak, avg.h_omega, avg.delta_omega, avg.beta,
                     float(np.mean(h)), float(np.std(h)),
                     float(np.nanmean(w)), float(np.nanstd(w)),
                     float(np.mean(b)), float(np.std(b)), n_div])
        curve.append((float(d_m), avg))
        log(f"d_m={d_m:g}: beta={avg.beta:.4g} width={avg.delta_omega:.5g}")

    dataio.rows_to_csv(out / "cr_curve.csv",
                       ["d_m", "nu_peak", "h_omega", "delta_omega", "beta",
                        "h_mean", "h_std", "w_mean", "w_std",
                        "beta_mean", "beta_std", "n_diverged"], rows)

    betas = [m.beta for _, m in curve]
    i_max = int(np.argmax(betas)) if betas else -1
    tags = list(cfg.tagged) if cfg.tagged else (
        [curve[0][0], curve[i_max][0], curve[-1][0]] if curve else [])
    tag_metrics = {}
    for d_m in dict.fromkeys(tags):  # preserve order, drop duplicates
        spec, src_hash = _dump_tagged(cfg, out, d_m)
        tag_metrics[format(d_m, "g")] = {**asdict(peak_metrics(spec, cfg.peak_band)),
                                         "meta_hash": src_hash}

    summary = {
        "beta_max": betas[i_max] if betas else None,
        "d_m_at_beta_max": curve[i_max][0] if curve else None,
        "tagged": tag_metrics,
        "failed_values": failed,
    }
    dataio.write_json(summary, out / "cr_metrics.json")
    if failed:
        raise NumericFailure(f"diverged sweep cells: {failed}")
    log(f"beta max {summary['beta_max']:.4g} at d_m={summary['d_m_at_beta_max']:g}")
    return summary


def _harmonic_ratio(spec: Spectrum, band: tuple[float, float]) -> dict:
    """Fundamental vs second-harmonic peak heights above local background."""
    fund = peak_metrics(spec, band)
    harm_band = (1.75 * fund.nu_peak, 2.25 * fund.nu_peak)
    harm = peak_metrics(spec, harm_band)
    detected = not harm.below_background and harm.h_omega > 0
    ratio = 10.0 * math.log10(harm.h_omega / fund.h_omega) if detected else None
    return {"nu_fundamental": fund.nu_peak, "h_fundamental": fund.h_omega,
            "nu_harmonic": harm.nu_peak, "h_harmonic": harm.h_omega,
            "harmonic_detected": detected, "ratio_db": ratio,
            "harmonic_band": list(harm_band)}


def run_switching(cfg: ScenarioConfig, echo: bool = False) -> dict:
    """Noise-free vs noisy runs in the overlap regime with dwell statistics."""
    out = Path(cfg.output_dir)
    _write_common(cfg, out)
    log = _RunLog(out / "run.log", echo)
    init = resolve_initial_state(cfg.system, cfg.init_state)
    x_eq = steady_states(cfg.system)[0].x_s  # quiescent reference position

    noise_free = replace(cfg.noise, d_m=0.0)
    ref = integrate(cfg.system, cfg.signal, noise_free, init, cfg.integration, stream_id=0)
    noisy = integrate(cfg.system, cfg.signal, cfg.noise, init, cfg.integration, stream_id=0)
    for name, traj in (("noisefree", ref), ("noisy", noisy)):
        if traj.diverged:
            raise NumericFailure(f"{name} trajectory diverged")
        dataio.trajectory_to_csv(traj, out / f"trajectory_{name}.csv")

    spec_ref = psd(ref, cfg.welch)
    spec_noisy = psd(noisy, cfg.welch)
    dataio.spectrum_to_csv(spec_ref, out / "spectrum_noisefree.csv")
    dataio.spectrum_to_csv(spec_noisy, out / "spectrum_noisy.csv")

    a_ref = dwell.reference_amplitude(ref.x, ref.dt_sample, x_eq)
    stats_ref = dwell.dwell_statistics(ref.x, ref.dt_sample, x_eq, a_ref)
    stats_noisy = dwell.dwell_statistics(noisy.x, noisy.dt_sample, x_eq, a_ref)
    log(f"noisy run: {stats_noisy.n_transitions} transitions, "
        f"high fraction {stats_noisy.fraction_high:.3f}")

    result = {
        "reference_amplitude": a_ref,
        "x_equilibrium": x_eq,
        "noise_free": {**asdict(stats_ref)},
        "noisy": {**asdict(stats_noisy)},
        "harmonics_noise_free": _harmonic_ratio(spec_ref, cfg.peak_band),
        "harmonics_noisy": _harmonic_ratio(spec_noisy, cfg.peak_band),
        "meta_hash_noisy": dataio.meta_hash(noisy.meta),
        "thresholds_separating": stats_noisy.states_seen == 2,
    }
    # dwell-time lists are bulky; keep summary statistics in the JSON
    for key in ("noise_free", "noisy"):
        result[key].pop("dwell_high")
        result[key].pop("dwell_low")
    dataio.write_json(result, out / "dwell.json")
    if not result["thresholds_separating"]:
        log("discriminator did not separate two states")
    return result


def run_sr(cfg: ScenarioConfig, echo: bool = False) -> dict:
    """Noise sweep of the signal-to-background ratio at the drive line."""
    out = Path(cfg.output_dir)
    _write_common(cfg, out)
    log = _RunLog(out / "run.log", echo)
    values = cfg.sweep.resolve()
    nu_s = cfg.signal.omega_f / (2.0 * math.pi)
    log(f"SR sweep over {len(values)} noise strengths at nu_s={nu_s:.6f}")

    # noise-free reference: the signal alone must only modulate the upper-state
    # oscillation, without driving transitions to the quiescent branch
    init = resolve_initial_state(cfg.system, cfg.init_state)
    noise_off = replace(cfg.noise, d_m=0.0)
    lc = integrate(cfg.system, SignalParams(f_s=0.0, omega_f=cfg.signal.omega_f),
                   noise_off, init, cfg.integration, stream_id=0)
    ref = integrate(cfg.system, cfg.signal, noise_off, init, cfg.integration,
                    stream_id=0)
    dataio.trajectory_to_csv(ref, out / "trajectory_noisefree.csv")
    x_eq = steady_states(cfg.system)[0].x_s
    a_ref = dwell.reference_amplitude(lc.x, lc.dt_sample, x_eq)
    ref_stats = dwell.dwell_statistics(ref.x, ref.dt_sample, x_eq, a_ref)
    reference = {
        "x_min": float(np.min(ref.x)), "x_max": float(np.max(ref.x)),
        "n_transitions": ref_stats.n_transitions,
        "fraction_high": ref_stats.fraction_high,
        "subthreshold": ref_stats.n_transitions == 0,
    }
    log(f"noise-free reference: x in [{reference['x_min']:.2f}, "
        f"{reference['x_max']:.2f}], transitions={ref_stats.n_transitions}")

    rows = []
    curve = []
    failed = []
    nan = float("nan")
    for d_m in values:
        specs, n_div = _sweep_ensemble(cfg, d_m)
        if not specs:
            failed.append(float(d_m))
            rows.append([float(d_m)] + [nan] * 5 + [n_div])
            log(f"d_m={d_m:g}: all {cfg.n_runs} runs diverged")
            continue
        per_run = [snr_db(s, nu_s).snr_db for s in specs]
        avg = snr_db(average_spectra(specs), nu_s)
        rows.append([float(d_m), avg.snr_db, avg.peak_power, avg.background_power,
                     float(np.mean(per_run)), float(np.std(per_run)), n_div])
        curve.append((float(d_m), avg.snr_db))
        log(f"d_m={d_m:g}: SNR={avg.snr_db:.2f} dB")

    dataio.rows_to_csv(out / "sr_curve.csv",
                       ["d_m", "snr_db", "peak_power", "background_power",
                        "snr_mean", "snr_std", "n_diverged"], rows)

    snrs = [s for _, s in curve]
    i_max = int(np.argmax(snrs)) if snrs else -1
    tags = list(cfg.tagged) if cfg.tagged else (
        [curve[0][0], curve[i_max][0], curve[-1][0]] if curve else [])
    tag_metrics = {}
    for d_m in dict.fromkeys(tags):
        spec, src_hash = _dump_tagged(cfg, out, d_m)
        tag_metrics[format(d_m, "g")] = {
            "snr": asdict(snr_db(spec, nu_s)),
            "narrow_peak": asdict(peak_metrics(spec, cfg.signal_band)),
            "broad_peak": asdict(peak_metrics(spec, cfg.peak_band)),
            "meta_hash": src_hash,
        }

    summary = {
        "nu_signal": nu_s,
        "snr_max_db": snrs[i_max] if snrs else None,
        "d_m_at_snr_max": curve[i_max][0] if curve else None,
        "noise_free_reference": reference,
        "tagged": tag_metrics,
        "failed_values": failed,
    }
    dataio.write_json(summary, out / "sr_metrics.json")
    if failed:
        raise NumericFailure(f"diverged sweep cells: {failed}")
    log(f"SNR max {summary['snr_max_db']:.2f} dB at d_m={summary['d_m_at_snr_max']:g}")
    return summary


_RUNNERS = {
    "single": run_single,
    "phase_diagram": run_phase_diagram,
    "cr": run_cr,
    "switching": run_switching,
    "sr": run_sr,
}


def run_scenario(cfg: ScenarioConfig, echo: bool = False) -> dict:
    return _RUNNERS[cfg.scenario](cfg, echo=echo)
