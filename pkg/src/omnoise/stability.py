"""Fixed points, Routh-Hurwitz stability machinery, and parameter-plane maps.

The steady mechanical position solves a cubic, so the system has one to
three fixed points.  Each is classified through the quartic characteristic
polynomial of the linearization: closed-form coefficients, Hurwitz
determinants, and an independent eigenvalue cross-check via the companion
matrix of the quartic.  A Hopf crossing is located by bisecting the third
Hurwitz determinant along a steady-state branch.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum, IntEnum

import numpy as np

from .model import OMEGA_M, SystemParams

# Roots whose dominant eigenvalue sits closer to the imaginary axis than this
# cannot be classified reliably; they get the diagnostic region class.
SPECTRAL_MARGIN = 1e-8

_REAL_IMAG_TOL = 1e-8      # relative imaginary part below which a cubic root is real
_DEGENERACY_TOL = 1e-6     # relative spacing below which two roots count as a fold pair
_BRANCH_JUMP_TOL = 0.05    # relative jump that signals loss of the tracked branch


class StabilityInconsistencyError(RuntimeError):
    """Hurwitz and eigenvalue verdicts disagree outside the margin band."""


class BranchTrackingError(RuntimeError):
    """The tracked steady-state branch disappeared under a parameter step."""


class Verdict(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


class RegionClass(IntEnum):
    """Parameter-plane classes; INDETERMINATE marks diagnostic/boundary cells."""

    MONOSTABLE_FIXED = 0
    BISTABLE = 1
    PARAMETRIC_INSTABILITY = 2
    OVERLAP = 3
    INDETERMINATE = 4


@dataclass(frozen=True)
class SteadyState:
    x_s: float
    alpha_s: complex
    p_s: float = 0.0
    degenerate: bool = False  # member of a (numerically) coincident fold pair


@dataclass(frozen=True)
class StabilityReport:
    steady: SteadyState
    c: tuple[float, float, float, float]          # characteristic coefficients
    d: tuple[float, float, float, float]          # Hurwitz determinants
    eigenvalues: tuple[complex, ...]              # quartic roots, descending real part
    verdict: Verdict
    spectral_margin: float                        # max real part of the eigenvalues

    @property
    def stable(self) -> bool:
        return self.verdict is Verdict.STABLE


@dataclass(frozen=True)
class HopfCheck:
    d1: float
    d2: float
    d3: float
    c4: float
    dd3_dmu: float   # transversality derivative along the swept parameter
    satisfied: bool


def cubic_residual(sys: SystemParams, x_s: float) -> float:
    """Residual of the steady-state balance at mechanical position x_s."""
    shifted = sys.delta + sys.g * x_s
    return (OMEGA_M * (0.25 * sys.kappa ** 2 + shifted ** 2) * x_s
            - sys.g * sys.e_d ** 2)


def steady_optical_amplitude(sys: SystemParams, x_s: float) -> complex:
    return -sys.e_d / (-1j * sys.delta + 0.5 * sys.kappa - 1j * sys.g * x_s)


def steady_states(sys: SystemParams) -> list[SteadyState]:
    """All real fixed points, sorted by mechanical position.

    The monic cubic in x_s is solved through its companion matrix, followed
    by one round of Newton polishing per root (robust near folds, where the
    closed-form discriminant is ill-conditioned).  Numerically coincident
    fold pairs are returned as two entries flagged ``degenerate``.
    """
    g, kappa, delta, e_d = sys.g, sys.kappa, sys.delta, sys.e_d
    b2 = 2.0 * delta / g
    b1 = (delta * delta + 0.25 * kappa * kappa) / (g * g)
    b0 = -e_d * e_d / (OMEGA_M * g)
    companion = np.array([[0.0, 0.0, -b0],
                          [1.0, 0.0, -b1],
                          [0.0, 1.0, -b2]])
    roots = np.linalg.eigvals(companion)
    real = roots[np.abs(roots.imag) <= _REAL_IMAG_TOL * (1.0 + np.abs(roots.real))].real

    polished = []
    for u in map(float, real):
        for _ in range(2):
            shifted = delta + g * u
            f = (0.25 * kappa ** 2 + shifted ** 2) * u * OMEGA_M - g * e_d ** 2
            df = OMEGA_M * (0.25 * kappa ** 2 + shifted ** 2 + 2.0 * g * shifted * u)
            if df == 0.0:
                break
            u -= f / df
        polished.append(u)
    polished.sort()

    degenerate = [False] * len(polished)
    for i in range(len(polished) - 1):
        if abs(polished[i + 1] - polished[i]) <= _DEGENERACY_TOL * (1.0 + abs(polished[i])):
            degenerate[i] = degenerate[i + 1] = True

    return [SteadyState(x_s=u, alpha_s=steady_optical_amplitude(sys, u), degenerate=flag)
            for u, flag in zip(polished, degenerate)]


def jacobian(sys: SystemParams, ss: SteadyState) -> np.ndarray:
    """Linearization about the fixed point in the basis (da, da*, dp, dx)."""
    shifted = sys.delta + sys.g * ss.x_s
    al = ss.alpha_s
    g = sys.g
    return np.array([
        [1j * shifted - 0.5 * sys.kappa, 0.0, 0.0, 1j * g * al],
        [0.0, -1j * shifted - 0.5 * sys.kappa, 0.0, -1j * g * np.conj(al)],
        [g * np.conj(al), g * al, -sys.gamma_m, -OMEGA_M],
        [0.0, 0.0, OMEGA_M, 0.0],
    ], dtype=complex)


def char_coeffs(sys: SystemParams, ss: SteadyState) -> tuple[float, float, float, float]:
    """Closed-form coefficients of the quartic characteristic polynomial.

    Valid when ``ss`` satisfies the steady-state balance (the radiation
    pressure term has been eliminated through it).
    """
    shifted2 = (sys.g * ss.x_s + sys.delta) ** 2
    quarter_k2 = 0.25 * sys.kappa ** 2
    c1 = sys.gamma_m + sys.kappa
    c2 = shifted2 + quarter_k2 + sys.gamma_m * sys.kappa + OMEGA_M ** 2
    c3 = sys.gamma_m * shifted2 + sys.gamma_m * quarter_k2 + sys.kappa * OMEGA_M ** 2
    c4 = (shifted2 + 2.0 * sys.g * ss.x_s * (sys.delta + sys.g * ss.x_s)
          + quarter_k2) * OMEGA_M ** 2
    return (c1, c2, c3, c4)


def hurwitz(c: tuple[float, float, float, float]) -> tuple[float, float, float, float]:
    """Hurwitz determinants of a monic quartic, expanded in closed form."""
    c1, c2, c3, c4 = c
    d1 = c1
    d2 = c1 * c2 - c3
    d3 = c3 * d2 - c1 * c1 * c4
    d4 = c4 * d3
    return (d1, d2, d3, d4)


def quartic_eigenvalues(c: tuple[float, float, float, float]) -> np.ndarray:
    """Roots of the quartic via its companion matrix (independent of the Jacobian path)."""
    c1, c2, c3, c4 = c
    companion = np.array([[0.0, 0.0, 0.0, -c4],
                          [1.0, 0.0, 0.0, -c3],
                          [0.0, 1.0, 0.0, -c2],
                          [0.0, 0.0, 1.0, -c1]])
    return np.linalg.eigvals(companion)


def classify_fixed_point(sys: SystemParams, ss: SteadyState,
                         margin: float = SPECTRAL_MARGIN) -> StabilityReport:
    """Stability verdict with cross-validated eigenvalues.

    The verdict comes from positivity of all Hurwitz determinants; the
    companion-matrix eigenvalues provide the independent check.  Raises
    StabilityInconsistencyError if the two disagree while the dominant
    eigenvalue sits clearly off the imaginary axis.
    """
    c = char_coeffs(sys, ss)
    d = hurwitz(c)
    eig = quartic_eigenvalues(c)
    eig = tuple(eig[np.argsort(-eig.real)])
    max_re = float(max(ev.real for ev in eig))

    hurwitz_stable = all(dj > 0.0 for dj in d)
    eig_stable = max_re < 0.0
    if hurwitz_stable != eig_stable and abs(max_re) >= margin:
        raise StabilityInconsistencyError(
            f"Hurwitz verdict ({'stable' if hurwitz_stable else 'unstable'}) and "
            f"eigenvalue verdict ({'stable' if eig_stable else 'unstable'}) disagree "
            f"at x_s={ss.x_s:.6g} with max Re(lambda)={max_re:.3e}")

    return StabilityReport(
        steady=ss, c=c, d=d, eigenvalues=eig,
        verdict=Verdict.STABLE if hurwitz_stable else Verdict.UNSTABLE,
        spectral_margin=max_re)


def _tracked_root(sys: SystemParams, parameter: str, mu: float, x_ref: float) -> SteadyState:
    """Re-solve the cubic at a perturbed parameter and follow the nearest root."""
    perturbed = replace(sys, **{parameter: mu})
    candidates = steady_states(perturbed)
    best = min(candidates, key=lambda s: abs(s.x_s - x_ref))
    if abs(best.x_s - x_ref) > _BRANCH_JUMP_TOL * (1.0 + abs(x_ref)):
        raise BranchTrackingError(
            f"steady branch near x_s={x_ref:.6g} lost at {parameter}={mu:.9g} "
            f"(nearest root {best.x_s:.6g})")
    return best


def hopf_condition(sys: SystemParams, ss: SteadyState, parameter: str = "e_d",
                   rel_step: float = 1e-6, d3_tol: float = 1e-10) -> HopfCheck:
    """Evaluate the Hopf-bifurcation conditions at a fixed point.

    A simple Hopf requires the third Hurwitz determinant to vanish while
    D1, D2 and c4 stay positive and D3 crosses zero transversally.  The
    transversality derivative is taken with respect to the swept bifurcation
    parameter (``e_d`` or ``delta``) by central difference along the branch.
    """
    if parameter not in ("e_d", "delta"):
        raise ValueError(f"unsupported bifurcation parameter {parameter!r}")
    c = char_coeffs(sys, ss)
    d = hurwitz(c)
    mu0 = getattr(sys, parameter)
    h = rel_step * max(abs(mu0), 1.0)

    def d3_shifted(mu: float) -> float:
        shifted = replace(sys, **{parameter: mu})
        return hurwitz(char_coeffs(shifted, _tracked_root(sys, parameter, mu, ss.x_s)))[2]

    if parameter == "e_d" and mu0 - h < 0.0:
        # forward difference at the e_d >= 0 domain boundary
        dd3 = (d3_shifted(mu0 + h) - hurwitz(char_coeffs(sys, ss))[2]) / h
    else:
        dd3 = (d3_shifted(mu0 + h) - d3_shifted(mu0 - h)) / (2.0 * h)
    satisfied = (abs(d[2]) <= d3_tol and d[0] > 0.0 and d[1] > 0.0
                 and c[3] > 0.0 and dd3 != 0.0)
    return HopfCheck(d1=d[0], d2=d[1], d3=d[2], c4=c[3], dd3_dmu=dd3, satisfied=satisfied)


def _branch_index(branch: str) -> int:
    if branch == "highest":
        return -1
    if branch == "lowest":
        return 0
    raise ValueError(f"branch must be 'highest' or 'lowest', got {branch!r}")


def find_hopf(sys: SystemParams, parameter: str = "e_d",
              lo: float = 2.5, hi: float = 3.5, branch: str = "highest",
              d3_tol: float = 1e-10, max_iter: int = 200,
              ) -> tuple[float, HopfCheck, SteadyState]:
    """Locate a Hopf crossing by bisection on D3 along a steady branch.

    Returns the critical parameter value, the Hopf conditions evaluated
    there, and the bifurcating fixed point.  Raises ValueError when D3 does
    not change sign on [lo, hi].
    """
    idx = _branch_index(branch)

    def d3_at(mu: float) -> float:
        perturbed = replace(sys, **{parameter: mu})
        ss = steady_states(perturbed)[idx]
        return hurwitz(char_coeffs(perturbed, ss))[2]

    f_lo, f_hi = d3_at(lo), d3_at(hi)
    if f_lo == 0.0:
        lo_star = lo
    elif f_hi == 0.0:
        lo_star = hi
    else:
        if (f_lo > 0.0) == (f_hi > 0.0):
            # scan for an interior bracket before giving up
            grid = np.linspace(lo, hi, 129)
            vals = [d3_at(mu) for mu in grid]
            for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
                if (fa > 0.0) != (fb > 0.0):
                    lo, hi, f_lo, f_hi = a, b, fa, fb
                    break
            else:
                raise ValueError(
                    f"D3 does not change sign for {parameter} in [{lo}, {hi}] "
                    f"on the {branch} branch")
        mid = 0.5 * (lo + hi)
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            f_mid = d3_at(mid)
            if abs(f_mid) <= d3_tol:
                break
            if (f_mid > 0.0) == (f_lo > 0.0):
                lo, f_lo = mid, f_mid
            else:
                hi, f_hi = mid, f_mid
        else:
            raise RuntimeError(
                f"bisection on D3 did not reach |D3| <= {d3_tol:g}; "
                f"residual {f_mid:.3e} (possible branch discontinuity)")
        lo_star = mid

    critical = replace(sys, **{parameter: lo_star})
    ss = steady_states(critical)[idx]
    return lo_star, hopf_condition(critical, ss, parameter=parameter, d3_tol=d3_tol), ss


def _is_hopf_unstable(report: StabilityReport) -> bool:
    # Instability carried by the D3 violation with positive c4 (oscillatory pair),
    # as opposed to a saddle where c4 < 0.
    return (not report.stable and report.c[3] > 0.0
            and report.d[2] < 0.0 and report.d[0] > 0.0 and report.d[1] > 0.0)


def _classify_cell(sys: SystemParams, margin: float = SPECTRAL_MARGIN,
                   ) -> tuple[RegionClass, list[SteadyState], bool]:
    """Region class plus the root list and whether the top root is Hopf-unstable."""
    roots = steady_states(sys)
    if any(r.degenerate for r in roots):
        return RegionClass.INDETERMINATE, roots, False
    try:
        reports = [classify_fixed_point(sys, r, margin=margin) for r in roots]
    except StabilityInconsistencyError:
        return RegionClass.INDETERMINATE, roots, False
    if any(abs(rep.spectral_margin) < margin for rep in reports):
        return RegionClass.INDETERMINATE, roots, False

    top_hopf = _is_hopf_unstable(reports[-1])
    if len(reports) == 1:
        rep = reports[0]
        if rep.stable:
            return RegionClass.MONOSTABLE_FIXED, roots, top_hopf
        if top_hopf:
            return RegionClass.PARAMETRIC_INSTABILITY, roots, top_hopf
        return RegionClass.INDETERMINATE, roots, top_hopf
    if len(reports) == 3:
        low, mid, high = reports
        if low.stable and high.stable and not mid.stable:
            return RegionClass.BISTABLE, roots, top_hopf
        if low.stable and top_hopf:
            return RegionClass.OVERLAP, roots, top_hopf
        return RegionClass.INDETERMINATE, roots, top_hopf
    return RegionClass.INDETERMINATE, roots, top_hopf


def classify_region(sys: SystemParams, margin: float = SPECTRAL_MARGIN) -> RegionClass:
    """Classify the drive/detuning point into the phase-diagram region types.

    Boundary cells (spectral margin below ``margin``), fold-degenerate roots
    and any configuration outside the four recognized patterns are reported
    as INDETERMINATE rather than silently binned.
    """
    return _classify_cell(sys, margin=margin)[0]


@dataclass
class RegionScan:
    """Row-major classification of the (delta, e_d) plane with root metadata."""

    delta: np.ndarray     # scanned detunings, shape (n_delta,)
    e_d: np.ndarray       # scanned drive amplitudes, shape (n_ed,)
    codes: np.ndarray     # RegionClass values, shape (n_delta, n_ed)
    n_roots: np.ndarray   # fixed-point count per cell
    top_hopf: np.ndarray  # top root Hopf-unstable per cell
    x_low: np.ndarray     # lowest root (NaN where absent)
    x_mid: np.ndarray
    x_high: np.ndarray


def scan_plane(base: SystemParams, delta_values, e_d_values,
               n_workers: int | None = None) -> RegionScan:
    """Classify every node of a (delta, e_d) grid.

    Cells are independent; rows are distributed over a thread pool and each
    result lands in its own slot, so the output does not depend on the
    worker count.  Diagnostic classes propagate per cell; the scan never
    aborts as a whole.
    """
    deltas = np.asarray(delta_values, dtype=float)
    e_ds = np.asarray(e_d_values, dtype=float)
    if deltas.size == 0 or e_ds.size == 0:
        raise ValueError("scan grid must be non-empty")
    if not (np.all(np.isfinite(deltas)) and np.all(np.isfinite(e_ds))):
        raise ValueError("scan ranges must be finite")

    codes = np.empty((deltas.size, e_ds.size), dtype=np.int8)
    n_roots = np.zeros_like(codes)
    top_hopf = np.zeros(codes.shape, dtype=bool)
    x_low = np.full(codes.shape, np.nan)
    x_mid = np.full(codes.shape, np.nan)
    x_high = np.full(codes.shape, np.nan)

    def fill_row(i: int) -> None:
        delta = deltas[i]
        for j, e_d in enumerate(e_ds):
            sys_ij = replace(base, delta=float(delta), e_d=float(e_d))
            code, roots, hopf = _classify_cell(sys_ij)
            codes[i, j] = int(code)
            n_roots[i, j] = len(roots)
            top_hopf[i, j] = hopf
            if roots:
                x_low[i, j] = roots[0].x_s
                x_high[i, j] = roots[-1].x_s
            if len(roots) == 3:
                x_mid[i, j] = roots[1].x_s

    workers = n_workers or min(32, os.cpu_count() or 1)
    if workers > 1 and deltas.size > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_row, range(deltas.size)))
    else:
        for i in range(deltas.size):
            fill_row(i)

    return RegionScan(delta=deltas, e_d=e_ds, codes=codes, n_roots=n_roots,
                      top_hopf=top_hopf, x_low=x_low, x_mid=x_mid, x_high=x_high)


def scan_to_csv(scan: RegionScan, path) -> None:
    """Write a scan as CSV rows `delta,e_d,region_code,n_roots,x_s_low,x_s_mid,x_s_high`.

    Missing roots are left blank.  Rows iterate delta (outer) then e_d.
    """
    def fmt(v: float) -> str:
        return "" if np.isnan(v) else format(v, ".12g")

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["delta", "e_d", "region_code", "n_roots",
                         "x_s_low", "x_s_mid", "x_s_high"])
        for i, delta in enumerate(scan.delta):
            for j, e_d in enumerate(scan.e_d):
                n = int(scan.n_roots[i, j])
                writer.writerow([
                    format(delta, ".12g"), format(e_d, ".12g"),
                    int(scan.codes[i, j]), n,
                    fmt(scan.x_low[i, j]),
                    fmt(scan.x_mid[i, j]),
                    fmt(scan.x_high[i, j]) if n > 1 else "",
                ])
