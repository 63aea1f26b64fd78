"""Parameter sweeps, critical-field search and temperature-monotonicity verdicts.

Every grid point is an independent evaluation correlators -> two-site RDM ->
entanglement.  Sweeps accept ``workers`` and map over a process pool while
keeping grid order, so results do not depend on the worker count.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .correlators import CorrelatorSet, correlator_set
from .entanglement import EntanglementResult, negativity
from .errors import InsufficientData, NoTransitionFound, NumericalError
from .model import ModelParams, Temperature
from .quadrature import DEFAULT_ABS_TOL
from .rdm import POS_TOL, PhysicalityReport, TwoSiteRDM, two_site_rdm, validate_physicality

E_ZERO_THRESHOLD = 1e-9
BRACKET_WIDTH = 1e-4
PRESCAN_STEP = 0.005
NOISE_TOL = 1e-8
CRITICAL_REGION_HALF_WIDTH = 0.05

COLUMNS = ("param", "m_z", "t_xx", "t_yy", "t_zz", "t_xy",
           "negativity", "log_negativity", "min_pt_eig")


def default_beta_grid():
    """40 log-spaced inverse temperatures in [0.1, 100] followed by zero temperature."""
    return [Temperature(float(b)) for b in np.logspace(-1, 2, 40)] + [Temperature.zero()]


@dataclass(frozen=True)
class PointResult:
    params: ModelParams
    correlators: CorrelatorSet
    rdm: TwoSiteRDM
    entanglement: EntanglementResult
    physicality: PhysicalityReport


def evaluate_point(params: ModelParams, abs_tol=DEFAULT_ABS_TOL, pos_tol=POS_TOL,
                   sigma_thermal=True) -> PointResult:
    c = correlator_set(params, abs_tol, sigma_thermal=sigma_thermal)
    rho = two_site_rdm(c, pos_tol=pos_tol)
    return PointResult(params, c, rho, negativity(rho), validate_physicality(rho))


@dataclass
class ScanRow:
    param: float
    m_z: float = math.nan
    t_xx: float = math.nan
    t_yy: float = math.nan
    t_zz: float = math.nan
    t_xy: float = math.nan
    negativity: float = math.nan
    log_negativity: float = math.nan
    min_pt_eig: float = math.nan
    trace_error: float = math.nan
    min_rdm_eig: float = math.nan
    marginal_error: float = math.nan
    error: str | None = None

    @classmethod
    def from_point(cls, param, res: PointResult):
        c = res.correlators
        e = res.entanglement
        p = res.physicality
        return cls(param, c.m_z, c.t_xx, c.t_yy, c.t_zz, c.t_xy, e.negativity,
                   e.log_negativity, e.min_pt_eigenvalue, p.trace_error, p.min_eigenvalue,
                   p.marginal_error)

    def values(self):
        return [getattr(self, k) for k in COLUMNS]


@dataclass
class ScanTable:
    axis: str
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def failures(self):
        return [r for r in self.rows if r.error is not None]

    def __len__(self):
        return len(self.rows)


def _evaluate_row(job):
    param, params, abs_tol, sigma_thermal = job
    try:
        return ScanRow.from_point(param, evaluate_point(params, abs_tol, sigma_thermal=sigma_thermal))
    except NumericalError as exc:
        return ScanRow(param, error=f"{type(exc).__name__}: {exc}")


def parallel_map(fn, items, workers=1):
    """Ordered map; a process pool is used when ``workers > 1``."""
    items = list(items)
    if workers is None or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _scan(axis, params_list, param_values, metadata, abs_tol, workers, sigma_thermal):
    jobs = [(v, p, abs_tol, sigma_thermal) for v, p in zip(param_values, params_list)]
    rows = parallel_map(_evaluate_row, jobs, workers)
    return ScanTable(axis, rows, metadata)


def _base_meta(base: ModelParams, abs_tol, sigma_thermal, **extra):
    meta = {"gamma": base.gamma, "abs_tol": abs_tol, "pos_tol": POS_TOL}
    if not sigma_thermal:
        meta["sigma_thermal"] = False
    meta.update(extra)
    return meta


def field_scan(base: ModelParams, a_lo, a_hi, steps, abs_tol=DEFAULT_ABS_TOL, workers=1,
               sigma_thermal=True) -> ScanTable:
    """Uniform sweep of the initial field; ``base.field_a`` is ignored."""
    if not a_lo < a_hi:
        raise ValueError("need a_lo < a_hi")
    if steps < 2:
        raise ValueError("need at least two grid points")
    grid = np.linspace(a_lo, a_hi, int(steps))
    plist = [base.with_(field_a=float(a)) for a in grid]
    meta = _base_meta(base, abs_tol, sigma_thermal, t=base.time_t, beta=str(base.temperature),
                      a_lo=a_lo, a_hi=a_hi, steps=int(steps))
    return _scan("a", plist, [float(a) for a in grid], meta, abs_tol, workers, sigma_thermal)


def time_scan(base: ModelParams, t_lo, t_hi, steps, abs_tol=DEFAULT_ABS_TOL, workers=1,
              sigma_thermal=True) -> ScanTable:
    if not 0 <= t_lo < t_hi:
        raise ValueError("need 0 <= t_lo < t_hi")
    if steps < 2:
        raise ValueError("need at least two grid points")
    grid = np.linspace(t_lo, t_hi, int(steps))
    plist = [base.with_(time_t=float(t)) for t in grid]
    meta = _base_meta(base, abs_tol, sigma_thermal, a=base.field_a, beta=str(base.temperature),
                      t_lo=t_lo, t_hi=t_hi, steps=int(steps))
    return _scan("t", plist, [float(t) for t in grid], meta, abs_tol, workers, sigma_thermal)


def temp_scan(base: ModelParams, beta_grid: Sequence | None = None, abs_tol=DEFAULT_ABS_TOL,
              workers=1, sigma_thermal=True) -> ScanTable:
    """One row per inverse temperature; zero temperature is reported as beta = inf."""
    temps = [Temperature.parse(b) if not isinstance(b, Temperature) else b
             for b in (default_beta_grid() if beta_grid is None else beta_grid)]
    betas = [math.inf if T.is_zero else T.beta for T in temps]
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("beta grid must be strictly ascending")
    plist = [base.with_(temperature=T) for T in temps]
    meta = _base_meta(base, abs_tol, sigma_thermal, a=base.field_a, t=base.time_t,
                      n_beta=len(temps))
    return _scan("beta", plist, betas, meta, abs_tol, workers, sigma_thermal)


# ---------------------------------------------------------------------------
# critical fields


@dataclass(frozen=True)
class CriticalFields:
    a_c: float | None
    a_bar_c: float | None
    bracket_width: float

    def critical_region(self, which="a_c"):
        centre = getattr(self, which)
        if centre is None:
            return None
        return centre - CRITICAL_REGION_HALF_WIDTH, centre + CRITICAL_REGION_HALF_WIDTH


def _bisect(g, lo, hi, g_lo, width):
    """Shrink a sign-change bracket of g until hi - lo <= width; return midpoint."""
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_critical_fields(base: ModelParams, search_range=(0.3, 2.0),
                         e_zero_threshold=E_ZERO_THRESHOLD, bracket_width=BRACKET_WIDTH,
                         grid_step=PRESCAN_STEP, grid_offset=0.0, abs_tol=DEFAULT_ABS_TOL,
                         prescan: ScanTable | None = None, workers=1,
                         sigma_thermal=True) -> CriticalFields:
    """Locate where E_N first drops to the threshold (a_c) and where it next rises (a_bar_c).

    A pre-scan on a grid of spacing ``grid_step`` brackets the sign changes of
    E_N - threshold; each bracket is then bisected to ``bracket_width``.
    """
    lo, hi = search_range
    if prescan is None:
        n = int(math.floor((hi - lo - grid_offset) / grid_step + 1e-9)) + 1
        grid = lo + grid_offset + grid_step * np.arange(n)
        jobs = [(float(a), base.with_(field_a=float(a)), abs_tol, sigma_thermal) for a in grid]
        rows = parallel_map(_evaluate_row, jobs, workers)
    else:
        rows = [r for r in prescan.rows if lo <= r.param <= hi]
    if len(rows) < 2:
        raise InsufficientData("pre-scan has fewer than two points in the search range")
    bad = [r for r in rows if r.error is not None]
    if bad:
        raise NumericalError(f"pre-scan failed at a={bad[0].param}: {bad[0].error}")

    def g(a):
        res = evaluate_point(base.with_(field_a=a), abs_tol, sigma_thermal=sigma_thermal)
        return res.entanglement.log_negativity - e_zero_threshold

    a_grid = [r.param for r in rows]
    vals = [r.log_negativity - e_zero_threshold for r in rows]
    crossings = []
    for i in range(len(rows) - 1):
        if (vals[i] > 0) != (vals[i + 1] > 0):
            crossings.append((i, "down" if vals[i] > 0 else "up"))
    if not crossings:
        raise NoTransitionFound(
            f"E_N never crosses {e_zero_threshold:g} on [{a_grid[0]}, {a_grid[-1]}]"
        )
    a_c = a_bar_c = None
    for i, kind in crossings:
        root = _bisect(g, a_grid[i], a_grid[i + 1], vals[i], bracket_width)
        if kind == "down" and a_c is None and a_bar_c is None:
            a_c = root
        elif kind == "up" and a_bar_c is None:
            a_bar_c = root
            break
    return CriticalFields(a_c, a_bar_c, bracket_width)


# ---------------------------------------------------------------------------
# temperature monotonicity


class Monotonicity(enum.Enum):
    MONOTONE_INCREASING = "MonotoneIncreasing"
    MONOTONE_DECREASING = "MonotoneDecreasing"
    NONMONOTONE = "Nonmonotone"


@dataclass(frozen=True)
class MonotonicityVerdict:
    kind: Monotonicity
    low_T_limit: float
    description: str = ""

    def __str__(self):
        return self.kind.value


def classify_monotonicity(table: ScanTable, noise_tol=NOISE_TOL) -> MonotonicityVerdict:
    """Verdict on E_N as a function of beta (rows ascending in beta).

    Steps with |dE_N| <= noise_tol count as flat.  A table that never rises nor
    falls is reported as MonotoneIncreasing (nondecreasing).
    """
    if len(table) < 8:
        raise InsufficientData(f"need at least 8 rows, got {len(table)}")
    beta = table.column("param")
    e = table.column("log_negativity")
    if np.any(np.isnan(e)):
        raise InsufficientData("table contains failed rows")
    d = np.diff(e)
    trend = np.where(d > noise_tol, 1, np.where(d < -noise_tol, -1, 0))
    rises, falls = bool(np.any(trend > 0)), bool(np.any(trend < 0))
    changes = []
    last = 0
    for i, s in enumerate(trend):
        if s != 0 and s != last:
            kind = "rising" if s > 0 else "falling"
            changes.append(f"{kind} from beta={beta[i]:.6g}")
            last = s
    desc = "; ".join(changes) if changes else "flat"
    if rises and falls:
        kind = Monotonicity.NONMONOTONE
    elif falls:
        kind = Monotonicity.MONOTONE_DECREASING
    else:
        kind = Monotonicity.MONOTONE_INCREASING
    return MonotonicityVerdict(kind, float(e[-1]), desc)


# ---------------------------------------------------------------------------
# (a, t) surfaces


@dataclass
class PhaseDiagram:
    a_grid: np.ndarray
    t_grid: np.ndarray
    log_negativity: np.ndarray
    negativity: np.ndarray
    m_z: np.ndarray
    min_pt_eig: np.ndarray
    trace_error: np.ndarray
    min_rdm_eig: np.ndarray
    marginal_error: np.ndarray
    rows: list  # ScanRow per cell, row-major in (a, t)
    metadata: dict = field(default_factory=dict)

    @property
    def failures(self):
        return [r for r in self.rows if r.error is not None]


def _diagram_row(job):
    a, base, t_grid, abs_tol, sigma_thermal = job
    return [_evaluate_row((float(t), base.with_(field_a=a, time_t=float(t)), abs_tol, sigma_thermal))
            for t in t_grid]


def phase_diagram(base: ModelParams, a_grid, t_grid, abs_tol=DEFAULT_ABS_TOL, workers=1,
                  sigma_thermal=True) -> PhaseDiagram:
    """E_N and m_z on the (a, t) grid; array axis 0 is a, axis 1 is t."""
    a_grid = np.asarray(a_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    if a_grid.size == 0 or t_grid.size == 0:
        raise ValueError("grids must be nonempty")
    jobs = [(float(a), base, t_grid, abs_tol, sigma_thermal) for a in a_grid]
    rows2d = parallel_map(_diagram_row, jobs, workers)
    flat = [r for row in rows2d for r in row]
    shape = (a_grid.size, t_grid.size)

    def grab(name):
        return np.array([getattr(r, name) for r in flat], dtype=float).reshape(shape)

    meta = _base_meta(base, abs_tol, sigma_thermal, beta=str(base.temperature),
                      n_a=a_grid.size, n_t=t_grid.size)
    return PhaseDiagram(a_grid, t_grid, grab("log_negativity"), grab("negativity"), grab("m_z"),
                        grab("min_pt_eig"), grab("trace_error"), grab("min_rdm_eig"),
                        grab("marginal_error"), flat, meta)
