"""Three-way cross-validation: exact diagonalization, free fermions, infinite-chain integrals."""
from __future__ import annotations

from dataclasses import dataclass, field, fields

from ..correlators import CorrelatorSet
from ..errors import ConfigError, TooLarge, ValidationFailure
from ..model import ModelParams, Temperature
from ..phase_scan import evaluate_point
from ..rdm import build_two_site_matrix
from ..entanglement import negativity
from .exact_diag import MAX_SITES, exact_diag_reference
from .freefermion import free_fermion_correlators

ED_TOL = 1e-10
FF_TOL = 1e-3
FF_REFERENCE_SIZE = 2048

# gamma = 0.5; each field value appears at both temperatures, every time appears
PANEL = [
    ModelParams(0.5, 0.5, Temperature.zero(), 1.0),
    ModelParams(0.5, 0.5, Temperature(1.0), 0.0),
    ModelParams(0.5, 0.5, Temperature.zero(), 10.0),
    ModelParams(0.5, 0.78, Temperature.zero(), 1.0),
    ModelParams(0.5, 0.78, Temperature.zero(), 0.0),
    ModelParams(0.5, 0.78, Temperature(1.0), 10.0),
    ModelParams(0.5, 1.0, Temperature.zero(), 1.0),
    ModelParams(0.5, 1.0, Temperature(1.0), 1.0),
    ModelParams(0.5, 1.0, Temperature.zero(), 10.0),
]

OBSERVABLES = [f.name for f in fields(CorrelatorSet)]


@dataclass(frozen=True)
class Comparison:
    routes: str
    observable: str
    left: float
    right: float
    tol: float

    @property
    def diff(self):
        return abs(self.left - self.right)

    @property
    def passed(self):
        return self.diff <= self.tol


@dataclass
class ValidationReport:
    params: ModelParams
    n_ed: int
    n_ff: int
    comparisons: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.comparisons)

    @property
    def failures(self):
        return [c for c in self.comparisons if not c.passed]

    def lines(self):
        p = self.params
        head = f"gamma={p.gamma} a={p.field_a} beta={p.temperature} t={p.time_t}"
        for c in self.comparisons:
            yield (f"{'PASS' if c.passed else 'FAIL'} {head} {c.routes} {c.observable} "
                   f"diff={c.diff:.3e} tol={c.tol:.1e}")


def finite_size_tolerance(n_ff, base_tol=FF_TOL):
    """Free-fermion vs infinite-chain tolerance, relaxed linearly below N = 2048."""
    return base_tol * max(1.0, FF_REFERENCE_SIZE / n_ff)


def _log_neg(c: CorrelatorSet):
    return negativity(build_two_site_matrix(c)).log_negativity


def cross_validate(params: ModelParams, n_ff=FF_REFERENCE_SIZE, n_ed=8, ed_tol=ED_TOL,
                   ff_tol=None, raise_on_failure=True) -> ValidationReport:
    if n_ed > MAX_SITES:
        raise TooLarge(f"exact diagonalization limited to N <= {MAX_SITES}, got {n_ed}")
    if n_ed < 4 or n_ed % 2:
        raise ConfigError(f"n_ed must be even and >= 4, got {n_ed}")
    if n_ff < MAX_SITES or n_ff % 2:
        raise ConfigError(f"n_ff must be even and >= {MAX_SITES}, got {n_ff}")
    if ff_tol is None:
        ff_tol = finite_size_tolerance(n_ff)
    g, a, T, t = params.gamma, params.field_a, params.temperature, params.time_t
    report = ValidationReport(params, n_ed, n_ff)

    ed = exact_diag_reference(n_ed, g, a, T, t)
    ff_small = free_fermion_correlators(n_ed, g, a, T, t, projection="exact")
    for name in ("m_z", "t_xx", "t_yy", "t_zz", "t_xy"):
        report.comparisons.append(Comparison(f"ED{n_ed}~FF{n_ed}", name,
                                             getattr(ed["correlators"], name),
                                             getattr(ff_small, name), ed_tol))
    report.comparisons.append(Comparison(f"ED{n_ed}~FF{n_ed}", "E_N", ed["log_negativity"],
                                         _log_neg(ff_small), ed_tol))

    ff_big = free_fermion_correlators(n_ff, g, a, T, t, projection="even")
    inf = evaluate_point(params)
    for name in OBSERVABLES:
        report.comparisons.append(Comparison(f"FF{n_ff}~INF", name, getattr(ff_big, name),
                                             getattr(inf.correlators, name), ff_tol))
    report.comparisons.append(Comparison(f"FF{n_ff}~INF", "E_N", _log_neg(ff_big),
                                         inf.entanglement.log_negativity, ff_tol))
    if raise_on_failure and not report.passed:
        bad = report.failures
        raise ValidationFailure(
            "cross-validation failed for " + ", ".join(f"{c.routes}:{c.observable}" for c in bad),
            bad,
        )
    return report


def validate_panel(panel=None, n_ff=FF_REFERENCE_SIZE, n_ed=8, **kw):
    """Run :func:`cross_validate` on every panel point without raising."""
    out = []
    for p in PANEL if panel is None else panel:
        out.append(cross_validate(p, n_ff=n_ff, n_ed=n_ed, raise_on_failure=False, **kw))
    return out


