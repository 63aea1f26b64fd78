"""Command-line entry point: ``xyquench {point,scan,phase-diagram,validate}``.

Settings resolve as command-line flag > environment variable > config file >
built-in default.  Output is deterministic: identical settings produce
byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import phase_scan as ps
from .errors import ConfigError, NoTransitionFound, NumericalError, TooLarge, XYQuenchError
from .model import ModelParams, Temperature
from .oracle.exact_diag import MAX_SITES
from .oracle.validate import FF_REFERENCE_SIZE, PANEL, cross_validate
from .quadrature import DEFAULT_ABS_TOL
from .rdm import POS_TOL

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

# tolerance knobs that may come from the environment
ENV_VARS = {
    "abs_tol": "XYQ_ABS_TOL",
    "pos_tol": "XYQ_POS_TOL",
    "e_zero_threshold": "XYQ_E_ZERO_THRESHOLD",
    "bracket_width": "XYQ_BRACKET_WIDTH",
    "noise_tol": "XYQ_NOISE_TOL",
}

DEFAULTS = {
    "gamma": 0.5,
    "a": 0.5,
    "t": 1.0,
    "beta": "inf",
    "axis": "field",
    "lo": None,
    "hi": None,
    "steps": None,
    "beta_grid": None,
    "a_lo": 0.0,
    "a_hi": 2.0,
    "a_steps": 101,
    "t_lo": 0.0,
    "t_hi": 12.0,
    "t_steps": 61,
    "abs_tol": DEFAULT_ABS_TOL,
    "pos_tol": POS_TOL,
    "e_zero_threshold": ps.E_ZERO_THRESHOLD,
    "bracket_width": ps.BRACKET_WIDTH,
    "noise_tol": ps.NOISE_TOL,
    "n_ed": 8,
    "n_ff": FF_REFERENCE_SIZE,
    "workers": 1,
    "format": "csv",
    "output": None,
    "untempered_sigma": False,
}

AXIS_RANGES = {"field": (0.3, 2.0, 341), "time": (0.0, 12.0, 121)}

FLOAT_KEYS = {"gamma", "a", "t", "lo", "hi", "a_lo", "a_hi", "t_lo", "t_hi", "abs_tol",
              "pos_tol", "e_zero_threshold", "bracket_width", "noise_tol"}
INT_KEYS = {"steps", "a_steps", "t_steps", "n_ed", "n_ff", "workers"}
BOOL_KEYS = {"untempered_sigma"}


@dataclass
class RunConfig:
    command: str
    params: ModelParams
    settings: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.settings[name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def sigma_thermal(self):
        return not self.settings["untempered_sigma"]


# ---------------------------------------------------------------------------
# configuration


def read_config_file(path):
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key, value):
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in FLOAT_KEYS:
            return float(value)
        if key in INT_KEYS:
            return int(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {value!r}") from exc
    if key in BOOL_KEYS:
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    return value


def resolve_settings(flags: dict, env=None) -> dict:
    env = os.environ if env is None else env
    settings = dict(DEFAULTS)
    if flags.get("config"):
        settings.update(read_config_file(flags["config"]))
    for key, var in ENV_VARS.items():
        if env.get(var):
            settings[key] = env[var]
    for key, value in flags.items():
        if key in DEFAULTS and value is not None:
            settings[key] = value
    return {k: _coerce(k, v) for k, v in settings.items()}


def _check(settings):
    for key in ("abs_tol", "pos_tol", "e_zero_threshold", "bracket_width", "noise_tol"):
        v = settings[key]
        if not (math.isfinite(v) and v > 0):
            raise ConfigError(f"{key} must be finite and > 0, got {v!r}")
    if settings["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    if settings["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {settings['format']!r}")
    if settings["axis"] not in ("field", "time", "temperature"):
        raise ConfigError(f"axis must be field, time or temperature, got {settings['axis']!r}")
    for key in ("a_steps", "t_steps"):
        if settings[key] < 1:
            raise ConfigError(f"{key} must be >= 1")
    if settings["steps"] is not None and settings["steps"] < 2:
        raise ConfigError("steps must be >= 2")


def build_config(args: argparse.Namespace, env=None) -> RunConfig:
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    settings = resolve_settings(flags, env)
    _check(settings)
    params = ModelParams(settings["gamma"], settings["a"], Temperature.parse(settings["beta"]),
                         settings["t"])
    if settings["beta_grid"] is not None:
        settings["beta_grid"] = [Temperature.parse(s) for s in str(settings["beta_grid"]).split(",")
                                 if s.strip()]
    return RunConfig(args.command, params, settings)


# ---------------------------------------------------------------------------
# output


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(x)


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else fmt(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


class Writer:
    """Collects records and footers, then renders CSV or JSON lines."""

    def __init__(self, columns, fmt_name):
        self.columns = list(columns)
        self.format = fmt_name
        self.records = []
        self.footers = []

    def add(self, record: dict):
        self.records.append(record)

    def footer(self, key, value):
        self.footers.append((key, value))

    def render(self) -> str:
        buf = io.StringIO()
        if self.format == "csv":
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            for r in self.records:
                w.writerow([fmt(r.get(c)) for c in self.columns])
            for k, v in self.footers:
                buf.write(f"# {k}={fmt(v)}\n")
        else:
            for r in self.records:
                buf.write(json.dumps({k: _json_value(r[k]) for k in r}, sort_keys=False) + "\n")
            if self.footers:
                buf.write(json.dumps({"footer": {k: _json_value(v) for k, v in self.footers}}) + "\n")
        return buf.getvalue()


def emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _meta_footers(writer, cfg: RunConfig, **extra):
    p = cfg.params
    writer.footer("gamma", p.gamma)
    for k, v in extra.items():
        writer.footer(k, v)
    writer.footer("abs_tol", cfg.abs_tol)
    writer.footer("pos_tol", cfg.pos_tol)
    if not cfg.sigma_thermal:
        writer.footer("sigma_thermal", False)


PHYS_COLUMNS = ("trace_error", "min_rdm_eig", "marginal_error")


def _row_record(row, param_name="param"):
    rec = {param_name: row.param}
    for c in ps.COLUMNS[1:]:
        rec[c] = getattr(row, c)
    return rec


# ---------------------------------------------------------------------------
# commands


def cmd_point(cfg: RunConfig):
    p = cfg.params
    res = ps.evaluate_point(p, cfg.abs_tol, cfg.pos_tol, sigma_thermal=cfg.sigma_thermal)
    row = ps.ScanRow.from_point(p.field_a, res)
    cols = list(ps.COLUMNS) + list(PHYS_COLUMNS)
    w = Writer(cols, cfg.format)
    rec = _row_record(row)
    for c in PHYS_COLUMNS:
        rec[c] = getattr(row, c)
    w.add(rec)
    _meta_footers(w, cfg, a=p.field_a, t=p.time_t, beta=str(p.temperature))
    return w, EXIT_OK


def _axis_grid(cfg: RunConfig, axis):
    lo, hi, steps = AXIS_RANGES[axis]
    lo = lo if cfg.lo is None else cfg.lo
    hi = hi if cfg.hi is None else cfg.hi
    steps = steps if cfg.steps is None else cfg.steps
    return lo, hi, steps


def cmd_scan(cfg: RunConfig):
    p = cfg.params
    axis = cfg.axis
    common = dict(abs_tol=cfg.abs_tol, workers=cfg.workers, sigma_thermal=cfg.sigma_thermal)
    try:
        if axis == "field":
            lo, hi, steps = _axis_grid(cfg, axis)
            table = ps.field_scan(p, lo, hi, steps, **common)
        elif axis == "time":
            lo, hi, steps = _axis_grid(cfg, axis)
            table = ps.time_scan(p, lo, hi, steps, **common)
        else:
            table = ps.temp_scan(p, cfg.beta_grid, **common)
    except ValueError as exc:
        if isinstance(exc, XYQuenchError):
            raise
        raise ConfigError(str(exc)) from exc

    w = Writer(ps.COLUMNS, cfg.format)
    for row in table.rows:
        w.add(_row_record(row))
    extra = {"axis": axis}
    if axis != "field":
        extra["a"] = p.field_a
    if axis != "time":
        extra["t"] = p.time_t
    if axis != "temperature":
        extra["beta"] = str(p.temperature)
    _meta_footers(w, cfg, **extra)
    status = EXIT_OK
    if table.failures:
        w.footer("failed_points", len(table.failures))
        for r in table.failures:
            w.footer(f"error@{fmt(r.param)}", r.error)
        return w, EXIT_NUMERICAL

    if axis == "field":
        try:
            crit = ps.find_critical_fields(p, search_range=(table.rows[0].param, table.rows[-1].param),
                                           e_zero_threshold=cfg.e_zero_threshold,
                                           bracket_width=cfg.bracket_width, abs_tol=cfg.abs_tol,
                                           prescan=table, sigma_thermal=cfg.sigma_thermal)
            w.footer("a_c", crit.a_c if crit.a_c is not None else "none")
            w.footer("a_bar_c", crit.a_bar_c if crit.a_bar_c is not None else "none")
            w.footer("bracket_width", crit.bracket_width)
        except NoTransitionFound:
            w.footer("a_c", "none")
            w.footer("a_bar_c", "none")
    elif axis == "temperature":
        verdict = ps.classify_monotonicity(table, noise_tol=cfg.noise_tol)
        w.footer("monotonicity", verdict.kind.value)
        w.footer("low_T_limit", verdict.low_T_limit)
        w.footer("profile", verdict.description)
    return w, status


def cmd_phase_diagram(cfg: RunConfig):
    a_grid = np.linspace(cfg.a_lo, cfg.a_hi, cfg.a_steps) if cfg.a_steps > 1 else np.array([cfg.a_lo])
    t_grid = np.linspace(cfg.t_lo, cfg.t_hi, cfg.t_steps) if cfg.t_steps > 1 else np.array([cfg.t_lo])
    if np.any(t_grid < 0):
        raise ConfigError("time grid must be >= 0")
    pd = ps.phase_diagram(cfg.params, a_grid, t_grid, cfg.abs_tol, cfg.workers,
                          sigma_thermal=cfg.sigma_thermal)
    cols = ["a", "t"] + list(ps.COLUMNS[1:])
    w = Writer(cols, cfg.format)
    k = 0
    for a in a_grid:
        for _t in t_grid:
            row = pd.rows[k]
            rec = {"a": float(a), "t": row.param}
            for c in ps.COLUMNS[1:]:
                rec[c] = getattr(row, c)
            w.add(rec)
            k += 1
    _meta_footers(w, cfg, beta=str(cfg.params.temperature), n_a=len(a_grid), n_t=len(t_grid))
    w.footer("max_trace_error", float(np.nanmax(pd.trace_error)))
    w.footer("min_rdm_eig", float(np.nanmin(pd.min_rdm_eig)))
    w.footer("max_marginal_error", float(np.nanmax(pd.marginal_error)))
    if pd.failures:
        w.footer("failed_points", len(pd.failures))
        return w, EXIT_NUMERICAL
    return w, EXIT_OK


def cmd_validate(cfg: RunConfig):
    if cfg.n_ed > MAX_SITES:
        raise TooLarge(f"exact diagonalization limited to N <= {MAX_SITES}, got {cfg.n_ed}")
    cols = ["gamma", "a", "beta", "t", "routes", "observable", "left", "right", "diff", "tol", "pass"]
    w = Writer(cols, cfg.format)
    all_ok = True
    for p in PANEL:
        rep = cross_validate(p, n_ff=cfg.n_ff, n_ed=cfg.n_ed, raise_on_failure=False)
        all_ok &= rep.passed
        for c in rep.comparisons:
            w.add({"gamma": p.gamma, "a": p.field_a, "beta": str(p.temperature), "t": p.time_t,
                   "routes": c.routes, "observable": c.observable, "left": c.left,
                   "right": c.right, "diff": c.diff, "tol": c.tol, "pass": c.passed})
    w.footer("n_ed", cfg.n_ed)
    w.footer("n_ff", cfg.n_ff)
    w.footer("panel_points", len(PANEL))
    w.footer("all_pass", all_ok)
    return w, EXIT_OK if all_ok else EXIT_NUMERICAL


COMMANDS = {
    "point": cmd_point,
    "scan": cmd_scan,
    "phase-diagram": cmd_phase_diagram,
    "validate": cmd_validate,
}


# ---------------------------------------------------------------------------
# argument parsing


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--gamma", type=float, help="anisotropy (nonzero), default 0.5")
    g.add_argument("--a", type=float, help="initial transverse field, default 0.5")
    g.add_argument("--t", type=float, help="time after the quench, default 1")
    g.add_argument("--beta", help="inverse temperature; 'inf' for the ground state (default)")
    n = common.add_argument_group("numerics")
    n.add_argument("--abs-tol", dest="abs_tol", type=float, help=f"quadrature tolerance [{ENV_VARS['abs_tol']}]")
    n.add_argument("--pos-tol", dest="pos_tol", type=float, help=f"RDM positivity slack [{ENV_VARS['pos_tol']}]")
    n.add_argument("--untempered-sigma", dest="untempered_sigma", action="store_const", const=True,
                   help="diagnostic: drop the thermal factor from sigma")
    n.add_argument("--workers", type=int, help="worker processes for sweeps")
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"))
    o.add_argument("--output", "-o", help="output file (default stdout)")
    o.add_argument("--config", help="flat key=value file; flags take precedence")

    top = argparse.ArgumentParser(prog="xyquench",
                                  description="Quench dynamics and entanglement of the XY chain.")
    sub = top.add_subparsers(dest="command", required=True)
    sub.add_parser("point", parents=[common], help="one parameter point")

    sc = sub.add_parser("scan", parents=[common], help="1-D sweep along field, time or temperature")
    sc.add_argument("--axis", choices=("field", "time", "temperature"))
    sc.add_argument("--lo", type=float)
    sc.add_argument("--hi", type=float)
    sc.add_argument("--steps", type=int)
    sc.add_argument("--beta-grid", dest="beta_grid",
                    help="comma-separated ascending beta values for the temperature axis")
    sc.add_argument("--e-zero-threshold", dest="e_zero_threshold", type=float)
    sc.add_argument("--bracket-width", dest="bracket_width", type=float)
    sc.add_argument("--noise-tol", dest="noise_tol", type=float)

    pd = sub.add_parser("phase-diagram", parents=[common], help="E_N and m_z on an (a, t) grid")
    for name in ("a-lo", "a-hi", "t-lo", "t-hi"):
        pd.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float)
    pd.add_argument("--a-steps", dest="a_steps", type=int)
    pd.add_argument("--t-steps", dest="t_steps", type=int)

    va = sub.add_parser("validate", parents=[common], help="cross-check against finite rings")
    va.add_argument("--n-ed", dest="n_ed", type=int)
    va.add_argument("--n-ff", dest="n_ff", type=int)
    return top


def main(argv=None, env=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args, env)
        writer, code = COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"xyquench: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, XYQuenchError) as exc:
        print(f"xyquench: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    emit(writer.render(), cfg.output)
    return code


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
