"""Parameter sweeps with JSON configs and CSV output.

A config names one experiment, a grid (Cartesian product of listed values)
and scalar parameters. Every grid point is evaluated independently; the table
is emitted in grid order, so the thread count never changes the output.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .dipolar import (
    IntegralMethod,
    IntegralSpec,
    PhysicalConstants,
    SampleGeometry,
    dipolar_integral,
    supported_indices,
)
from .errors import (
    BranchOverflow,
    ConfigError,
    DegenerateRadial,
    InformationSingular,
    IoError,
    NanoNMRError,
    ParseError,
    StrategyInfeasible,
    ValidationError,
)
from .multi_sensor import MultiSensorParams, fi_y, qfi_multi
from .polarization import PolarizationParams, qfi_pol, strategy_times
from .qfi import MeasurementBasis, fi_xy_basis, optimal_measurement_angle
from .simple_model import (
    SimpleModelParams,
    coherence_exact,
    coherence_exact_derivative,
    qfi_components,
    qfi_max_over_theta,
)
from .spatial import (
    Regime,
    SpatialProtocolParams,
    mc_diffusion_oracle,
    noise_signal_ratio,
    qfi_spatial,
    resolve_regime,
)
from .undriven import PulseTrain, Strategy, undriven_operating_point

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ResultTable",
    "PointFailure",
    "parse_config",
    "config_to_json",
    "config_hash",
    "run_experiment",
    "emit_csv",
    "read_csv",
]

# errors that mark a single grid point as infeasible rather than aborting the run
INFEASIBLE = (StrategyInfeasible, BranchOverflow, DegenerateRadial, InformationSingular)


class PointFailure(NanoNMRError):
    """A module error raised at a specific grid point."""

    def __init__(self, coords: dict, cause: Exception):
        self.coords = coords
        self.cause = cause
        super().__init__(f"{type(cause).__name__} at {coords}: {cause}")


# ------------------------------------------------------------------ schema

@dataclass(frozen=True)
class _Param:
    kind: type
    default: Any = None
    check: Callable[[Any], bool] | None = None
    hint: str = ""


def _pos(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _unit(x):
    return 0 <= x <= 1


@dataclass(frozen=True)
class _Experiment:
    grid: dict          # name -> _Param; all grid axes are required
    params: dict        # name -> _Param with default (None = required)
    columns: tuple
    text_columns: tuple
    uses_geometry: bool
    evaluate: Callable


GEOMETRY_KEYS = {
    "depth": _Param(float, None, _pos, "> 0"),
    "alpha": _Param(float, 0.0),
    "density": _Param(float, 33.0, _pos, "> 0"),
    "diffusion": _Param(float, 0.0, _nonneg, ">= 0"),
    "volume": _Param(float, None, _pos, "> 0"),
}
CONSTANT_KEYS = {"J": _Param(float, 0.49, _pos, "> 0")}
OPTION_KEYS = {
    "quadrature_order": _Param(int, 64, _pos, "> 0"),
    "phi_points": _Param(int, 128, _pos, "> 0"),
    "dtheta": _Param(float, 1e-5, lambda x: x != 0, "!= 0"),
    "qfi_scheme": _Param(str, "central", lambda x: x in ("forward", "central", "richardson"),
                         "forward|central|richardson"),
}
TOP_KEYS = {"experiment", "grid", "params", "geometry", "constants", "options", "seed", "output"}


# ------------------------------------------------------------ evaluators

def _simple_vs_n(pt, cfg):
    n, gt, t = int(pt["N"]), pt["g_tau"], pt["t"]
    best, th = qfi_max_over_theta(n, gt, t)
    return {"N": n, "g_tau": gt, "qfi_weak_formula": (2 * gt) ** 2 * n * n * t * t,
            "qfi_strong_formula": n * t * t / math.e, "qfi_max_over_theta": best, "theta_opt": th}


def _simple_vs_theta(pt, cfg):
    q = qfi_components(SimpleModelParams.from_dimensionless(int(pt["N"]), pt["g_tau"], pt["theta"], pt["t"]))
    return {"theta": pt["theta"], "i_r": q.i_r, "i_phi": q.i_phi, "total": q.total}


def _basis(pt, cfg):
    p = SimpleModelParams.from_dimensionless(int(pt["N"]), pt["g_tau"], pt["theta"], pt["t"])
    c, dc = coherence_exact(p), coherence_exact_derivative(p)
    y = MeasurementBasis(0.5 * math.pi)
    return {"theta": pt["theta"], "qfi": qfi_components(p).total,
            "fi_y": fi_xy_basis(c, dc, y),
            "fi_y_rotation_only": fi_xy_basis(c, dc, y, rotation_only=True),
            "fi_optimal_basis": fi_xy_basis(c, dc, optimal_measurement_angle(c))}


def _spatial(pt, cfg):
    geom = cfg.sample_geometry()
    regime = Regime(pt["regime"])
    sp = SpatialProtocolParams(geom, pt["tau"], pt["t"], pt["theta"] / pt["t"], regime, cfg.physical_constants())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        q = qfi_spatial(sp)
    row = {"tau": pt["tau"], "theta": pt["theta"], "regime": resolve_regime(sp).value,
           "i_r": q.i_r, "i_phi": q.i_phi, "total": q.total, "noise_signal_ratio": noise_signal_ratio(q),
           "mc_mean_sum_g": math.nan, "mc_se_sum_g": math.nan,
           "mc_mean_sum_g2": math.nan, "mc_se_sum_g2": math.nan}
    n_mc = int(pt["mc_particles"])
    if n_mc > 0:
        mc = mc_diffusion_oracle(geom, pt["tau"], int(pt["mc_steps"]), n_mc, cfg.seed,
                                 constants=cfg.physical_constants(), threads=1)
        row.update(mc_mean_sum_g=mc.mean_sum_g, mc_se_sum_g=mc.se_sum_g,
                   mc_mean_sum_g2=mc.mean_sum_g2, mc_se_sum_g2=mc.se_sum_g2)
    return row


def _undriven(pt, cfg):
    geom = cfg.sample_geometry(depth=pt["depth"])
    tau = None if pt["tau"] == 0 else pt["tau"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        op = undriven_operating_point(geom, PulseTrain(pt["tau_p"]), pt["t"], Strategy(pt["strategy"]),
                                      tau, cfg.physical_constants())
    return {"depth": pt["depth"], "tau": op.tau, "cos2": op.cos2,
            "qfi_closed_form": op.qfi_closed_form, "qfi_exact": op.qfi_exact.total}


def _polarization(pt, cfg):
    geom = cfg.sample_geometry()
    pp = PolarizationParams.from_pol(pt["pol"])
    st = strategy_times(geom, pp, pt["theta"], pt["t"], cfg.physical_constants())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        q = qfi_pol(geom, pp, pt["tau"], pt["t"], pt["theta"], cfg.physical_constants())
    return {"pol": pt["pol"], "theta": pt["theta"], "tau1": st.tau1, "tau2": st.tau2,
            "qfi1": st.qfi1, "qfi2": st.qfi2, "qfi_at_tau": q.total}


def _multi_qfi(pt, cfg):
    p = MultiSensorParams(int(pt["M"]), int(pt["N"]), pt["g_tau"], pt["theta"], pt["t"])
    return {"M": p.m_sensors, "theta": p.theta,
            "qfi": qfi_multi(p, cfg.options["dtheta"], cfg.options["qfi_scheme"])}


def _multi_fiy(pt, cfg):
    p = MultiSensorParams(int(pt["M"]), int(pt["N"]), pt["g_tau"], pt["theta"], pt["t"])
    return {"M": p.m_sensors, "theta": p.theta, "fi_y": fi_y(p),
            "qfi": qfi_multi(p, cfg.options["dtheta"], cfg.options["qfi_scheme"])}


def integral_rows(order: int, alpha: float, depth: float, quadrature_order: int = 64,
                  phi_points: int = 128, radial_cutoff: float | None = None):
    """Analytic and quadrature values of every supported index set at one (order, alpha, depth)."""
    geom = SampleGeometry(depth=depth, alpha=alpha)
    cutoff = radial_cutoff if order == 1 else None
    if order == 1 and cutoff is None:
        cutoff = 1e4 * depth
    rows = []
    for ms in supported_indices(order):
        spec = IntegralSpec(order, ms, geom, cutoff, quadrature_order, phi_points)
        a = dipolar_integral(spec, IntegralMethod.ANALYTIC)
        q = dipolar_integral(spec, IntegralMethod.QUADRATURE)
        rel = abs(q - a) / abs(a) if a != 0 else abs(q - a)
        rows.append({"order": order, "indices": " ".join(str(m) for m in ms), "alpha": alpha,
                     "depth": depth, "analytic_re": a.real, "analytic_im": a.imag,
                     "quadrature_re": q.real, "quadrature_im": q.imag, "rel_diff": rel})
    return rows


def _integral_table(pt, cfg):
    return integral_rows(int(pt["order"]), pt["alpha"], pt["depth"], cfg.options["quadrature_order"],
                         cfg.options["phi_points"], pt["radial_cutoff"] or None)


_T = _Param(float, 1.0, _pos, "> 0")
_GT = _Param(float, 0.01, _pos, "> 0")
_N = _Param(int, None, lambda x: x >= 1, ">= 1")

EXPERIMENTS: dict[str, _Experiment] = {
    "simple-qfi-vs-n": _Experiment(
        {"N": _N}, {"g_tau": _GT, "t": _T},
        ("N", "g_tau", "qfi_weak_formula", "qfi_strong_formula", "qfi_max_over_theta", "theta_opt"),
        (), False, _simple_vs_n),
    "simple-qfi-vs-theta": _Experiment(
        {"theta": _Param(float)}, {"N": _Param(int, 100, _N.check, ">= 1"), "g_tau": _GT, "t": _T},
        ("theta", "i_r", "i_phi", "total"), (), False, _simple_vs_theta),
    "basis-comparison": _Experiment(
        {"theta": _Param(float)}, {"N": _Param(int, 100, _N.check, ">= 1"), "g_tau": _GT, "t": _T},
        ("theta", "qfi", "fi_y", "fi_y_rotation_only", "fi_optimal_basis"), (), False, _basis),
    "spatial": _Experiment(
        {"tau": _Param(float, None, _nonneg, ">= 0")},
        {"theta": _Param(float, 0.5 * math.pi), "t": _T,
         "regime": _Param(str, "auto", lambda x: x in {r.value for r in Regime}, "regime name"),
         "mc_particles": _Param(int, 0, lambda x: x == 0 or x >= 1000, "0 or >= 1000"),
         "mc_steps": _Param(int, 20, _pos, "> 0")},
        ("tau", "theta", "regime", "i_r", "i_phi", "total", "noise_signal_ratio",
         "mc_mean_sum_g", "mc_se_sum_g", "mc_mean_sum_g2", "mc_se_sum_g2"),
        ("regime",), True, _spatial),
    "undriven": _Experiment(
        {"depth": _Param(float, None, _pos, "> 0")},
        {"strategy": _Param(str, "peak-signal", lambda x: x in {s.value for s in Strategy}, "strategy name"),
         "tau_p": _Param(float, 1.0, _pos, "> 0"), "t": _Param(float, 1e3, _pos, "> 0"),
         "tau": _Param(float, 0.0, _nonneg, ">= 0 (0 = default window)")},
        ("depth", "tau", "cos2", "qfi_closed_form", "qfi_exact"), (), True, _undriven),
    "polarization": _Experiment(
        {"pol": _Param(float, None, _unit, "in [0, 1]")},
        {"theta": _Param(float, 0.5 * math.pi), "t": _T, "tau": _Param(float, 0.01, _nonneg, ">= 0")},
        ("pol", "theta", "tau1", "tau2", "qfi1", "qfi2", "qfi_at_tau"), (), True, _polarization),
    "multi-qfi": _Experiment(
        {"M": _N, "theta": _Param(float)}, {"N": _Param(int, 500, _N.check, ">= 1"), "g_tau": _GT, "t": _T},
        ("M", "theta", "qfi"), (), False, _multi_qfi),
    "multi-fiy": _Experiment(
        {"M": _N, "theta": _Param(float)}, {"N": _Param(int, 500, _N.check, ">= 1"), "g_tau": _GT, "t": _T},
        ("M", "theta", "fi_y", "qfi"), (), False, _multi_fiy),
    "integral-table": _Experiment(
        {"order": _Param(int, None, lambda x: x in (1, 2, 3), "1, 2 or 3"),
         "alpha": _Param(float), "depth": _Param(float, None, _pos, "> 0")},
        {"radial_cutoff": _Param(float, 0.0, _nonneg, ">= 0 (0 = 10^4 depth)")},
        ("order", "indices", "alpha", "depth", "analytic_re", "analytic_im",
         "quadrature_re", "quadrature_im", "rel_diff"),
        ("indices",), False, _integral_table),
}


# ------------------------------------------------------------------ config

@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    grid: dict
    params: dict
    geometry: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    seed: int = 0
    output: str = "results"

    @property
    def spec(self) -> _Experiment:
        return EXPERIMENTS[self.experiment]

    def sample_geometry(self, **override) -> SampleGeometry:
        g = {**self.geometry, **override}
        return SampleGeometry(g["depth"], g["alpha"], g["density"], g["diffusion"], g["volume"])

    def physical_constants(self) -> PhysicalConstants:
        return PhysicalConstants(self.constants["J"])

    def as_dict(self) -> dict:
        return {"experiment": self.experiment, "grid": {k: list(v) for k, v in self.grid.items()},
                "params": dict(self.params), "geometry": dict(self.geometry),
                "constants": dict(self.constants), "options": dict(self.options),
                "seed": self.seed, "output": self.output}

    def points(self):
        names = list(self.spec.grid)
        for combo in itertools.product(*(self.grid[n] for n in names)):
            yield dict(zip(names, combo))


def _line_col(text: str, key: str):
    idx = text.find(f'"{key}"')
    if idx < 0:
        return None, None
    line = text.count("\n", 0, idx) + 1
    return line, idx - (text.rfind("\n", 0, idx) + 1) + 1


def _coerce(value, par: _Param, where: str, errors: list):
    if par.kind is str:
        if not isinstance(value, str):
            errors.append(f"{where}: expected a string")
            return None
        out = value
    elif par.kind is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or float(value) != int(value):
            errors.append(f"{where}: expected an integer")
            return None
        out = int(value)
    else:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            errors.append(f"{where}: expected a number")
            return None
        out = float(value)
        if not math.isfinite(out):
            errors.append(f"{where}: must be finite")
            return None
    if par.check is not None and not par.check(out):
        errors.append(f"{where}: value {out!r} must be {par.hint}")
        return None
    return out


def _expand_axis(spec, par: _Param, where: str, errors: list):
    """A grid axis is a list, or {start, stop, num, scale: linear|log}."""
    if isinstance(spec, dict):
        extra = set(spec) - {"start", "stop", "num", "scale"}
        if extra:
            errors.append(f"{where}: unknown range key(s) {sorted(extra)}")
            return None
        try:
            start, stop, num = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        except (KeyError, TypeError, ValueError):
            errors.append(f"{where}: range needs numeric start, stop, num")
            return None
        scale = spec.get("scale", "linear")
        if num < 1 or scale not in ("linear", "log") or (scale == "log" and min(start, stop) <= 0):
            errors.append(f"{where}: invalid range {spec}")
            return None
        vals = np.geomspace(start, stop, num) if scale == "log" else np.linspace(start, stop, num)
        if par.kind is int:
            vals = sorted(set(int(round(v)) for v in vals))
        spec = [float(v) if par.kind is float else v for v in vals]
    if not isinstance(spec, list) or not spec:
        errors.append(f"{where}: grid axis must be a non-empty list or a range object")
        return None
    out = [_coerce(v, par, f"{where}[{i}]", errors) for i, v in enumerate(spec)]
    if any(v is None for v in out):
        return None
    # sorted, duplicate-free axes: row order and hash do not depend on how the list was written
    return tuple(sorted(set(out)))


def _section(raw: dict, name: str, schema: dict, errors: list, required_when=True) -> dict:
    given = raw.get(name, {})
    if not isinstance(given, dict):
        errors.append(f"{name}: must be an object")
        return {}
    for k in sorted(set(given) - set(schema)):
        errors.append(f"{name}.{k}: unknown key")
    out = {}
    for k, par in schema.items():
        if k in given and given[k] is not None:
            out[k] = _coerce(given[k], par, f"{name}.{k}", errors)
        elif par.default is None and required_when and not (name == "geometry" and k == "volume"):
            errors.append(f"{name}.{k}: required")
        else:
            out[k] = par.default
    return out


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment config, filling defaults.

    Raises ParseError for malformed JSON and ValidationError listing every
    problem found in a well-formed document.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise ParseError("top level must be an object", 1, 1)
    errors: list[str] = []
    for k in sorted(set(raw) - TOP_KEYS):
        line, col = _line_col(text, k)
        errors.append(f"{k}: unknown key" + (f" (line {line}, column {col})" if line else ""))
    name = raw.get("experiment")
    if name not in EXPERIMENTS:
        errors.append(f"experiment: must be one of {sorted(EXPERIMENTS)}, got {name!r}")
        raise ValidationError(errors)
    exp = EXPERIMENTS[name]

    grid_raw = raw.get("grid", {})
    grid = {}
    if not isinstance(grid_raw, dict):
        errors.append("grid: must be an object")
        grid_raw = {}
    for k in sorted(set(grid_raw) - set(exp.grid)):
        errors.append(f"grid.{k}: unknown key for {name}")
    for k, par in exp.grid.items():
        if k not in grid_raw:
            errors.append(f"grid.{k}: required")
        else:
            grid[k] = _expand_axis(grid_raw[k], par, f"grid.{k}", errors)

    params = _section(raw, "params", exp.params, errors)
    geometry = _section(raw, "geometry", GEOMETRY_KEYS, errors, exp.uses_geometry)
    if not exp.uses_geometry:
        if raw.get("geometry"):
            errors.append(f"geometry: not used by {name}")
        geometry = {}
    constants = _section(raw, "constants", CONSTANT_KEYS, errors)
    options = _section(raw, "options", OPTION_KEYS, errors)

    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        errors.append("seed: must be a non-negative integer")
    output = raw.get("output", "results")
    if not isinstance(output, str) or not output:
        errors.append("output: must be a non-empty string")

    if exp.uses_geometry and not errors:
        try:
            SampleGeometry(geometry["depth"], geometry["alpha"], geometry["density"],
                           geometry["diffusion"], geometry["volume"])
        except ValueError as exc:
            errors.append(f"geometry: {exc}")
    if errors:
        raise ValidationError(errors)
    return ExperimentConfig(name, grid, params, geometry, constants, options, seed, output)


def config_to_json(cfg: ExperimentConfig) -> str:
    """Canonical JSON (sorted keys, fixed separators) of a parsed config."""
    return json.dumps(cfg.as_dict(), sort_keys=True, separators=(",", ":"))


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(config_to_json(cfg).encode()).hexdigest()


# ------------------------------------------------------------------ running

@dataclass
class ResultTable:
    columns: tuple
    rows: list
    text_columns: tuple = ()
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.text_columns = tuple(self.text_columns)
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("ragged table")

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _evaluate(args):
    cfg, pt = args
    exp = cfg.spec
    merged = {**cfg.params, **pt}
    try:
        out = exp.evaluate(merged, cfg)
    except INFEASIBLE as exc:
        row = {c: (merged.get(c, math.nan) if c in pt else math.nan) for c in exp.columns}
        for c in exp.text_columns:
            row[c] = "" if not isinstance(row[c], str) else row[c]
        row["reason"] = f"{type(exc).__name__}: {exc}"
        return [row]
    except NanoNMRError as exc:
        raise PointFailure(pt, exc) from exc
    rows = out if isinstance(out, list) else [out]
    for r in rows:
        r["reason"] = ""
    return rows


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ResultTable:
    """Evaluate every grid point; infeasible points become NaN rows with a reason."""
    if threads is None:
        threads = int(os.environ.get("NANONMR_THREADS", os.cpu_count() or 1))
    exp = cfg.spec
    jobs = [(cfg, pt) for pt in cfg.points()]
    start = time.perf_counter()
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_evaluate, jobs))
    else:
        chunks = [_evaluate(j) for j in jobs]
    columns = exp.columns + ("reason",)
    rows = [[r[c] for c in columns] for chunk in chunks for r in chunk]
    manifest = {"experiment": cfg.experiment, "config_hash": config_hash(cfg),
                "code_version": __version__, "wall_time_s": time.perf_counter() - start,
                "config": cfg.as_dict(), "n_rows": len(rows)}
    return ResultTable(columns, rows, exp.text_columns + ("reason",), manifest)


# ------------------------------------------------------------------ CSV

def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    x = float(v)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Inf" if x > 0 else "-Inf"
    return "%.17g" % x


def csv_bytes(table: ResultTable) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue().encode()


def emit_csv(table: ResultTable, path) -> Path:
    """Write ``table`` as CSV plus a sibling ``.manifest.json``.

    If ``path`` is a directory, the file is named
    ``<experiment>-<first 12 hex of the config hash>.csv`` inside it.
    """
    path = Path(path)
    try:
        if path.is_dir() or (not path.suffix and not path.exists()):
            path.mkdir(parents=True, exist_ok=True)
            stem = table.manifest.get("experiment", "table")
            tag = table.manifest.get("config_hash", "")[:12]
            path = path / (f"{stem}-{tag}.csv" if tag else f"{stem}.csv")
        path.write_bytes(csv_bytes(table))
        manifest = {**table.manifest, "columns": list(table.columns),
                    "text_columns": list(table.text_columns), "csv": path.name}
        path.with_suffix(".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def _parse_cell(s: str):
    if s == "NaN":
        return math.nan
    if s in ("Inf", "-Inf"):
        return math.inf if s == "Inf" else -math.inf
    if s.lstrip("-").isdigit():
        return int(s)
    return float(s)


def read_csv(path, text_columns=None) -> ResultTable:
    """Read a CSV written by ``emit_csv``; text columns come from the manifest if present."""
    path = Path(path)
    manifest = {}
    side = path.with_suffix(".manifest.json")
    if side.exists():
        manifest = json.loads(side.read_text())
    if text_columns is None:
        text_columns = manifest.get("text_columns", ["reason"])
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[v if c in text_columns else _parse_cell(v) for c, v in zip(header, r)] for r in reader]
    for k in ("columns", "text_columns", "csv"):
        manifest.pop(k, None)
    return ResultTable(tuple(header), rows, tuple(c for c in header if c in text_columns), manifest)
