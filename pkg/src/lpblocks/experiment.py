"""Monte Carlo experiment harness.

Runs estimator grids over simulated series with one derived RNG stream per
replication, so every estimator at a grid point sees the same sample (paired
boxplots) and output files are byte-identical for any worker count. Also
hosts config parsing, series-file ingestion, and the closed-form report.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .blocks import default_k, partition
from .estimators import (
    EstimateReport,
    cluster_index_c1,
    cluster_index_c1_infty,
    extremal_index_alpha_blocks,
    extremal_index_infty_blocks,
    hill_alpha,
    serial_dependence_estimate,
    supwalk_constant_estimate,
)
from .models import (
    AR1ModelSpec,
    LinearModelSpec,
    Model,
    NoiseSpec,
    SeedSpec,
    model_coefficients,
    noise_of,
    simulate,
)
from .seqcore import INF, as_p, as_series
from .spectral import (
    cluster_constant_linear,
    cluster_constant_telescoping,
    serial_dependence_oracle_linear,
    supwalk_constant_oracle_linear,
)

__all__ = [
    "AlphaMode",
    "parse_alpha_mode",
    "resolve_alpha",
    "EstimatorEntry",
    "get_estimator",
    "known_estimators",
    "ExperimentConfig",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "model_from_dict",
    "model_to_dict",
    "ResultRow",
    "run_experiment",
    "summarize",
    "write_results_csv",
    "summary_csv_text",
    "write_summary_csv",
    "write_summary_json",
    "write_outputs",
    "read_series_file",
    "estimate_from_file",
    "oracle_report",
    "format_oracle_report",
]

RESULTS_HEADER = "estimator_id,n,b,k,rep,seed,value,degenerate"
SUMMARY_HEADER = "estimator_id,n,b,k,rows,degenerate,mean,q05,q25,q50,q75,q95"


# ---------------------------------------------------------------------------
# tail index mode


@dataclass(frozen=True)
class AlphaMode:
    """How the tail index is obtained: the model's true value ("oracle"),
    a Hill plug-in ("hill", optional k_tail), or a fixed number."""

    kind: str
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("oracle", "hill", "fixed"):
            raise ValueError(f"unknown alpha mode kind {self.kind!r}")
        if self.kind == "fixed" and not (self.value is not None and self.value > 0):
            raise ValueError("fixed alpha must be positive")


def parse_alpha_mode(mode) -> AlphaMode:
    if isinstance(mode, AlphaMode):
        return mode
    if isinstance(mode, (int, float)) and not isinstance(mode, bool):
        return AlphaMode("fixed", float(mode))
    text = str(mode).strip()
    if text == "oracle":
        return AlphaMode("oracle")
    if text == "hill":
        return AlphaMode("hill")
    if text.startswith("hill:"):
        k_tail = int(text.split(":", 1)[1])
        if k_tail < 2:
            raise ValueError("hill k_tail must be at least 2")
        return AlphaMode("hill", float(k_tail))
    try:
        value = float(text)
    except ValueError:
        raise ValueError(
            f"alpha mode {mode!r} not understood; use a positive number, "
            "'oracle', 'hill' or 'hill:<k_tail>'"
        ) from None
    return AlphaMode("fixed", value)


def default_hill_k(n: int) -> int:
    return max(2, math.floor(0.05 * n))


def resolve_alpha(mode: AlphaMode, series=None, model: Optional[Model] = None) -> float:
    if mode.kind == "fixed":
        return float(mode.value)
    if mode.kind == "oracle":
        if model is None:
            raise ValueError("oracle alpha mode needs a model; pass a number or hill:<k_tail>")
        return noise_of(model).alpha
    x = as_series(series)
    k_tail = int(mode.value) if mode.value is not None else default_hill_k(len(x))
    return hill_alpha(x, k_tail)


# ---------------------------------------------------------------------------
# estimator registry


@dataclass(frozen=True)
class EstimatorEntry:
    estimator_id: str
    needs_alpha: bool
    run: Callable[..., EstimateReport]


_BUILTIN = {
    "extremal_index_alpha": EstimatorEntry(
        "extremal_index_alpha", True,
        lambda frame, alpha, k: extremal_index_alpha_blocks(frame, alpha, k)),
    "extremal_index_infty": EstimatorEntry(
        "extremal_index_infty", False,
        lambda frame, alpha, k: extremal_index_infty_blocks(frame, k)),
    "cluster_index_c1": EstimatorEntry(
        "cluster_index_c1", True,
        lambda frame, alpha, k: cluster_index_c1(frame, alpha, k)),
    "cluster_index_c1_infty": EstimatorEntry(
        "cluster_index_c1_infty", False,
        lambda frame, alpha, k: cluster_index_c1_infty(frame, k)),
    "supwalk": EstimatorEntry(
        "supwalk", True,
        lambda frame, alpha, k: supwalk_constant_estimate(frame, alpha, k)),
}


def known_estimators() -> list[str]:
    return sorted(_BUILTIN) + ["serial:<h>"]


def get_estimator(estimator_id: str) -> EstimatorEntry:
    if estimator_id in _BUILTIN:
        return _BUILTIN[estimator_id]
    if estimator_id.startswith("serial:"):
        try:
            h = int(estimator_id.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad serial lag in {estimator_id!r}") from None
        if h < 0:
            raise ValueError("serial lag must be nonnegative")
        return EstimatorEntry(
            estimator_id, True,
            lambda frame, alpha, k, h=h: serial_dependence_estimate(frame, alpha, k, h))
    raise ValueError(
        f"unknown estimator {estimator_id!r}; known: {', '.join(known_estimators())}")


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    model: Model
    n_grid: tuple[int, ...]
    b_grid: tuple[int, ...]
    reps: int
    estimators: tuple[str, ...]
    kappa: float = 1.0
    alpha_mode: str = "oracle"
    master_seed: int = 0
    output: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "b_grid", tuple(int(b) for b in self.b_grid))
        object.__setattr__(self, "estimators", tuple(str(e) for e in self.estimators))
        if not self.n_grid or not self.b_grid:
            raise ValueError("n_grid and b_grid must be nonempty")
        if any(n < 1 for n in self.n_grid) or any(b < 1 for b in self.b_grid):
            raise ValueError("grid entries must be positive")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not self.estimators:
            raise ValueError("estimator list must be nonempty")
        for estimator_id in self.estimators:
            get_estimator(estimator_id)
        parse_alpha_mode(self.alpha_mode)
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")


_MODEL_KEYS = {"ar1": {"kind", "phi", "noise", "burn_in"},
               "linear": {"kind", "coeffs", "noise"}}
_NOISE_KEYS = {"law", "alpha"}
_CONFIG_KEYS = {"model", "n_grid", "b_grid", "reps", "estimators",
                "kappa", "alpha_mode", "master_seed", "output"}


def _check_keys(data: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValueError(f"unknown {where} keys: {', '.join(unknown)}")


def _noise_from_dict(data: dict) -> NoiseSpec:
    _check_keys(data, _NOISE_KEYS, "noise")
    return NoiseSpec(law=data["law"], alpha=float(data["alpha"]))


def model_from_dict(data: dict) -> Model:
    kind = data.get("kind")
    if kind not in _MODEL_KEYS:
        raise ValueError("model kind must be 'ar1' or 'linear'")
    _check_keys(data, _MODEL_KEYS[kind], "model")
    noise = _noise_from_dict(data["noise"])
    if kind == "ar1":
        kwargs = {}
        if "burn_in" in data:
            kwargs["burn_in"] = int(data["burn_in"])
        return AR1ModelSpec(phi=float(data["phi"]), noise=noise, **kwargs)
    return LinearModelSpec(coeffs=tuple(float(c) for c in data["coeffs"]), noise=noise)


def model_to_dict(model: Model) -> dict:
    noise = {"law": model.noise.law, "alpha": model.noise.alpha}
    if isinstance(model, AR1ModelSpec):
        return {"kind": "ar1", "phi": model.phi, "noise": noise,
                "burn_in": model.burn_in}
    return {"kind": "linear", "coeffs": list(model.coeffs), "noise": noise}


def config_from_dict(data: dict) -> ExperimentConfig:
    _check_keys(data, _CONFIG_KEYS, "config")
    missing = sorted(k for k in ("model", "n_grid", "b_grid", "reps", "estimators")
                     if k not in data)
    if missing:
        raise ValueError(f"missing config keys: {', '.join(missing)}")
    kwargs = dict(data)
    kwargs["model"] = model_from_dict(data["model"])
    return ExperimentConfig(**kwargs)


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "model": model_to_dict(config.model),
        "n_grid": list(config.n_grid),
        "b_grid": list(config.b_grid),
        "reps": config.reps,
        "estimators": list(config.estimators),
        "kappa": config.kappa,
        "alpha_mode": config.alpha_mode,
        "master_seed": config.master_seed,
        "output": config.output,
    }


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# experiment runner


@dataclass(frozen=True)
class ResultRow:
    estimator_id: str
    n: int
    b: int
    k: int
    rep: int
    seed: int
    value: float
    degenerate: bool
    wall_time: float  # in-memory only; not persisted


def _replication_rows(args) -> list[ResultRow]:
    config, rep = args
    seed = SeedSpec(config.master_seed, rep)
    series = simulate(config.model, max(config.n_grid), seed)
    mode = parse_alpha_mode(config.alpha_mode)
    rows = []
    for n in config.n_grid:
        x = series[:n]
        alpha = resolve_alpha(mode, x, config.model)
        for b in config.b_grid:
            if n // b < 2:
                # grid point skipped: too few blocks at this (n, b)
                for estimator_id in config.estimators:
                    rows.append(ResultRow(estimator_id, n, b, 0, rep,
                                          config.master_seed, float("nan"),
                                          True, 0.0))
                continue
            frame = partition(x, b)
            k = default_k(n, b, config.kappa)
            for estimator_id in config.estimators:
                entry = get_estimator(estimator_id)
                start = time.perf_counter()
                report = entry.run(frame, alpha, k)
                elapsed = time.perf_counter() - start
                rows.append(ResultRow(estimator_id, n, b, k, rep,
                                      config.master_seed, report.value,
                                      report.degenerate, elapsed))
    return rows


def run_experiment(config: ExperimentConfig, threads: int = 1,
                   output=None) -> tuple[list[ResultRow], list[dict]]:
    """Run the full grid; returns (rows, summary) and writes CSV/JSON files
    when an output directory is configured. Byte-identical for any threads."""
    tasks = [(config, rep) for rep in range(config.reps)]
    if threads <= 1 or config.reps == 1:
        chunks = [_replication_rows(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_replication_rows, tasks,
                                   chunksize=max(1, config.reps // (4 * threads))))
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.estimator_id, r.n, r.b, r.rep))
    summary = summarize(rows)
    out_dir = output if output is not None else config.output
    if out_dir is not None:
        write_outputs(rows, summary, out_dir)
    return rows, summary


def summarize(rows: Sequence[ResultRow]) -> list[dict]:
    """Per-(estimator_id, n, b) mean and {5,25,50,75,95}% quantiles over
    non-degenerate replications; degenerate rows are counted, not averaged."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row.estimator_id, row.n, row.b), []).append(row)
    out = []
    for key in sorted(groups):
        group = groups[key]
        values = np.asarray([r.value for r in group if not r.degenerate])
        record = {
            "estimator_id": key[0],
            "n": key[1],
            "b": key[2],
            "k": max(r.k for r in group),
            "rows": len(group),
            "degenerate": sum(1 for r in group if r.degenerate),
        }
        if values.size:
            qs = np.quantile(values, [0.05, 0.25, 0.5, 0.75, 0.95])
            record["mean"] = float(values.mean())
            for name, q in zip(("q05", "q25", "q50", "q75", "q95"), qs):
                record[name] = float(q)
        else:
            for name in ("mean", "q05", "q25", "q50", "q75", "q95"):
                record[name] = None
        out.append(record)
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_results_csv(rows: Sequence[ResultRow], path) -> None:
    lines = [RESULTS_HEADER]
    for r in rows:
        lines.append(",".join((r.estimator_id, str(r.n), str(r.b), str(r.k),
                               str(r.rep), str(r.seed), repr(float(r.value)),
                               str(int(r.degenerate)))))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def summary_csv_text(summary: Sequence[dict]) -> str:
    fields = SUMMARY_HEADER.split(",")
    lines = [SUMMARY_HEADER]
    for record in summary:
        lines.append(",".join(_fmt(record[f]) for f in fields))
    return "\n".join(lines) + "\n"


def write_summary_csv(summary: Sequence[dict], path) -> None:
    Path(path).write_text(summary_csv_text(summary), encoding="utf-8")


def write_summary_json(summary: Sequence[dict], path) -> None:
    Path(path).write_text(json.dumps(list(summary), indent=2) + "\n",
                          encoding="utf-8")


def write_outputs(rows, summary, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"results": out / "results.csv",
             "summary_csv": out / "summary.csv",
             "summary_json": out / "summary.json"}
    write_results_csv(rows, paths["results"])
    write_summary_csv(summary, paths["summary_csv"])
    write_summary_json(summary, paths["summary_json"])
    return paths


# ---------------------------------------------------------------------------
# file ingestion


def read_series_file(path) -> np.ndarray:
    """One numeric value per line; blank lines and '#' comments skipped."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            tokens = [t for t in text.split(",") if t.strip()]
            if len(tokens) != 1:
                raise ValueError(f"{path}: line {lineno}: expected one value, got {text!r}")
            try:
                values.append(float(tokens[0]))
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: could not parse {text!r} as a number"
                ) from None
    if not values:
        raise ValueError(f"{path}: no numeric data")
    return np.asarray(values, dtype=np.float64)


def estimate_from_file(path, estimator_id: str, p=None, b: int = None,
                       kappa: float = 1.0, alpha="hill") -> EstimateReport:
    """Run one estimator on a series file.

    The built-in estimator ids fix their own norm exponent, so `p` is
    accepted for interface symmetry only (validated, otherwise unused).
    The alpha mode must be a number or hill[:k_tail]; there is no model
    here, so "oracle" is rejected.
    """
    if b is None or b < 1:
        raise ValueError("block length b is required and must be positive")
    if p is not None:
        as_p(p)
    series = read_series_file(path)
    entry = get_estimator(estimator_id)
    mode = parse_alpha_mode(alpha)
    if mode.kind == "oracle":
        raise ValueError("file input has no model; use a numeric alpha or hill:<k_tail>")
    frame = partition(series, b)
    k = default_k(len(series), b, kappa)
    alpha_value = resolve_alpha(mode, series) if entry.needs_alpha else None
    return entry.run(frame, alpha_value, k)


# ---------------------------------------------------------------------------
# closed-form report


def oracle_report(model: Model, alpha: Optional[float] = None, p_list=None,
                  serial_lags: int = 4, tol: float = 1e-12) -> dict:
    """Closed-form and telescoping constants for a linear/AR(1) model:
    c(p) over a p grid, the extremal index, serial-dependence values
    g_h, and the positive-sum walk constant when alpha >= 1."""
    noise = noise_of(model)
    if alpha is None:
        alpha = noise.alpha
    coeffs = model_coefficients(model, tol=tol)
    if p_list is None:
        p_list = (0.5, 1.0, alpha, 2.0, INF)
    seen = []
    for p in p_list:
        pe = as_p(p)
        if all(pe != q for q in seen):
            seen.append(pe)
    cluster = [{"p": str(pe),
                "closed_form": cluster_constant_linear(coeffs, alpha, pe),
                "telescoping": cluster_constant_telescoping(coeffs, alpha, pe)}
               for pe in seen]
    report = {
        "alpha": float(alpha),
        "coefficients": len(coeffs),
        "theta": cluster_constant_linear(coeffs, alpha, INF),
        "cluster_constants": cluster,
        "serial": {h: serial_dependence_oracle_linear(coeffs, alpha, h)
                   for h in range(serial_lags)},
    }
    if alpha >= 1.0:
        report["supwalk"] = supwalk_constant_oracle_linear(
            coeffs, alpha, noise.positive_prob)
    else:
        report["supwalk"] = None
    return report


def format_oracle_report(report: dict) -> str:
    lines = [f"alpha = {report['alpha']:g}   (coefficients kept: {report['coefficients']})",
             f"theta = c(inf) = {report['theta']:.6f}",
             "",
             f"{'p':>6}  {'closed_form':>14}  {'telescoping':>14}"]
    for row in report["cluster_constants"]:
        lines.append(f"{row['p']:>6}  {row['closed_form']:>14.10f}  "
                     f"{row['telescoping']:>14.10f}")
    lines.append("")
    serial = "  ".join(f"g_{h}={v:.6f}" for h, v in sorted(report["serial"].items()))
    lines.append(f"serial: {serial}")
    if report["supwalk"] is not None:
        lines.append(f"supwalk constant = {report['supwalk']:.6f}")
    return "\n".join(lines)
