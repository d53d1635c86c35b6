"""Experiment configuration, sweep runners, CSV emission, and validation.

Every output table embeds its fully resolved configuration in header
comments, so any row is reproducible from the file alone. Sweep points are
independent work items dispatched to an optional worker pool; a single writer
emits them in sweep order, which keeps output bytes identical for any worker
count.
"""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .analytic import (
    eval_hop1_order_avg,
    eval_hop2_order_avg,
    eval_p12_breakdown,
    eval_throughput,
    ratio_cdf,
)
from .channel import ChannelParams, RandomSeed
from .montecarlo import empirical_cdf, ratio_statistics, simulate
from .optimizer import budget_for_scheme, optimize
from .power import PowerAllocation, db_to_linear
from .selection import Scheme


class ConfigError(ValueError):
    """Invalid experiment configuration."""


DEFAULT_SCHEMES = (Scheme.IFD_MRRS, Scheme.MAX_LINK_RATIO, Scheme.MAX_MIN_RATIO)
DEFAULT_RATIO_SWEEP = {"axis": "ratio", "points": 64, "min": 1.0 / 64.0, "max": 64.0}
DEFAULT_SNR_SWEEP = {"axis": "snr", "values_db": [0.0, 5.0, 10.0, 15.0, 20.0]}
DEFAULT_RELAY_SWEEP = {"axis": "relays", "values": [2, 3, 4, 5, 6]}

EVALUATOR_CHOICES = ("mc", "analytic", "both")


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment parameters."""

    schemes: tuple
    num_relays: int = 3
    gamma_sr: float = 2.0
    gamma_rd: float = 2.0
    gamma_se: float = 2.0
    gamma_re: float = 2.0
    snr_db: float = 10.0
    slots: int = 100_000
    seed: int = 20260808
    evaluator: str = "both"
    sweep: Optional[dict] = None

    def channel_params(self, num_relays: Optional[int] = None) -> ChannelParams:
        return ChannelParams(
            num_relays=self.num_relays if num_relays is None else num_relays,
            gamma_sr=self.gamma_sr,
            gamma_rd=self.gamma_rd,
            gamma_se=self.gamma_se,
            gamma_re=self.gamma_re,
        )

    def random_seed(self) -> RandomSeed:
        return RandomSeed(seed=self.seed)

    @property
    def snr_linear(self) -> float:
        return db_to_linear(self.snr_db)

    def to_dict(self) -> dict:
        d = {
            "schemes": [s.value for s in self.schemes],
            "num_relays": self.num_relays,
            "gamma_sr": self.gamma_sr,
            "gamma_rd": self.gamma_rd,
            "gamma_se": self.gamma_se,
            "gamma_re": self.gamma_re,
            "snr_db": self.snr_db,
            "slots": self.slots,
            "seed": self.seed,
            "evaluator": self.evaluator,
        }
        if self.sweep is not None:
            d["sweep"] = self.sweep
        return d


_CONFIG_KEYS = {
    "schemes",
    "num_relays",
    "gamma_sr",
    "gamma_rd",
    "gamma_se",
    "gamma_re",
    "snr_db",
    "slots",
    "seed",
    "evaluator",
    "sweep",
}


def load_config(path: Optional[str] = None, **overrides) -> ExperimentConfig:
    """Build a config from defaults, then a JSON file, then explicit overrides."""
    data: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if "schemes" in data:
        try:
            data["schemes"] = tuple(Scheme(s) for s in data["schemes"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    data.setdefault("schemes", DEFAULT_SCHEMES)
    try:
        config = ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    _validate_config(config)
    return config


def _validate_config(config: ExperimentConfig):
    if len(config.schemes) == 0:
        raise ConfigError("scheme list must not be empty")
    if config.slots < 1:
        raise ConfigError("slots must be >= 1")
    if config.evaluator not in EVALUATOR_CHOICES:
        raise ConfigError(f"evaluator must be one of {EVALUATOR_CHOICES}")
    if config.evaluator == "analytic":
        bad = [s.value for s in config.schemes if s is not Scheme.IFD_MRRS]
        if bad:
            raise ConfigError(f"the analytic evaluator does not cover: {bad}")
    if Scheme.IFD_MRRS in config.schemes and config.num_relays < 2:
        raise ConfigError("ifd-mrrs needs at least two relays")
    config.channel_params()  # surfaces invalid channel parameters


def _sweep_spec(config: ExperimentConfig, axis: str, default: dict) -> dict:
    spec = config.sweep if config.sweep is not None else default
    if spec.get("axis") != axis:
        raise ConfigError(f"this command sweeps '{axis}' but the config sweeps {spec.get('axis')!r}")
    return spec


def ratio_grid(config: ExperimentConfig) -> np.ndarray:
    spec = _sweep_spec(config, "ratio", DEFAULT_RATIO_SWEEP)
    if "values" in spec:
        grid = np.asarray(spec["values"], dtype=float)
    else:
        grid = np.geomspace(spec["min"], spec["max"], int(spec["points"]))
    if len(grid) < 1 or np.any(grid <= 0):
        raise ConfigError("ratio grid must be positive and non-empty")
    return grid


def snr_grid_db(config: ExperimentConfig) -> np.ndarray:
    spec = _sweep_spec(config, "snr", DEFAULT_SNR_SWEEP)
    if "values_db" in spec:
        grid = np.asarray(spec["values_db"], dtype=float)
    else:
        grid = np.linspace(spec["min_db"], spec["max_db"], int(spec["points"]))
    if len(grid) < 1:
        raise ConfigError("snr grid must be non-empty")
    return grid


def relay_grid(config: ExperimentConfig) -> list[int]:
    spec = _sweep_spec(config, "relays", DEFAULT_RELAY_SWEEP)
    values = [int(v) for v in spec["values"]]
    if len(values) < 1 or min(values) < 1:
        raise ConfigError("relay grid must contain positive integers")
    return values


# ---------------------------------------------------------------------------
# sweep execution


def _run_points(fn, tasks, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with multiprocessing.Pool(processes=workers) as pool:
        return pool.map(fn, tasks, chunksize=1)


def _ratio_point(task) -> dict:
    scheme, params, snr_linear, ratio, slots, seed, want_mc, want_analytic = task
    budget = budget_for_scheme(scheme, snr_linear)
    alloc = budget.allocation_for_ratio(ratio, params.num_relays)
    row = {
        "scheme": scheme.value,
        "ratio": ratio,
        "source_power": alloc.source_power,
        "relay_power": alloc.relay_power,
        "mc_throughput": None,
        "mc_stderr": None,
        "analytic_throughput": None,
    }
    if want_mc:
        est = simulate(scheme, params, alloc, slots, seed)
        row["mc_throughput"] = est.throughput
        row["mc_stderr"] = est.throughput_stderr
    if want_analytic and scheme is Scheme.IFD_MRRS:
        row["analytic_throughput"] = eval_throughput(params, alloc).throughput
    return row


RATIO_COLUMNS = (
    "scheme",
    "ratio",
    "source_power",
    "relay_power",
    "mc_throughput",
    "mc_stderr",
    "analytic_throughput",
)


def run_sweep_ratio(config: ExperimentConfig, workers: int = 1):
    """Throughput of each scheme across the source/relay power-ratio grid."""
    grid = ratio_grid(config)
    params = config.channel_params()
    seed = config.random_seed()
    want_mc = config.evaluator in ("mc", "both")
    want_analytic = config.evaluator in ("analytic", "both")
    tasks = [
        (scheme, params, config.snr_linear, float(r), config.slots, seed, want_mc, want_analytic)
        for scheme in config.schemes
        for r in grid
    ]
    rows = _run_points(_ratio_point, tasks, workers)
    return RATIO_COLUMNS, rows


def _optimize_point(task) -> dict:
    scheme, params, snr_db, slots, seed, want_mc, want_analytic, axis_name, axis_value = task
    budget = budget_for_scheme(scheme, db_to_linear(snr_db))
    row = {
        "scheme": scheme.value,
        axis_name: axis_value,
        "mc_c_max": None,
        "mc_best_ratio": None,
        "mc_source_power": None,
        "mc_relay_power": None,
        "analytic_c_max": None,
        "analytic_best_ratio": None,
    }
    if want_mc:
        res = optimize(scheme, params, budget, evaluator="mc", slots=slots, seed=seed)
        row.update(
            mc_c_max=res.c_max,
            mc_best_ratio=res.best_ratio,
            mc_source_power=res.best_alloc.source_power,
            mc_relay_power=res.best_alloc.relay_power,
        )
    if want_analytic and scheme is Scheme.IFD_MRRS:
        res = optimize(scheme, params, budget, evaluator="analytic")
        row.update(analytic_c_max=res.c_max, analytic_best_ratio=res.best_ratio)
    return row


SNR_COLUMNS = (
    "scheme",
    "snr_db",
    "mc_c_max",
    "mc_best_ratio",
    "mc_source_power",
    "mc_relay_power",
    "analytic_c_max",
    "analytic_best_ratio",
)

RELAY_COLUMNS = (
    "scheme",
    "num_relays",
    "mc_c_max",
    "mc_best_ratio",
    "mc_source_power",
    "mc_relay_power",
    "analytic_c_max",
    "analytic_best_ratio",
)


def run_sweep_snr(config: ExperimentConfig, workers: int = 1):
    """Optimized throughput of each scheme across the SNR grid."""
    grid = snr_grid_db(config)
    params = config.channel_params()
    seed = config.random_seed()
    want_mc = config.evaluator in ("mc", "both")
    want_analytic = config.evaluator in ("analytic", "both")
    tasks = [
        (scheme, params, float(s), config.slots, seed, want_mc, want_analytic, "snr_db", float(s))
        for scheme in config.schemes
        for s in grid
    ]
    rows = _run_points(_optimize_point, tasks, workers)
    return SNR_COLUMNS, rows


def run_sweep_relays(config: ExperimentConfig, workers: int = 1):
    """Optimized throughput of each scheme across relay counts at fixed SNR."""
    grid = relay_grid(config)
    if Scheme.IFD_MRRS in config.schemes and min(grid) < 2:
        raise ConfigError("relay grid must stay >= 2 while ifd-mrrs is requested")
    seed = config.random_seed()
    want_mc = config.evaluator in ("mc", "both")
    want_analytic = config.evaluator in ("analytic", "both")
    tasks = [
        (
            scheme,
            config.channel_params(num_relays=k),
            config.snr_db,
            config.slots,
            seed,
            want_mc,
            want_analytic,
            "num_relays",
            k,
        )
        for scheme in config.schemes
        for k in grid
    ]
    rows = _run_points(_optimize_point, tasks, workers)
    return RELAY_COLUMNS, rows


# ---------------------------------------------------------------------------
# validation of the closed forms against their Monte Carlo oracles


def balanced_allocation(config: ExperimentConfig) -> PowerAllocation:
    """Equal source and relay powers on the full-slot budget boundary."""
    p = config.snr_linear / (1.0 + config.num_relays)
    return PowerAllocation(source_power=p, relay_power=p)


def run_validate(config: ExperimentConfig) -> dict:
    """Compare every closed form against its Monte Carlo estimate.

    A failing quantity marks the report failed but never aborts the rest of
    the run. Tolerances combine a relative floor with a multiple of the MC
    standard error so verdicts are stable across seeds.
    """
    params = config.channel_params()
    if params.num_relays < 2:
        raise ConfigError("validation needs at least two relays")
    alloc = balanced_allocation(config)
    seed = config.random_seed()
    checks = []

    def record(name, analytic_value, mc_value, tolerance, error=None):
        entry = {
            "quantity": name,
            "analytic": analytic_value,
            "mc": mc_value,
            "tolerance": tolerance,
            "passed": False,
        }
        if error is not None:
            entry["error"] = error
        elif analytic_value is not None and mc_value is not None:
            entry["passed"] = bool(abs(analytic_value - mc_value) <= tolerance)
        checks.append(entry)

    stats = ratio_statistics(params, alloc, config.slots, seed)

    rate_evals = {
        "e_csr1": ("hop1_best", lambda: eval_hop1_order_avg("best", params, alloc)),
        "e_csr2": ("hop1_second", lambda: eval_hop1_order_avg("second", params, alloc)),
        "e_crd1": ("hop2_best", lambda: eval_hop2_order_avg("best", params, alloc)),
        "e_crd2": ("hop2_second", lambda: eval_hop2_order_avg("second", params, alloc)),
    }
    for name, (quantity, fn) in rate_evals.items():
        mc_value = stats.rate_means[quantity]
        tolerance = max(0.01 * abs(mc_value), 4.0 * stats.rate_stderrs[quantity])
        try:
            record(name, fn(), mc_value, tolerance)
        except Exception as exc:  # a failed quantity must not stop the run
            record(name, None, mc_value, tolerance, error=str(exc))

    record(
        "p_s",
        1.0 / params.num_relays,
        stats.p_s_hat,
        max(4.0 * stats.p_s_stderr, 1e-9),
    )

    p12_split = None
    try:
        p12_split = eval_p12_breakdown(params, alloc)
        record("p12", p12_split.total, stats.p12, 0.02)
    except Exception as exc:
        record("p12", None, stats.p12, 0.02, error=str(exc))

    for quantity in ("hop1_best", "hop1_second", "hop2_best", "hop2_second"):
        try:
            emp = empirical_cdf(quantity, params, alloc, config.slots, seed)
            above = emp.samples[emp.samples >= 1.0]
            zs = np.unique(np.quantile(above, np.linspace(0.02, 0.98, 40)))
            zs = np.concatenate([[1.0], zs])
            sup = float(np.max(np.abs(ratio_cdf(quantity, zs, params, alloc) - emp(zs))))
            record(f"cdf_sup_{quantity}", 0.0, sup, 0.01)
        except Exception as exc:
            record(f"cdf_sup_{quantity}", None, None, 0.01, error=str(exc))

    report = {
        "config": config.to_dict(),
        "allocation": {
            "source_power": alloc.source_power,
            "relay_power": alloc.relay_power,
        },
        "checks": checks,
        "all_pass": all(c["passed"] for c in checks),
    }
    if p12_split is not None:
        report["p12_split"] = {
            "below_one": p12_split.below_one,
            "above_one": p12_split.above_one,
            "mc_below_one": stats.p12_below_one,
        }
    return report


# ---------------------------------------------------------------------------
# CSV emission


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_csv(path: str, command: str, config: ExperimentConfig, columns, rows):
    """Write rows with the resolved config embedded as header comments.

    Header lines start with '#'; the body below them is a plain CSV whose
    bytes depend only on the config and seed, never on worker count.
    """
    meta = {
        "tool": f"relaysec {__version__}",
        "command": command,
        "config": config.to_dict(),
    }
    lines = [f"# {key} = {json.dumps(value, sort_keys=True)}" for key, value in meta.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in columns))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def csv_body(path: str) -> str:
    """Non-comment part of an output file, the unit of reproducibility."""
    with open(path, "r", encoding="utf-8") as fh:
        return "".join(line for line in fh if not line.startswith("#"))
