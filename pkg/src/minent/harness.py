"""Experiment orchestration: source batteries, estimator sweeps, and CSV
reports with MSE/MPE aggregates."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .estimators import estimate_sequence
from .sources import RNG_ALGORITHM, SourceSpec, sample, true_min_entropy

__all__ = [
    "EstimatorSpec",
    "SourceBattery",
    "ExperimentConfig",
    "TrialRow",
    "AggregateRow",
    "ExperimentReport",
    "trial_seed",
    "run_experiment",
    "write_trials_csv",
    "write_aggregates_csv",
    "write_report",
    "TRIAL_COLUMNS",
    "AGGREGATE_COLUMNS",
]

TRIAL_COLUMNS = [
    "family", "param", "seed", "true_h", "estimator", "alpha", "K",
    "estimate", "solved", "ci_applied", "wall_ms",
]
AGGREGATE_COLUMNS = ["family", "param", "estimator", "N", "mse", "mpe_pct", "na_count"]


@dataclass(frozen=True)
class EstimatorSpec:
    method: str  # "compression" | "coron" | "kim" | "collision"
    alpha: float | None = None
    q: int | None = None
    apply_ci: bool = True
    c: float | None = None

    @property
    def label(self) -> str:
        """Aggregate-key name; kim orders are disambiguated as e.g. kim2."""
        if self.method == "kim":
            return f"kim{(2.0 if self.alpha is None else self.alpha):g}"
        return self.method


@dataclass(frozen=True)
class SourceBattery:
    family: str
    params: tuple
    trials: int
    n_blocks: int = 1_000_000


@dataclass(frozen=True)
class ExperimentConfig:
    batteries: tuple
    estimators: tuple
    l: int = 6
    base_seed: int = 0


@dataclass(frozen=True)
class TrialRow:
    family: str
    param: float
    seed: int
    true_h: float
    estimator: str
    alpha: float | None
    k: int
    estimate: float
    solved: bool
    ci_applied: bool
    wall_ms: float


@dataclass(frozen=True)
class AggregateRow:
    family: str
    param: float
    estimator: str
    n: int
    mse: float
    mpe_pct: float | None  # None when every trial had zero true entropy
    na_count: int


@dataclass(frozen=True)
class ExperimentReport:
    trials: tuple
    aggregates: tuple
    rng_algorithm: str = RNG_ALGORITHM


def trial_seed(base_seed: int, battery_idx: int, param_idx: int, trial_idx: int) -> int:
    """Per-trial seed derived deterministically from the base seed, so a
    parallel runner would produce the identical report."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(battery_idx, param_idx, trial_idx))
    return int(ss.generate_state(1, np.uint64)[0])


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Generate every source of the battery, run every estimator on it, and
    aggregate MSE and MPE per (family, param, estimator)."""
    rows: list[TrialRow] = []
    for bi, battery in enumerate(config.batteries):
        for pi, param in enumerate(battery.params):
            for ti in range(battery.trials):
                seed = trial_seed(config.base_seed, bi, pi, ti)
                spec = SourceSpec(battery.family, float(param), l=config.l,
                                  n_blocks=battery.n_blocks, seed=seed)
                blocks = sample(spec)
                truth = true_min_entropy(spec).per_bit_min_entropy
                for est in config.estimators:
                    alpha = 2.0 if est.alpha is None else float(est.alpha)
                    start = time.perf_counter()
                    result = estimate_sequence(
                        blocks, est.method, config.l, alpha=alpha, q=est.q,
                        apply_ci=est.apply_ci, c=est.c,
                    )
                    wall_ms = (time.perf_counter() - start) * 1e3
                    rows.append(TrialRow(
                        family=battery.family, param=float(param), seed=seed,
                        true_h=truth, estimator=est.method, alpha=result.alpha,
                        k=battery.n_blocks, estimate=result.per_bit,
                        solved=result.solved, ci_applied=result.ci_applied,
                        wall_ms=wall_ms,
                    ))
    return ExperimentReport(trials=tuple(rows), aggregates=tuple(_aggregate(rows)))


def _label(row: TrialRow) -> str:
    if row.estimator == "kim":
        return f"kim{(2.0 if row.alpha is None else row.alpha):g}"
    return row.estimator


def _aggregate(rows) -> list[AggregateRow]:
    groups: dict[tuple, list[TrialRow]] = {}
    for row in rows:
        groups.setdefault((row.family, row.param, _label(row)), []).append(row)
    out = []
    for (family, param, label), members in groups.items():
        errors = [(r.true_h - r.estimate) for r in members]
        mse = float(np.mean([e * e for e in errors]))
        valid = [(r.true_h - r.estimate) / r.true_h for r in members if r.true_h != 0.0]
        na = len(members) - len(valid)
        mpe = float(100.0 * np.mean(valid)) if valid else None
        out.append(AggregateRow(family, param, label, len(members), mse, mpe, na))
    return out


def _fmt(value) -> str:
    if value is None:
        return "na"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trials_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIAL_COLUMNS)
        for r in report.trials:
            writer.writerow([
                r.family, _fmt(r.param), r.seed, _fmt(r.true_h), r.estimator,
                "" if r.alpha is None else _fmt(r.alpha), r.k, _fmt(r.estimate),
                _fmt(r.solved), _fmt(r.ci_applied), _fmt(round(r.wall_ms, 3)),
            ])


def write_aggregates_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_COLUMNS)
        for a in report.aggregates:
            writer.writerow([
                a.family, _fmt(a.param), a.estimator, a.n,
                _fmt(a.mse), _fmt(a.mpe_pct), a.na_count,
            ])


def write_report(report: ExperimentReport, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trials = out / "trials.csv"
    aggregates = out / "aggregates.csv"
    write_trials_csv(report, trials)
    write_aggregates_csv(report, aggregates)
    return trials, aggregates
