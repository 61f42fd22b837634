"""Monte Carlo experiment runner: point estimates, coverage, normality.

Each replicate draws one base cloud from its private generator (derived
solely from the master seed and the replicate index, so worker scheduling
never changes results) and evaluates every estimator on nested censored
views of that same cloud: the delta = 0.5 view removes a subset of the
points removed by the delta = 1 view.  Aggregation is order-independent.
"""

from __future__ import annotations

import concurrent.futures
import csv
import functools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .constraints import Constraint, constraint_from_spec
from .errors import (
    ArityExceedsCloud,
    ConfigInvalid,
    DegenerateInterval,
    EmptySample,
    InsufficientExtremes,
    MissingXi,
    UnsupportedRegime,
)
from .estimation import (
    alpha_hat,
    confidence_interval,
    geometric_constants,
    layered_hill,
    normalized_statistic,
    select_regime,
)
from .order_stats import top_tuple_values
from .samplers import (
    FAMILIES,
    RadialModel,
    censor_count,
    remove_top_extremes,
    replicate_rng,
    sample_cloud,
)

MIX_LABEL = "Mix"


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation scenario: model, cut-off, estimators, censoring grid."""

    model: RadialModel
    n: int
    m: int
    beta: Optional[float]
    estimators: tuple[tuple[int, Constraint], ...]
    deltas: tuple[float, ...]
    replications: int = 500
    gamma: float = 0.95
    master_seed: int = 0
    true_alpha: Optional[float] = None
    mix_weights: Optional[tuple[float, float]] = None
    poissonize: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ConfigInvalid("n must be >= 1")
        if self.m < 1:
            raise ConfigInvalid("m must be >= 1")
        if self.replications < 0:
            raise ConfigInvalid("replications must be non-negative")
        if not 0 < self.gamma < 1:
            raise ConfigInvalid("gamma must lie in (0,1)")
        if not self.estimators:
            raise ConfigInvalid("at least one estimator is required")
        if any(d < 0 for d in self.deltas):
            raise ConfigInvalid("deltas must be non-negative")
        if self.mix_weights is not None:
            if len(self.estimators) != 2:
                raise ConfigInvalid("mix weights require exactly two estimators")
            if abs(sum(self.mix_weights) - 1.0) > 1e-9:
                raise ConfigInvalid("mix weights must sum to 1")

    @property
    def effective_beta(self) -> float:
        if self.beta is not None:
            return self.beta
        return math.log(self.m) / math.log(self.n) if self.n > 1 else 0.5

    @property
    def effective_mix_weights(self) -> Optional[tuple[float, float]]:
        if self.mix_weights is not None:
            return self.mix_weights
        return (0.5, 0.5) if len(self.estimators) == 2 else None


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Build a config from a JSON-style mapping with snake_case keys."""
    try:
        model_doc = dict(doc["model"])
        family = model_doc["family"]
        if family not in FAMILIES:
            raise ConfigInvalid(f"unknown model family {family!r}")
        model = RadialModel(family=family, alpha=float(model_doc["alpha"]), d=int(model_doc["d"]))
        n = int(doc["n"])
        beta = doc.get("beta")
        if "m" in doc and doc["m"] is not None:
            m = int(doc["m"])
        elif beta is not None:
            if not 0 < float(beta) < 1:
                raise ConfigInvalid("beta must lie in (0,1)")
            m = int(math.floor(n ** float(beta) + 0.5))
        else:
            raise ConfigInvalid("either m or beta is required")
        estimators = []
        for e in doc["estimators"]:
            c = constraint_from_spec(e)
            estimators.append((c.arity, c))
        mix = doc.get("mix_weights")
        return ExperimentConfig(
            model=model,
            n=n,
            m=m,
            beta=None if beta is None else float(beta),
            estimators=tuple(estimators),
            deltas=tuple(float(x) for x in doc.get("deltas", (0.0,))),
            replications=int(doc.get("replications", 500)),
            gamma=float(doc.get("gamma", 0.95)),
            master_seed=int(doc.get("master_seed", 0)),
            true_alpha=(
                float(doc["true_alpha"]) if doc.get("true_alpha") is not None
                else float(model_doc["alpha"])
            ),
            mix_weights=None if mix is None else (float(mix[0]), float(mix[1])),
            poissonize=bool(doc.get("poissonize", False)),
        )
    except ConfigInvalid:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad experiment config: {exc}") from exc


@dataclass(frozen=True)
class CellResult:
    """Per-(estimator, delta, replicate) outcome."""

    H: Optional[float] = None
    alpha: Optional[float] = None
    ci: Optional[tuple[float, float]] = None
    statistic: Optional[float] = None
    error: Optional[str] = None


@functools.lru_cache(maxsize=32)
def _gc_cached(constraint: Constraint, d: int):
    return geometric_constants(constraint, d)


def run_replicate(config: ExperimentConfig, stream_id: int) -> dict:
    """Evaluate every (estimator, delta) cell on one replicate's cloud."""
    rng = replicate_rng(config.master_seed, stream_id)
    base = sample_cloud(config.model, config.n, rng, config.poissonize)
    d = config.model.d
    beta = config.effective_beta
    out = {}
    for delta in config.deltas:
        censored = remove_top_extremes(base, censor_count(delta, config.m))
        for k, constraint in config.estimators:
            label = f"L{k}"
            try:
                stream = top_tuple_values(censored, constraint, config.m**k)
                H = layered_hill(stream, config.m)
                a_est = alpha_hat(H, k, d)
            except (InsufficientExtremes, ArityExceedsCloud) as exc:
                out[(label, delta)] = CellResult(error=type(exc).__name__)
                continue
            try:
                ci = confidence_interval(H, k, d, config.m, config.gamma)
            except DegenerateInterval:
                ci = None
            statistic = None
            if config.true_alpha is not None:
                try:
                    regime = select_regime(beta, k, d, a_est)
                    statistic = normalized_statistic(
                        H, k, d, config.m,
                        alpha_center=config.true_alpha,
                        alpha_for_variance=a_est,
                        regime=regime,
                        gc=_gc_cached(constraint, d),
                    )
                except (UnsupportedRegime, MissingXi):
                    statistic = None
            out[(label, delta)] = CellResult(H=H, alpha=a_est, ci=ci, statistic=statistic)
    return out


def _collect(config: ExperimentConfig, workers: int = 1) -> list[dict]:
    """All replicate results, ordered by stream id regardless of scheduling."""
    ids = range(config.replications)
    if workers <= 1:
        return [run_replicate(config, sid) for sid in ids]
    results = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(run_replicate, config, sid): sid for sid in ids}
        for fut in concurrent.futures.as_completed(futures):
            results[futures[fut]] = fut.result()
    return [results[sid] for sid in ids]


@dataclass
class ExperimentReport:
    """Aggregated simulation results plus per-replicate raw cells."""

    config: ExperimentConfig
    rows: list = field(default_factory=list)
    replicates: list = field(default_factory=list)

    def row(self, estimator: str, delta: float) -> dict:
        for r in self.rows:
            if r["estimator"] == estimator and r["delta"] == delta:
                return r
        raise KeyError((estimator, delta))

    def write_report_csv(self, path):
        _write_csv(
            path,
            ["estimator", "k", "delta", "mean_alpha", "rmse", "excluded"],
            [
                [r["estimator"], r["k"], r["delta"], r["mean_alpha"], r["rmse"], r["excluded"]]
                for r in self.rows
            ],
        )

    def write_coverage_csv(self, path):
        _write_csv(
            path,
            ["estimator", "k", "delta", "coverage"],
            [
                [r["estimator"], r["k"], r["delta"], r["coverage"]]
                for r in self.rows
                if r["estimator"] != MIX_LABEL
            ],
        )

    def write_samples_csv(self, path):
        rows = []
        for sid, rep in enumerate(self.replicates):
            for (label, delta), cell in sorted(rep.items()):
                if cell.statistic is not None:
                    k = int(label[1:])
                    rows.append([label, k, delta, sid, cell.statistic])
        _write_csv(path, ["estimator", "k", "delta", "stream_id", "statistic"], rows)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    """Run all replicates and aggregate mean, RMSE, coverage per cell.

    Replicates that fail with InsufficientExtremes are excluded from
    aggregation and reported through the ``excluded`` count.
    """
    replicates = _collect(config, workers)
    report = ExperimentReport(config=config, replicates=replicates)
    true_alpha = config.true_alpha
    labels = [f"L{k}" for k, _ in config.estimators]
    for delta in config.deltas:
        for (k, _), label in zip(config.estimators, labels):
            cells = [rep[(label, delta)] for rep in replicates]
            report.rows.append(_aggregate(label, k, delta, cells, true_alpha))
        weights = config.effective_mix_weights
        if weights is not None:
            mix_cells = []
            for rep in replicates:
                a, b = rep[(labels[0], delta)], rep[(labels[1], delta)]
                if a.error or b.error:
                    mix_cells.append(CellResult(error=a.error or b.error))
                else:
                    mix_cells.append(
                        CellResult(alpha=weights[0] * a.alpha + weights[1] * b.alpha)
                    )
            # a single k column cannot carry the pair of arities; 0 marks the mixture
            report.rows.append(_aggregate(MIX_LABEL, 0, delta, mix_cells, true_alpha))
    return report


def _aggregate(label, k, delta, cells, true_alpha):
    ok = [c for c in cells if c.error is None]
    excluded = len(cells) - len(ok)
    alphas = np.asarray([c.alpha for c in ok], dtype=np.float64)
    row = {
        "estimator": label,
        "k": k,
        "delta": delta,
        "mean_alpha": None,
        "rmse": None,
        "coverage": None,
        "excluded": excluded,
    }
    if len(alphas) == 0:
        return row
    row["mean_alpha"] = float(alphas.mean())
    if true_alpha is not None:
        rmse = float(np.sqrt(np.mean((alphas - true_alpha) ** 2)))
        assert rmse**2 + 1e-9 >= (row["mean_alpha"] - true_alpha) ** 2
        row["rmse"] = rmse
        covered = [
            c for c in ok if c.ci is not None and c.ci[0] <= true_alpha <= c.ci[1]
        ]
        row["coverage"] = len(covered) / len(ok)
    return row


def coverage_experiment(config: ExperimentConfig, workers: int = 1) -> dict:
    """Coverage rate of the level-gamma interval per (estimator, delta)."""
    report = run_experiment(config, workers)
    return {
        (r["estimator"], r["delta"]): r["coverage"]
        for r in report.rows
        if r["estimator"] != MIX_LABEL
    }


def export_normalized_samples(config: ExperimentConfig, path, workers: int = 1) -> ExperimentReport:
    """CSV of normalized statistics, one row per (estimator, delta, replicate)."""
    report = run_experiment(config, workers)
    report.write_samples_csv(path)
    return report


def ks_statistic(samples) -> float:
    """Two-sided Kolmogorov-Smirnov distance to the standard normal."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(x)
    if n == 0:
        raise EmptySample("ks_statistic needs at least one sample")
    cdf = ndtr(x)
    d_plus = float(np.max(np.arange(1, n + 1) / n - cdf))
    d_minus = float(np.max(cdf - np.arange(0, n) / n))
    return max(d_plus, d_minus)
