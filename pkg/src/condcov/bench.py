"""End-to-end estimation pipeline and the Monte Carlo benchmark grid."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .estimator import (
    CondCovEstimate,
    Sample,
    band,
    center,
    estimate_matrix,
    frobenius_risk,
    select_m,
    split,
)
from .kernels import KernelSpec, get_kernel, plan_bandwidths
from .models import ScenarioConfig, generate, true_sigma

__all__ = [
    "PipelineOptions",
    "estimate_sigma",
    "BenchCell",
    "BenchResult",
    "monte_carlo_bench",
    "replication_seeds",
]

BENCH_COLUMNS = ["model", "p", "n", "alpha", "mean_error", "std_error", "replications", "truth_mode"]


@dataclass(frozen=True)
class PipelineOptions:
    beta: float = 2.0
    alpha: float = 0.5
    kernel: str = "epanechnikov"
    truncate: bool = True
    quantile_b: bool = True
    banded: bool = True


def estimate_sigma(sample: Sample, seed: int, opts: PipelineOptions = PipelineOptions(),
                   kernel: KernelSpec | None = None) -> CondCovEstimate:
    """center -> split -> plan -> estimate -> (optionally) band with select_m."""
    kernel = kernel or get_kernel(opts.kernel)
    sp = split(center(sample), seed)
    plan = plan_bandwidths(2 * sp.s1.n, opts.beta)
    est = estimate_matrix(sp, plan, kernel, truncate=opts.truncate, quantile_b=opts.quantile_b)
    if opts.banded:
        m = select_m(plan.n1, opts.alpha, est.p, opts.beta)
        est = band(est, m)
    return est


def replication_seeds(base_seed: int, cell: int, replication: int) -> tuple[int, int]:
    """Independent (data, split) seeds for one replication of one grid cell."""
    ss = np.random.SeedSequence([base_seed, cell, replication])
    data_seed, split_seed = ss.generate_state(2)
    return int(data_seed), int(split_seed)


@dataclass
class BenchCell:
    model: str
    p: int
    n: int
    alpha: float
    mean_error: float
    std_error: float
    replications: int
    truth_mode: str
    errors: list[float] = field(default_factory=list, repr=False)
    failure: str | None = None


@dataclass
class BenchResult:
    cells: list[BenchCell]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(BENCH_COLUMNS)
        for c in self.cells:
            w.writerow([c.model, c.p, c.n, repr(float(c.alpha)), repr(c.mean_error),
                        repr(c.std_error), c.replications, c.truth_mode])
        return buf.getvalue()

    def lookup(self, model: str, p: int, n: int, alpha: float, truth_mode: str) -> BenchCell:
        for c in self.cells:
            if (c.model, c.p, c.n, c.truth_mode) == (model, p, n, truth_mode) and math.isclose(c.alpha, alpha):
                return c
        raise KeyError((model, p, n, alpha, truth_mode))

    @property
    def failures(self) -> list[BenchCell]:
        return [c for c in self.cells if c.failure is not None]


def monte_carlo_bench(grid: list[ScenarioConfig], replications: int, beta: float = 2.0,
                      truth_modes: tuple[str, ...] = ("oracle",),
                      opts: PipelineOptions | None = None) -> BenchResult:
    """Average normalised Frobenius error of the banded estimator per grid cell.

    Each config's ``seed`` is the base seed; replication r of cell c draws
    its data and split seeds from SeedSequence([seed, c, r]), so cells are
    independent of evaluation order. One row per (cell, truth mode).
    """
    if replications < 1:
        raise ValueError(f"replications must be >= 1, got {replications}")
    opts = opts or PipelineOptions(beta=beta)
    kernel = get_kernel(opts.kernel)
    cells = []
    for ci, cfg in enumerate(grid):
        truths = {mode: true_sigma(cfg, mode) for mode in truth_modes}
        errs = {mode: [] for mode in truth_modes}
        failure = None
        cell_opts = replace(opts, beta=beta, alpha=cfg.alpha)
        for r in range(replications):
            data_seed, split_seed = replication_seeds(cfg.seed, ci, r)
            try:
                sample = generate(replace(cfg, seed=data_seed))
                est = estimate_sigma(sample, split_seed, cell_opts, kernel)
                if not np.all(np.isfinite(est.sigma)):
                    raise FloatingPointError("non-finite entries in estimate")
            except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
                failure = f"replication {r}: {exc}"
                break
            for mode in truth_modes:
                errs[mode].append(frobenius_risk(est.sigma, truths[mode]))
        for mode in truth_modes:
            e = np.array(errs[mode])
            if failure is not None or e.size == 0:
                mean, se = float("nan"), float("nan")
            else:
                mean = float(e.mean())
                se = float(e.std(ddof=1) / math.sqrt(e.size)) if e.size > 1 else 0.0
            cells.append(BenchCell(cfg.model, cfg.p, cfg.n, cfg.alpha, mean, se,
                                   replications, mode, list(e), failure))
    return BenchResult(cells)
