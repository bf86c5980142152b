"""Split-sample plug-in estimator of Cov(E[X | Y]) and its banded version."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .kernels import BandwidthPlan, KernelSpec, epanechnikov, kde

__all__ = [
    "Sample",
    "SplitSample",
    "CondCovEstimate",
    "B_FLOOR",
    "center",
    "split",
    "truncate_density",
    "select_b",
    "ghat_table",
    "density_denominator",
    "estimate_entry",
    "estimate_matrix",
    "select_m",
    "band",
    "frobenius_risk",
]

B_FLOOR = 1e-10


@dataclass
class Sample:
    x: np.ndarray
    y: np.ndarray
    min_n: int = field(default=4, repr=False, compare=False)  # halves of a split may be smaller

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.x.ndim == 1:
            self.x = self.x[:, None]
        if self.x.ndim != 2:
            raise ValueError(f"x must be a 2-d array, got shape {self.x.shape}")
        if self.x.shape[0] != self.y.size:
            raise ValueError(f"x has {self.x.shape[0]} rows but y has {self.y.size} entries")
        if self.x.shape[1] < 1:
            raise ValueError("x needs at least one column")
        if self.y.size < self.min_n:
            raise ValueError(f"need at least {self.min_n} observations, got {self.y.size}")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("sample contains non-finite values")

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass
class SplitSample:
    s1: Sample
    s2: Sample
    split_seed: int
    dropped: int = 0


@dataclass
class CondCovEstimate:
    sigma: np.ndarray
    m: int
    plan: BandwidthPlan
    banded: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.sigma.shape[0]


def center(sample: Sample) -> Sample:
    """Subtract column means from x; y is left alone."""
    x = sample.x - sample.x.mean(axis=0)
    return Sample(x, sample.y.copy())


def split(sample: Sample, seed: int) -> SplitSample:
    """Random half/half partition of the rows.

    An odd trailing row is dropped before shuffling so that n1 = n2.
    """
    n = sample.n
    if n < 4:
        raise ValueError(f"need n >= 4 to split, got {n}")
    dropped = n % 2
    n_even = n - dropped
    perm = np.random.default_rng(seed).permutation(n_even)
    half = n_even // 2
    i1, i2 = np.sort(perm[:half]), np.sort(perm[half:])
    s1 = Sample(sample.x[i1], sample.y[i1], min_n=2)
    s2 = Sample(sample.x[i2], sample.y[i2], min_n=2)
    return SplitSample(s1, s2, split_seed=seed, dropped=dropped)


def truncate_density(f_values, b: float) -> np.ndarray:
    if not b > 0:
        raise ValueError(f"truncation level b must be positive, got {b}")
    return np.maximum(np.asarray(f_values, dtype=float), b)


def select_b(f_values) -> float:
    """First quartile (linear interpolation) of the density values, floored at B_FLOOR."""
    f = np.asarray(f_values, dtype=float).ravel()
    if f.size == 0:
        raise ValueError("select_b needs at least one density value")
    return max(float(np.percentile(f, 25)), B_FLOOR)


def _check_plan(split_: SplitSample, plan: BandwidthPlan) -> None:
    if plan.n1 != split_.s1.n or plan.n2 != split_.s2.n:
        raise ValueError(
            f"plan sizes (n1={plan.n1}, n2={plan.n2}) do not match split "
            f"({split_.s1.n}, {split_.s2.n})"
        )
    if split_.s1.n < 2:
        raise ValueError("leave-one-out smoothing needs n1 >= 2")


def ghat_table(s1: Sample, h1: float, kernel: KernelSpec) -> np.ndarray:
    """Leave-one-out g-hat for every column, evaluated at every subsample-1 Y.

    Returns an (n1, p) array with entry [k, i] = g_i(Y_k) computed without
    observation k.
    """
    y = s1.y
    n1 = y.size
    w = kernel((y[:, None] - y[None, :]) / h1)
    np.fill_diagonal(w, 0.0)
    return (w @ s1.x) / ((n1 - 1) * h1)


def density_denominator(split_: SplitSample, plan: BandwidthPlan, kernel: KernelSpec,
                        truncate: bool = True, quantile_b: bool = True) -> tuple[np.ndarray, float]:
    """Truncated density f_{Y,b} at the subsample-1 points, built from subsample 2.

    Returns the denominator values and the truncation level actually used.
    With ``truncate=False`` only the hard B_FLOOR applies (to keep the ratio
    finite where the compact-support KDE vanishes).
    """
    f = kde(split_.s2.y, split_.s1.y, plan.h2, kernel)
    if not truncate:
        b = B_FLOOR
    elif quantile_b:
        b = select_b(f)
    else:
        b = max(plan.b, B_FLOOR)
    return truncate_density(f, b), b


def estimate_entry(i: int, j: int, split_: SplitSample, plan: BandwidthPlan,
                   kernel: KernelSpec | None = None, truncate: bool = True,
                   quantile_b: bool = True) -> float:
    """sigma_ij = (1/n1) sum_k g_i(Y_k) g_j(Y_k) / f_{Y,b}(Y_k)^2."""
    kernel = kernel or epanechnikov()
    p = split_.s1.p
    for idx in (i, j):
        if not 0 <= idx < p:
            raise IndexError(f"index {idx} out of range for p={p}")
    _check_plan(split_, plan)
    i, j = min(i, j), max(i, j)
    s1 = split_.s1
    y = s1.y
    n1 = y.size
    w = kernel((y[:, None] - y[None, :]) / plan.h1)
    np.fill_diagonal(w, 0.0)
    scale = (n1 - 1) * plan.h1
    gi = (w @ s1.x[:, i]) / scale
    gj = (w @ s1.x[:, j]) / scale
    fb, _ = density_denominator(split_, plan, kernel, truncate, quantile_b)
    ratio_i = gi / fb
    ratio_j = gj / fb
    return float(np.mean(ratio_i * ratio_j))


def estimate_matrix(split_: SplitSample, plan: BandwidthPlan, kernel: KernelSpec | None = None,
                    truncate: bool = True, quantile_b: bool = True) -> CondCovEstimate:
    """Full p x p plug-in estimate; unbanded (m = p)."""
    kernel = kernel or epanechnikov()
    _check_plan(split_, plan)
    g = ghat_table(split_.s1, plan.h1, kernel)
    fb, b = density_denominator(split_, plan, kernel, truncate, quantile_b)
    r = g / fb[:, None]
    s = (r.T @ r) / r.shape[0]
    # mirror the upper triangle so symmetry is exact
    sigma = np.triu(s) + np.triu(s, 1).T
    p = sigma.shape[0]
    return CondCovEstimate(
        sigma=sigma,
        m=p,
        plan=replace(plan, b=b),
        banded=False,
        meta={"b": b, "truncate": truncate, "quantile_b": quantile_b,
              "kernel_order": kernel.order, "split_seed": split_.split_seed,
              "dropped": split_.dropped},
    )


def select_m(n1: int, alpha: float, p: int, beta: float = 2.0) -> int:
    """Banding half-width from the high-dimensional rate analysis.

    beta >= 2: candidate n1^(1/(2(alpha+1))); otherwise
    (log^2 n1 / n1)^(-2 beta / (2 (alpha+1) (beta+2))). Returns p when the
    candidate exceeds p, else its floor.
    """
    if n1 < 2:
        raise ValueError(f"n1 must be >= 2, got {n1}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if beta >= 2:
        cand = n1 ** (1.0 / (2.0 * (alpha + 1.0)))
    else:
        rate = math.log(n1) ** 2 / n1
        cand = rate ** (-2.0 * beta / (2.0 * (alpha + 1.0) * (beta + 2.0)))
    if cand > p:
        return int(p)
    return int(math.floor(cand))


def band(estimate: CondCovEstimate, m: int) -> CondCovEstimate:
    """Zero every entry with |i - j| > m."""
    p = estimate.p
    if not 0 <= m <= p:
        raise ValueError(f"band width m must be in [0, {p}], got {m}")
    idx = np.arange(p)
    mask = np.abs(idx[:, None] - idx[None, :]) <= m
    sigma = np.where(mask, estimate.sigma, 0.0)
    return replace(estimate, sigma=sigma, m=int(m), banded=True, meta=dict(estimate.meta))


def frobenius_risk(a, b) -> float:
    """Normalised squared Frobenius distance (1/p) ||a - b||_F^2."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need two square matrices of equal shape, got {a.shape} and {b.shape}")
    d = a - b
    return float(np.sum(d * d) / a.shape[0])
