"""Simulation models with known conditional covariance.

Two generators: a linear model X_i = a_i Y + (1 - a_i) eps_i with
a_i = i^-(alpha+1), and a two-dimensional polar model padded with
independent noise columns. Each has a closed-form truth as printed
alongside the model ("paper" mode) and a Monte Carlo truth ("oracle" mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .estimator import Sample

__all__ = [
    "ScenarioConfig",
    "linear_loadings",
    "gen_linear",
    "gen_polar",
    "generate",
    "true_linear_sigma",
    "true_polar_sigma",
    "true_sigma",
]

MODELS = ("linear", "polar")
TRUTH_MODES = ("paper", "oracle")

ORACLE_DRAWS = 10**6
ORACLE_BINS = 200
ORACLE_SEED = 20240101


@dataclass(frozen=True)
class ScenarioConfig:
    model: str
    n: int
    p: int
    alpha: float = 0.5
    seed: int = 0
    shared_noise: bool = False  # linear: one eps per observation instead of one per coordinate
    abs_r: bool = False  # polar: draw r from the half-normal

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.n < 4:
            raise ValueError(f"n must be >= 4, got {self.n}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.model == "polar" and self.p < 2:
            raise ValueError(f"polar model needs p >= 2, got p={self.p}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


def linear_loadings(p: int, alpha: float) -> np.ndarray:
    """a_i = i^-(alpha+1) for i = 1..p."""
    return np.arange(1, p + 1, dtype=float) ** -(alpha + 1.0)


def gen_linear(cfg: ScenarioConfig) -> Sample:
    if cfg.model != "linear":
        raise ValueError(f"gen_linear got a {cfg.model!r} config")
    rng = np.random.default_rng(cfg.seed)
    a = linear_loadings(cfg.p, cfg.alpha)
    y = rng.standard_normal(cfg.n)
    if cfg.shared_noise:
        eps = rng.standard_normal(cfg.n)[:, None]
    else:
        eps = rng.standard_normal((cfg.n, cfg.p))
    x = y[:, None] * a + (1.0 - a) * eps
    return Sample(x, y)


def _polar_draw(rng: np.random.Generator, n: int, abs_r: bool):
    r = rng.standard_normal(n)
    if abs_r:
        r = np.abs(r)
    theta = rng.uniform(0.0, math.pi / 4, n)
    eps = rng.standard_normal(n)
    x1 = 1.5 * r * np.cos(theta)
    x2 = 1.5 * r * np.sin(theta)
    return x1, x2, x1**2 + x2**2 + eps


def gen_polar(cfg: ScenarioConfig) -> Sample:
    if cfg.model != "polar":
        raise ValueError(f"gen_polar got a {cfg.model!r} config")
    rng = np.random.default_rng(cfg.seed)
    x1, x2, y = _polar_draw(rng, cfg.n, cfg.abs_r)
    rest = rng.standard_normal((cfg.n, cfg.p - 2))
    return Sample(np.column_stack([x1, x2, rest]), y)


def generate(cfg: ScenarioConfig) -> Sample:
    return gen_linear(cfg) if cfg.model == "linear" else gen_polar(cfg)


def _check_mode(mode: str) -> None:
    if mode not in TRUTH_MODES:
        raise ValueError(f"truth mode must be one of {TRUTH_MODES}, got {mode!r}")


@lru_cache(maxsize=None)
def _linear_var_y(draws: int, seed: int) -> float:
    y = np.random.default_rng(seed).standard_normal(draws)
    return float(np.var(y))


def true_linear_sigma(p: int, alpha: float, mode: str = "oracle") -> np.ndarray:
    """Ground-truth Cov(E[X|Y]) for the linear model.

    ``paper`` returns the printed closed form 2 (ij)^-(alpha+1). ``oracle``
    uses E[X_i | Y] = a_i Y, so the truth is a a^T Var(Y), with Var(Y)
    taken from a 10^6-draw simulation.
    """
    _check_mode(mode)
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    a = linear_loadings(p, alpha)
    if mode == "paper":
        return 2.0 * np.outer(a, a)
    return np.outer(a, a) * _linear_var_y(ORACLE_DRAWS, ORACLE_SEED)


def polar_trig_means() -> tuple[float, float]:
    """E[cos theta], E[sin theta] for theta ~ Uniform(0, pi/4)."""
    return (4 / math.pi) * math.sin(math.pi / 4), (4 / math.pi) * (1 - math.cos(math.pi / 4))


@lru_cache(maxsize=None)
def _polar_oracle_block(abs_r: bool, draws: int, bins: int, seed: int) -> tuple[tuple[float, ...], ...]:
    """Between-bin covariance of (X1, X2) over equal-count Y bins.

    The raw covariance of bin means is inflated by the within-bin variance
    divided by the bin size; that term is subtracted.
    """
    rng = np.random.default_rng(seed)
    x1, x2, y = _polar_draw(rng, draws, abs_r)
    order = np.argsort(y, kind="stable")
    xs = np.column_stack([x1, x2])[order]
    groups = np.array_split(np.arange(draws), bins)
    means = np.array([xs[g].mean(axis=0) for g in groups])
    sizes = np.array([g.size for g in groups], dtype=float)
    weights = sizes / sizes.sum()
    overall = weights @ means
    dev = means - overall
    between = (dev * weights[:, None]).T @ dev
    within = sum(np.cov(xs[g].T, ddof=1) * (g.size / draws) / g.size for g in groups)
    block = between - within
    block = 0.5 * (block + block.T)
    return tuple(map(tuple, block))


def true_polar_sigma(p: int, mode: str = "oracle", abs_r: bool = False) -> np.ndarray:
    """Ground-truth Cov(E[X|Y]) for the polar model.

    ``paper`` gives the printed rank-one block 2.25 Var(r^2) v v^T with
    v = (E cos theta, E sin theta) and Var(r^2) = 2. ``oracle`` bins a
    10^6-draw simulation of (X1, X2, Y) by Y; columns 3..p are independent
    of Y by construction and stay zero.
    """
    _check_mode(mode)
    if p < 2:
        raise ValueError(f"polar model needs p >= 2, got p={p}")
    out = np.zeros((p, p))
    if mode == "paper":
        v = np.array(polar_trig_means())
        out[:2, :2] = 2.25 * 2.0 * np.outer(v, v)
    else:
        out[:2, :2] = np.array(_polar_oracle_block(abs_r, ORACLE_DRAWS, ORACLE_BINS, ORACLE_SEED))
    return out


def true_sigma(cfg: ScenarioConfig, mode: str = "oracle") -> np.ndarray:
    if cfg.model == "linear":
        return true_linear_sigma(cfg.p, cfg.alpha, mode)
    return true_polar_sigma(cfg.p, mode, cfg.abs_r)
