"""Compact-support kernels and the split-sample kernel smoothers.

Kernels live on [-1, 1] and are polynomial multiples of the Epanechnikov
profile 0.75 * (1 - u^2). A kernel of order ``s`` integrates to one and has
vanishing moments int u^k K(u) du = 0 for k = 1..s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "KernelSpec",
    "BandwidthPlan",
    "epanechnikov",
    "make_kernel",
    "get_kernel",
    "KERNEL_NAMES",
    "simpson_moments",
    "kde",
    "smoother_g",
    "plan_bandwidths",
]

# Truncation exponents: h2 ~ n2^-C1, b ~ n2^-C2 with C1/beta < C2 < 1/2 - C1.
DEFAULT_C1 = 1.0 / 6.0
DEFAULT_C2 = 1.0 / 4.0

_QUAD_POINTS = 2001


@dataclass(frozen=True)
class KernelSpec:
    """Symmetric kernel K(u) = P(u^2) * 0.75 * (1 - u^2) on [-1, 1].

    ``coefs`` holds the coefficients of P in powers of u^2, lowest first.
    """

    order: int
    coefs: tuple[float, ...]
    support_radius: float = field(default=1.0)

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        u2 = u * u
        poly = np.zeros_like(u2)
        for c in reversed(self.coefs):
            poly = poly * u2 + c
        out = poly * 0.75 * (1.0 - u2)
        return np.where(np.abs(u) <= 1.0, out, 0.0)

    def eval(self, u) -> np.ndarray:
        return self(u)


def epanechnikov() -> KernelSpec:
    """The plain Epanechnikov kernel 0.75 (1 - u^2).

    Its second moment is 1/5, so under the vanishing-moment convention used by
    :func:`make_kernel` it is a kernel of order 1.
    """
    return KernelSpec(order=1, coefs=(1.0,))


def _base_moment(k: int) -> float:
    # int_{-1}^{1} u^k * 0.75 (1 - u^2) du for even k
    return 0.75 * (2.0 / (k + 1) - 2.0 / (k + 3))


def make_kernel(order: int = 2) -> KernelSpec:
    """Build a kernel whose moments 1..order vanish.

    Odd moments vanish by symmetry, so only the even constraints
    int u^{2j} K = 0 (2j <= order) plus int K = 1 are imposed. That gives
    ``order // 2 + 1`` equations for as many coefficients of P(u^2).

    Raises
    ------
    ValueError
        If ``order`` is below 2 or odd.
    """
    if not isinstance(order, (int, np.integer)) or isinstance(order, bool):
        raise TypeError(f"kernel order must be an integer, got {order!r}")
    if order < 2:
        raise ValueError(f"kernel order must be >= 2, got {order}")
    if order % 2:
        raise ValueError(f"kernel order must be even, got {order}")
    n = order // 2 + 1
    # A[r, c] = int u^{2r} * u^{2c} * base(u) du
    A = np.array([[_base_moment(2 * (r + c)) for c in range(n)] for r in range(n)])
    rhs = np.zeros(n)
    rhs[0] = 1.0
    coefs = np.linalg.solve(A, rhs)
    return KernelSpec(order=int(order), coefs=tuple(float(c) for c in coefs))


KERNEL_NAMES = ("epanechnikov", "order2", "order4")


def get_kernel(name: str) -> KernelSpec:
    """Look up a kernel by CLI name."""
    if name == "epanechnikov":
        return epanechnikov()
    if name.startswith("order") and name[5:].isdigit():
        return make_kernel(int(name[5:]))
    raise ValueError(f"unknown kernel {name!r}; choose from {KERNEL_NAMES}")


def simpson_moments(kernel: KernelSpec, max_power: int, points: int = _QUAD_POINTS) -> np.ndarray:
    """Composite Simpson estimates of int u^k K(u) du over [-1, 1], k = 0..max_power."""
    if points % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number of points")
    u = np.linspace(-1.0, 1.0, points)
    w = np.ones(points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (u[1] - u[0]) / 3.0
    k_vals = kernel(u)
    return np.array([np.sum(w * u**k * k_vals) for k in range(max_power + 1)])


def _check_bandwidth(h: float) -> float:
    h = float(h)
    if not h > 0 or not math.isfinite(h):
        raise ValueError(f"bandwidth must be positive and finite, got {h}")
    return h


def kde(points, eval_at, h: float, kernel: KernelSpec) -> np.ndarray:
    """Kernel density estimate (1/(n h)) sum_l K((y - Y_l)/h) at each ``eval_at``."""
    points = np.asarray(points, dtype=float).ravel()
    eval_at = np.asarray(eval_at, dtype=float).ravel()
    if points.size == 0:
        raise ValueError("kde needs at least one data point")
    h = _check_bandwidth(h)
    w = kernel((eval_at[:, None] - points[None, :]) / h)
    return w.sum(axis=1) / (points.size * h)


def smoother_g(x_column, y_points, eval_at, h: float, kernel: KernelSpec,
               exclude_index: int | None = None) -> np.ndarray:
    """Kernel estimate of g(y) = E[X | Y = y] f_Y(y).

    With ``exclude_index`` set, observation ``exclude_index`` is dropped from
    the sum and the divisor becomes (n - 1) h.
    """
    x = np.asarray(x_column, dtype=float).ravel()
    y = np.asarray(y_points, dtype=float).ravel()
    eval_at = np.asarray(eval_at, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"x_column and y_points differ in length: {x.size} vs {y.size}")
    h = _check_bandwidth(h)
    n = x.size
    if exclude_index is not None:
        if not 0 <= exclude_index < n:
            raise IndexError(f"exclude_index {exclude_index} out of range for n={n}")
        keep = np.ones(n, dtype=bool)
        keep[exclude_index] = False
        x, y = x[keep], y[keep]
        denom = (n - 1) * h
    else:
        denom = n * h
    w = kernel((eval_at[:, None] - y[None, :]) / h)
    return (w @ x) / denom


@dataclass
class BandwidthPlan:
    h1: float
    h2: float
    b: float
    n1: int
    n2: int
    beta: float

    def __post_init__(self):
        if not (0 < self.h1 < 1 and 0 < self.h2 < 1):
            raise ValueError(f"bandwidths must lie in (0, 1): h1={self.h1}, h2={self.h2}")
        if not self.b > 0:
            raise ValueError(f"truncation floor must be positive, got {self.b}")


def plan_bandwidths(n: int, beta: float = 2.0, c1: float = DEFAULT_C1,
                    c2: float = DEFAULT_C2) -> BandwidthPlan:
    """Deterministic bandwidths from the sample size and assumed smoothness.

    beta >= 2 uses the parametric-branch choice h1 = n1^(-1/4); otherwise
    h1 = (log^2 n1 / n1)^(1/(beta + 2)). h2 = n2^(-c1) and b = n2^(-c2).
    """
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    n1 = n2 = n // 2
    if beta >= 2:
        h1 = n1 ** -0.25
    else:
        h1 = (math.log(n1) ** 2 / n1) ** (1.0 / (beta + 2.0))
    h2 = n2 ** -c1
    b = n2 ** -c2
    return BandwidthPlan(h1=h1, h2=h2, b=b, n1=n1, n2=n2, beta=float(beta))
