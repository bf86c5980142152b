"""Effective dimension reduction from an estimated Cov(E[X|Y]).

Includes the classic slicing SIR estimator as a baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimator import Sample

__all__ = [
    "EdrBasis",
    "edr_directions",
    "project",
    "cumulative_variance",
    "classic_sir",
    "default_slices",
]

RIDGE = 1e-8
_COND_LIMIT = 1e10


@dataclass
class EdrBasis:
    directions: np.ndarray  # (p, k), orthonormal columns
    eigenvalues: np.ndarray  # (k,), non-negative, descending
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.directions.shape[1]


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude coordinate is positive.

    Near-ties (within 1e-9) go to the lowest index so that rounding noise
    cannot flip the choice.
    """
    mag = np.abs(vecs)
    idx = np.argmax(mag >= mag.max(axis=0) - 1e-9, axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def edr_directions(sigma, k: int) -> EdrBasis:
    """Top-k eigenpairs of a symmetric matrix with negative eigenvalues clipped to 0."""
    s = np.asarray(sigma, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"sigma must be square, got shape {s.shape}")
    p = s.shape[0]
    if not 1 <= k <= p:
        raise ValueError(f"k must be in [1, {p}], got {k}")
    asym = np.max(np.abs(s - s.T)) if p > 1 else 0.0
    if asym > 1e-8:
        raise ValueError(f"sigma is not symmetric (max asymmetry {asym:.3g})")
    vals, vecs = np.linalg.eigh(0.5 * (s + s.T))
    n_negative = int(np.sum(vals < 0))
    order = np.argsort(vals, kind="stable")[::-1][:k]
    vals = np.clip(vals[order], 0.0, None)
    vecs = _fix_signs(vecs[:, order])
    return EdrBasis(vecs, vals, {"clipped": n_negative})


def project(x, basis: EdrBasis) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != basis.directions.shape[0]:
        raise ValueError(
            f"x with shape {x.shape} does not match a basis in dimension {basis.directions.shape[0]}"
        )
    return x @ basis.directions


def cumulative_variance(eigenvalues) -> np.ndarray:
    lam = np.asarray(eigenvalues, dtype=float).ravel()
    if lam.size == 0 or np.any(lam < 0):
        raise ValueError("eigenvalues must be a non-empty, non-negative vector")
    total = lam.sum()
    if total <= 0:
        raise ValueError("eigenvalues are all zero; explained variance is undefined")
    out = np.cumsum(lam) / total
    out[-1] = 1.0
    return np.minimum(out, 1.0)


def default_slices(p: int) -> int:
    """Slice count used by the R ``dr`` package when none is given: max(8, p + 3)."""
    return max(8, p + 3)


def classic_sir(sample: Sample, n_slices: int = 10, k: int = 1) -> EdrBasis:
    """Sliced inverse regression (Li, 1991).

    X is whitened with its empirical covariance, observations are cut into
    ``n_slices`` equal-count slices of sorted Y, and the weighted covariance
    of the slice means is eigendecomposed. Directions are mapped back to the
    original coordinates and orthonormalised; eigenvalues are those of the
    whitened slice-mean covariance.
    """
    x, y = sample.x, sample.y
    n, p = x.shape
    if n_slices < 2:
        raise ValueError(f"need at least 2 slices, got {n_slices}")
    if n < n_slices:
        raise ValueError(f"cannot cut {n} observations into {n_slices} non-empty slices")
    if not 1 <= k <= p:
        raise ValueError(f"k must be in [1, {p}], got {k}")

    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / n
    evals, evecs = np.linalg.eigh(cov)
    scale = max(evals[-1], 1.0)
    zero = evals <= 1e-12 * scale
    if np.any(zero):
        raise np.linalg.LinAlgError(
            f"empirical X covariance is singular: {int(zero.sum())} of {p} dimensions have no variance"
        )
    meta = {"n_slices": n_slices, "ridge": 0.0}
    if evals[-1] / evals[0] > _COND_LIMIT:
        evals = evals + RIDGE
        meta["ridge"] = RIDGE
    inv_sqrt = (evecs / np.sqrt(evals)) @ evecs.T
    z = xc @ inv_sqrt

    slices = np.array_split(np.argsort(y, kind="stable"), n_slices)
    means = np.array([z[s].mean(axis=0) for s in slices])
    weights = np.array([s.size for s in slices], dtype=float) / n
    between = (means * weights[:, None]).T @ means

    vals, vecs = np.linalg.eigh(between)
    order = np.argsort(vals, kind="stable")[::-1]
    vals = np.clip(vals[order], 0.0, None)
    beta = inv_sqrt @ vecs[:, order]
    # QR keeps the leading column direction and column order
    q, r = np.linalg.qr(beta)
    q = _fix_signs(q)
    return EdrBasis(q[:, :k], vals[:k], meta)
