"""Command-line front end: ``condcov {simulate,estimate,sir,bench}``.

Exit codes: 0 success, 2 validation error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bench import PipelineOptions, estimate_sigma, monte_carlo_bench
from .estimator import Sample
from .kernels import KERNEL_NAMES
from .models import TRUTH_MODES, ScenarioConfig, generate, true_sigma
from .sir import classic_sir, cumulative_variance, default_slices, edr_directions, project

log = logging.getLogger("condcov")

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _validation(msg: str) -> CliError:
    return CliError(msg, EXIT_VALIDATION)


@dataclass
class RunConfig:
    command: str
    inp: Path | None = None
    out: Path | None = None
    model: str = "linear"
    n: int = 500
    p: int = 10
    alpha: float = 0.5
    beta: float = 2.0
    seed: int = 0
    k: int = 1
    n_slices: int | None = None
    truth: str = "oracle"
    kernel: str = "epanechnikov"
    replications: int | None = None
    flags: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        flags = {key: bool(getattr(ns, key, False))
                 for key in ("no_band", "no_truncate", "compare", "abs_r", "shared_noise")}
        cfg = cls(command=ns.command,
                  inp=Path(ns.inp) if getattr(ns, "inp", None) else None,
                  out=Path(ns.out) if getattr(ns, "out", None) else None,
                  flags=flags)
        for name in ("model", "n", "p", "alpha", "beta", "seed", "k", "truth", "kernel", "replications"):
            val = getattr(ns, name, None)
            if val is not None:
                setattr(cfg, name, val)
        cfg.n_slices = getattr(ns, "slices", None)
        return cfg

    def pipeline(self) -> PipelineOptions:
        return PipelineOptions(beta=self.beta, alpha=self.alpha, kernel=self.kernel,
                               truncate=not self.flags.get("no_truncate", False),
                               banded=not self.flags.get("no_band", False))


# -- file formats -----------------------------------------------------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_sample_csv(path: Path, sample: Sample) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y"] + [f"x{i}" for i in range(1, sample.p + 1)])
        for yv, row in zip(sample.y, sample.x):
            w.writerow([_fmt(yv)] + [_fmt(v) for v in row])


def read_sample_csv(path: Path) -> Sample:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "y" or len(header) < 2:
            raise _validation(f"{path}:1: expected header 'y,x1,...,xp'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise _validation(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise _validation(f"{path}:{lineno}: {exc}") from exc
    if len(rows) < 4:
        raise _validation(f"{path}: need at least 4 observations, got {len(rows)}")
    data = np.array(rows)
    try:
        return Sample(data[:, 1:], data[:, 0])
    except ValueError as exc:
        raise _validation(f"{path}: {exc}") from exc


def write_matrix_csv(path: Path, mat: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in np.atleast_2d(mat):
            w.writerow([_fmt(v) for v in row])


def read_matrix_csv(path: Path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    try:
        mat = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise _validation(f"{path}: {exc}") from exc
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise _validation(f"{path}: expected a square matrix, got shape {mat.shape}")
    return mat


def _ensure_parent(path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {path.parent}: {exc}", EXIT_IO) from exc


# -- commands ----------------------------------------------------------------

def _scenario(cfg: RunConfig) -> ScenarioConfig:
    try:
        return ScenarioConfig(cfg.model, cfg.n, cfg.p, cfg.alpha, cfg.seed,
                              shared_noise=cfg.flags.get("shared_noise", False),
                              abs_r=cfg.flags.get("abs_r", False))
    except ValueError as exc:
        raise _validation(str(exc)) from exc


def cmd_simulate(cfg: RunConfig, truth_out: Path | None = None) -> None:
    if cfg.out is None:
        raise _validation("simulate needs --out")
    scen = _scenario(cfg)
    sample = generate(scen)
    _ensure_parent(cfg.out)
    write_sample_csv(cfg.out, sample)
    if truth_out is not None:
        _ensure_parent(truth_out)
        write_matrix_csv(truth_out, true_sigma(scen, cfg.truth))


def sidecar_path(out: Path) -> Path:
    return out.with_name(out.name + ".json")


def cmd_estimate(cfg: RunConfig) -> None:
    if cfg.inp is None or cfg.out is None:
        raise _validation("estimate needs --in and --out")
    sample = read_sample_csv(cfg.inp)
    opts = cfg.pipeline()
    est = _run_estimate(sample, cfg.seed, opts)
    _ensure_parent(cfg.out)
    write_matrix_csv(cfg.out, est.sigma)
    meta = {
        "h1": est.plan.h1, "h2": est.plan.h2, "b": est.plan.b, "m": est.m,
        "n1": est.plan.n1, "n2": est.plan.n2, "p": est.p, "beta": opts.beta,
        "alpha": opts.alpha, "kernel": opts.kernel, "seed": cfg.seed,
        "dropped_rows": est.meta.get("dropped", 0),
        "flags": {"no_band": not opts.banded, "no_truncate": not opts.truncate},
    }
    with open(sidecar_path(cfg.out), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_estimate(sample: Sample, seed: int, opts: PipelineOptions):
    try:
        est = estimate_sigma(sample, seed, opts)
    except ValueError as exc:
        raise _validation(str(exc)) from exc
    if not np.all(np.isfinite(est.sigma)):
        raise CliError("estimate contains non-finite entries", EXIT_NUMERIC)
    return est


def cmd_sir(cfg: RunConfig, sigma_path: Path | None = None) -> None:
    """Kernel SIR directions, projections and cumulative variance.

    Writes ``directions.csv``, ``projections.csv`` (needs a sample) and
    ``cumvar.csv`` into the ``--out`` directory.
    """
    if cfg.out is None:
        raise _validation("sir needs --out (a directory)")
    if cfg.inp is None and sigma_path is None:
        raise _validation("sir needs --in (sample CSV) or --sigma (matrix CSV)")
    sample = read_sample_csv(cfg.inp) if cfg.inp is not None else None
    if sigma_path is not None:
        sigma = read_matrix_csv(sigma_path)
    else:
        sigma = _run_estimate(sample, cfg.seed, cfg.pipeline()).sigma
    p = sigma.shape[0]
    if sample is not None and sample.p != p:
        raise _validation(f"sample has p={sample.p} but sigma is {p}x{p}")
    if not 1 <= cfg.k <= p:
        raise _validation(f"k={cfg.k} must be between 1 and p={p}")
    try:
        full = edr_directions(sigma, p)
    except ValueError as exc:
        raise _validation(str(exc)) from exc
    series = [("kernel", cumulative_variance(full.eigenvalues))]
    if cfg.flags.get("compare"):
        if sample is None:
            raise _validation("--compare needs the raw sample via --in")
        n_slices = cfg.n_slices if cfg.n_slices is not None else default_slices(p)
        try:
            base = classic_sir(sample, n_slices, p)
        except ValueError as exc:
            raise _validation(str(exc)) from exc
        except np.linalg.LinAlgError as exc:
            raise CliError(str(exc), EXIT_NUMERIC) from exc
        series.append(("classic", cumulative_variance(base.eigenvalues)))

    out = cfg.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out}: {exc}", EXIT_IO) from exc
    dirs = full.directions[:, : cfg.k]
    write_matrix_csv(out / "directions.csv", dirs)
    if sample is not None:
        basis = edr_directions(sigma, cfg.k)
        proj = project(sample.x - sample.x.mean(axis=0), basis)
        with open(out / "projections.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"proj{j}" for j in range(1, cfg.k + 1)] + ["y"])
            for row, yv in zip(proj, sample.y):
                w.writerow([_fmt(v) for v in row] + [_fmt(yv)])
    with open(out / "cumvar.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "component", "cumulative_variance"])
        for method, cv in series:
            for j, v in enumerate(cv, start=1):
                w.writerow([method, j, _fmt(v)])


def load_grid(path: Path) -> tuple[list[ScenarioConfig], dict]:
    """Read a grid JSON.

    Either an explicit ``"cells"`` list of {model, n, p, alpha} objects, or
    ``"models"``, ``"p"``, ``"n"``, ``"alpha"`` lists expanded as a product.
    Optional keys: ``seed``, ``replications``, ``beta``.
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    except json.JSONDecodeError as exc:
        raise _validation(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise _validation(f"{path}: grid must be a JSON object")
    seed = int(raw.get("seed", 0))
    try:
        if "cells" in raw:
            cells = [ScenarioConfig(c["model"], int(c["n"]), int(c["p"]),
                                    float(c.get("alpha", 0.5)), seed) for c in raw["cells"]]
        else:
            cells = [ScenarioConfig(m, int(n), int(p), float(a), seed)
                     for m, p, n, a in itertools.product(raw["models"], raw["p"], raw["n"], raw["alpha"])]
    except (KeyError, TypeError, ValueError) as exc:
        raise _validation(f"{path}: malformed grid: {exc!r}") from exc
    if not cells:
        raise _validation(f"{path}: grid has no cells")
    return cells, raw


def cmd_bench(cfg: RunConfig) -> list[str]:
    if cfg.inp is None or cfg.out is None:
        raise _validation("bench needs --in (grid JSON) and --out (CSV)")
    grid, raw = load_grid(cfg.inp)
    reps = cfg.replications if cfg.replications is not None else int(raw.get("replications", 100))
    if reps < 1:
        raise _validation(f"replications must be >= 1, got {reps}")
    beta = float(raw.get("beta", cfg.beta))
    modes = TRUTH_MODES if cfg.truth == "both" else (cfg.truth,)
    opts = PipelineOptions(beta=beta, kernel=cfg.kernel,
                           truncate=not cfg.flags.get("no_truncate", False),
                           banded=not cfg.flags.get("no_band", False))
    result = monte_carlo_bench(grid, reps, beta, modes, opts)
    _ensure_parent(cfg.out)
    with open(cfg.out, "w") as fh:
        fh.write(result.to_csv())
    return [f"{c.model} p={c.p} n={c.n} alpha={c.alpha}: {c.failure}" for c in result.failures
            if c.truth_mode == modes[0]]


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condcov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, model=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--alpha", type=float, default=0.5)
        sp.add_argument("--beta", type=float, default=2.0)
        if model:
            sp.add_argument("--model", choices=("linear", "polar"), default="linear")
            sp.add_argument("--n", type=int, default=500)
            sp.add_argument("--p", type=int, default=10)

    def estimation(sp):
        sp.add_argument("--no-band", action="store_true")
        sp.add_argument("--no-truncate", action="store_true")
        sp.add_argument("--kernel", choices=KERNEL_NAMES, default="epanechnikov")

    s = sub.add_parser("simulate", help="write a simulated sample CSV")
    common(s)
    s.add_argument("--out", required=True)
    s.add_argument("--truth-out", help="also write the true Sigma as a matrix CSV")
    s.add_argument("--truth", choices=TRUTH_MODES, default="oracle")
    s.add_argument("--abs-r", action="store_true", help="polar: half-normal radius")
    s.add_argument("--shared-noise", action="store_true", help="linear: one eps per observation")

    s = sub.add_parser("estimate", help="estimate Cov(E[X|Y]) from a sample CSV")
    common(s, model=False)
    estimation(s)
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("sir", help="EDR directions, projections and explained variance")
    common(s, model=False)
    estimation(s)
    s.add_argument("--in", dest="inp")
    s.add_argument("--sigma", help="use a precomputed Sigma matrix CSV")
    s.add_argument("--out", required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--slices", type=int, help="classic SIR slice count (default max(8, p+3))")
    s.add_argument("--compare", action="store_true", help="add the classic SIR series")

    s = sub.add_parser("bench", help="run a Monte Carlo grid")
    s.add_argument("--in", dest="inp", required=True, help="grid JSON")
    s.add_argument("--out", required=True)
    s.add_argument("--replications", type=int)
    s.add_argument("--beta", type=float, default=2.0)
    s.add_argument("--truth", choices=TRUTH_MODES + ("both",), default="both")
    estimation(s)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig.from_args(ns)
    try:
        if cfg.command == "simulate":
            cmd_simulate(cfg, Path(ns.truth_out) if ns.truth_out else None)
        elif cfg.command == "estimate":
            cmd_estimate(cfg)
        elif cfg.command == "sir":
            cmd_sir(cfg, Path(ns.sigma) if ns.sigma else None)
        elif cfg.command == "bench":
            failures = cmd_bench(cfg)
            if failures:
                for line in failures:
                    log.error("cell failed: %s", line)
                return EXIT_NUMERIC
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
