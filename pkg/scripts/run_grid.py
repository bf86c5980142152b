"""Run the Monte Carlo error grid and print mean errors as a table.

Usage: python3 scripts/run_grid.py configs/desk_grid.json --out results.csv
"""

import argparse
import sys
from pathlib import Path

from condcov.bench import PipelineOptions, monte_carlo_bench
from condcov.cli import load_grid
from condcov.models import TRUTH_MODES


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("grid", type=Path)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--replications", type=int)
    args = ap.parse_args(argv)

    cells, raw = load_grid(args.grid)
    reps = args.replications or raw.get("replications", 100)
    beta = raw.get("beta", 2.0)
    res = monte_carlo_bench(cells, reps, beta, TRUTH_MODES, PipelineOptions(beta=beta))
    print(f"{'model':7} {'p':>4} {'n':>4} {'alpha':>5}  {'paper':>9} {'oracle':>9}")
    for c in cells:
        paper = res.lookup(c.model, c.p, c.n, c.alpha, "paper")
        oracle = res.lookup(c.model, c.p, c.n, c.alpha, "oracle")
        print(f"{c.model:7} {c.p:4d} {c.n:4d} {c.alpha:5.2f}  {paper.mean_error:9.4f} {oracle.mean_error:9.4f}")
    if args.out:
        args.out.write_text(res.to_csv())
    return 4 if res.failures else 0


if __name__ == "__main__":
    sys.exit(main())
