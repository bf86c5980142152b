"""Empirical convergence rate of the (1,1) entry on the linear model.

Fits log MSE against log n and also reports the slope under alternative
truncation rules, which isolates the bias from the quartile truncation level.
"""

import argparse

import numpy as np

from condcov.bench import PipelineOptions, estimate_sigma, replication_seeds
from condcov.models import ScenarioConfig, gen_linear, true_sigma


def mse_curve(ns, reps, opts, truth):
    out = []
    for n in ns:
        errs = []
        for r in range(reps):
            data_seed, split_seed = replication_seeds(3, n, r)
            s = gen_linear(ScenarioConfig("linear", n, 2, 0.5, seed=data_seed))
            errs.append((estimate_sigma(s, split_seed, opts).sigma[0, 0] - truth) ** 2)
        out.append(np.mean(errs))
    return np.array(out)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--ns", type=int, nargs="+", default=[200, 400, 800, 1600, 3200])
    args = ap.parse_args(argv)
    ns = np.array(args.ns)
    truth = true_sigma(ScenarioConfig("linear", 10, 2, 0.5), "oracle")[0, 0]
    variants = {
        "quartile b": PipelineOptions(banded=False),
        "schedule b": PipelineOptions(banded=False, quantile_b=False),
    }
    for name, opts in variants.items():
        mse = mse_curve(ns, args.reps, opts, truth)
        slope = np.polyfit(np.log(ns), np.log(mse), 1)[0]
        print(f"{name:11} slope {slope:+.3f}  mse " + " ".join(f"{m:.4g}" for m in mse))


if __name__ == "__main__":
    main()
