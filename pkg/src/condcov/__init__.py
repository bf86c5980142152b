"""Kernel plug-in estimation of the conditional covariance Cov(E[X|Y])."""

from .bench import PipelineOptions, estimate_sigma, monte_carlo_bench
from .estimator import (
    CondCovEstimate,
    Sample,
    SplitSample,
    band,
    center,
    estimate_entry,
    estimate_matrix,
    frobenius_risk,
    select_b,
    select_m,
    split,
    truncate_density,
)
from .kernels import BandwidthPlan, KernelSpec, epanechnikov, kde, make_kernel, plan_bandwidths, smoother_g
from .models import ScenarioConfig, gen_linear, gen_polar, true_linear_sigma, true_polar_sigma
from .sir import EdrBasis, classic_sir, cumulative_variance, edr_directions, project

__version__ = "0.1.0"
