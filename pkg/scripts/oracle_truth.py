"""Compare the closed-form and Monte Carlo ground truths for both models."""

import numpy as np

from condcov.models import true_linear_sigma, true_polar_sigma


def main():
    for mode in ("paper", "oracle"):
        lin = true_linear_sigma(3, 0.5, mode)
        print(f"linear {mode:6} sigma_11={lin[0, 0]:.4f} sigma_12={lin[0, 1]:.4f}")
    for abs_r in (False, True):
        for mode in ("paper", "oracle"):
            pol = true_polar_sigma(2, mode, abs_r)
            print(f"polar  {mode:6} abs_r={abs_r!s:5} block={np.round(pol, 4).tolist()}")


if __name__ == "__main__":
    main()
