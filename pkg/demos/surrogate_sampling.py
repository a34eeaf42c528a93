"""
Once the coefficients are known the surrogate is a cheap polynomial, so
Monte Carlo on it costs almost nothing.  Compare sample moments with the
exact mean and variance.

    python demos/surrogate_sampling.py
"""

import time

import numpy as np

from gadd import (PolynomialModel, assemble_and_solve, from_correlations, quadratic_symmetric,
                  sample, variance)

model = PolynomialModel(quadratic_symmetric(), 3)

for rho in [(0.0, 0.0, 0.0), (0.2, 0.2, 0.2)]:
    meas = from_correlations(3, [(0, 1, rho[0]), (0, 2, rho[1]), (1, 2, rho[2])])
    exp = assemble_and_solve(model, meas, 2, 2)

    t0 = time.perf_counter()
    x = sample(meas, 1_000_000, seed=2024)      # Philox stream, reproducible
    y = exp(x)
    dt = time.perf_counter() - t0

    n = len(y)
    se = y.std(ddof=1) / np.sqrt(n)
    print(f"rho={rho}: mean {y.mean():.4f} +- {se:.4f} (exact {exp.constant:.4f}), "
          f"variance {y.var(ddof=1):.3f} (exact {variance(exp).variance:.3f}), "
          f"{n} samples in {dt:.2f} s")

    counts, edges = np.histogram(y, bins=12)
    for c, lo in zip(counts, edges):
        print(f"  {lo:8.2f} {'#' * int(60 * c / counts.max())}")
