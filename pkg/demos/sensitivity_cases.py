"""
Variance-driven, covariance-driven and total sensitivity indices for the
same four correlation structures, plus total effects and rankings.

    python demos/sensitivity_cases.py
"""

import numpy as np

from gadd import (PolynomialModel, assemble_and_solve, effective_dimensions, from_correlations,
                  indices, quadratic_symmetric, total_effects)

model = PolynomialModel(quadratic_symmetric(), 3)
cases = [(0.0, 0.0, 0.0), (0.2, 0.2, 0.2), (0.2, 0.4, 0.8), (-0.2, 0.4, -0.8)]

for k, (r12, r13, r23) in enumerate(cases, 1):
    meas = from_correlations(3, [(0, 1, r12), (0, 2, r13), (1, 2, r23)])
    rep = indices(assemble_and_solve(model, meas, 2, 2))
    print(f"\ncase {k}  (rho = {r12}, {r13}, {r23})   mean {rep.mean:.4f}  variance {rep.variance:.4f}")
    print(f"  {'subset':<10}{'S_uv':>11}{'S_uc':>11}{'S_u':>11}")
    for u in sorted(rep.triplets, key=lambda u: (len(u), u)):
        sv, sc, s = rep.triplets[u]
        label = "{" + ",".join(str(v + 1) for v in u) + "}"
        print(f"  {label:<10}{sv:11.6f}{sc:11.6f}{s:11.6f}")
    sv, sc, s = rep.column_sums()
    print(f"  {'sum':<10}{sv:11.6f}{sc:11.6f}{s:11.6f}")

    te = total_effects(rep)
    ranks = ["tie" if t else str(r) for r, t in zip(te.ranks, te.tied)]
    print("  total effects", np.round(te.values, 6), "ranks", ranks)

    dims = effective_dimensions(rep, 0.99)
    print(f"  effective dimensions at p=0.99: superposition {dims.superposition}, "
          f"truncation {dims.truncation}")

# Negative covariance indices are not an error: with mixed-sign correlations
# the components partly cancel, so the variance-driven parts sum past one.
