"""
Treat the model as a black box.  The projection integrals are then done by
Gauss-Hermite quadrature, and the cost is counted in model evaluations.

    python demos/black_box_quadrature.py
"""

import sys
import time

import numpy as np

from gadd import ExternalModel, PolynomialModel, assemble_and_solve, from_correlations, quadratic_symmetric
from gadd.models import CallableModel
from gadd.quadrature import DimensionReduction, ReductionPlan

# --- how many evaluations does the bivariate cut rule need? ---
for N in (5, 10, 20, 40):
    counts = [ReductionPlan.build(N, 2, n).evaluation_count for n in (3, 5)]
    print(f"N={N:>3}: {counts[0]:>6} evaluations with n=3, {counts[1]:>6} with n=5 "
          f"(full tensor with n=3 would be 3^{N})")

# --- same decomposition, analytic versus black box ---
meas = from_correlations(3, [(0, 1, 0.2), (0, 2, 0.2), (1, 2, 0.2)])
exact = assemble_and_solve(PolynomialModel(quadratic_symmetric(), 3), meas, 2, 2)

# A plain Python function: only its values are visible to the solver.
box = CallableModel(lambda x: (2 + x[0]) * (2 + x[1]) + (2 + x[0]) * (2 + x[2])
                    + (2 + x[1]) * (2 + x[2]), 3)

# y * psi can touch all three variables, but under f_u x f_{-u} the part
# outside u enters at most bilinearly, so the bivariate cut rule is already
# exact here.  S=3 is the full 5^3 tensor rule and costs twice as much.
for S in (2, 3):
    box.evaluations = 0
    numeric = assemble_and_solve(box, meas, 2, 2, DimensionReduction(n=5, S=S))
    err = max(abs(numeric.coefficients[k] - exact.coefficients[k]) for k in exact.coefficients)
    print(f"cut order S={S}: max coefficient error {err:.2e} using {box.evaluations} evaluations")

# --- the same model behind the line protocol, in a separate process ---
t0 = time.perf_counter()
with ExternalModel([sys.executable, "-m", "gadd.serve", "quadratic_symmetric"], 3) as proc:
    numeric = assemble_and_solve(proc, meas, 2, 2, DimensionReduction(n=5, S=3))
    calls = proc.evaluations
err = max(abs(numeric.coefficients[k] - exact.coefficients[k]) for k in exact.coefficients)
print(f"external process: max coefficient error {err:.2e}, {calls} evaluations, "
      f"{time.perf_counter() - t0:.2f} s")
