"""Generalized ANOVA dimensional decomposition for dependent Gaussian inputs."""

from .errors import (ConfigError, DegenerateResponseError, DomainError, GaddError,
                     IllConditionedError, ModelProtocolError, NumericalError,
                     ResourceError, SolverError)
from .expansion import (AddExpansion, assemble_and_solve, classical_add,
                        component_function, compute_I, compute_J, evaluate_surrogate,
                        load_expansion, save_expansion)
from .measure import GaussianMeasure, from_correlations, marginal, sample, validate
from .models import (CallableModel, ExternalModel, PolynomialModel, additive_linear,
                     quadratic_symmetric)
from .moments import Polynomial, gaussian_moment, inner_product, product_measure_moment
from .polybasis import build_basis, hermite_raw, orthonormalize
from .quadrature import DimensionReduction, correlated_rule, gauss_hermite
from .sensitivity import (adaptive_select, effective_dimensions, indices, total_effects,
                          unreduced_correlative_index, variance)

__version__ = "0.1.0"
