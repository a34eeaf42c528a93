"""
Zero-mean correlated Gaussian input measures.

Variables are indexed from 0 in the Python API.  A variable subset is a
strictly increasing tuple of indices; the empty tuple is the empty subset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DomainError, NumericalError

#: smallest admissible Cholesky pivot relative to the largest variance
PIVOT_RTOL = 1e-10
SYMMETRY_RTOL = 1e-12


def as_subset(indices, dimension=None):
    """Normalize ``indices`` to a sorted tuple and check it is a valid subset.

    Raises DomainError on duplicates or indices outside ``range(dimension)``.
    """
    subset = tuple(sorted(int(i) for i in indices))
    if len(set(subset)) != len(subset):
        raise DomainError(f"duplicate variable index in {subset}")
    if subset and subset[0] < 0:
        raise DomainError(f"negative variable index in {subset}")
    if dimension is not None and subset and subset[-1] >= dimension:
        raise DomainError(
            f"variable index {subset[-1]} out of range for dimension {dimension}"
        )
    return subset


def complement(subset, dimension):
    s = set(subset)
    return tuple(i for i in range(dimension) if i not in s)


def subsets_up_to(dimension, max_size):
    """All non-empty subsets with at most ``max_size`` members.

    Ordered by size, then lexicographically.
    """
    out = []
    for k in range(1, min(max_size, dimension) + 1):
        out.extend(combinations(range(dimension), k))
    return out


def _checked_cholesky(cov):
    """Lower Cholesky factor with an explicit pivot check.

    numpy's cholesky only reports failure, not where; the loop here names the
    failing pivot, which matters when a correlation list is mistyped.
    """
    n = cov.shape[0]
    scale = float(np.max(np.diag(cov)))
    if not scale > 0.0:
        raise NumericalError("covariance is not positive definite: "
                             "largest variance is not positive")
    L = np.zeros_like(cov)
    for k in range(n):
        pivot = cov[k, k] - L[k, :k] @ L[k, :k]
        if not pivot > PIVOT_RTOL * scale:
            raise NumericalError(
                f"covariance is not positive definite: pivot {k} is {pivot:.6g} "
                f"(threshold {PIVOT_RTOL * scale:.3g})"
            )
        L[k, k] = np.sqrt(pivot)
        L[k + 1:, k] = (cov[k + 1:, k] - L[k + 1:, :k] @ L[k, :k]) / L[k, k]
    return L


@dataclass(frozen=True, eq=False)
class MarginalMeasure:
    """Gaussian marginal of the variables in ``subset``.

    ``covariance`` is the principal submatrix of the parent covariance.
    """

    subset: tuple
    covariance: np.ndarray

    @property
    def size(self):
        return len(self.subset)

    @property
    def cholesky(self):
        # cached by hand because the dataclass is frozen
        try:
            return self.__dict__["_chol"]
        except KeyError:
            L = _checked_cholesky(self.covariance)
            object.__setattr__(self, "_chol", L)
            return L

    @property
    def precision(self):
        try:
            return self.__dict__["_prec"]
        except KeyError:
            P = np.linalg.inv(self.covariance)
            P = 0.5 * (P + P.T)
            object.__setattr__(self, "_prec", P)
            return P

    def key(self):
        """Hashable identity used for memoization."""
        return (self.subset, self.covariance.tobytes())


@dataclass(frozen=True, eq=False)
class GaussianMeasure:
    """Zero-mean Gaussian measure N(0, covariance) on R^N.

    Construct through :func:`validate` (or the ``from_*`` helpers) so the
    symmetry and positive-definiteness checks run.
    """

    covariance: np.ndarray
    cholesky: np.ndarray = field(repr=False)

    @property
    def dimension(self):
        return self.covariance.shape[0]

    @property
    def is_diagonal(self):
        c = self.covariance
        return bool(np.all(c[~np.eye(c.shape[0], dtype=bool)] == 0.0))

    def marginal(self, subset):
        return marginal(self, subset)

    def diagonal(self):
        """The product measure with the same marginal variances."""
        return validate(np.diag(np.diag(self.covariance)))

    def __eq__(self, other):
        if not isinstance(other, GaussianMeasure):
            return NotImplemented
        return np.array_equal(self.covariance, other.covariance)

    __hash__ = None


def validate(covariance):
    """Check a covariance matrix and return the corresponding measure.

    Parameters
    ----------
    covariance : array_like, shape (N, N)
        Symmetric positive-definite matrix.

    Returns
    -------
    GaussianMeasure
        Holds a read-only copy of the covariance and its lower Cholesky factor.
    """
    cov = np.array(covariance, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] < 1:
        raise DomainError(f"covariance must be a non-empty square matrix, got shape {cov.shape}")
    if not np.all(np.isfinite(cov)):
        raise DomainError("covariance has non-finite entries")
    asym = np.max(np.abs(cov - cov.T))
    if asym > SYMMETRY_RTOL * max(np.max(np.abs(cov)), 1e-300):
        raise DomainError(f"covariance is not symmetric (max |C - C^T| = {asym:.3g})")
    cov = 0.5 * (cov + cov.T)
    L = _checked_cholesky(cov)
    cov.setflags(write=False)
    L.setflags(write=False)
    return GaussianMeasure(cov, L)


def from_correlations(dimension, correlations, variances=None, one_based=False):
    """Build a measure from variances and a list of ``(i, j, rho)`` entries.

    Pairs not listed are uncorrelated.  Variances default to one.
    """
    n = int(dimension)
    if n < 1:
        raise DomainError("dimension must be positive")
    var = np.ones(n) if variances is None else np.asarray(variances, dtype=float)
    if var.shape != (n,) or np.any(var <= 0):
        raise DomainError("variances must be N positive numbers")
    sd = np.sqrt(var)
    cov = np.diag(var)
    shift = 1 if one_based else 0
    seen = set()
    for i, j, rho in correlations:
        a, b = int(i) - shift, int(j) - shift
        if a == b or not (0 <= a < n and 0 <= b < n):
            raise DomainError(f"invalid correlation pair ({i}, {j})")
        if (min(a, b), max(a, b)) in seen:
            raise DomainError(f"correlation pair ({i}, {j}) given twice")
        seen.add((min(a, b), max(a, b)))
        rho = float(rho)
        if not -1.0 < rho < 1.0:
            raise NumericalError(f"correlation ({i}, {j}) = {rho} is not in (-1, 1)")
        cov[a, b] = cov[b, a] = rho * sd[a] * sd[b]
    return validate(cov)


def marginal(measure, subset):
    """Marginal measure of ``measure`` on a non-empty variable subset."""
    u = as_subset(subset, measure.dimension)
    if not u:
        raise DomainError("marginal over the empty subset is undefined")
    idx = np.array(u)
    cov = measure.covariance[np.ix_(idx, idx)].copy()
    cov.setflags(write=False)
    return MarginalMeasure(u, cov)


def block_diagonal(*marginals):
    """Product of marginals on disjoint subsets, as one MarginalMeasure.

    The result is indexed by the sorted union of the subsets.
    """
    union = []
    for mm in marginals:
        union.extend(mm.subset)
    if len(set(union)) != len(union):
        raise DomainError("block_diagonal needs disjoint subsets")
    w = tuple(sorted(union))
    pos = {v: k for k, v in enumerate(w)}
    cov = np.zeros((len(w), len(w)))
    for mm in marginals:
        idx = np.array([pos[v] for v in mm.subset], dtype=int)
        if idx.size:
            cov[np.ix_(idx, idx)] = mm.covariance
    cov.setflags(write=False)
    return MarginalMeasure(w, cov)


def product_measure(measure, subset):
    """The measure f_u(x_u) f_{-u}(x_{-u}) on all N variables.

    Returned as a MarginalMeasure over the full index set.
    """
    u = as_subset(subset, measure.dimension)
    rest = complement(u, measure.dimension)
    parts = [marginal(measure, s) for s in (u, rest) if s]
    return block_diagonal(*parts)


def make_rng(seed):
    """Seeded counter-based generator (Philox) used for all sampling."""
    return np.random.Generator(np.random.Philox(int(seed)))


def sample(measure, count, seed):
    """Draw ``count`` points from N(0, covariance).

    Standard normals from a Philox stream are mapped through the Cholesky
    factor, so results are bitwise reproducible for a given seed.
    """
    count = int(count)
    if count < 0:
        raise DomainError("count must be non-negative")
    z = make_rng(seed).standard_normal((count, measure.dimension))
    return z @ np.asarray(measure.cholesky).T
