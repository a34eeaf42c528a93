"""
Measure-consistent multivariate Hermite bases.

For a Gaussian marginal with covariance C_u the raw polynomials are

    psi~_j(x) = (-1)^|j| / phi_u(x) * d^j phi_u(x)

built from the recurrence p_{j+e_i} = dp_j/dx_i - p_j * (C_u^{-1} x)_i,
p_0 = 1.  Each psi~_j is orthogonal under phi_u to every monomial x^k that
is not componentwise >= j (integrate by parts), which gives zero mean and
orthogonality to all functions of a strict subset of the variables whenever
every part of j is positive.  Raw polynomials of equal total degree are
not mutually orthogonal under a correlated measure, so each subset's set is
finished by Gram-Schmidt in canonical order.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from itertools import product
from math import comb, sqrt

import numpy as np

from .errors import DomainError, NumericalError, ResourceError
from .measure import as_subset, marginal, subsets_up_to
from .moments import Polynomial, expectation, inner_product

log = logging.getLogger(__name__)

MAX_BASIS_DEGREE = 10
MAX_SUBSET_SIZE = 6
ZERO_MEAN_TOL = 1e-10
HIERARCHICAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class BasisFunction:
    subset: tuple
    index: tuple
    poly: Polynomial
    norm_check: float = 1.0
    repaired: bool = False

    @property
    def degree(self):
        return sum(self.index)

    def __call__(self, x_u):
        return evaluate(self, x_u)


def multi_indices(size, max_degree, min_part=1):
    """Multi-indices of length ``size`` with parts >= ``min_part`` and total
    degree <= ``max_degree``, in graded-lexicographic order."""
    out = [j for j in product(range(min_part, max_degree + 1), repeat=size)
           if sum(j) <= max_degree]
    out.sort(key=lambda j: (sum(j), j))
    return out


def hermite_raw(marg, j):
    """Raw (unnormalized) Hermite polynomial of index ``j`` for ``marg``."""
    j = tuple(int(a) for a in j)
    u = marg.subset
    if len(j) != len(u):
        raise DomainError(f"multi-index {j} not aligned with subset {u}")
    if any(a < 0 for a in j):
        raise DomainError(f"negative entry in multi-index {j}")
    if sum(j) > MAX_BASIS_DEGREE:
        raise ResourceError(f"degree {sum(j)} exceeds cap {MAX_BASIS_DEGREE}")
    if len(u) > MAX_SUBSET_SIZE:
        raise ResourceError(f"subset size {len(u)} exceeds cap {MAX_SUBSET_SIZE}")
    P = marg.precision
    k = len(u)
    # (C^{-1} x)_i as polynomials over u
    lin = [
        Polynomial(u, {tuple(int(a == b) for a in range(k)): P[i, b] for b in range(k)})
        for i in range(k)
    ]
    p = Polynomial.constant(1.0, u)
    for i, reps in enumerate(j):
        for _ in range(reps):
            p = p.derivative(u[i]) - p * lin[i]
    return -p if sum(j) % 2 else p


def orthonormalize(raw, marg, index=None):
    """Scale ``raw`` to unit norm under ``marg``."""
    norm2 = inner_product(raw, raw, marg)
    if not norm2 > 0.0 or not np.isfinite(norm2):
        raise NumericalError(
            f"non-positive norm {norm2!r} for basis polynomial on {marg.subset}; "
            "the marginal covariance is probably ill-conditioned")
    psi = raw / sqrt(norm2)
    if index is None:
        index = ()
    return BasisFunction(marg.subset, tuple(index), psi, inner_product(psi, psi, marg))


def evaluate(psi, x_u):
    x_u = np.asarray(x_u, dtype=float)
    if x_u.shape[-1:] != (len(psi.subset),):
        raise DomainError(
            f"point dimension {x_u.shape[-1:]} does not match subset {psi.subset}")
    return psi.poly(x_u)


def _repair(fn, nested, marg):
    """Gram-Schmidt ``fn`` against span{1, nested} under ``marg``."""
    span = [Polynomial.constant(1.0, marg.subset)] + [g.poly for g in nested]
    G = np.array([[inner_product(a, b, marg) for b in span] for a in span])
    rhs = np.array([inner_product(a, fn.poly, marg) for a in span])
    coef = np.linalg.lstsq(G, rhs, rcond=None)[0]
    poly = fn.poly
    for c, g in zip(coef, span):
        poly = poly - c * g
    out = orthonormalize(poly, marg, fn.index)
    return BasisFunction(out.subset, out.index, out.poly, out.norm_check, True)


@dataclass(eq=False)
class BasisSet:
    """All admissible basis functions for truncation (S, m), in canonical order.

    Canonical order: subset size, subset (lexicographic), total degree,
    multi-index (lexicographic).  It fixes the row and column order of the
    coefficient system.
    """

    measure: object
    S: int
    m: int
    functions: list
    _position: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._position = {(f.subset, f.index): k for k, f in enumerate(self.functions)}

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __getitem__(self, k):
        return self.functions[k]

    def keys(self):
        return [(f.subset, f.index) for f in self.functions]

    def position(self, subset, index):
        return self._position[(tuple(subset), tuple(index))]

    def subsets(self):
        seen = []
        for f in self.functions:
            if not seen or seen[-1] != f.subset:
                seen.append(f.subset)
        return seen

    def for_subset(self, subset):
        subset = tuple(subset)
        return [f for f in self.functions if f.subset == subset]

    def to_json(self, one_based=True):
        shift = 1 if one_based else 0
        data = []
        for f in self.functions:
            data.append({
                "subset": [v + shift for v in f.subset],
                "index": list(f.index),
                "terms": [[list(e), float(format(c, ".17g"))]
                          for e, c in sorted(f.poly.terms.items())],
            })
        return json.dumps({"S": self.S, "m": self.m, "functions": data}, indent=1)


def admissible_count(dimension, S, m):
    """Number of (u, j) pairs with 1 <= |u| <= S, |j| <= m, all parts >= 1."""
    return sum(comb(dimension, k) * comb(m, k) for k in range(1, min(S, dimension) + 1))


def build_basis(measure, S, m):
    """Construct and check every admissible basis function.

    Each function is checked for zero mean and for orthogonality to all
    members on strict subsets of its variables; a failing function is
    re-orthogonalized against them (and flagged ``repaired``).
    """
    N = measure.dimension
    S, m = int(S), int(m)
    if not 1 <= S <= N:
        raise DomainError(f"need 1 <= S <= N, got S={S}, N={N}")
    if m < S:
        raise DomainError(f"need S <= m, got S={S}, m={m}")
    functions = []
    by_subset = {}
    for u in subsets_up_to(N, S):
        marg = marginal(measure, u)
        nested = [f for v, fs in by_subset.items() if set(v) < set(u) for f in fs]
        members = []
        for fn in _subset_functions(marg, m):
            bad = abs(expectation(fn.poly, marg)) > ZERO_MEAN_TOL or any(
                abs(inner_product(fn.poly, g.poly, marg)) > HIERARCHICAL_TOL for g in nested)
            if bad:
                log.warning("repairing basis function %s%s by Gram-Schmidt", u, j)
                fn = _repair(fn, nested, marg)
            members.append(fn)
        by_subset[u] = members
        functions.extend(members)
    return BasisSet(measure, S, m, functions)


def _subset_functions(marg, m):
    """Orthonormal basis functions of one subset, in canonical order.

    Raw Hermite polynomials of different total degree are already
    orthogonal, but two of equal degree are not once the variables are
    correlated.  Gram-Schmidt in canonical order (via the Cholesky factor of
    the Gram matrix) fixes that; it only mixes polynomials of equal degree,
    so zero mean and orthogonality to functions of fewer variables survive.
    """
    raws = [orthonormalize(hermite_raw(marg, j), marg, j)
            for j in multi_indices(len(marg.subset), m)]
    G = np.array([[inner_product(a.poly, b.poly, marg) for b in raws] for a in raws])
    try:
        T = np.linalg.inv(np.linalg.cholesky(G))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"basis on {marg.subset} is numerically dependent; the marginal "
            "covariance is probably ill-conditioned") from exc
    out = []
    for r, fn in enumerate(raws):
        poly = Polynomial(marg.subset)
        for c in range(r + 1):
            if T[r, c] != 0.0:
                poly = poly + T[r, c] * raws[c].poly
        out.append(BasisFunction(marg.subset, fn.index, poly, inner_product(poly, poly, marg)))
    return out


def subset_basis(measure, subset, m):
    """Basis functions of a single subset (all parts >= 1, degree <= m)."""
    u = as_subset(subset, measure.dimension)
    return _subset_functions(marginal(measure, u), m)
