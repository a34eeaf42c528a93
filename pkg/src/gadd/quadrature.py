"""
Gauss-Hermite rules and the cut (dimension-reduction) integration scheme.

All rules use the probabilists' convention: weights integrate against the
standard normal density and sum to one.  Correlated measures are handled by
mapping standard-normal nodes through the lower Cholesky factor, x = L z.

The S-variate reduction approximates an N-dimensional expectation by a signed
sum of at most S-dimensional tensor rules anchored at a reference point c
(in z coordinates):

    I ~ sum_{k=0}^{S} (-1)^(S-k) * C(N-k-1, S-k) * sum_{|w|=k} I_w

where I_w integrates over z_w with the remaining coordinates held at c.  The
whole scheme is linear in the integrand, so it collapses to one weighted
rule over the distinct nodes; with an odd number of points per dimension the
reference coordinate is itself a node, and for S=2 the node count is
N(N-1)(n-1)^2/2 + N(n-1) + 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError

log = logging.getLogger(__name__)

MAX_RULE_POINTS = 64


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray    # shape (k, d)
    weights: np.ndarray  # shape (k,)
    order: int

    def __len__(self):
        return len(self.weights)

    def integrate(self, f):
        """Weighted sum of ``f`` over the nodes; ``f`` maps (k, d) -> (k, ...)."""
        vals = np.asarray(f(self.nodes), dtype=float)
        return np.tensordot(self.weights, vals, axes=(0, 0))


def gauss_hermite(n):
    """n-point Gauss-Hermite rule for the standard normal weight.

    Golub-Welsch: the nodes are the eigenvalues of the Jacobi matrix of the
    monic probabilists' Hermite recurrence (zero diagonal, sqrt(k) off the
    diagonal); the weights are the squared first eigenvector components.
    """
    n = int(n)
    if not 1 <= n <= MAX_RULE_POINTS:
        raise DomainError(f"number of Gauss-Hermite points must be in [1, {MAX_RULE_POINTS}], got {n}")
    if n == 1:
        return QuadratureRule(np.zeros((1, 1)), np.ones(1), 1)
    off = np.sqrt(np.arange(1, n, dtype=float))
    x, vecs = eigh_tridiagonal(np.zeros(n), off)
    w = vecs[0, :] ** 2
    # the rule is symmetric; enforce it so the middle node is exactly 0
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    w = w / w.sum()
    return QuadratureRule(x[:, None], w, n)


def tensor_rule(dim, n):
    """Tensor product of the n-point rule in ``dim`` standard-normal dimensions."""
    base = gauss_hermite(n)
    x = base.nodes[:, 0]
    if dim == 0:
        return QuadratureRule(np.zeros((1, 0)), np.ones(1), n)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*([base.weights] * dim), indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return QuadratureRule(nodes, weights, n)


def correlated_rule(marg, n):
    """Tensor rule mapped to N(0, C_u) through the Cholesky factor of C_u."""
    std = tensor_rule(marg.size, n)
    nodes = std.nodes @ np.asarray(marg.cholesky).T
    return QuadratureRule(nodes, std.weights, n)


def cut_coefficients(dimension, S):
    """Signed multipliers of the k-variate cut integrals, k = 0..S."""
    N = int(dimension)
    if S >= N:
        return {N: 1.0}
    return {k: (-1.0) ** (S - k) * comb(N - k - 1, S - k) for k in range(S + 1)}


@dataclass(eq=False)
class ReductionPlan:
    """Distinct standard-normal nodes and signed weights of an S-variate
    cut integration rule in ``dimension`` variables."""

    dimension: int
    S: int
    n: int
    reference: np.ndarray
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    schedule: list = field(repr=False)

    @property
    def evaluation_count(self):
        return len(self.weights)

    @classmethod
    def build(cls, dimension, S, n, reference=None):
        N = int(dimension)
        S = int(S)
        if N < 1:
            raise DomainError("dimension must be positive")
        if S < 1:
            raise DomainError(f"reduction order must be >= 1, got {S}")
        ref = np.zeros(N) if reference is None else np.asarray(reference, dtype=float)
        if ref.shape != (N,):
            raise DomainError(f"reference point must have shape ({N},)")
        base = gauss_hermite(n)
        x1, w1 = base.nodes[:, 0], base.weights
        acc = {}
        schedule = []
        for k, coef in cut_coefficients(N, S).items():
            for w in combinations(range(N), k):
                schedule.append((w, coef))
                for pick in product(range(len(x1)), repeat=k):
                    z = ref.copy()
                    wt = coef
                    for var, p in zip(w, pick):
                        z[var] = x1[p]
                        wt *= w1[p]
                    key = z.tobytes()
                    if key in acc:
                        acc[key][1] += wt
                    else:
                        acc[key] = [z, wt]
        nodes = np.array([v[0] for v in acc.values()]).reshape(-1, N)
        weights = np.array([v[1] for v in acc.values()])
        return cls(N, S, int(n), ref, nodes, weights, schedule)

    @staticmethod
    def expected_count(dimension, n):
        """Distinct nodes of the S=2 plan for odd n (reference on the grid)."""
        N = dimension
        return N * (N - 1) * (n - 1) ** 2 // 2 + N * (n - 1) + 1


@dataclass
class DimensionReduction:
    """Numerical integrator for black-box models.

    Parameters
    ----------
    n : int
        Gauss-Hermite points per dimension.
    S : int or None
        Reduction order.  None, or any value >= N, means the full tensor rule.
    reference : array_like or None
        Anchor in standard-normal coordinates; the origin (the mean) by default.
    """

    n: int = 5
    S: int | None = 2
    reference: object = None
    _plans: dict = field(default_factory=dict, repr=False)

    def plan(self, dimension):
        S = dimension if self.S is None else min(self.S, dimension)
        key = (dimension, S)
        if key not in self._plans:
            self._plans[key] = ReductionPlan.build(dimension, S, self.n, self.reference)
        return self._plans[key]

    def integrate(self, model, marg, weight=None):
        """E[y(X) * weight(X)] for X ~ N(0, C) with C the covariance of ``marg``.

        ``marg`` must cover all model variables (it is a full-dimensional
        measure, for example the product measure f_u x f_{-u}).  ``weight``
        maps points (k, N) to (k,) or (k, p); the result has the trailing
        shape of ``weight``.
        """
        plan = self.plan(marg.size)
        x = plan.nodes @ np.asarray(marg.cholesky).T
        y = np.asarray(model.evaluate(x), dtype=float)
        log.info("integration plan: %d model evaluations (N=%d, S=%d, n=%d)",
                 plan.evaluation_count, plan.dimension, plan.S, plan.n)
        if weight is None:
            vals = y
        else:
            w = np.asarray(weight(x), dtype=float)
            vals = y.reshape((-1,) + (1,) * (w.ndim - 1)) * w
        return np.tensordot(plan.weights, vals, axes=(0, 0))


def dimension_reduction_integrate(model, marg, S, n, weight=None, reference=None):
    """One-shot form of :class:`DimensionReduction`."""
    return DimensionReduction(n=n, S=S, reference=reference).integrate(model, marg, weight)
