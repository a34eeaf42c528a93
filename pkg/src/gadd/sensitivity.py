"""
Second-moment statistics and global sensitivity indices of a decomposition.

Every expectation of a product of component functions is taken under the
joint marginal of the union of their variables.  Pairs (u, v) with neither
subset containing the other carry the covariance terms; nested pairs are
orthogonal by construction and only enter the unreduced index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DegenerateResponseError, DomainError
from .expansion import assemble_and_solve
from .measure import marginal
from .moments import Polynomial, inner_product

VARIANCE_TOL = 1e-14
TIE_RTOL = 1e-9
ZERO_INDEX = 1e-12


def _non_nested(u, v):
    su, sv = set(u), set(v)
    return not su <= sv and not sv <= su


def _joint_expectation(g, h, measure):
    w = tuple(sorted(set(g.subset) | set(h.subset)))
    return inner_product(g, h, marginal(measure, w))


@dataclass(eq=False)
class VarianceLedger:
    variance: float
    variance_sum: float
    covariance_sum: float
    per_subset: dict   # u -> E[y_u^2]
    pairs: dict        # (u, v) -> E[y_u y_v] for ordered non-nested pairs


def mean(expansion):
    return expansion.constant


def variance(expansion, measure=None):
    """Variance as the sum of component variances plus the covariances of
    every ordered non-nested pair of components."""
    measure = measure or expansion.measure
    comps = {u: p for u, p in expansion.components().items() if not p.is_zero()}
    per = {u: _joint_expectation(p, p, measure) for u, p in comps.items()}
    pairs = {}
    keys = list(comps)
    for a, b in combinations(keys, 2):
        if _non_nested(a, b):
            val = _joint_expectation(comps[a], comps[b], measure)
            pairs[(a, b)] = pairs[(b, a)] = val
    vs = sum(per[u] for u in keys)
    cs = sum(pairs[k] for k in sorted(pairs))
    return VarianceLedger(vs + cs, vs, cs, per, pairs)


def _all_subsets(dimension, S):
    # every subset when there are few variables, else only those inside the truncation
    top = dimension if dimension <= 10 else S
    out = []
    for k in range(1, top + 1):
        out.extend(combinations(range(dimension), k))
    return out


@dataclass(eq=False)
class SensitivityReport:
    """Triplets (S_uv, S_uc, S_u) per subset plus summary statistics.

    ``triplets`` covers every non-empty subset when N <= 10 (subsets beyond
    the truncation are exactly zero); otherwise only subsets with |u| <= S.
    """

    mean: float
    variance: float
    dimension: int
    truncation: tuple
    triplets: dict
    ledger: VarianceLedger = field(repr=False)

    def triplet(self, subset):
        return self.triplets.get(tuple(subset), (0.0, 0.0, 0.0))

    def total(self, subset):
        return self.triplet(subset)[2]

    def column_sums(self):
        arr = np.array([self.triplets[u] for u in sorted(self.triplets)])
        return tuple(float(s) for s in arr.sum(axis=0))


def indices(expansion, measure=None):
    """Variance-driven, covariance-driven and total index of every subset."""
    measure = measure or expansion.measure
    led = variance(expansion, measure)
    var = led.variance
    if not var > VARIANCE_TOL * max(1.0, expansion.constant ** 2):
        raise DegenerateResponseError(f"response variance {var:.3g} is (numerically) zero")
    cov_by = {u: 0.0 for u in led.per_subset}
    for (a, b), val in sorted(led.pairs.items()):
        cov_by[a] += val
    trip = {}
    for u in _all_subsets(expansion.dimension, expansion.basis.S):
        sv = led.per_subset.get(u, 0.0) / var
        sc = cov_by.get(u, 0.0) / var
        trip[u] = (sv, sc, sv + sc)
    return SensitivityReport(expansion.constant, var, expansion.dimension,
                             expansion.truncation, trip, led)


def unreduced_correlative_index(expansion, subset, measure=None):
    """Covariance index summed over every other component, nested ones
    included.  Equals the covariance-driven index when the components are
    hierarchically orthogonal."""
    measure = measure or expansion.measure
    u = tuple(subset)
    comps = expansion.components()
    if u not in comps:
        return 0.0
    var = variance(expansion, measure).variance
    if not var > VARIANCE_TOL:
        raise DegenerateResponseError(f"response variance {var:.3g} is (numerically) zero")
    total = 0.0
    for v, p in comps.items():
        if v != u and not p.is_zero():
            total += _joint_expectation(comps[u], p, measure)
    return total / var


@dataclass
class TotalEffects:
    values: np.ndarray
    ranks: np.ndarray   # 1 = most important; tied variables share the best rank
    tied: np.ndarray    # True where a variable ties with another


def total_effects(report):
    """Sum of S_u over subsets containing each variable, with rankings."""
    N = report.dimension
    vals = np.zeros(N)
    for u, (_, _, s) in sorted(report.triplets.items()):
        for i in u:
            vals[i] += s
    tol = TIE_RTOL * max(1.0, float(np.max(np.abs(vals))))
    ranks = np.empty(N, dtype=int)
    tied = np.zeros(N, dtype=bool)
    for i in range(N):
        ranks[i] = 1 + int(np.sum(vals > vals[i] + tol))
        tied[i] = bool(np.sum(np.abs(vals - vals[i]) <= tol) > 1)
    return TotalEffects(vals, ranks, tied)


@dataclass
class EffectiveDimensions:
    superposition: int
    truncation: int
    p: float
    superposition_saturated: bool = False
    truncation_saturated: bool = False


def effective_dimensions(report, p):
    """Smallest S whose partial sums of S_u are within 1 - p of one.

    Superposition: subsets with |u| <= S.  Truncation: subsets of the first
    S variables.  The absolute-value criterion is applied literally, so a
    partial sum overshooting one also qualifies.  When no S <= N qualifies
    the dimension N is reported with the saturation flag set.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"threshold p must lie in [0, 1], got {p}")
    N = report.dimension
    bound = 1.0 - p
    items = sorted(report.triplets.items())

    def first(pred):
        for S in range(1, N + 1):
            part = sum(t[2] for u, t in items if pred(u, S))
            if abs(1.0 - part) <= bound + 1e-12:
                return S, False
        return N, True

    ss, ss_sat = first(lambda u, S: len(u) <= S)
    st, st_sat = first(lambda u, S: max(u) < S)
    return EffectiveDimensions(ss, st, p, ss_sat, st_sat)


@dataclass
class AdaptiveSelection:
    retained: dict            # u -> highest accepted order m_u
    eps1: float
    eps2: float
    history: dict = field(default_factory=dict)   # (u, m) -> order-m estimate of S_u


def adaptive_select(model, measure, eps1, eps2, m_max, S_max=None, integrator=None):
    """Filter (subset, order) pairs by the size and growth of their indices.

    For each order m = 1..m_max the decomposition is recomputed at
    truncation (min(S_max, m), m) and each subset's total index at that order
    is recorded.  A subset u is swept from m = |u| upward and keeps order m
    while both index > eps1 and relative growth > eps2 hold; the growth test
    passes automatically when the previous index is zero, where the ratio is
    undefined.  Indices below 1e-12 in magnitude count as zero.
    """
    if eps1 < 0 or eps2 < 0:
        raise DomainError("thresholds must be non-negative")
    N = measure.dimension
    S_max = N if S_max is None else min(int(S_max), N)
    history = {}
    for m in range(1, int(m_max) + 1):
        exp = assemble_and_solve(model, measure, min(S_max, m), m, integrator)
        rep = indices(exp, measure)
        for u in exp.subsets():
            history[(u, m)] = rep.total(u)
    retained = {}
    subsets = sorted({u for u, _ in history}, key=lambda u: (len(u), u))
    for u in subsets:
        prev = None
        for m in range(len(u), int(m_max) + 1):
            s = history.get((u, m), 0.0)
            if abs(s) <= ZERO_INDEX:
                s = 0.0
            ok = s > eps1
            if ok and prev is not None and abs(prev) > ZERO_INDEX:
                ok = (s - prev) / prev > eps2
            if not ok:
                break
            retained[u] = m
            prev = s
    return AdaptiveSelection(retained, eps1, eps2, history)


def component_table(expansion):
    """(subset, polynomial) rows for every subset, zero beyond the truncation."""
    comps = expansion.components()
    return [(u, comps.get(u, Polynomial(u)))
            for u in _all_subsets(expansion.dimension, expansion.basis.S)]
