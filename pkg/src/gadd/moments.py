"""
Sparse polynomials and exact Gaussian moments.

Moments E[X^alpha] under N(0, C) are computed by Isserlis' theorem.  The
pairings of the multiset of variables are enumerated through the recursion

    E[X^alpha] = sum_j C[i, j] * (alpha - e_i)_j * E[X^(alpha - e_i - e_j)]

where ``i`` is the first variable with a positive exponent.  Grouping the
pairings this way turns the (2k-1)!! enumeration into a walk over the
exponent lattice, which is memoized per covariance.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceError
from .measure import as_subset

#: total degree above which gaussian_moment refuses to work
MAX_MOMENT_DEGREE = 32


class Polynomial:
    """Sparse polynomial in the variables of ``subset``.

    ``terms`` maps exponent tuples (aligned with ``subset``) to coefficients.
    Zero coefficients are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("subset", "terms")

    def __init__(self, subset, terms=None):
        self.subset = as_subset(subset)
        k = len(self.subset)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != k:
                raise DomainError(f"exponent {exps} does not match subset {self.subset}")
            if any(e < 0 for e in exps):
                raise DomainError(f"negative exponent in {exps}")
            c = float(c)
            if c != 0.0:
                clean[exps] = clean.get(exps, 0.0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0.0}

    @classmethod
    def _trusted(cls, subset, terms):
        # internal results: subset already normalized, exponents already int tuples
        out = cls.__new__(cls)
        out.subset = subset
        out.terms = {e: c for e, c in terms.items() if c != 0.0}
        return out

    @classmethod
    def constant(cls, value, subset=()):
        subset = as_subset(subset)
        return cls(subset, {(0,) * len(subset): value})

    @classmethod
    def variable(cls, index):
        return cls((index,), {(1,): 1.0})

    @classmethod
    def monomial(cls, subset, exponents, coefficient=1.0):
        return cls(subset, {tuple(exponents): coefficient})

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def coefficient(self, exponents):
        return self.terms.get(tuple(exponents), 0.0)

    def embed(self, superset):
        """Re-express over a superset of the current variables."""
        superset = as_subset(superset)
        if superset == self.subset:
            return self
        pos = {v: k for k, v in enumerate(superset)}
        try:
            where = [pos[v] for v in self.subset]
        except KeyError:
            raise DomainError(f"{self.subset} is not contained in {superset}") from None
        out = {}
        for exps, c in self.terms.items():
            e = [0] * len(superset)
            for p, k in zip(where, exps):
                e[p] = k
            out[tuple(e)] = c
        return Polynomial._trusted(superset, out)

    def compact(self):
        """Drop variables that appear in no term."""
        used = [k for k in range(len(self.subset))
                if any(e[k] for e in self.terms)]
        subset = tuple(self.subset[k] for k in used)
        return Polynomial._trusted(subset, {tuple(e[k] for k in used): c
                                            for e, c in self.terms.items()})

    def _aligned(self, other):
        w = as_subset(set(self.subset) | set(other.subset))
        return self.embed(w), other.embed(w)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other, self.subset)
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, 0.0) + c
        return Polynomial._trusted(a.subset, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._trusted(self.subset, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            s = float(other)
            return Polynomial._trusted(self.subset, {e: s * c for e, c in self.terms.items()})
        a, b = self._aligned(other)
        terms = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                terms[e] = terms.get(e, 0.0) + ca * cb
        return Polynomial._trusted(a.subset, terms)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / float(s))

    def derivative(self, variable):
        """Partial derivative with respect to variable index ``variable``."""
        try:
            k = self.subset.index(variable)
        except ValueError:
            return Polynomial(self.subset)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                d = list(e)
                d[k] -= 1
                out[tuple(d)] = c * e[k]
        return Polynomial._trusted(self.subset, out)

    def __call__(self, x):
        """Evaluate at points ``x`` of shape (..., len(subset))."""
        x = np.asarray(x, dtype=float)
        k = len(self.subset)
        if k == 0:
            lead = x.shape[:-1] if x.ndim else ()
            c = self.terms.get((), 0.0)
            return np.full(lead, c) if lead else c
        if x.shape[-1:] != (k,):
            raise DomainError(f"point dimension {x.shape[-1:]} != ({k},)")
        lead = x.shape[:-1]
        if not self.terms:
            return np.zeros(lead) if lead else 0.0
        dmax = max(max(e) for e in self.terms)
        # powers[p][..., i] = x_i ** p
        powers = [np.ones_like(x)]
        for _ in range(dmax):
            powers.append(powers[-1] * x)
        out = np.zeros(lead)
        for e, c in sorted(self.terms.items()):
            t = np.full(lead, c)
            for i, p in enumerate(e):
                if p:
                    t = t * powers[p][..., i]
            out = out + t
        return out if lead else float(out)

    def allclose(self, other, atol=1e-12):
        a, b = self._aligned(other)
        keys = set(a.terms) | set(b.terms)
        return all(abs(a.coefficient(e) - b.coefficient(e)) <= atol for e in keys)

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0])):
            mono = "*".join(
                f"x{v}" + (f"^{p}" if p > 1 else "")
                for v, p in zip(self.subset, e) if p
            )
            parts.append(f"{c:+.6g}" + (f"*{mono}" if mono else ""))
        return "Polynomial(" + " ".join(parts) + ")"


@lru_cache(maxsize=1 << 18)
def _wick(cov_bytes, n, alpha):
    if sum(alpha) % 2:
        return 0.0
    i = next((k for k, a in enumerate(alpha) if a), None)
    if i is None:
        return 1.0
    cov = np.frombuffer(cov_bytes).reshape(n, n)
    rest = list(alpha)
    rest[i] -= 1
    total = 0.0
    for j in range(i, n):
        if rest[j] and cov[i, j] != 0.0:
            nxt = list(rest)
            nxt[j] -= 1
            total += cov[i, j] * rest[j] * _wick(cov_bytes, n, tuple(nxt))
    return total


@lru_cache(maxsize=1 << 18)
def _moment(cov_bytes, n, alpha):
    # drop variables with zero exponent so equal sub-moments share cache entries
    if sum(alpha) % 2:
        return 0.0
    used = [k for k, a in enumerate(alpha) if a]
    if not used:
        return 1.0
    if len(used) == n:
        return _wick(cov_bytes, n, alpha)
    cov = np.frombuffer(cov_bytes).reshape(n, n)
    sub = np.ascontiguousarray(cov[np.ix_(used, used)])
    return _wick(sub.tobytes(), len(used), tuple(alpha[k] for k in used))


def _check_alpha(alpha, n):
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n:
        raise DomainError(f"multi-index {alpha} not aligned with a {n}-variable measure")
    if any(a < 0 for a in alpha):
        raise DomainError(f"negative exponent in {alpha}")
    if sum(alpha) > MAX_MOMENT_DEGREE:
        raise ResourceError(f"moment of total degree {sum(alpha)} exceeds cap {MAX_MOMENT_DEGREE}")
    return alpha


def gaussian_moment(marginal, alpha):
    """E[prod_k X_{u_k}^{alpha_k}] under the zero-mean marginal measure.

    Exact up to floating point; odd total degree returns exactly 0.
    """
    cov = np.ascontiguousarray(marginal.covariance, dtype=float)
    alpha = _check_alpha(alpha, cov.shape[0])
    return _moment(cov.tobytes(), cov.shape[0], alpha)


def expectation(poly, *blocks):
    """E[poly] under the product of the marginal measures in ``blocks``.

    The blocks must have disjoint subsets covering every variable of
    ``poly``.  With a single block this is the plain Gaussian expectation.
    """
    covered = {}
    for b, mm in enumerate(blocks):
        for k, v in enumerate(mm.subset):
            if v in covered:
                raise DomainError("measure blocks overlap")
            covered[v] = (b, k)
    try:
        where = [covered[v] for v in poly.subset]
    except KeyError:
        raise DomainError(
            f"polynomial variables {poly.subset} not covered by the measure") from None
    if poly.degree > MAX_MOMENT_DEGREE:
        raise ResourceError(f"moment of total degree {poly.degree} exceeds cap {MAX_MOMENT_DEGREE}")
    keys = [(np.ascontiguousarray(mm.covariance, dtype=float).tobytes(), mm.size)
            for mm in blocks]
    total = 0.0
    for e, c in sorted(poly.terms.items()):
        alphas = [[0] * mm.size for mm in blocks]
        for (b, k), p in zip(where, e):
            alphas[b][k] = p
        val = c
        for (cb, n), a in zip(keys, alphas):
            if val == 0.0:
                break
            val *= _moment(cb, n, tuple(a))
        total += val
    return total


def inner_product(g, h, marginal):
    """<g, h> = E[g(X) h(X)] under the Gaussian ``marginal`` measure."""
    w = set(marginal.subset)
    if not (set(g.subset) <= w and set(h.subset) <= w):
        raise DomainError(
            f"polynomial subsets {g.subset}, {h.subset} not contained in {marginal.subset}")
    return expectation(g * h, marginal)


def product_measure_moment(marginal_a, marginal_b, alpha):
    """Moment of index ``alpha`` (over the sorted union of both subsets)
    under the product measure f_a x f_b."""
    if set(marginal_a.subset) & set(marginal_b.subset):
        raise DomainError("product_measure_moment needs disjoint subsets")
    union = as_subset(set(marginal_a.subset) | set(marginal_b.subset))
    alpha = tuple(alpha)
    if len(alpha) != len(union):
        raise DomainError(f"multi-index {alpha} not aligned with {union}")
    pos = {v: k for k, v in enumerate(union)}
    a = [alpha[pos[v]] for v in marginal_a.subset]
    b = [alpha[pos[v]] for v in marginal_b.subset]
    return gaussian_moment(marginal_a, a) * gaussian_moment(marginal_b, b)


def clear_cache():
    _wick.cache_clear()
    _moment.cache_clear()
