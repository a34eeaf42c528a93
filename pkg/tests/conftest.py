import numpy as np
import pytest

from gadd import PolynomialModel, from_correlations, quadratic_symmetric
from gadd.measure import validate

from reference import CORRELATIONS


def case_measure(case):
    r12, r13, r23 = CORRELATIONS[case]
    return from_correlations(3, [(0, 1, r12), (0, 2, r13), (1, 2, r23)])


def quadratic_model():
    return PolynomialModel(quadratic_symmetric(), 3)


def random_covariance(rng, N, max_corr=0.6):
    """A random valid covariance: random variances and a random correlation
    matrix from normalized Gram vectors, shrunk to keep it well conditioned."""
    G = rng.normal(size=(N, N + 2))
    C = G @ G.T
    d = np.sqrt(np.diag(C))
    R = C / np.outer(d, d)
    R = (1 - max_corr) * np.eye(N) + max_corr * R
    s = rng.uniform(0.5, 2.0, size=N)
    return validate(R * np.outer(s, s))


@pytest.fixture(params=[1, 2, 3, 4], ids=lambda c: f"case{c}")
def case(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_polynomial(rng, N, degree, max_vars=None, n_terms=None):
    """Sparse random polynomial in N variables with total degree <= degree,
    each term involving at most ``max_vars`` variables."""
    from gadd.moments import Polynomial

    max_vars = N if max_vars is None else min(max_vars, N)
    n_terms = n_terms or int(rng.integers(2, 7))
    terms = {tuple([0] * N): float(rng.normal())}
    for _ in range(n_terms):
        k = int(rng.integers(1, min(max_vars, degree) + 1))
        vars_ = rng.choice(N, size=k, replace=False)
        d = int(rng.integers(k, degree + 1))
        # spread the degree over the chosen variables, each at least one
        parts = np.ones(k, dtype=int) + rng.multinomial(d - k, np.ones(k) / k)
        e = [0] * N
        for v, p in zip(vars_, parts):
            e[int(v)] = int(p)
        terms[tuple(e)] = terms.get(tuple(e), 0.0) + float(rng.normal())
    return Polynomial(tuple(range(N)), terms)
