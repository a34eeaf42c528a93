from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gadd.errors import DomainError
from gadd.measure import marginal, validate
from gadd.models import CallableModel
from gadd.moments import gaussian_moment
from gadd.quadrature import (DimensionReduction, ReductionPlan, correlated_rule,
                             cut_coefficients, gauss_hermite, tensor_rule)

from conftest import random_covariance


def test_small_rules():
    r1 = gauss_hermite(1)
    np.testing.assert_array_equal(r1.nodes[:, 0], [0.0])
    np.testing.assert_allclose(r1.weights, [1.0])
    r2 = gauss_hermite(2)
    np.testing.assert_allclose(r2.nodes[:, 0], [-1.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(r2.weights, [0.5, 0.5])
    r3 = gauss_hermite(3)
    np.testing.assert_allclose(r3.nodes[:, 0], [-np.sqrt(3), 0.0, np.sqrt(3)], atol=1e-14)
    np.testing.assert_allclose(r3.weights, [1 / 6, 2 / 3, 1 / 6])
    assert r3.nodes[1, 0] == 0.0


@pytest.mark.parametrize("n", [4, 5, 9, 20, 40])
def test_matches_numpy_hermegauss(n):
    x, w = np.polynomial.hermite_e.hermegauss(n)
    r = gauss_hermite(n)
    np.testing.assert_allclose(r.nodes[:, 0], x, atol=1e-12)
    np.testing.assert_allclose(r.weights, w / w.sum(), rtol=1e-9, atol=1e-300)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_exact_for_degree_up_to_2n_minus_1(n):
    r = gauss_hermite(n)
    m1 = marginal(validate(np.eye(1)), (0,))
    x = r.nodes[:, 0]
    for d in range(2 * n):
        scale = float(np.sum(r.weights * np.abs(x) ** d))
        assert r.integrate(lambda x: x[:, 0] ** d) == pytest.approx(
            gaussian_moment(m1, (d,)), rel=1e-11, abs=1e-13 * scale)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_correlated_rule_reproduces_wick(seed, N):
    meas = random_covariance(np.random.default_rng(seed), N)
    marg = marginal(meas, range(N))
    rule = correlated_rule(marg, 4)
    for alpha in product(range(4), repeat=N):
        if sum(alpha) <= 6:
            got = rule.integrate(lambda x: np.prod(x ** np.array(alpha), axis=1))
            assert got == pytest.approx(gaussian_moment(marg, alpha), rel=1e-10, abs=1e-10)


def test_rule_errors():
    with pytest.raises(DomainError):
        gauss_hermite(0)
    with pytest.raises(DomainError):
        gauss_hermite(65)
    with pytest.raises(DomainError):
        ReductionPlan.build(3, 0, 3)


def test_tensor_rule_size():
    assert len(tensor_rule(3, 4)) == 64


@pytest.mark.parametrize("n, count", [(3, 801), (5, 3121)])
def test_twenty_variable_counts(n, count):
    plan = ReductionPlan.build(20, 2, n)
    assert plan.evaluation_count == count == ReductionPlan.expected_count(20, n)


@pytest.mark.parametrize("N", [2, 3, 6, 9])
@pytest.mark.parametrize("n", [1, 3, 5, 7])
def test_count_formula_for_odd_n(N, n):
    assert ReductionPlan.build(N, 2, n).evaluation_count == ReductionPlan.expected_count(N, n)


def test_cut_coefficients_sum_to_one():
    # integrating a constant must give the constant
    for N in range(1, 8):
        for S in range(1, N + 1):
            plan = ReductionPlan.build(N, S, 3)
            assert plan.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert cut_coefficients(5, 2) == {0: 6.0, 1: -3.0, 2: 1.0}


def test_bivariate_additive_integrand_is_exact():
    """In standard-normal coordinates a sum of at most bivariate terms is
    integrated exactly by the S=2 rule."""
    N = 6
    meas = validate(np.eye(N))
    terms = [((0, 1), (2, 2)), ((2, 4), (1, 3)), ((3,), (4,)), ((1, 5), (4, 2))]

    def f(x):
        out = np.full(len(x), 1.5)
        for vars_, pows in terms:
            out = out + np.prod([x[:, v] ** p for v, p in zip(vars_, pows)], axis=0)
        return out

    exact = 1.5 + 1.0 * 1.0 + 0.0 + 3.0 + 3.0 * 1.0
    model = CallableModel(f, N, vectorized=True)
    got = DimensionReduction(n=5, S=2).integrate(model, marginal(meas, range(N)))
    assert got == pytest.approx(exact, abs=1e-12)
    assert model.evaluations == ReductionPlan.expected_count(N, 5)


def test_trivariate_term_is_not_exact_at_order_two():
    meas = validate(np.eye(3))
    model = CallableModel(lambda x: (x[:, 0] * x[:, 1] * x[:, 2]) ** 2, 3, vectorized=True)
    marg = marginal(meas, range(3))
    assert DimensionReduction(n=3, S=2).integrate(model, marg) != pytest.approx(1.0)
    assert DimensionReduction(n=3, S=3).integrate(model, marg) == pytest.approx(1.0)


def test_weight_stack_shape():
    meas = validate([[1.0, 0.3], [0.3, 1.0]])
    model = CallableModel(lambda x: x[:, 0], 2, vectorized=True)
    got = DimensionReduction(n=4, S=None).integrate(
        model, marginal(meas, (0, 1)), lambda x: np.stack([x[:, 0], x[:, 1]], axis=-1))
    np.testing.assert_allclose(got, [1.0, 0.3], atol=1e-13)


def test_plan_logs_count(caplog):
    meas = validate(np.eye(20))
    model = CallableModel(lambda x: x.sum(axis=1), 20, vectorized=True)
    with caplog.at_level("INFO", logger="gadd.quadrature"):
        DimensionReduction(n=3, S=2).integrate(model, marginal(meas, range(20)))
    assert "801 model evaluations" in caplog.text
    assert model.evaluations == 801
