from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gadd import PolynomialModel, quadratic_symmetric
from gadd.errors import DomainError, IllConditionedError
from gadd.expansion import (LinearSystem, assemble, assemble_and_solve, basis_function,
                            classical_add, compute_I, compute_J, coupled,
                            expansion_from_dict, expansion_to_dict, load_expansion,
                            save_expansion, solve)
from gadd.measure import marginal, sample, validate
from gadd.models import CallableModel
from gadd.moments import expectation, inner_product
from gadd.polybasis import build_basis
from gadd.quadrature import DimensionReduction

from conftest import case_measure, quadratic_model, random_covariance, random_polynomial
from reference import COMPONENTS, MEAN


def tensor_expectation(f, cov, n=12):
    """E[f(X)] for X ~ N(0, cov) with a plain numpy Gauss-Hermite tensor grid."""
    x, w = np.polynomial.hermite_e.hermegauss(n)
    w = w / w.sum()
    d = cov.shape[0]
    L = np.linalg.cholesky(cov)
    Z = np.array(list(product(x, repeat=d)))
    W = np.prod(np.array(list(product(w, repeat=d))), axis=1)
    return float(W @ f(Z @ L.T))


def test_coupling_rule():
    assert coupled((0,), (0, 1))
    assert coupled((0, 1), (1, 2))
    assert not coupled((0, 1), (1,))
    assert not coupled((0,), (1, 2))


@pytest.mark.parametrize("u, j, v, k", [
    ((0,), (2,), (0, 1), (1, 1)),
    ((0,), (1,), (0, 2), (2, 1)),
    ((0, 1), (1, 1), (1, 2), (1, 1)),
    ((0, 1), (2, 1), (0, 2), (1, 2)),
])
def test_J_against_tensor_quadrature(u, j, v, k):
    meas = case_measure(3)
    pu, pv = basis_function(meas, u, j), basis_function(meas, v, k)
    extra = tuple(sorted(set(v) - set(u)))
    w = u + extra
    cov = np.zeros((len(w), len(w)))
    cov[:len(u), :len(u)] = marginal(meas, u).covariance
    cov[len(u):, len(u):] = marginal(meas, extra).covariance
    pos = {var: i for i, var in enumerate(w)}

    def f(x):
        return pu.poly(x[:, [pos[a] for a in u]]) * pv.poly(x[:, [pos[a] for a in v]])

    assert compute_J(meas, pu, pv) == pytest.approx(tensor_expectation(f, cov), abs=1e-8)


def test_J_rejects_uncoupled():
    meas = case_measure(2)
    with pytest.raises(DomainError):
        compute_J(meas, basis_function(meas, (0, 1), (1, 1)), basis_function(meas, (0,), (1,)))


def test_case2_univariate_row_recovers_published_component():
    exp = assemble_and_solve(quadratic_model(), case_measure(2), 2, 2)
    comp = exp.component((0,))
    assert comp.coefficient((2,)) == pytest.approx(5 / 13, abs=1e-12)
    assert comp.coefficient((0,)) == pytest.approx(-5 / 13, abs=1e-12)


def test_I_uncorrelated_linear_term():
    meas = case_measure(1)
    assert compute_I(quadratic_model(), meas, basis_function(meas, (0,), (1,))) == pytest.approx(4.0)


def test_I_numeric_matches_exact(rng):
    meas = random_covariance(rng, 3)
    model = quadratic_model()
    box = CallableModel(model.evaluate, 3, vectorized=True)
    for u, j in [((0,), (1,)), ((1,), (2,)), ((0, 2), (1, 1)), ((1, 2), (2, 1))]:
        psi = basis_function(meas, u, j)
        exact = compute_I(model, meas, psi)
        numeric = compute_I(box, meas, psi, DimensionReduction(n=5, S=None))
        assert numeric == pytest.approx(exact, abs=1e-10)


def test_diagonal_covariance_gives_identity_matrix():
    meas = validate(np.diag([1.0, 2.0, 0.5]))
    basis = build_basis(meas, 2, 3)
    A = assemble(quadratic_model(), meas, basis).A
    assert np.max(np.abs(A - np.eye(len(basis)))) < 1e-12


def test_generalized_equals_classical_when_independent():
    meas = case_measure(1)
    g = assemble_and_solve(quadratic_model(), meas, 2, 2)
    c = classical_add(quadratic_model(), meas, 2, 2)
    for key in g.coefficients:
        assert g.coefficients[key] == pytest.approx(c.coefficients[key], abs=1e-12)
    assert g.constant == c.constant == pytest.approx(12.0)


def test_classical_accepts_variances():
    c = classical_add(quadratic_model(), [1.0, 1.0, 1.0], 2, 2)
    assert c.classical and c.constant == pytest.approx(12.0)


def test_components_published(case):
    exp = assemble_and_solve(quadratic_model(), case_measure(case), 2, 2)
    assert exp.constant == pytest.approx(float(MEAN[case]), rel=1e-12)
    for u, terms in COMPONENTS[case].items():
        comp = exp.component(u)
        for e in product(range(3), repeat=len(u)):
            want = float(terms.get(e, 0))
            assert comp.coefficient(e) == pytest.approx(want, abs=1e-12), (u, e)


def test_trivariate_component_is_zero_at_full_truncation():
    exp = assemble_and_solve(quadratic_model(), case_measure(1), 3, 3)
    assert exp.component((0, 1, 2)).allclose(exp.component((0, 1, 2)) * 0.0, atol=1e-12)


def test_component_outside_truncation():
    exp = assemble_and_solve(quadratic_model(), case_measure(2), 2, 2)
    with pytest.raises(DomainError):
        exp.component((0, 1, 2))


def test_surrogate_reproduces_model(case):
    meas = case_measure(case)
    exp = assemble_and_solve(quadratic_model(), meas, 2, 2)
    x = sample(meas, 100, seed=case)
    np.testing.assert_allclose(exp(x), quadratic_model().evaluate(x), rtol=1e-8)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_higher_order_truncation_leaves_components_unchanged(seed, m):
    rng = np.random.default_rng(seed)
    meas = random_covariance(rng, 3)
    model = PolynomialModel(random_polynomial(rng, 3, 2, max_vars=2), 3)
    ref = assemble_and_solve(model, meas, 2, 2)
    big = assemble_and_solve(model, meas, 2, m)
    for u in ref.subsets():
        assert big.component(u).allclose(ref.component(u), atol=1e-8)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_components_zero_mean_and_hierarchically_orthogonal(seed):
    rng = np.random.default_rng(seed)
    meas = random_covariance(rng, 3)
    model = PolynomialModel(random_polynomial(rng, 3, 3), 3)
    exp = assemble_and_solve(model, meas, 3, 3)
    comps = exp.components()
    for u, p in comps.items():
        assert abs(expectation(p, marginal(meas, u))) < 1e-10
        for v, q in comps.items():
            if set(v) < set(u):
                assert abs(inner_product(p, q, marginal(meas, u))) < 1e-8


def test_json_round_trip(tmp_path):
    exp = assemble_and_solve(quadratic_model(), case_measure(4), 2, 3)
    path = tmp_path / "e.json"
    save_expansion(exp, path)
    back = load_expansion(path)
    assert back.constant == exp.constant
    assert back.coefficients == exp.coefficients
    assert back.measure == exp.measure
    d = expansion_to_dict(exp)
    assert d["coefficients"][0]["subset"] == [1]
    d["coefficients"].pop()
    with pytest.raises(DomainError):
        expansion_from_dict(d)


def test_ill_conditioned_system_is_refused():
    A = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]])
    with pytest.raises(IllConditionedError):
        solve(LinearSystem(A, np.ones(2), [0, 1]))


def test_diagnostics_recorded():
    exp = assemble_and_solve(quadratic_model(), case_measure(3), 2, 2)
    assert exp.diagnostics["size"] == 9
    assert exp.diagnostics["condition"] >= 1.0
    assert exp.diagnostics["residual"] < 1e-12
