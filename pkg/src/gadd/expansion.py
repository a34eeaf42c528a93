"""
Generalized ANOVA dimensional decomposition of a function of dependent
Gaussian inputs.

For every admissible (u, j) the truncated coefficients C_uj solve

    C_uj + sum_{(v, k)} J_{uj, vk} C_vk = I_uj

where (v, k) ranges over the basis functions whose subset v meets u but is
not contained in it.  I_uj integrates y * psi_uj against f_u x f_{-u}, and
J_{uj,vk} integrates psi_uj * psi_vk against f_u x f_{v \\ u}.  Both are
exact moment sums when y is a polynomial.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DomainError, IllConditionedError, SolverError
from .measure import as_subset, marginal, product_measure, validate
from .moments import Polynomial, expectation
from .polybasis import BasisSet, build_basis, subset_basis
from .quadrature import DimensionReduction

log = logging.getLogger(__name__)

MAX_CONDITION = 1e12
RESIDUAL_RTOL = 1e-8


def coupled(u, v):
    """True when v meets u and is not a subset of u."""
    su, sv = set(u), set(v)
    return bool(su & sv) and not sv <= su


def basis_function(measure, subset, index):
    """The member (subset, index) of the basis, as built by build_basis."""
    u = as_subset(subset, measure.dimension)
    index = tuple(int(a) for a in index)
    if len(index) != len(u) or min(index, default=0) < 1:
        raise DomainError(f"multi-index {index} must have one positive part per variable of {u}")
    for f in subset_basis(measure, u, sum(index)):
        if f.index == index:
            return f
    raise DomainError(f"no basis function {u}{index}")


def compute_J(measure, psi_u, psi_v):
    """Coupling integral of two basis functions.

    E[psi_u(X_u) psi_v(X_v)] with X_u ~ f_u and X_{v \\ u} ~ f_{v \\ u}
    drawn independently.
    """
    u, v = psi_u.subset, psi_v.subset
    if not coupled(u, v):
        raise DomainError(f"subsets {u} and {v} are not coupled")
    if 0 in psi_u.index or 0 in psi_v.index:
        raise DomainError("coupling integrals need multi-indices with all parts >= 1")
    extra = tuple(sorted(set(v) - set(u)))
    return expectation(psi_u.poly * psi_v.poly,
                       marginal(measure, u), marginal(measure, extra))


def compute_I(model, measure, psi, integrator=None):
    """Projection integral of the model onto one basis function.

    Polynomial models are integrated exactly unless an integrator is
    given; other models need the integrator (a DimensionReduction by default).
    """
    return _projections(model, measure, [psi], integrator)[0]


def _projections(model, measure, functions, integrator=None):
    """I integrals for basis functions that all share one subset."""
    u = functions[0].subset
    if any(f.subset != u for f in functions):
        raise DomainError("_projections expects functions on a single subset")
    if integrator is None and model.polynomial is not None:
        y = model.polynomial.compact()
        mu = marginal(measure, u)
        out = []
        for f in functions:
            prod = y * f.poly
            rest = tuple(sorted(set(prod.subset) - set(u)))
            blocks = [mu, marginal(measure, rest)] if rest else [mu]
            out.append(expectation(prod, *blocks))
        return np.array(out)
    integrator = integrator or DimensionReduction()
    pm = product_measure(measure, u)
    idx = np.array(u)

    def weights(x):
        return np.stack([f.poly(x[:, idx]) for f in functions], axis=-1)

    return np.atleast_1d(integrator.integrate(model, pm, weights))


def model_mean(model, measure, integrator=None):
    """E[y(X)] under the joint measure."""
    if integrator is None and model.polynomial is not None:
        y = model.polynomial.compact()
        if not y.subset:
            return y.coefficient(())
        return expectation(y, marginal(measure, y.subset))
    integrator = integrator or DimensionReduction()
    return float(integrator.integrate(model, marginal(measure, range(measure.dimension))))


@dataclass(eq=False)
class LinearSystem:
    A: np.ndarray
    b: np.ndarray
    keys: list

    @property
    def size(self):
        return len(self.b)


def assemble(model, measure, basis, integrator=None):
    """Build A (identity plus coupling integrals) and b (projections)."""
    L = len(basis)
    A = np.eye(L)
    for r, fu in enumerate(basis):
        for c, fv in enumerate(basis):
            if coupled(fu.subset, fv.subset):
                A[r, c] = compute_J(measure, fu, fv)
    b = np.zeros(L)
    for u in basis.subsets():
        fs = basis.for_subset(u)
        vals = _projections(model, measure, fs, integrator)
        for f, val in zip(fs, vals):
            b[basis.position(f.subset, f.index)] = val
    return LinearSystem(A, b, basis.keys())


def solve(system):
    """Dense LU solve with a condition and residual check."""
    A, b = system.A, system.b
    cond = float(np.linalg.cond(A, 1)) if len(b) else 1.0
    if not cond <= MAX_CONDITION:
        raise IllConditionedError(f"coefficient matrix condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    if not len(b):
        return b.copy(), cond, 0.0
    z = scipy.linalg.lu_solve(scipy.linalg.lu_factor(A), b)
    residual = float(np.max(np.abs(A @ z - b)))
    if residual > RESIDUAL_RTOL * float(np.max(np.abs(b))):
        raise SolverError(f"residual {residual:.3g} too large relative to |b| = {np.max(np.abs(b)):.3g}")
    return z, cond, residual


@dataclass(eq=False)
class AddExpansion:
    """Truncated decomposition: constant plus coefficients on a basis set."""

    constant: float
    coefficients: dict
    basis: BasisSet
    diagnostics: dict = field(default_factory=dict)
    classical: bool = False

    @property
    def measure(self):
        return self.basis.measure

    @property
    def dimension(self):
        return self.basis.measure.dimension

    @property
    def truncation(self):
        return self.basis.S, self.basis.m

    def subsets(self):
        return self.basis.subsets()

    def component(self, subset):
        return component_function(self, subset)

    def components(self):
        return {u: component_function(self, u) for u in self.subsets()}

    def __call__(self, x):
        return evaluate_surrogate(self, x)

    def to_dict(self):
        return expansion_to_dict(self)


def component_function(expansion, subset):
    """The polynomial sum_j C_uj psi_uj for one subset."""
    u = as_subset(subset, expansion.dimension)
    if not 1 <= len(u) <= expansion.basis.S:
        raise DomainError(f"subset {u} is outside the truncation S={expansion.basis.S}")
    out = Polynomial(u)
    for f in expansion.basis.for_subset(u):
        out = out + expansion.coefficients[(f.subset, f.index)] * f.poly
    return out


def evaluate_surrogate(expansion, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (expansion.dimension,):
        raise DomainError(f"surrogate expects points of dimension {expansion.dimension}")
    out = np.full(x.shape[:-1], expansion.constant)
    for f in expansion.basis:
        c = expansion.coefficients[(f.subset, f.index)]
        if c != 0.0:
            out = out + c * f.poly(x[..., list(f.subset)])
    return out if out.ndim else float(out)


def assemble_and_solve(model, measure, S, m, integrator=None, basis=None):
    """Generalized decomposition of ``model`` truncated at (S, m)."""
    if basis is None:
        basis = build_basis(measure, S, m)
    system = assemble(model, measure, basis, integrator)
    z, cond, residual = solve(system)
    constant = float(model_mean(model, measure, integrator))
    coefs = {k: float(c) for k, c in zip(system.keys, z)}
    diag = {"condition": cond, "residual": residual, "size": system.size,
            "model_evaluations": int(model.evaluations)}
    log.info("solved %d x %d system, condition %.3g, residual %.3g",
             system.size, system.size, cond, residual)
    return AddExpansion(constant, coefs, basis, diag)


def classical_add(model, measure, S, m, integrator=None):
    """Classical decomposition under the product of the marginals.

    ``measure`` may be a GaussianMeasure (its diagonal is used) or a
    sequence of marginal variances.  The coefficients are plain projections;
    no system is solved.
    """
    if hasattr(measure, "covariance"):
        indep = measure.diagonal()
    else:
        indep = validate(np.diag(np.asarray(measure, dtype=float)))
    basis = build_basis(indep, S, m)
    coefs = {}
    for u in basis.subsets():
        fs = basis.for_subset(u)
        for f, val in zip(fs, _projections(model, indep, fs, integrator)):
            coefs[(f.subset, f.index)] = float(val)
    constant = float(model_mean(model, indep, integrator))
    diag = {"condition": 1.0, "residual": 0.0, "size": len(basis),
            "model_evaluations": int(model.evaluations)}
    return AddExpansion(constant, coefs, basis, diag, classical=True)


def expansion_to_dict(expansion):
    """JSON-ready dict; variable subsets are written 1-based."""
    return {
        "schema": 1,
        "kind": "classical" if expansion.classical else "generalized",
        "truncation": {"S": expansion.basis.S, "m": expansion.basis.m},
        "covariance": expansion.measure.covariance.tolist(),
        "constant": expansion.constant,
        "coefficients": [
            {"subset": [v + 1 for v in f.subset], "index": list(f.index),
             "coefficient": expansion.coefficients[(f.subset, f.index)]}
            for f in expansion.basis
        ],
        "diagnostics": dict(expansion.diagnostics),
    }


def expansion_from_dict(data):
    """Inverse of :func:`expansion_to_dict`; the basis is rebuilt from the
    stored covariance, which is deterministic."""
    if data.get("schema") != 1:
        raise DomainError(f"unsupported expansion schema {data.get('schema')!r}")
    measure = validate(data["covariance"])
    basis = build_basis(measure, data["truncation"]["S"], data["truncation"]["m"])
    coefs = {}
    for item in data["coefficients"]:
        key = (tuple(v - 1 for v in item["subset"]), tuple(item["index"]))
        coefs[key] = float(item["coefficient"])
    if set(coefs) != set(basis.keys()):
        raise DomainError("stored coefficients do not match the rebuilt basis")
    return AddExpansion(float(data["constant"]), {k: coefs[k] for k in basis.keys()},
                        basis, dict(data.get("diagnostics", {})),
                        classical=data.get("kind") == "classical")


def save_expansion(expansion, path):
    # json writes floats with repr, which round-trips exactly
    with open(path, "w") as fh:
        json.dump(expansion_to_dict(expansion), fh, indent=1)


def load_expansion(path):
    with open(path) as fh:
        return expansion_from_dict(json.load(fh))
