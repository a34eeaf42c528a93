"""
Run configuration: a TOML file (or the equivalent JSON document).

Example::

    schema = 1

    [measure]
    dimension = 3
    correlations = [[1, 2, 0.2], [1, 3, 0.2], [2, 3, 0.2]]   # 1-based (i, j, rho)

    [model]
    kind = "quadratic_symmetric"
    a0 = 2.0

    [truncation]
    S = 2
    m = 2

Unknown tables or keys are rejected.  Variable numbers in the file are
1-based, matching the X1..XN column labels of the reports.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .errors import ConfigError, GaddError
from .measure import from_correlations, validate
from .models import (ExternalModel, PolynomialModel, additive_linear,
                     polynomial_from_terms, quadratic_symmetric)

SCHEMA_VERSION = 1
ENV_OUT_DIR = "GADD_OUT_DIR"
ENV_WIDTH = "GADD_PARALLEL_WIDTH"

_ALLOWED = {
    "measure": {"dimension", "covariance", "variances", "correlations"},
    "model": {"kind", "a0", "a1", "b0", "b1", "c0", "c1", "coefficients", "constant",
              "terms", "command", "timeout", "restarts", "width"},
    "truncation": {"S", "m"},
    "quadrature": {"n", "reduction", "analytic"},
    "sampling": {"count", "seed", "bins"},
    "sensitivity": {"p", "eps1", "eps2", "m_max"},
    "output": {"dir", "expansion"},
}
_MODEL_KINDS = {"quadratic_symmetric", "additive_linear", "polynomial", "external"}


@dataclass
class RunConfig:
    dimension: int
    covariance: np.ndarray
    model: dict
    S: int = 2
    m: int = 2
    n: int = 5
    reduction: int | None = None
    analytic: bool = True
    count: int = 10000
    seed: int = 0
    bins: int = 50
    p: float = 0.99
    eps1: float = 0.0
    eps2: float = 0.0
    m_max: int = 0
    out_dir: Path = Path("out")
    expansion_path: Path | None = None
    width: int = 1
    source: Path | None = field(default=None, repr=False)

    def measure(self):
        return validate(self.covariance)

    def make_model(self):
        spec = self.model
        kind = spec["kind"]
        N = self.dimension
        if kind == "quadratic_symmetric":
            if N != 3:
                raise ConfigError("model 'quadratic_symmetric' needs dimension = 3")
            params = {k: float(spec[k]) for k in ("a0", "a1", "b0", "b1", "c0", "c1") if k in spec}
            return PolynomialModel(quadratic_symmetric(**params), N)
        if kind == "additive_linear":
            coefs = spec.get("coefficients", [1.0] * N)
            if len(coefs) != N:
                raise ConfigError(f"additive_linear needs {N} coefficients")
            return PolynomialModel(additive_linear([float(c) for c in coefs],
                                                   float(spec.get("constant", 0.0))), N)
        if kind == "polynomial":
            terms = spec.get("terms")
            if not terms:
                raise ConfigError("polynomial model needs a non-empty 'terms' list")
            try:
                pairs = [(t["exponents"], t["coefficient"]) if isinstance(t, dict) else (t[0], t[1])
                         for t in terms]
                return PolynomialModel(polynomial_from_terms(N, pairs), N)
            except (KeyError, IndexError, TypeError, GaddError) as exc:
                raise ConfigError(f"bad polynomial terms: {exc}") from exc
        command = spec.get("command")
        if not command:
            raise ConfigError("external model needs a 'command'")
        width = int(os.environ.get(ENV_WIDTH, spec.get("width", self.width)))
        return ExternalModel(command, N, timeout=float(spec.get("timeout", 30.0)),
                             restarts=int(spec.get("restarts", 0)), width=width)


def _reject_unknown(table, allowed, where):
    extra = set(table) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(extra))}")


def _int(v, name, lo=None):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    v = int(v)
    if lo is not None and v < lo:
        raise ConfigError(f"{name} must be >= {lo}, got {v}")
    return v


def _float(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    return float(v)


def parse_config(data, source=None):
    """Validate a decoded config document and return a RunConfig."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a table")
    if data.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"config must declare schema = {SCHEMA_VERSION}")
    _reject_unknown(data, set(_ALLOWED) | {"schema"}, "top level")
    for name, allowed in _ALLOWED.items():
        if name in data:
            if not isinstance(data[name], dict):
                raise ConfigError(f"[{name}] must be a table")
            _reject_unknown(data[name], allowed, f"[{name}]")

    ms = data.get("measure")
    if not ms:
        raise ConfigError("missing [measure] table")
    try:
        if "covariance" in ms:
            if "correlations" in ms or "variances" in ms:
                raise ConfigError("give either covariance or variances/correlations, not both")
            cov = np.array(ms["covariance"], dtype=float)
            N = cov.shape[0] if cov.ndim == 2 else -1
            if "dimension" in ms and _int(ms["dimension"], "measure.dimension") != N:
                raise ConfigError("measure.dimension does not match the covariance")
            cov = validate(cov).covariance
        else:
            N = _int(ms.get("dimension"), "measure.dimension", 1)
            corr = ms.get("correlations", [])
            if any(len(c) != 3 for c in corr):
                raise ConfigError("correlations must be [i, j, rho] triples")
            cov = from_correlations(N, corr, ms.get("variances"), one_based=True).covariance
    except ConfigError:
        raise
    except (GaddError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid measure: {exc}") from exc

    model = dict(data.get("model") or {})
    if model.get("kind") not in _MODEL_KINDS:
        raise ConfigError(f"model.kind must be one of {sorted(_MODEL_KINDS)}, got {model.get('kind')!r}")

    cfg = RunConfig(dimension=N, covariance=np.array(cov), model=model, source=source)
    tr = data.get("truncation", {})
    cfg.S = _int(tr.get("S", min(2, N)), "truncation.S", 1)
    cfg.m = _int(tr.get("m", 2), "truncation.m", 1)
    if cfg.S > N or cfg.m < cfg.S:
        raise ConfigError(f"need 1 <= S <= N and S <= m (S={cfg.S}, m={cfg.m}, N={N})")
    q = data.get("quadrature", {})
    cfg.n = _int(q.get("n", cfg.n), "quadrature.n", 1)
    if "reduction" in q:
        cfg.reduction = _int(q["reduction"], "quadrature.reduction", 1)
    cfg.analytic = bool(q.get("analytic", True))
    s = data.get("sampling", {})
    cfg.count = _int(s.get("count", cfg.count), "sampling.count", 0)
    cfg.seed = _int(s.get("seed", cfg.seed), "sampling.seed", 0)
    cfg.bins = _int(s.get("bins", cfg.bins), "sampling.bins", 1)
    se = data.get("sensitivity", {})
    cfg.p = _float(se.get("p", cfg.p), "sensitivity.p")
    if not 0.0 <= cfg.p <= 1.0:
        raise ConfigError("sensitivity.p must lie in [0, 1]")
    cfg.eps1 = _float(se.get("eps1", 0.0), "sensitivity.eps1")
    cfg.eps2 = _float(se.get("eps2", 0.0), "sensitivity.eps2")
    if cfg.eps1 < 0 or cfg.eps2 < 0:
        raise ConfigError("sensitivity.eps1 and eps2 must be non-negative")
    cfg.m_max = _int(se.get("m_max", 0), "sensitivity.m_max", 0)
    out = data.get("output", {})
    base = source.parent if source is not None else Path(".")
    cfg.out_dir = Path(os.environ.get(ENV_OUT_DIR, out.get("dir", "out")))
    if "expansion" in out:
        p = Path(out["expansion"])
        cfg.expansion_path = p if p.is_absolute() else base / p
    if "width" in model:
        cfg.width = _int(model["width"], "model.width", 1)
    return cfg


def load_config(path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode())
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return parse_config(data, source=path)
