"""
Command-line frontend.

    gadd decompose   --config run.toml [--classical] [--out DIR]
    gadd sensitivity --config run.toml [--classical] [--out DIR] [--expansion FILE]
    gadd sample      --config run.toml [--classical] [--out DIR] [--seed INT]

Exit codes: 0 ok, 2 configuration, 3 model protocol, 4 degenerate response,
5 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import report as rp
from .errors import (ConfigError, DegenerateResponseError, DomainError,
                     ModelProtocolError, NumericalError, ResourceError)
from .config import load_config
from .expansion import assemble_and_solve, classical_add, load_expansion, save_expansion
from .measure import sample
from .quadrature import DimensionReduction
from .sensitivity import adaptive_select, effective_dimensions, indices

log = logging.getLogger("gadd")

EXIT_OK, EXIT_CONFIG, EXIT_PROTOCOL, EXIT_DEGENERATE, EXIT_NUMERICAL = 0, 2, 3, 4, 5


def _integrator(cfg, model):
    if model.polynomial is not None and cfg.analytic:
        return None
    return DimensionReduction(n=cfg.n, S=cfg.reduction if cfg.reduction else cfg.S)


def build_expansion(cfg, classical=False):
    """Decompose the configured model (the model process is closed after)."""
    measure = cfg.measure()
    with cfg.make_model() as model:
        integ = _integrator(cfg, model)
        if classical:
            exp = classical_add(model, measure, cfg.S, cfg.m, integ)
        else:
            exp = assemble_and_solve(model, measure, cfg.S, cfg.m, integ)
        log.info("model evaluations: %d", model.evaluations)
    return exp


def _obtain_expansion(cfg, args):
    path = args.expansion or cfg.expansion_path
    if path is not None:
        try:
            return load_expansion(path)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load expansion {path}: {exc}") from exc
    return build_expansion(cfg, args.classical)


def cmd_decompose(cfg, args):
    out = rp.ensure_dir(args.out or cfg.out_dir)
    exp = build_expansion(cfg, args.classical)
    save_expansion(exp, out / "expansion.json")
    rp.write_components_csv(exp, out / "components.csv")
    log.info("wrote %s and %s", out / "expansion.json", out / "components.csv")
    return EXIT_OK


def cmd_sensitivity(cfg, args):
    out = rp.ensure_dir(args.out or cfg.out_dir)
    exp = _obtain_expansion(cfg, args)
    rep = indices(exp)
    dims = effective_dimensions(rep, cfg.p)
    selection = None
    if cfg.m_max > 0:
        with cfg.make_model() as model:
            selection = adaptive_select(model, cfg.measure(), cfg.eps1, cfg.eps2, cfg.m_max,
                                        S_max=cfg.S, integrator=_integrator(cfg, model))
    rp.write_json(rp.report_to_dict(rep, dims, selection), out / "sensitivity.json")
    rp.write_indices_csv(rep, out / "indices.csv")
    rp.write_effects_csv(rep, out / "effects.csv")
    return EXIT_OK


def cmd_sample(cfg, args):
    out = rp.ensure_dir(args.out or cfg.out_dir)
    exp = _obtain_expansion(cfg, args)
    seed = cfg.seed if args.seed is None else args.seed
    x = sample(exp.measure, cfg.count, seed)
    y = exp(x)
    rp.write_samples_csv(x, y, out / "samples.csv")
    rp.write_json(rp.sample_summary(y, cfg.bins), out / "summary.json")
    return EXIT_OK


COMMANDS = {"decompose": cmd_decompose, "sensitivity": cmd_sensitivity, "sample": cmd_sample}


def make_parser():
    parser = argparse.ArgumentParser(
        prog="gadd",
        description="Generalized ANOVA decomposition for dependent Gaussian inputs.")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--classical", action="store_true",
                       help="classical decomposition under the product of the marginals")
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--expansion", type=Path, default=None,
                       help="reuse a saved expansion.json instead of decomposing")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"gadd: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelProtocolError as exc:
        print(f"gadd: model protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except DegenerateResponseError as exc:
        print(f"gadd: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (NumericalError, ResourceError) as exc:
        print(f"gadd: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"gadd: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
