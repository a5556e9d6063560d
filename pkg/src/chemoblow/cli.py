"""Command-line interface.

Verbs:
  check   admissibility gate only
  bound   constants pipeline and lower bounds only
  run     full experiment (admissibility -> bounds -> simulation -> reports)
  sweep   one experiment per value of a single scalar config axis

Exit codes: 0 ok, 2 config error, 3 inadmissible data, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import bounds as bnd
from .admissibility import AdmissibilityReport, ModelParams, check_alpha, check_concentration
from .config import apply_overrides, load_config
from .errors import BlowupSuspected, ChemoBlowError, ConfigError, NumericalFailureError
from .grid import integrate, lp_norm
from .harness import (EXIT_CONFIG, EXIT_INADMISSIBLE, EXIT_NUMERICAL, EXIT_OK,
                      InadmissibleDataError, build_grid, build_initial,
                      run_experiment, sweep)


def _add_common(p):
    p.add_argument("--config", required=True, help="path to the INI run configuration")
    p.add_argument("--override", action="append", default=[],
                   metavar="SECTION.KEY=VALUE", help="override a config entry (repeatable)")
    p.add_argument("--out", default=None, help="output directory (default: config output.directory)")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized families")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chemoblow",
                                 description="Radial flux-limited chemotaxis blow-up laboratory")
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb, desc in (("check", "run the admissibility gate only"),
                       ("bound", "compute the constants pipeline and lower bounds only"),
                       ("run", "run the full experiment"),
                       ("sweep", "sweep one scalar config axis")):
        p = sub.add_parser(verb, help=desc)
        _add_common(p)
    sp = sub.choices["sweep"]
    sp.add_argument("--axis", required=True, metavar="SECTION.KEY")
    sp.add_argument("--values", required=True,
                    help="comma-separated values for the axis")
    return ap


def _load(args):
    cfg = load_config(args.config)
    if args.override:
        apply_overrides(cfg, args.override)
    if args.seed is not None:
        cfg.output.seed = args.seed
    return cfg


def _cmd_check(args) -> int:
    cfg = _load(args)
    grid = build_grid(cfg)
    u0 = build_initial(cfg, grid)
    mu = integrate(u0) / grid.ball_volume
    params = ModelParams(N=cfg.model.N, R=cfg.model.R, alpha=cfg.model.alpha,
                         k_f=cfg.model.k_f, mu=mu)
    report = AdmissibilityReport((check_alpha(params),)).merged_with(
        check_concentration(u0, mu, cfg.bound.R0))
    for line in report.lines():
        print(line)
    if report.passed:
        print("admissible")
        return EXIT_OK
    print("inadmissible")
    return EXIT_INADMISSIBLE


def _cmd_bound(args) -> int:
    cfg = _load(args)
    grid = build_grid(cfg)
    u0 = build_initial(cfg, grid)
    mu = integrate(u0) / grid.ball_volume
    params = ModelParams(N=cfg.model.N, R=cfg.model.R, alpha=cfg.model.alpha,
                         k_f=cfg.model.k_f, mu=mu)
    p = cfg.bound.p
    c_gn = cfg.bound_c_gn()
    if c_gn is None:
        c_gn = cfg.bound.gn_safety * bnd.estimate_gn_constant(grid, p, cfg.bound.gn_family_size)
    constants = bnd.build_constants(params, p, cfg.bound_epsilon(), c_gn)
    psi0 = lp_norm(u0, p) ** p / p
    for line in constants.provenance_lines():
        print(line)
    print(f"psi0 = {psi0!r} # Psi(0)")
    print(f"T_quadrature = {bnd.lower_bound_quadrature(constants, psi0)!r}")
    print(f"T_closed_form = {bnd.lower_bound_closed_form(constants, psi0)!r}")
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = _load(args)
    record = run_experiment(cfg, out_dir=args.out)
    sim = record.sim
    print(f"verdict = {sim.verdict}")
    if sim.t_detect is not None:
        print(f"t_detect = {sim.t_detect!r}")
        print(f"t_max_extrapolated = {sim.t_max_extrapolated!r}")
    print(f"T_quadrature = {record.t_quadrature!r}")
    print(f"T_closed_form = {record.t_closed_form!r}")
    print(f"bound_leq_t_detect = {record.bound_leq_t_detect}")
    print(f"outputs in {record.out_dir}")
    if sim.verdict == "StepFailure":
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    values = [tok.strip() for tok in args.values.split(",") if tok.strip()]
    if not values:
        raise ConfigError("sweep --values must name at least one value")
    out = args.out or cfg.output.directory
    path = sweep(cfg, args.axis, values, out)
    print(f"summary written to {path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    handler = {"check": _cmd_check, "bound": _cmd_bound,
               "run": _cmd_run, "sweep": _cmd_sweep}[args.verb]
    try:
        return handler(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InadmissibleDataError as e:
        print(f"inadmissible data: {e}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except (NumericalFailureError, BlowupSuspected) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ChemoBlowError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
