"""Command-line interface.

Verbs: ``rates``, ``steady``, ``evolve``, ``mc``, ``sweep``, ``scenario``.
Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

import yaml

from . import __version__
from .circuit import angular
from .dynamics import NumericalError
from .experiment import (SCENARIOS, ConfigError, ExperimentConfig, ResultTable, config_from_dict,
                         emit_outputs, fit_block, load_config, run_config, run_scenario, run_sweep)
from .rates import QuadratureError, eta_lambda, polarization_rate, polarization_time, steady_state_sz
from .dynamics import thermal_occupancy

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("qreset")


def _formats(text: str) -> list[str]:
    fm = [s.strip() for s in text.split(",") if s.strip()]
    bad = [f for f in fm if f not in ("csv", "svg")]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad}; valid: csv, svg")
    return fm


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment config")
    common.add_argument("--seed", type=_seed, help="master RNG seed (overrides config)")
    common.add_argument("--out", default=None, help="output directory (default: config or '.')")
    common.add_argument("--format", type=_formats, default=None, help="csv[,svg]")
    common.add_argument("--convention", choices=("physical", "paper"), default=None,
                        help="temperature convention (default: paper for scenarios, physical otherwise)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="qreset", description="Dissipative multi-qubit reset simulator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("rates", parents=[common], help="analytic polarization rates and times per qubit")
    sub.add_parser("steady", parents=[common], help="thermal steady-state polarization")
    sub.add_parser("evolve", parents=[common], help="deterministic master-equation run")
    sub.add_parser("mc", parents=[common], help="Monte Carlo trajectory run")
    sw = sub.add_parser("sweep", parents=[common], help="sweep one numeric config field")
    sw.add_argument("axis", help="dotted config path, e.g. circuit.delta_over_kappa")
    sw.add_argument("values", nargs="*", type=float)
    sc = sub.add_parser("scenario", parents=[common], help="reproduce a figure scenario")
    sc.add_argument("name", choices=SCENARIOS)
    sc.add_argument("--set", action="append", default=[], metavar="PATH=VALUE",
                    help="override a config field, e.g. sim.n_traj=400")
    return p


def _load(args) -> ExperimentConfig:
    raw = {}
    if args.config:
        cfg = load_config(args.config)
        raw = cfg.to_dict()
    raw.setdefault("circuit", {})
    if args.convention:
        raw["circuit"]["temp_convention"] = args.convention
    if args.seed is not None:
        raw.setdefault("sim", {})["seed"] = args.seed
    return config_from_dict(raw)


def _overrides(args) -> dict:
    over: dict = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects PATH=VALUE, got {item!r}")
        path, val = item.split("=", 1)
        node = over
        keys = path.split(".")
        for k in keys[:-1]:
            node = node.setdefault(k, {})
        node[keys[-1]] = yaml.safe_load(val)
    if args.seed is not None:
        over.setdefault("sim", {})["seed"] = args.seed
    over.setdefault("circuit", {})["temp_convention"] = args.convention or "paper"
    return over


def _emit(table: ResultTable, args, cfg: ExperimentConfig | None, stem: str) -> None:
    directory = args.out or (cfg.outputs.directory if cfg else ".")
    formats = args.format or (cfg.outputs.formats if cfg else ["csv"])
    stem = cfg.outputs.stem if cfg and args.config and cfg.outputs.stem != "result" else stem
    for path in emit_outputs(table, directory, stem, formats, title=stem):
        print(f"wrote {path}")


def _cmd_rates(args) -> None:
    cfg = _load(args)
    p = cfg.circuit
    g, k, D = angular(p.g), angular(p.kappa), angular(p.detuning)
    eta, lam = eta_lambda(k, D)
    print(f"delta_omega/2pi = {p.delta_omega:.6g} MHz, Delta/2pi = {p.detuning:.6g} MHz, "
          f"eta = {eta:.6g} us, lambda = {lam:.6g} us")
    for n, t in enumerate(cfg.targets, 1):
        gam = polarization_rate(t.theta, D, g, k)
        T = polarization_time(t.theta, D, g, k)
        print(f"q{n}: theta={t.theta:.6g} phi={t.phi:.6g} Gamma={gam:.6g} /us T={T:.6g} us")


def _cmd_steady(args) -> None:
    cfg = _load(args)
    p = cfg.circuit
    nbar = thermal_occupancy(p.f_c, p.T_c, p.temp_convention)
    sz = steady_state_sz(p.f_c, p.T_c, p.temp_convention)
    print(f"f_c={p.f_c:g} GHz T_c={p.T_c:g} K convention={p.temp_convention}: "
          f"n_bar={nbar:.6g} <sz>_eq={sz:.6f}")


def _cmd_run(args, solver: str) -> None:
    cfg = replace(_load(args), solver=solver)
    table = run_config(cfg)
    for n in range(cfg.circuit.N):
        q = f"q{n + 1}"
        try:
            T, rms, poor = fit_block(table, q, "sz", cfg, n)
            fit = f" T_fit={T:.4g} us rms={rms:.2g}{' (poor fit)' if poor else ''}"
        except ValueError:
            fit = ""
        print(f"{q}: final <sz>={table.final(q, 'sz'):.6f}{fit}")
    _emit(table, args, cfg, solver)


def _cmd_sweep(args) -> None:
    cfg = _load(args)
    table = run_sweep(cfg, args.axis, args.values)
    for val, point in zip(table.meta["values"], table.meta["points"]):
        tag = f"[{args.axis.split('.')[-1]}={val:g}]"
        for n in range(point.circuit.N):
            try:
                T, _, _ = fit_block(table, f"q{n + 1}", "sz" + tag, point, n)
                print(f"{args.axis}={val:g} q{n + 1}: T_fit={T:.4g} us Gamma_fit={1 / T:.4g} /us")
            except ValueError as exc:
                print(f"{args.axis}={val:g} q{n + 1}: no fit ({exc})")
    _emit(table, args, cfg, "sweep")


def _cmd_scenario(args) -> None:
    table = run_scenario(args.name, _overrides(args))
    if "note" in table.meta:
        print(f"note: {table.meta['note']}")
    _emit(table, args, None, args.name)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"rates": _cmd_rates, "steady": _cmd_steady, "sweep": _cmd_sweep,
                "scenario": _cmd_scenario,
                "evolve": lambda a: _cmd_run(a, "master"), "mc": lambda a: _cmd_run(a, "trajectories")}
    try:
        handlers[args.verb](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, QuadratureError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
