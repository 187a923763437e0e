"""Command-line entry point: ``swiptsec {eval,sweep,region,validate}``.

Exit codes: 0 success, 1 config error, 2 quadrature/Monte Carlo concordance
failure, 3 unflagged non-finite result.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, RegionConfig, load_config, parse_engines
from .experiments import EVAL_FIELDS, Row, RegionPoint, ValidationReport, run_eval, run_region, run_sweep, run_validate
from .output import render, to_csv, to_json

log = logging.getLogger("swiptsec")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CONCORDANCE = 2
EXIT_NUMERIC = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swiptsec", description="Ergodic secrecy capacity of SWIPT links.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("eval", "evaluate the configured scenario with the selected engines"),
        ("sweep", "sweep one parameter (needs a [sweep] block)"),
        ("region", "trace the secrecy-energy region over rho (uses [region] if present)"),
        ("validate", "cross-check all engines on the configured scenario"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", type=Path, default=None, help="INI config file (defaults if omitted)")
        sp.add_argument("--engine", default=None, help="comma-separated: quadrature,closedform,montecarlo")
        sp.add_argument("--output", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", type=Path, default=None, help="write here instead of stdout")
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--workers", type=int, default=None, help="threads for Monte Carlo chunks")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def _settings(cfg, args):
    s = cfg.settings
    changes = {}
    if args.engine is not None:
        changes["engines"] = parse_engines(args.engine, "--engine")
    if args.trials is not None:
        if args.trials < 1000:
            raise ConfigError(f"--trials: must be >= 1000, got {args.trials}")
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError(f"--workers: must be >= 1, got {args.workers}")
        changes["workers"] = args.workers
    return replace(s, **changes)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_bytes(text.encode("utf-8"))


def _numeric_failure(values) -> bool:
    return any(status == "ok" and not math.isfinite(v) for v, status in values)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cmd = args.command
    try:
        cfg = load_config(args.config, require="sweep" if cmd == "sweep" else None)
        settings = _settings(cfg, args)
        if cmd == "region":
            region = cfg.region or RegionConfig(cfg.scenario, _default_rho_grid(), cfg.scenario.zeta)
            engine = settings.engines[0] if args.engine is not None else region.engine
            region = replace(region, settings=settings, engine=engine)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if cmd == "eval":
        rows = run_eval(cfg.scenario, settings)
        _emit(render([r.as_dict() for r in rows], EVAL_FIELDS, args.output), args.out)
        return EXIT_NUMERIC if _numeric_failure((r.capacity_bits, r.status) for r in rows) else EXIT_OK

    if cmd == "sweep":
        sweep = replace(cfg.sweep, engines=settings.engines, trials=settings.trials, seed=settings.seed,
                        settings=settings)
        rows = run_sweep(sweep)
        _emit(render([r.as_dict() for r in rows], Row.FIELDS, args.output), args.out)
        return EXIT_NUMERIC if _numeric_failure((r.capacity_bits, r.status) for r in rows) else EXIT_OK

    if cmd == "region":
        points = run_region(region)
        _emit(render([p.as_dict() for p in points], RegionPoint.FIELDS, args.output), args.out)
        return EXIT_NUMERIC if _numeric_failure((p.capacity_bits, p.status) for p in points) else EXIT_OK

    report = run_validate(cfg.scenario, settings.trials, settings.seed, settings.workers)
    if args.output == "json":
        _emit(to_json(report.as_dict()), args.out)
    else:
        _emit(to_csv(report.rows, ValidationReport.FIELDS), args.out)
    conc = report.concordance
    verdict = "PASS" if report.passed else "FAIL"
    print(f"concordance {verdict}: |quad - mc| = {conc.get('delta_abs', math.nan):.3e}, "
          f"limit = {conc['sigmas']:g} x {conc.get('combined_error', math.nan):.3e}", file=sys.stderr)
    if report.unflagged_non_finite:
        return EXIT_NUMERIC
    return EXIT_OK if report.passed else EXIT_CONCORDANCE


def _default_rho_grid(points: int = 20):
    return tuple((i + 1) / (points + 1) for i in range(points))


if __name__ == "__main__":
    sys.exit(main())
