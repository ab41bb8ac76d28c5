"""Command line entry point: ``triadg3 <subcommand> ...``.

Exit codes: 0 success, 2 invalid input, 3 evaluation failure (dark output
port, unrealizable overlaps, Fock truncation).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import Config, ConfigError
from .correlation import DarkPortError, g3, shape_coefficients, sweep_delay
from .experiments import mu_scan, mu_scan_csv, parse_grid, run_campaign
from .oracles import TruncationError, fock_g3, mc_classical_g3
from .shape import classify, verify_appendix_a
from .sources import UnrealizableOverlaps

EXIT_INVALID = 2
EXIT_EVAL = 3


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(path).write_text(text)


def cmd_sweep(args):
    cfg = Config.load(args.config)
    if args.points < 1:
        raise ConfigError("--points must be positive")
    grid = np.linspace(args.delta_min, args.delta_max, args.points)
    curve = sweep_delay(cfg.matrix(), cfg.sources(args.model), args.model, grid)
    _write(args.out, curve.to_csv())


def cmd_classify(args):
    cfg = Config.load(args.config)
    coeffs = shape_coefficients(cfg.matrix(), cfg.sources(args.model), args.model)
    verdict = classify(coeffs.A, coeffs.B, coeffs.C).to_dict()
    verdict["S"] = coeffs.S
    _write(args.out, json.dumps(verdict))


def cmd_campaign(args):
    cfg = Config.load(args.config)
    result = run_campaign(cfg.campaign(args.seed), workers=args.workers)
    _write(args.out, result.to_json())


def cmd_mu_scan(args):
    cfg = Config.load(args.config)
    scan = mu_scan(cfg.campaign(args.seed), parse_grid(args.grid), workers=args.workers)
    _write(args.out, mu_scan_csv(scan))


def cmd_oracle(args):
    cfg = Config.load(args.config)
    U, o = cfg.matrix(), cfg.overlaps()
    sources = cfg.sources(args.model)
    closed = g3(U, sources, o, args.model)
    if args.model == "classical":
        seed = cfg.seed(args.seed)
        est = mc_classical_g3(U, sources, o, args.samples, seed, workers=args.workers)
        report = json.loads(est.to_json())
    else:
        if any(s.dist is None for s in sources):
            raise ConfigError("the Fock oracle needs an explicit 'dist' for every quantum source")
        if len({s.energy for s in sources}) > 1:
            raise ConfigError("the Fock oracle assumes one photon energy shared by all sources")
        res = fock_g3(U, [s.dist for s in sources], o)
        report = json.loads(res.to_json())
    report["closed_form"] = closed
    report["model"] = args.model
    _write(args.out, json.dumps(report))


def cmd_verify(args):
    report = verify_appendix_a(args.resolution)
    _write(args.out, report.to_json())
    if not report.ok:
        return EXIT_EVAL
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="triadg3", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, model=True, seed=True, workers=True):
        sp.add_argument("--config", required=True)
        if model:
            sp.add_argument("--model", choices=("classical", "quantum"), required=True)
        if seed:
            sp.add_argument("--seed", type=int, default=None)
        if workers:
            sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out", default="-")

    sp = sub.add_parser("sweep", help="G3 versus delay, written as CSV")
    common(sp, seed=False, workers=False)
    sp.add_argument("--delta-min", type=float, default=0.0)
    sp.add_argument("--delta-max", type=float, default=3.0)
    sp.add_argument("--points", type=int, default=101)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("classify", help="shape coefficients and revival verdict as JSON")
    common(sp, seed=False, workers=False)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("campaign", help="perturbed-circuit campaign described in the config")
    common(sp, model=False)
    sp.set_defaults(func=cmd_campaign)

    sp = sub.add_parser("mu-scan", help="revival fraction versus mu, written as CSV")
    common(sp, model=False)
    sp.add_argument("--grid", default="0:1:0.05")
    sp.set_defaults(func=cmd_mu_scan)

    sp = sub.add_parser("oracle", help="brute-force reference value next to the closed form")
    common(sp)
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify-appendix-a", help="simplex check of the fixed-intensity no-revival inequality")
    sp.add_argument("--resolution", type=int, default=500)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (DarkPortError, UnrealizableOverlaps, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except (ConfigError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
