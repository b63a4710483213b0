"""``mfstab`` command line.

Exit status: 0 on success, 1 if any deterministic inequality report is
unsatisfied, 2 on config, parse or input errors.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .._backend import BACKEND
from ..errors import InvalidArgument, ParseError, RankDeficiencyError
from .config import load_config, make_config
from .scenarios import (
    complete_matrix,
    is_deterministic,
    run_bound_suite,
    run_figure1,
    run_figure2,
    run_oracle,
    run_sigma_min,
)

log = logging.getLogger("mfstab")


def _common(p):
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--seed", type=int, help="first master seed; shifts the configured seed list")
    p.add_argument("--out", help="output directory")
    p.add_argument("--desk", action="store_true", help="desk-scale preset (m=n=300, r=5)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="mfstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="reproduce the attack simulations")
    sim.add_argument("figure", choices=["figure1", "figure2"])
    _common(sim)

    ver = sub.add_parser("verify", help="run bound-verification suites")
    ver.add_argument("suite", choices=["bounds", "sigma-min"])
    _common(ver)

    orc = sub.add_parser("oracle", help="oracle completion with the true subspace")
    _common(orc)

    comp = sub.add_parser("complete", help="complete a row,col,value triplet CSV")
    comp.add_argument("input")
    comp.add_argument("--rank", "-r", type=int, required=True)
    comp.add_argument("--shape", help="m,n (default: inferred from indices)")
    comp.add_argument("--output", "-o", help="dense CSV output path")
    _common(comp)
    return parser


def _config(args, scenario):
    if args.config:
        cfg = load_config(args.config, scenario, desk=args.desk)
    else:
        cfg = make_config(scenario, desk=args.desk)
    over = {}
    if args.seed is not None:
        over["seeds"] = tuple(args.seed + i for i in range(len(cfg.seeds)))
    if args.out:
        over["output_dir"] = args.out
    return cfg.with_overrides(**over) if over else cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.info("kernel backend: %s", BACKEND)
    try:
        if args.command == "simulate":
            cfg = _config(args, args.figure)
            run = run_figure1 if args.figure == "figure1" else run_figure2
            rows = run(cfg)
            flagged = sum(1 for r in rows if r["flagged"])
            print(f"{args.figure}: {len(rows)} rows written to {cfg.output_dir}"
                  + (f" ({flagged} flagged)" if flagged else ""))
            return 0
        if args.command == "verify" and args.suite == "bounds":
            cfg = _config(args, "bounds")
            reports, fit = run_bound_suite(cfg)
            bad = [r for r in reports if is_deterministic(r) and not r.satisfied]
            det = sum(1 for r in reports if is_deterministic(r))
            print(f"bounds: {len(reports)} reports, {det - len(bad)}/{det} deterministic satisfied; "
                  f"fitted C = {fit.C:.6g} over {fit.used} trials ({fit.excluded} excluded)")
            for r in bad:
                print(f"UNSATISFIED {r.name}: lhs={r.lhs!r} rhs={r.rhs!r} {r.params()}")
            return 1 if bad else 0
        if args.command == "verify":
            cfg = _config(args, "sigma-min")
            rows = run_sigma_min(cfg)
            print(f"sigma-min: {len(rows)} rows written to {cfg.output_dir}")
            return 0
        if args.command == "oracle":
            cfg = _config(args, "oracle")
            rows = run_oracle(cfg)
            lo = min(r["ratio"] for r in rows)
            hi = max(r["ratio"] for r in rows)
            print(f"oracle: {len(rows)} seeds, measured/predicted ratio in [{lo:.4f}, {hi:.4f}]")
            return 0
        cfg = _config(args, "complete")
        shape = None
        if args.shape:
            try:
                shape = tuple(int(s) for s in args.shape.split(","))
            except ValueError:
                raise ParseError(f"bad --shape {args.shape!r}") from None
        path = complete_matrix(args.input, args.rank, cfg, args.output, shape)
        print(f"completion written to {path}")
        return 0
    except RankDeficiencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, InvalidArgument, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
