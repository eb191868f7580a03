#!/usr/bin/env python3
"""
Command-line front end

Usage:
    python cli.py classify-sg 3,4,5
    python cli.py classify-fiber 2,3 3,4,5 --json
    python cli.py verify-pair 1 3,7,8
    python cli.py campaign --max-genus 4 --jobs 4 --csv

Exit codes: 0 all ok, 1 counterexample or mismatch, 2 usage or configuration error.
Results go to stdout, diagnostics to stderr.
"""
import argparse
import logging
import sys
from typing import Dict, List, Optional

from config import VERSION, load_settings
from enumeration import GuardExceeded
from fiber import analyze_pair
from reports import render_json, write_campaign
from semigroup import FLAG_ORDER, FiberCheckError, InvalidGenerators, NotCofinite, classify_ring, parse_generators
from verify import OK, SKIPPED, BadConfig, CampaignConfig, check_pair, run_campaign
from window import BadOverride, FieldError

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE = 0, 1, 2

USAGE_ERRORS = (InvalidGenerators, NotCofinite, FieldError, BadOverride, BadConfig, GuardExceeded)


def _mark(flag: bool) -> str:
    return "✅" if flag else "❌"


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON instead of a table")
    common.add_argument("--csv", action="store_true", help="also write the CSV summary (campaign)")
    common.add_argument("--field", default=None, help="rational or prime:<p> with p >= 10^6")
    common.add_argument("--window", type=int, default=None, help="window size N (at least the automatic bound)")
    common.add_argument("--neg-offset", type=int, default=None, help="negative offset D")
    common.add_argument("--jobs", type=int, default=None, help="worker processes for campaigns")
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--max-genus", type=int, default=None, help="largest genus in a campaign")
    common.add_argument("--out", default=None, help="directory for report files")
    common.add_argument("--verbose", action="store_true", help="log progress at INFO level")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="fibercheck", description="Gorenstein-type classifier for numerical-semigroup rings and their fiber products")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify-sg", parents=[common], help="classify k[[H]]")
    p.add_argument("gens", help="comma-separated generators, e.g. 3,4,5")

    for name, text in (("classify-fiber", "classify R x_k S"), ("verify-pair", "run the battery on one pair")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("left", help="generators of the first semigroup")
        p.add_argument("right", help="generators of the second semigroup")

    p = sub.add_parser("campaign", parents=[common], help="run the battery on every ordered pair")
    p.add_argument("--exclude-dvr", action="store_true", help="leave the DVR out of the pair set")
    p.add_argument("--cross-field", action="store_true", help="recompute each pair over the other field")
    p.add_argument("--timings", action="store_true", help="print per-pair timings (never written to the report)")
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _campaign_config(args: argparse.Namespace) -> CampaignConfig:
    return CampaignConfig.from_settings(
        load_settings(),
        max_genus=args.max_genus,
        field=args.field,
        jobs=args.jobs,
        seed=args.seed,
        out=args.out,
        csv=args.csv or None,
        window=args.window,
        neg_offset=args.neg_offset,
        include_dvr=False if getattr(args, "exclude_dvr", False) else None,
        cross_field=getattr(args, "cross_field", False) or None,
        record_timings=getattr(args, "timings", False) or None,
    )


# ---------------------------------------------------------------- commands

def classify_sg_cmd(args: argparse.Namespace) -> int:
    H = parse_generators(args.gens)
    cls = classify_ring(H)
    if args.json:
        print(render_json(cls.to_dict()), end="")
        return EXIT_OK
    kind = "DVR" if cls.is_dvr else f"genus {cls.genus}"
    print(f"Semigroup {H} ({kind})")
    print(f"  e={cls.e} v={cls.v} F={cls.F} r={cls.r}")
    for name in FLAG_ORDER:
        print(f"  {_mark(cls.flags[name])} {name}")
    print(f"  lengths: {cls.lengths}")
    return EXIT_OK


def classify_fiber_cmd(args: argparse.Namespace) -> int:
    config = _campaign_config(args)
    H1, H2 = parse_generators(args.left), parse_generators(args.right)
    analysis = analyze_pair(H1, H2, config.field, config.overrides, seed=config.seed, retries=config.retries)
    cls = analysis.classification
    if args.json:
        print(render_json(cls.to_dict()), end="")
        return EXIT_OK if cls.agree else EXIT_COUNTEREXAMPLE
    print(f"Fiber product k[[{H1}]] x_k k[[{H2}]]")
    print(f"  e={cls.e} v={cls.v} r={cls.r} ℓ(X/A)={cls.len_K_mod_R} ℓ(A/c)={cls.len_R_mod_c}")
    print(f"  canonical ideal: {analysis.canonical.provenance}")
    print(f"  {'flag':<26}{'direct':<9}predicted")
    for name in FLAG_ORDER:
        print(f"  {name:<26}{str(cls.flags[name]):<9}{cls.predicted[name]}")
    if cls.agree:
        print("✅ direct and predicted flags agree")
        return EXIT_OK
    print(f"❌ mismatch on {', '.join(cls.mismatches())}")
    return EXIT_COUNTEREXAMPLE


def verify_pair_cmd(args: argparse.Namespace) -> int:
    config = _campaign_config(args)
    H1, H2 = parse_generators(args.left), parse_generators(args.right)
    report = check_pair(H1, H2, config)
    if args.json:
        print(render_json(report.to_dict()), end="")
        return EXIT_COUNTEREXAMPLE if report.failures else EXIT_OK
    print(f"Battery for {H1} x {H2} (window N={report.window['N']} D={report.window['D']})")
    for item in report.items:
        if item.status == OK:
            print(f"  ✅ {item.id}")
        elif item.status == SKIPPED:
            print(f"  ⚠️  {item.id}: skipped, {item.reason}")
        else:
            detail = item.reason or f"{item.lhs!r} vs {item.rhs!r}"
            print(f"  ❌ {item.id}: {detail}")
    print(f"checks={report.checks} failures={len(report.failures)} skipped={report.skipped}")
    return EXIT_COUNTEREXAMPLE if report.failures else EXIT_OK


def _print_summary(summary: Dict, paths: List[str]) -> None:
    print("=" * 60)
    print("Campaign summary")
    print("=" * 60)
    print(f"pairs={summary['pairs']} checks={summary['checks']} failures={summary['failures']}")
    dvr = summary["dvr_construction"]
    print(f"DVR construction: {dvr['hits']}/{dvr['pairs']} pairs, {dvr['search_fallbacks']} search fallbacks")
    selftest = summary["comparator_selftest"]
    print(f"{_mark(selftest['ok'])} comparator self-test caught {selftest['caught']}/{selftest['pairs']}")
    if summary["symmetry_failures"]:
        print(f"❌ {len(summary['symmetry_failures'])} asymmetric pairs")
    for entry in summary["counterexamples"][:20]:
        print(f"❌ {entry['pair']} {entry['id']}")
    for path in paths:
        print(f"report: {path}")
    print("=" * 60)


def campaign_cmd(args: argparse.Namespace) -> int:
    config = _campaign_config(args)
    result = run_campaign(config)
    paths = write_campaign(result, config.out, csv=config.csv)
    summary = result.summary()
    if args.json:
        print(render_json(summary), end="")
    else:
        _print_summary(summary, paths)
    if config.record_timings:
        slowest = sorted(result.reports, key=lambda rep: -rep.timings.get("seconds", 0.0))[:5]
        print(f"elapsed {result.elapsed:.1f}s")
        for rep in slowest:
            print(f"  {rep.pair}: {rep.timings.get('seconds', 0.0):.2f}s")
    return EXIT_COUNTEREXAMPLE if result.failures else EXIT_OK


COMMANDS = {
    "classify-sg": classify_sg_cmd,
    "classify-fiber": classify_fiber_cmd,
    "verify-pair": verify_pair_cmd,
    "campaign": campaign_cmd,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        settings = load_settings()
    except ValueError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging("INFO" if args.verbose else settings.log_level)

    try:
        return COMMANDS[args.command](args)
    except USAGE_ERRORS as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FiberCheckError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COUNTEREXAMPLE
    except OSError as exc:
        print(f"❌ cannot write report: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
