"""``riskgame analyze|regions|simulate --scenario <path>``

Exit codes: 0 success, 1 validation or parse error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from riskgame.errors import DomainError, ScenarioError
from riskgame.report import (
    analysis_csv,
    analyze,
    rational_pair,
    render_analysis,
    render_utility_table,
    simulate,
)
from riskgame.scenario import load_scenario
from riskgame.threshold import (
    DEFAULT_ALPHA_RANGE,
    DEFAULT_RATIO_RANGE,
    DEFAULT_STEPS,
    preference_region_grid,
)

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2
SEED_ENV = "RISKGAME_SEED"


def _decimals(text: str) -> int | None:
    if text.lower() == "none":
        return None
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riskgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario JSON file")
    common.add_argument("--out", help="write CSV output here")
    common.add_argument("--belief-mode", choices=("row_average", "column_conditional"))
    common.add_argument(
        "--p-rounding-decimals", type=_decimals, default=argparse.SUPPRESS,
        help="round believed detection probabilities (integer or 'none')",
    )

    sub.add_parser("analyze", parents=[common], help="defender choice, dominance, thresholds")

    regions = sub.add_parser("regions", parents=[common], help="preference-region grid CSV")
    regions.add_argument("--alpha-min", type=float, default=DEFAULT_ALPHA_RANGE[0])
    regions.add_argument("--alpha-max", type=float, default=DEFAULT_ALPHA_RANGE[1])
    regions.add_argument("--ratio-min", type=float, default=DEFAULT_RATIO_RANGE[0])
    regions.add_argument("--ratio-max", type=float, default=DEFAULT_RATIO_RANGE[1])
    regions.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    regions.add_argument("--workers", type=int, default=1)

    sim = sub.add_parser("simulate", parents=[common], help="realized utilities and Monte Carlo")
    sim.add_argument("--trials", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--workers", type=int, default=1)
    return parser


def _scenario(args):
    s = load_scenario(args.scenario)
    changes = {}
    if args.belief_mode is not None:
        changes["belief_mode"] = args.belief_mode
    if hasattr(args, "p_rounding_decimals"):
        changes["p_rounding_decimals"] = args.p_rounding_decimals
    return s.with_overrides(**changes) if changes else s


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def cmd_analyze(args) -> int:
    a = analyze(_scenario(args))
    sys.stdout.write(render_analysis(a))
    if args.out:
        _emit(analysis_csv(a), args.out)
    return EXIT_OK


def cmd_regions(args) -> int:
    s = _scenario(args)
    pair = rational_pair(s)
    if pair is None:
        raise ScenarioError("detection_matrix", "need two undominated families for a region grid")
    high, low, p_high, p_low = pair
    grid = preference_region_grid(
        (args.alpha_min, args.alpha_max),
        (args.ratio_min, args.ratio_max),
        args.steps,
        p_k=p_low,
        p_r=p_high,
        workers=args.workers,
    )
    _emit(grid.to_csv(), args.out)
    if args.out:
        sys.stdout.write(
            f"wrote {len(grid.alpha_axis)}x{len(grid.ratio_axis)} grid"
            f" ({low} p={p_low:.6g} vs {high} p={p_high:.6g}) to {args.out}\n"
        )
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = _scenario(args)
    for v in s.variants:
        if v.actual_detection is None:
            raise ScenarioError(f"actual_detections.{v.label}", "missing actual detection for variant")
    seed = args.seed
    if seed is None and os.environ.get(SEED_ENV):
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError:
            raise ScenarioError(SEED_ENV, f"not an integer: {os.environ[SEED_ENV]!r}") from None
    if args.trials is not None and args.trials < 1:
        raise ScenarioError("--trials", f"must be >= 1, got {args.trials}")
    report = simulate(s, trials=args.trials, seed=seed, workers=args.workers)
    sys.stdout.write(render_utility_table(s, report))
    if args.out:
        _emit(report.to_csv(), args.out)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "regions": cmd_regions, "simulate": cmd_simulate}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, DomainError) as exc:
        print(f"riskgame: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"riskgame: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
