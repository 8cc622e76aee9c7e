"""Print the defender choice, indifference thresholds and the realized utility
table for the canonical scenario.

    python scripts/reproduce_paper.py [--scenario fixtures/paper.json] [--trials N]
"""

import argparse
from pathlib import Path

from riskgame.report import analyze, render_analysis, render_utility_table, simulate
from riskgame.scenario import load_scenario

DEFAULT = Path(__file__).resolve().parents[1] / "fixtures" / "paper.json"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scenario", default=str(DEFAULT))
    ap.add_argument("--trials", type=int, default=None)
    args = ap.parse_args()

    s = load_scenario(args.scenario)
    print(render_analysis(analyze(s)))

    # the worked threshold depends on rounding the ransomware belief
    for decimals in (s.p_rounding_decimals, None):
        a = analyze(s.with_overrides(p_rounding_decimals=decimals))
        for r in a.attackers:
            print(f"p_rounding_decimals={decimals}: {r.label:<13} threshold={r.threshold:.5f}"
                  f" (p_high={r.p_high:.7f})")
    print()
    print(render_utility_table(s, simulate(s, trials=args.trials)))


if __name__ == "__main__":
    main()
