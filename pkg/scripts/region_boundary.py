"""Write the preference-region grid and print the keylogger/ransomware boundary
per risk coefficient next to the closed-form threshold.

    python scripts/region_boundary.py --out regions.csv [--steps 200]
"""

import argparse

from riskgame.threshold import (
    DEFAULT_ALPHA_RANGE,
    DEFAULT_RATIO_RANGE,
    IndifferenceQuery,
    indifference_ratio,
    preference_region_grid,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="regions.csv")
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--p-keylogger", type=float, default=0.9388)
    ap.add_argument("--p-ransomware", type=float, default=0.9974)
    ap.add_argument("--every", type=int, default=20, help="print every n-th alpha column")
    args = ap.parse_args()

    grid = preference_region_grid(
        DEFAULT_ALPHA_RANGE, DEFAULT_RATIO_RANGE, args.steps,
        p_k=args.p_keylogger, p_r=args.p_ransomware, workers=4,
    )
    with open(args.out, "w", newline="") as fh:
        fh.write(grid.to_csv())

    print(f"{'alpha':>9} {'grid boundary':>14} {'closed form':>12}")
    for i in range(0, len(grid.alpha_axis), args.every):
        alpha = grid.alpha_axis[i]
        t = indifference_ratio(IndifferenceQuery(alpha, args.p_keylogger, args.p_ransomware))
        b = grid.boundary(i)
        print(f"{alpha:9.4f} {('none' if b is None else f'{b:.2f}'):>14} {t:12.4f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
