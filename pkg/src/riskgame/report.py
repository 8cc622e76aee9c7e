"""End-to-end analyses over a :class:`~riskgame.scenario.Scenario` and their renderings.

Numbers are kept at full precision; the x1000 scaling used for the utility
table is applied only when rendering text.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from riskgame.game import (
    AttackChoice,
    AttackerProfile,
    DetectorStrategy,
    MalwareVariant,
    belief_probability,
    best_attack,
    best_defender_strategy,
    column_average,
    dominated_families,
)
from riskgame.montecarlo import SimulationPlan, SimulationReport, run_simulation, satisfaction_ratio
from riskgame.scenario import Scenario
from riskgame.threshold import IndifferenceQuery, indifference_ratio, is_saturated
from riskgame.utility import Attitude, RiskProfile

__all__ = [
    "AttackerAnalysis",
    "Analysis",
    "analyze",
    "rational_pair",
    "render_analysis",
    "analysis_csv",
    "simulate",
    "render_utility_table",
    "SCALE",
]

SCALE = 1000.0

ANALYSIS_COLUMNS = (
    "attacker", "alpha", "attitude", "low_family", "high_family", "p_low", "p_high",
    "threshold", "best_default", "best_default_eu", "best_variant", "best_variant_eu",
)


@dataclass(frozen=True)
class AttackerAnalysis:
    label: str
    alpha: float
    attitude: Attitude
    p_low: float | None
    p_high: float | None
    threshold: float | None  # value of the high family at indifference; inf if saturated
    best_default: AttackChoice
    best_variant: AttackChoice | None


@dataclass(frozen=True)
class Analysis:
    column_averages: dict[str, float]
    defender: DetectorStrategy
    dominated: set[str]
    rational: tuple[str, ...]  # undominated families, most valuable first
    attackers: tuple[AttackerAnalysis, ...]

    @property
    def high_family(self) -> str | None:
        return self.rational[0] if len(self.rational) >= 2 else None

    @property
    def low_family(self) -> str | None:
        return self.rational[1] if len(self.rational) >= 2 else None


def rational_pair(s: Scenario) -> tuple[str, str, float, float] | None:
    """``(high, low, p_high, p_low)``: the two most valuable undominated families
    with their believed detection probabilities, or None if fewer than two."""
    dominated = dominated_families(s.detection_matrix, s.value_order)
    rational = [f for f in s.value_order if f not in dominated]
    if len(rational) < 2:
        return None
    high, low = rational[0], rational[1]
    neutral = AttackerProfile(RiskProfile(0.0), s.detection_matrix)
    p_high = belief_probability(neutral, high, s.belief_mode, s.p_rounding_decimals)
    p_low = belief_probability(neutral, low, s.belief_mode, s.p_rounding_decimals)
    return high, low, p_high, p_low


def analyze(s: Scenario) -> Analysis:
    m = s.detection_matrix
    col_avg = {st.name: column_average(m, st) for st in m.strategies}
    defender = best_defender_strategy(m)
    dominated = dominated_families(m, s.value_order)
    rational = tuple(f for f in s.value_order if f not in dominated)
    high, low = (rational[0], rational[1]) if len(rational) >= 2 else (None, None)
    defaults = [MalwareVariant.default(s.families[f]) for f in m.families]

    rows = []
    for atk in s.attacker_profiles():
        p_low = p_high = threshold = None
        if high is not None:
            p_low = belief_probability(atk, low, s.belief_mode, s.p_rounding_decimals)
            p_high = belief_probability(atk, high, s.belief_mode, s.p_rounding_decimals)
            v_low = atk.valuation_overrides.get(low, 1.0)
            if p_low < 1 and p_high < 1 and v_low > 0:
                threshold = indifference_ratio(
                    IndifferenceQuery(atk.risk.alpha, p_low, p_high, v_low)
                )
        rows.append(AttackerAnalysis(
            label=atk.label,
            alpha=atk.risk.alpha,
            attitude=atk.risk.attitude,
            p_low=p_low,
            p_high=p_high,
            threshold=threshold,
            best_default=best_attack(atk, defaults, s.belief_mode, s.p_rounding_decimals),
            best_variant=(
                best_attack(atk, s.variants, s.belief_mode, s.p_rounding_decimals)
                if s.variants else None
            ),
        ))
    return Analysis(col_avg, defender, dominated, rational, tuple(rows))


def _fmt_threshold(t: float | None) -> str:
    if t is None:
        return "n/a"
    return "saturated" if is_saturated(t) else f"{t:.5f}"


def render_analysis(a: Analysis) -> str:
    lines = ["Defender column averages:"]
    for name, avg in a.column_averages.items():
        mark = "  <- chosen" if name == a.defender.name else ""
        lines.append(f"  {name:<10} {100 * avg:7.2f}%{mark}")
    lines.append(f"Defender strategy: {a.defender.name} ({100 * a.column_averages[a.defender.name]:.2f}%)")
    dom = ", ".join(sorted(a.dominated)) or "none"
    lines.append(f"Dominated families: {dom}")
    lines.append(f"Rational families (most valuable first): {', '.join(a.rational)}")
    for r in a.attackers:
        lines.append("")
        lines.append(f"Attacker {r.label} (alpha={r.alpha:g}, {r.attitude.value})")
        if r.threshold is not None:
            lines.append(
                f"  believed detection: {a.low_family}={r.p_low:.6g}, {a.high_family}={r.p_high:.6g}"
            )
            lines.append(
                f"  indifference threshold: v_{a.high_family} >= {_fmt_threshold(r.threshold)}"
                f" x v_{a.low_family}"
            )
        b = r.best_default
        lines.append(f"  best default attack: {b.variant.family.name} (EU={b.expected_utility:.9g})")
        if r.best_variant is not None:
            b = r.best_variant
            lines.append(f"  best scenario variant: {b.variant.label} (EU={b.expected_utility:.9g})")
    return "\n".join(lines) + "\n"


def analysis_csv(a: Analysis) -> str:
    def g(x):
        return "" if x is None else f"{x:.9g}"

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ANALYSIS_COLUMNS)
    for r in a.attackers:
        bv = r.best_variant
        w.writerow([
            r.label, g(r.alpha), r.attitude.value, a.low_family or "", a.high_family or "",
            g(r.p_low), g(r.p_high), g(r.threshold),
            r.best_default.variant.family.name, g(r.best_default.expected_utility),
            bv.variant.label if bv else "", g(bv.expected_utility) if bv else "",
        ])
    return buf.getvalue()


def simulate(
    s: Scenario, trials: int | None = None, seed: int | None = None, workers: int = 1
) -> SimulationReport:
    plan = SimulationPlan(
        variants=s.variants,
        attackers=s.attacker_profiles(),
        trials=s.trials if trials is None else trials,
        seed=s.seed if seed is None else seed,
        belief_mode=s.belief_mode,
        p_rounding_decimals=s.p_rounding_decimals,
        workers=workers,
    )
    return run_simulation(plan)


def render_utility_table(s: Scenario, report: SimulationReport) -> str:
    """Realized utility per variant plus the a priori expected utility per family, x1000."""
    families = [f for f in s.value_order if any(v.family.name == f for v in s.variants)]
    columns: list[tuple[str, str, str | None]] = []  # (family, header, variant label)
    for fam in families:
        for v in s.variants:
            if v.family.name == fam:
                columns.append((fam, v.label, v.label))
        columns.append((fam, f"Expected {fam.lower()}", None))

    width = max(12, *(len(h) for _, h, _ in columns))
    name_w = max(8, *(len(a.label) for a in s.attackers))
    out = [f"Utilities x{SCALE:g} (realized with actual detection; expected a priori)"]
    out.append(" " * name_w + " | " + " | ".join(f"{h:>{width}}" for _, h, _ in columns))
    out.append("-" * len(out[-1]))
    for atk in s.attackers:
        cells = []
        for fam, _, label in columns:
            x = (
                report.family_expected[(atk.label, fam)] if label is None
                else report.cell(atk.label, label).analytic_realized
            )
            cells.append(f"{SCALE * x:>{width}.3f}")
        out.append(f"{atk.label:<{name_w}} | " + " | ".join(cells))

    ratios = []
    if len(families) >= 2:
        hi = [v for v in s.variants if v.family.name == families[0]]
        lo = [v for v in s.variants if v.family.name == families[1]]
        for atk in s.attackers:
            for vh in hi:
                for vl in lo:
                    if report.cell(atk.label, vl.label).analytic_realized == 0:
                        continue
                    r = satisfaction_ratio(report, atk.label, vh.label, vl.label)
                    ratios.append(f"  {atk.label}: {vh.label} / {vl.label} = {r:.2f}")
    if ratios:
        out.append("")
        out.append("Realized utility ratios:")
        out.extend(ratios)

    out.append("")
    out.append(f"Monte Carlo ({report.trials} trials, seed {report.seed}):")
    for c in report.cells:
        z = (
            (c.mc_mean - c.analytic_realized) / c.mc_std_error if c.mc_std_error > 0
            else (0.0 if c.mc_mean == c.analytic_realized else math.inf)
        )
        out.append(
            f"  {c.attacker:<{name_w}} {c.variant:<{width}} mean={SCALE * c.mc_mean:.3f}"
            f" se={SCALE * c.mc_std_error:.3f} detections={c.detections} z={z:+.2f}"
        )
    return "\n".join(out) + "\n"
