"""Seeded Monte Carlo evaluation of attacker outcomes against the committed defender.

Each (attacker, variant) cell owns a Philox stream keyed by
``SeedSequence(seed, spawn_key=(attacker_index, variant_index))``. Trial ``t``
consumes the ``t``-th 64-bit output of that stream, so any block of trials can
be generated independently with :meth:`numpy.random.Philox.advance` and the
report does not depend on how the trials are split across workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from riskgame.errors import DomainError
from riskgame.game import AttackerProfile, MalwareFamily, MalwareVariant, belief_probability
from riskgame.utility import RiskProfile, check_probability, exponential_utility

__all__ = [
    "SimulationPlan",
    "CellResult",
    "SimulationReport",
    "WilsonEstimate",
    "realized_utility",
    "detection_draws",
    "run_simulation",
    "satisfaction_ratio",
    "calibrate_detection",
    "REPORT_COLUMNS",
]

REPORT_COLUMNS = (
    "attacker", "alpha", "variant", "family", "value", "p_belief", "p_actual",
    "expected_utility", "analytic_realized", "mc_mean", "mc_std_error",
    "detections", "trials",
)

# Philox yields 4 words per counter step; blocks must start on a multiple of 4.
BLOCK = 1 << 16


def realized_utility(p_actual: float, profile: RiskProfile | float, v: float) -> float:
    """``(1 - p) u(v)`` evaluated with the observed detection rate."""
    p = check_probability(p_actual)
    u = exponential_utility(profile, v)
    return 0.0 if p == 1.0 else (1.0 - p) * u


@dataclass(frozen=True)
class SimulationPlan:
    variants: tuple[MalwareVariant, ...]
    attackers: tuple[AttackerProfile, ...]
    trials: int = 100_000
    seed: int = 42
    belief_mode: str = "row_average"
    p_rounding_decimals: int | None = 4
    detection_penalty: float = 0.0
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "variants", tuple(self.variants))
        object.__setattr__(self, "attackers", tuple(self.attackers))
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        for v in self.variants:
            if v.actual_detection is None:
                raise DomainError(f"variant {v.label!r} has no actual detection probability")
        if not math.isfinite(self.detection_penalty) or self.detection_penalty < 0:
            raise DomainError("detection_penalty must be finite and >= 0")


@dataclass(frozen=True)
class CellResult:
    attacker: str
    alpha: float
    variant: str
    family: str
    value: float
    p_belief: float
    p_actual: float
    expected_utility: float
    analytic_realized: float
    mc_mean: float
    mc_std_error: float
    detections: int
    trials: int

    @property
    def satisfaction_ratio(self) -> float:
        """Realized over a priori expected utility for this variant."""
        if self.expected_utility == 0:
            return math.nan
        return self.analytic_realized / self.expected_utility

    def row(self) -> list[str]:
        out = []
        for name in REPORT_COLUMNS:
            x = getattr(self, name)
            out.append(f"{x:.9g}" if isinstance(x, float) else str(x))
        return out


@dataclass(frozen=True)
class SimulationReport:
    cells: tuple[CellResult, ...]
    # (attacker label, family name) -> a priori utility of the default variant
    family_expected: dict[tuple[str, str], float] = field(default_factory=dict)
    trials: int = 0
    seed: int = 0

    def cell(self, attacker: str, variant: str) -> CellResult:
        for c in self.cells:
            if c.attacker == attacker and c.variant == variant:
                return c
        raise KeyError((attacker, variant))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for c in self.cells:
            w.writerow(c.row())
        return buf.getvalue()


def _stream_key(seed: int, attacker_index: int, variant_index: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(attacker_index, variant_index))
    return ss.generate_state(2, dtype=np.uint64)


def detection_draws(
    seed: int, attacker_index: int, variant_index: int, p: float, start: int, count: int
) -> np.ndarray:
    """Boolean detections for trials ``start .. start + count - 1`` of one cell."""
    if start % 4:
        raise DomainError("block start must be a multiple of 4")
    bg = np.random.Philox(key=_stream_key(seed, attacker_index, variant_index))
    if start:
        bg.advance(start // 4)
    raw = bg.random_raw(count)
    uniforms = (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
    return uniforms < p


def _count_detections(seed, a, v, p, trials, pool) -> int:
    starts = range(0, trials, BLOCK)

    def block(s):
        return int(np.count_nonzero(detection_draws(seed, a, v, p, s, min(BLOCK, trials - s))))

    if pool is None:
        return sum(block(s) for s in starts)
    return sum(pool.map(block, starts))


def run_simulation(plan: SimulationPlan) -> SimulationReport:
    cells = []
    family_expected: dict[tuple[str, str], float] = {}
    pool = ThreadPoolExecutor(max_workers=plan.workers) if plan.workers > 1 else None
    try:
        for a, attacker in enumerate(plan.attackers):
            families: dict[str, MalwareFamily] = {}
            for v, variant in enumerate(plan.variants):
                families.setdefault(variant.family.name, variant.family)
                value = attacker.value_of(variant)
                u = exponential_utility(attacker.risk, value)
                p_belief = belief_probability(
                    attacker, variant.family, plan.belief_mode, plan.p_rounding_decimals
                )
                p_act = variant.actual_detection
                n = plan.trials
                d = _count_detections(plan.seed, a, v, p_act, n, pool)
                k = n - d
                lose = -plan.detection_penalty
                mean = (k * u + d * lose) / n
                var = (k * (u - mean) ** 2 + d * (lose - mean) ** 2) / (n - 1) if n > 1 else 0.0
                analytic = realized_utility(p_act, attacker.risk, value) + p_act * lose
                cells.append(CellResult(
                    attacker=attacker.label,
                    alpha=attacker.risk.alpha,
                    variant=variant.label,
                    family=variant.family.name,
                    value=value,
                    p_belief=p_belief,
                    p_actual=p_act,
                    expected_utility=(1.0 - p_belief) * u,
                    analytic_realized=analytic,
                    mc_mean=mean,
                    mc_std_error=math.sqrt(var / n),
                    detections=d,
                    trials=n,
                ))
            for name, fam in families.items():
                p_belief = belief_probability(
                    attacker, fam, plan.belief_mode, plan.p_rounding_decimals
                )
                base = attacker.valuation_overrides.get(name, 1.0)
                family_expected[(attacker.label, name)] = (
                    (1.0 - p_belief) * exponential_utility(attacker.risk, base)
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return SimulationReport(tuple(cells), family_expected, plan.trials, plan.seed)


def satisfaction_ratio(
    report: SimulationReport, attacker: str, numerator: str, denominator: str
) -> float:
    """Ratio of analytic realized utilities of two variants for one attacker."""
    num = report.cell(attacker, numerator).analytic_realized
    den = report.cell(attacker, denominator).analytic_realized
    if den == 0:
        raise DomainError(f"{denominator!r} has zero realized utility for {attacker!r}")
    return num / den


@dataclass(frozen=True)
class WilsonEstimate:
    estimate: float
    lower: float
    upper: float
    confidence: float

    def __contains__(self, p: float) -> bool:
        return self.lower <= p <= self.upper


def calibrate_detection(detections: int, trials: int, confidence: float = 0.95) -> WilsonEstimate:
    """Detection rate from trial counts with a Wilson score interval."""
    if trials <= 0:
        raise DomainError(f"trials must be > 0, got {trials}")
    if not 0 <= detections <= trials:
        raise DomainError(f"need 0 <= detections <= trials, got {detections}/{trials}")
    if not 0 < confidence < 1:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    n = trials
    phat = detections / n
    z = float(norm.ppf(0.5 + confidence / 2))
    z2 = z * z
    denom = 1 + z2 / n
    centre = (phat + z2 / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom
    # the interval contains phat exactly; clamp away round-off at phat in {0, 1}
    lower = max(0.0, min(phat, centre - half))
    upper = min(1.0, max(phat, centre + half))
    return WilsonEstimate(phat, lower, upper, confidence)
