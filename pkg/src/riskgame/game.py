"""Two-stage detection game.

The defender commits to the detector strategy with the best column average of
the detection matrix. Attackers then pick the malware variant maximising
``(1 - p) * u(v)`` under their a priori belief ``p`` about detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from riskgame.errors import DomainError
from riskgame.utility import RiskProfile, check_probability, check_valuation, expected_utility

__all__ = [
    "MalwareFamily",
    "DetectorStrategy",
    "DetectionMatrix",
    "MalwareVariant",
    "AttackerProfile",
    "AttackChoice",
    "KEYLOGGER",
    "CRYPTOMINER",
    "RANSOMWARE",
    "SYSCALL",
    "PACKETS",
    "MERGED",
    "DEFAULT_FAMILIES",
    "DEFAULT_STRATEGIES",
    "PAPER_VALUE_ORDER",
    "BELIEF_MODES",
    "percent_to_probability",
    "row_average",
    "column_average",
    "best_defender_strategy",
    "dominated_families",
    "variant_value",
    "belief_probability",
    "best_attack",
]

BELIEF_MODES = ("row_average", "column_conditional")


@dataclass(frozen=True)
class MalwareFamily:
    name: str
    default_exfil_interval: float
    note: str = ""

    def __post_init__(self) -> None:
        interval = float(self.default_exfil_interval)
        if not math.isfinite(interval) or interval <= 0:
            raise DomainError(
                f"{self.name}: default exfiltration interval must be > 0, got {interval!r}"
            )
        object.__setattr__(self, "default_exfil_interval", interval)


@dataclass(frozen=True)
class DetectorStrategy:
    name: str
    cost_rank: int


KEYLOGGER = MalwareFamily("Keylogger", 0.1, "2 keypresses every 0.1 s")
CRYPTOMINER = MalwareFamily("Cryptominer", 0.1, "C2 contact every 0.1 s")
RANSOMWARE = MalwareFamily("Ransomware", 15.0, "C2 contact every 15 s")
DEFAULT_FAMILIES = (KEYLOGGER, CRYPTOMINER, RANSOMWARE)

PACKETS = DetectorStrategy("Packets", 0)
SYSCALL = DetectorStrategy("Syscall", 1)
MERGED = DetectorStrategy("Merged", 2)
DEFAULT_STRATEGIES = (SYSCALL, PACKETS, MERGED)

# Most valuable first.
PAPER_VALUE_ORDER = ("Ransomware", "Keylogger", "Cryptominer")


def percent_to_probability(text: str | int | float) -> float:
    """Convert a percentage as printed (``"96.35"``) to a probability, once."""
    try:
        d = Decimal(str(text).strip())
    except ArithmeticError as exc:
        raise DomainError(f"not a decimal percentage: {text!r}") from exc
    return float(d / 100)


@dataclass(frozen=True)
class DetectionMatrix:
    """Detection probabilities, one row per family and one column per strategy."""

    families: tuple[str, ...]
    strategies: tuple[DetectorStrategy, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        families = tuple(self.families)
        strategies = tuple(self.strategies)
        if not families or not strategies:
            raise DomainError("detection matrix needs at least one family and one strategy")
        if len(set(families)) != len(families):
            raise DomainError(f"duplicate family in {families}")
        if len({s.name for s in strategies}) != len(strategies):
            raise DomainError("duplicate strategy name")
        if len({s.cost_rank for s in strategies}) != len(strategies):
            raise DomainError("strategy cost ranks must be a strict order")
        rows = tuple(tuple(float(x) for x in row) for row in self.values)
        if len(rows) != len(families) or any(len(r) != len(strategies) for r in rows):
            raise DomainError("detection matrix is incomplete")
        for fam, row in zip(families, rows):
            for strat, p in zip(strategies, row):
                try:
                    check_probability(p)
                except DomainError as exc:
                    raise DomainError(f"{fam}/{strat.name}: {exc}") from None
        object.__setattr__(self, "families", families)
        object.__setattr__(self, "strategies", strategies)
        object.__setattr__(self, "values", rows)

    @classmethod
    def from_mapping(
        cls,
        entries: Mapping[str, Mapping[str, float]],
        strategies: Sequence[DetectorStrategy] = DEFAULT_STRATEGIES,
    ) -> DetectionMatrix:
        """Build from ``{family: {strategy_name: probability}}``."""
        families = tuple(entries)
        values = []
        for fam in families:
            row = entries[fam]
            missing = [s.name for s in strategies if s.name not in row]
            if missing:
                raise DomainError(f"{fam}: missing strategies {missing}")
            values.append(tuple(row[s.name] for s in strategies))
        return cls(families, tuple(strategies), tuple(values))

    @classmethod
    def from_percent(
        cls,
        entries: Mapping[str, Mapping[str, str]],
        strategies: Sequence[DetectorStrategy] = DEFAULT_STRATEGIES,
    ) -> DetectionMatrix:
        probs = {
            fam: {k: percent_to_probability(v) for k, v in row.items()}
            for fam, row in entries.items()
        }
        return cls.from_mapping(probs, strategies)

    def strategy(self, name: str) -> DetectorStrategy:
        for s in self.strategies:
            if s.name == name:
                return s
        raise KeyError(name)

    def row(self, family: str | MalwareFamily) -> tuple[float, ...]:
        return self.values[self.families.index(_family_name(family))]

    def column(self, strategy: str | DetectorStrategy) -> tuple[float, ...]:
        name = strategy.name if isinstance(strategy, DetectorStrategy) else strategy
        j = [s.name for s in self.strategies].index(name)
        return tuple(row[j] for row in self.values)

    def __getitem__(self, key: tuple[str | MalwareFamily, str | DetectorStrategy]) -> float:
        family, strategy = key
        name = strategy.name if isinstance(strategy, DetectorStrategy) else strategy
        return self.row(family)[[s.name for s in self.strategies].index(name)]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def to_mapping(self) -> dict[str, dict[str, float]]:
        return {
            fam: {s.name: p for s, p in zip(self.strategies, row)}
            for fam, row in zip(self.families, self.values)
        }


def _family_name(family: str | MalwareFamily) -> str:
    return family.name if isinstance(family, MalwareFamily) else family


def row_average(matrix: DetectionMatrix, family: str | MalwareFamily) -> float:
    row = matrix.row(family)
    return math.fsum(row) / len(row)


def column_average(matrix: DetectionMatrix, strategy: str | DetectorStrategy) -> float:
    col = matrix.column(strategy)
    return math.fsum(col) / len(col)


def best_defender_strategy(matrix: DetectionMatrix) -> DetectorStrategy:
    """Strategy with the highest column average; the cheapest one wins ties."""
    return max(matrix.strategies, key=lambda s: (column_average(matrix, s), -s.cost_rank))


def dominated_families(
    matrix: DetectionMatrix, value_order: Sequence[str] = PAPER_VALUE_ORDER
) -> set[str]:
    """Families no attacker with a strictly increasing utility would choose.

    ``value_order`` lists family names from most to least valuable. A family is
    dominated when a more valuable family is detected no more often on average.
    """
    order = [_family_name(f) for f in value_order]
    if len(set(order)) != len(order):
        raise DomainError(f"value order must be strict, got {order}")
    if set(order) != set(matrix.families):
        raise DomainError(
            f"value order {order} must rank exactly the matrix families {list(matrix.families)}"
        )
    avg = {f: row_average(matrix, f) for f in order}
    dominated = set()
    for i, fam in enumerate(order):
        if any(avg[better] <= avg[fam] for better in order[:i]):
            dominated.add(fam)
    return dominated


def variant_value(family: MalwareFamily, exfil_interval: float) -> float:
    """Value of a variant: ratio of the family's default interval to its own."""
    interval = float(exfil_interval)
    if not math.isfinite(interval) or interval <= 0:
        raise DomainError(f"exfiltration interval must be > 0, got {exfil_interval!r}")
    return family.default_exfil_interval / interval


@dataclass(frozen=True)
class MalwareVariant:
    family: MalwareFamily
    exfil_interval: float
    label: str = ""
    actual_detection: float | None = None

    def __post_init__(self) -> None:
        variant_value(self.family, self.exfil_interval)  # validates
        object.__setattr__(self, "exfil_interval", float(self.exfil_interval))
        if not self.label:
            object.__setattr__(self, "label", f"{self.family.name}@{self.exfil_interval:g}s")
        if self.actual_detection is not None:
            object.__setattr__(self, "actual_detection", check_probability(self.actual_detection))

    @property
    def value(self) -> float:
        return variant_value(self.family, self.exfil_interval)

    @classmethod
    def default(cls, family: MalwareFamily) -> MalwareVariant:
        return cls(family, family.default_exfil_interval, f"Default {family.name.lower()}")


@dataclass(frozen=True)
class AttackerProfile:
    """An attacker: risk attitude plus a priori detection beliefs.

    ``valuation_overrides`` sets the worth of a family's default variant (1 if
    absent); a variant's value scales it by the interval ratio.
    """

    risk: RiskProfile
    beliefs: DetectionMatrix
    valuation_overrides: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        overrides = {}
        for fam, v in dict(self.valuation_overrides).items():
            if fam not in self.beliefs.families:
                raise DomainError(f"valuation override for unknown family {fam!r}")
            overrides[fam] = check_valuation(v)
        object.__setattr__(self, "valuation_overrides", overrides)

    @property
    def label(self) -> str:
        return self.risk.label or f"alpha={self.risk.alpha:g}"

    def value_of(self, variant: MalwareVariant) -> float:
        return self.valuation_overrides.get(variant.family.name, 1.0) * variant.value


def belief_probability(
    attacker: AttackerProfile,
    family: str | MalwareFamily,
    mode: str = "row_average",
    decimals: int | None = None,
) -> float:
    """Detection probability the attacker expects for ``family``.

    ``row_average`` averages over strategies. ``column_conditional`` reads the
    column of the strategy the defender would pick. ``decimals`` rounds the
    result (the published worked example uses 4).
    """
    if mode == "row_average":
        p = row_average(attacker.beliefs, family)
    elif mode == "column_conditional":
        p = attacker.beliefs[family, best_defender_strategy(attacker.beliefs)]
    else:
        raise DomainError(f"unknown belief mode {mode!r}; expected one of {BELIEF_MODES}")
    if decimals is not None:
        p = round(p, decimals)
    return p


class AttackChoice(NamedTuple):
    variant: MalwareVariant
    expected_utility: float
    p_belief: float


def best_attack(
    attacker: AttackerProfile,
    candidates: Iterable[MalwareVariant],
    belief_mode: str = "row_average",
    decimals: int | None = None,
) -> AttackChoice:
    """Variant with the highest a priori expected utility.

    Ties go to the lower believed detection probability, then to the earlier
    candidate.
    """
    scored = []
    for i, variant in enumerate(candidates):
        p = belief_probability(attacker, variant.family, belief_mode, decimals)
        eu = expected_utility(p, attacker.risk, attacker.value_of(variant))
        scored.append((eu, -p, -i, AttackChoice(variant, eu, p)))
    if not scored:
        raise DomainError("best_attack needs at least one candidate")
    return max(scored, key=lambda t: t[:3])[3]
