"""Scenario files: one JSON document describing a whole game.

Schema version 1::

    {
      "schema_version": 1,
      "strategies": [{"name": "Syscall", "cost_rank": 1}, ...],      # optional
      "families": {"Keylogger": {"default_exfil_interval": "0.1",
                                 "note": "..."}, ...},              # optional
      "value_order": ["Ransomware", "Keylogger", "Cryptominer"],     # optional
      "detection_matrix": {"Keylogger": {"Syscall": "96.53", ...}, ...},
      "actual_detections": {"Aggressive ransomware": "99.958", ...}, # optional
      "variants": [{"label": "...", "family": "Ransomware",
                    "exfil_interval": "2"}, ...],
      "attackers": [{"label": "Risk-seeking", "alpha": -0.04,
                     "valuations": {"Ransomware": 64}}, ...],
      "simulation": {"trials": 100000, "seed": 42},                  # optional
      "options": {"belief_mode": "row_average",
                  "p_rounding_decimals": 4}                          # optional
    }

Detection rates are percentages written as decimal strings, exactly as
published, and divided by 100 once on load. Omitted families and strategies
fall back to the canonical three of each.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any

from riskgame.errors import DomainError, ScenarioError
from riskgame.game import (
    BELIEF_MODES,
    DEFAULT_FAMILIES,
    DEFAULT_STRATEGIES,
    PAPER_VALUE_ORDER,
    AttackerProfile,
    DetectionMatrix,
    DetectorStrategy,
    MalwareFamily,
    MalwareVariant,
)
from riskgame.utility import RiskProfile

__all__ = [
    "SCHEMA_VERSION",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "scenario_to_dict",
    "write_scenario",
    "load_detection_matrix",
    "load_actual_detections",
]

SCHEMA_VERSION = 1
DEFAULT_TRIALS = 100_000
DEFAULT_SEED = 42
DEFAULT_DECIMALS = 4


@dataclass(frozen=True)
class AttackerSpec:
    label: str
    alpha: float
    valuations: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    families: dict[str, MalwareFamily]
    strategies: tuple[DetectorStrategy, ...]
    detection_matrix: DetectionMatrix
    variants: tuple[MalwareVariant, ...]
    attackers: tuple[AttackerSpec, ...]
    value_order: tuple[str, ...] = PAPER_VALUE_ORDER
    actual_detections: dict[str, float] | None = None
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    belief_mode: str = "row_average"
    p_rounding_decimals: int | None = DEFAULT_DECIMALS

    def attacker_profiles(self) -> tuple[AttackerProfile, ...]:
        return tuple(
            AttackerProfile(RiskProfile(a.alpha, a.label), self.detection_matrix, a.valuations)
            for a in self.attackers
        )

    def with_overrides(self, **changes: Any) -> Scenario:
        return replace(self, **changes)


def _fail(path: str, reason: str):
    raise ScenarioError(path, reason)


def _decimal(raw: Any, path: str) -> Decimal:
    if isinstance(raw, bool) or not isinstance(raw, (str, int, float)):
        _fail(path, f"expected a decimal number, got {raw!r}")
    try:
        d = Decimal(str(raw).strip())
    except InvalidOperation:
        _fail(path, f"not a decimal number: {raw!r}")
    if not d.is_finite():
        _fail(path, f"must be finite, got {raw!r}")
    return d


def _percent(raw: Any, path: str) -> float:
    d = _decimal(raw, path)
    if not 0 <= d <= 100:
        _fail(path, f"detection percentage must lie in [0, 100], got {raw!r}")
    return float(d / 100)


def _positive(raw: Any, path: str) -> float:
    d = _decimal(raw, path)
    if d <= 0:
        _fail(path, f"must be > 0, got {raw!r}")
    return float(d)


def _int(raw: Any, path: str, lo: int, hi: int | None = None) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        _fail(path, f"expected an integer, got {raw!r}")
    if raw < lo or (hi is not None and raw >= hi):
        _fail(path, f"out of range: {raw!r}")
    return raw


def _mapping(raw: Any, path: str) -> dict:
    if not isinstance(raw, dict):
        _fail(path, f"expected an object, got {type(raw).__name__}")
    return raw


def _list(raw: Any, path: str) -> list:
    if not isinstance(raw, list):
        _fail(path, f"expected a list, got {type(raw).__name__}")
    return raw


def _strategies(doc: dict) -> tuple[DetectorStrategy, ...]:
    if "strategies" not in doc:
        return DEFAULT_STRATEGIES
    out = []
    for i, item in enumerate(_list(doc["strategies"], "strategies")):
        path = f"strategies[{i}]"
        item = _mapping(item, path)
        name = item.get("name")
        if not isinstance(name, str) or not name:
            _fail(f"{path}.name", "missing strategy name")
        out.append(DetectorStrategy(name, _int(item.get("cost_rank"), f"{path}.cost_rank", 0)))
    if len({s.name for s in out}) != len(out):
        _fail("strategies", "duplicate strategy names")
    if len({s.cost_rank for s in out}) != len(out):
        _fail("strategies", "cost ranks must be distinct")
    return tuple(out)


def _families(doc: dict) -> dict[str, MalwareFamily]:
    if "families" not in doc:
        return {f.name: f for f in DEFAULT_FAMILIES}
    out = {}
    for name, item in _mapping(doc["families"], "families").items():
        path = f"families.{name}"
        item = _mapping(item, path)
        interval = _positive(item.get("default_exfil_interval"), f"{path}.default_exfil_interval")
        note = item.get("note", "")
        if not isinstance(note, str):
            _fail(f"{path}.note", "expected text")
        out[name] = MalwareFamily(name, interval, note)
    return out


def _matrix(doc, families, strategies) -> DetectionMatrix:
    if "detection_matrix" not in doc:
        _fail("detection_matrix", "required")
    raw = _mapping(doc["detection_matrix"], "detection_matrix")
    rows = {}
    for fam, row in raw.items():
        path = f"detection_matrix.{fam}"
        if fam not in families:
            _fail(path, "unknown family")
        row = _mapping(row, path)
        for key in row:
            if key not in {s.name for s in strategies}:
                _fail(f"{path}.{key}", "unknown strategy")
        cells = {}
        for s in strategies:
            if s.name not in row:
                _fail(f"{path}.{s.name}", "missing entry")
            cells[s.name] = _percent(row[s.name], f"{path}.{s.name}")
        rows[fam] = cells
    for fam in families:
        if fam not in rows:
            _fail(f"detection_matrix.{fam}", "missing row")
    ordered = {fam: rows[fam] for fam in families}
    return DetectionMatrix.from_mapping(ordered, strategies)


def _actual(doc: dict) -> dict[str, float] | None:
    if "actual_detections" not in doc or doc["actual_detections"] is None:
        return None
    raw = _mapping(doc["actual_detections"], "actual_detections")
    return {label: _percent(v, f"actual_detections.{label}") for label, v in raw.items()}


def _variants(doc, families, actual) -> tuple[MalwareVariant, ...]:
    out = []
    seen = set()
    for i, item in enumerate(_list(doc.get("variants", []), "variants")):
        path = f"variants[{i}]"
        item = _mapping(item, path)
        label = item.get("label")
        if not isinstance(label, str) or not label:
            _fail(f"{path}.label", "missing label")
        if label in seen:
            _fail(f"{path}.label", f"duplicate variant label {label!r}")
        seen.add(label)
        fam = item.get("family")
        if fam not in families:
            _fail(f"{path}.family", f"unknown family {fam!r}")
        interval = _positive(item.get("exfil_interval"), f"{path}.exfil_interval")
        p = actual.get(label) if actual else None
        out.append(MalwareVariant(families[fam], interval, label, p))
    if actual:
        for label in actual:
            if label not in seen:
                _fail(f"actual_detections.{label}", "no variant with this label")
    return tuple(out)


def _attackers(doc, families) -> tuple[AttackerSpec, ...]:
    out = []
    for i, item in enumerate(_list(doc.get("attackers", []), "attackers")):
        path = f"attackers[{i}]"
        item = _mapping(item, path)
        label = item.get("label")
        if not isinstance(label, str) or not label:
            _fail(f"{path}.label", "missing label")
        alpha = item.get("alpha")
        if isinstance(alpha, bool) or not isinstance(alpha, (int, float)):
            _fail(f"{path}.alpha", f"expected a number, got {alpha!r}")
        if not math.isfinite(alpha):
            _fail(f"{path}.alpha", "must be finite")
        vals = {}
        for fam, v in _mapping(item.get("valuations", {}), f"{path}.valuations").items():
            if fam not in families:
                _fail(f"{path}.valuations.{fam}", "unknown family")
            d = _decimal(v, f"{path}.valuations.{fam}")
            if d < 0:
                _fail(f"{path}.valuations.{fam}", "must be >= 0")
            vals[fam] = float(d)
        out.append(AttackerSpec(label, float(alpha), vals))
    if len({a.label for a in out}) != len(out):
        _fail("attackers", "duplicate attacker labels")
    return tuple(out)


def parse_scenario(doc: Any) -> Scenario:
    """Validate a decoded JSON document and apply defaults."""
    doc = _mapping(doc, "")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        _fail("schema_version", f"unsupported version {version!r}")
    strategies = _strategies(doc)
    families = _families(doc)
    try:
        matrix = _matrix(doc, families, strategies)
    except DomainError as exc:
        _fail("detection_matrix", str(exc))
    actual = _actual(doc)
    variants = _variants(doc, families, actual)
    attackers = _attackers(doc, families)

    order = doc.get("value_order", list(PAPER_VALUE_ORDER))
    order = _list(order, "value_order")
    if len(set(order)) != len(order) or set(order) != set(families):
        _fail("value_order", "must list every family exactly once")

    sim = _mapping(doc.get("simulation", {}), "simulation")
    trials = _int(sim.get("trials", DEFAULT_TRIALS), "simulation.trials", 1)
    seed = _int(sim.get("seed", DEFAULT_SEED), "simulation.seed", 0, 2**64)

    opts = _mapping(doc.get("options", {}), "options")
    mode = opts.get("belief_mode", "row_average")
    if mode not in BELIEF_MODES:
        _fail("options.belief_mode", f"expected one of {BELIEF_MODES}, got {mode!r}")
    decimals = opts.get("p_rounding_decimals", DEFAULT_DECIMALS)
    if decimals in (None, "none"):
        decimals = None
    else:
        decimals = _int(decimals, "options.p_rounding_decimals", 0, 17)

    return Scenario(
        families=families,
        strategies=strategies,
        detection_matrix=matrix,
        variants=variants,
        attackers=attackers,
        value_order=tuple(order),
        actual_detections=actual,
        trials=trials,
        seed=seed,
        belief_mode=mode,
        p_rounding_decimals=decimals,
    )


def _read_json(path: str | Path) -> Any:
    text = Path(path).read_text(encoding="utf-8")  # OSError propagates
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("", f"{path}: invalid JSON ({exc})") from exc


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(_read_json(path))


def _num_text(x: float) -> str:
    # repr round-trips the double; Decimal keeps it exact through the *100.
    return format(Decimal(repr(x)), "f")


def _pct_text(p: float) -> str:
    d = (Decimal(repr(p)) * 100).normalize()
    return format(d, "f")


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "strategies": [{"name": st.name, "cost_rank": st.cost_rank} for st in s.strategies],
        "families": {
            name: {"default_exfil_interval": _num_text(f.default_exfil_interval), "note": f.note}
            for name, f in s.families.items()
        },
        "value_order": list(s.value_order),
        "detection_matrix": {
            fam: {st.name: _pct_text(s.detection_matrix[fam, st]) for st in s.strategies}
            for fam in s.detection_matrix.families
        },
        "actual_detections": (
            None if s.actual_detections is None
            else {k: _pct_text(v) for k, v in s.actual_detections.items()}
        ),
        "variants": [
            {"label": v.label, "family": v.family.name, "exfil_interval": _num_text(v.exfil_interval)}
            for v in s.variants
        ],
        "attackers": [
            {"label": a.label, "alpha": a.alpha, "valuations": dict(a.valuations)}
            for a in s.attackers
        ],
        "simulation": {"trials": s.trials, "seed": s.seed},
        "options": {
            "belief_mode": s.belief_mode,
            "p_rounding_decimals": s.p_rounding_decimals,
        },
    }


def write_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n", encoding="utf-8")


def load_detection_matrix(path: str | Path) -> DetectionMatrix:
    """Read the ``detection_matrix`` block (plus optional strategies/families) of a file."""
    doc = _mapping(_read_json(path), "")
    families = _families(doc)
    return _matrix(doc, families, _strategies(doc))


def load_actual_detections(path: str | Path) -> dict[str, float]:
    doc = _mapping(_read_json(path), "")
    actual = _actual(doc)
    if actual is None:
        _fail("actual_detections", "required")
    return actual
