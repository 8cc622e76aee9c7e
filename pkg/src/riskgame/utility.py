"""Exponential (CARA) utility and the expected utility of a single attack.

Attitude is carried by one coefficient ``alpha``:

    u(v) = (1 - exp(-alpha * v)) / alpha     alpha != 0
    u(v) = v                                  alpha == 0

``alpha > 0`` is risk-averse (concave, bounded by ``1 / alpha``), ``alpha < 0``
risk-seeking (convex) and ``alpha == 0`` risk-neutral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from riskgame.errors import DomainError

__all__ = [
    "Attitude",
    "RiskProfile",
    "check_probability",
    "check_valuation",
    "exponential_utility",
    "expected_utility",
    "cara_coefficient_estimate",
    "classify_attitude",
]

# Below this |alpha * v| the second-order Taylor form is used.
TAYLOR_CUTOFF = 1e-12


class Attitude(str, Enum):
    RISK_SEEKING = "RiskSeeking"
    RISK_NEUTRAL = "RiskNeutral"
    RISK_AVERSE = "RiskAverse"


@dataclass(frozen=True)
class RiskProfile:
    """CARA coefficient of an attacker, in inverse value units."""

    alpha: float
    label: str | None = None

    def __post_init__(self) -> None:
        if isinstance(self.alpha, bool) or not isinstance(self.alpha, (int, float)):
            raise DomainError(f"alpha must be a real number, got {self.alpha!r}")
        if not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def attitude(self) -> Attitude:
        return classify_attitude(self)


def _alpha(profile: RiskProfile | float) -> float:
    if isinstance(profile, RiskProfile):
        return profile.alpha
    return RiskProfile(profile).alpha


def check_valuation(v: float) -> float:
    v = float(v)
    if not math.isfinite(v) or v < 0:
        raise DomainError(f"valuation must be finite and >= 0, got {v!r}")
    return v


def check_probability(p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):  # also rejects NaN
        raise DomainError(f"detection probability must lie in [0, 1], got {p!r}")
    return p


def _u(alpha: float, v: float) -> float:
    # Unchecked kernel; also valid for v < 0, which the finite-difference
    # stencil needs near v = 0.
    x = alpha * v
    if x == 0.0 or abs(x) < TAYLOR_CUTOFF:
        return v * (1.0 - 0.5 * x)
    return -math.expm1(-x) / alpha


def exponential_utility(profile: RiskProfile | float, v: float) -> float:
    """Utility of a successful attack worth ``v`` to an attacker with ``profile``.

    ``profile`` may be a :class:`RiskProfile` or a bare ``alpha``.
    """
    return _u(_alpha(profile), check_valuation(v))


def expected_utility(p: float, profile: RiskProfile | float, v: float) -> float:
    """Survival probability times utility: ``(1 - p) * u(v)``. Detection pays 0."""
    p = check_probability(p)
    u = exponential_utility(profile, v)
    if p == 1.0:
        return 0.0
    return (1.0 - p) * u


def cara_coefficient_estimate(
    profile: RiskProfile | float, v: float, h: float | None = None
) -> float:
    """Recover ``-u''(v) / u'(v)`` with central differences of step ``h``.

    The default step is ``1e-4 * max(1, |v|)``. Error is O(h**2) plus
    round-off that grows like ``exp(alpha * v)`` for risk-averse profiles, so
    the estimate degrades once ``alpha * v`` exceeds roughly 10.
    """
    alpha = _alpha(profile)
    v = check_valuation(v)
    if h is None:
        h = 1e-4 * max(1.0, abs(v))
    if not math.isfinite(h) or h <= 0:
        raise DomainError(f"finite-difference step must be > 0, got {h!r}")
    lo, mid, hi = _u(alpha, v - h), _u(alpha, v), _u(alpha, v + h)
    d1 = (hi - lo) / (2.0 * h)
    d2 = (hi - 2.0 * mid + lo) / (h * h)
    if d1 == 0.0:
        raise DomainError("u'(v) vanished; pick a smaller v or step")
    return -d2 / d1


def classify_attitude(profile: RiskProfile | float) -> Attitude:
    alpha = _alpha(profile)
    if alpha < 0:
        return Attitude.RISK_SEEKING
    if alpha > 0:
        return Attitude.RISK_AVERSE
    return Attitude.RISK_NEUTRAL
