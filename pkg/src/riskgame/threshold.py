"""Indifference analysis between a low-value, stealthy family and a high-value,
noisy one (keylogger vs. ransomware in the canonical game).

The target is the keylogger's expected utility ``E = (1 - p_k) u(v_k)``; the
threshold is the ransomware value ``v_r`` with ``(1 - p_r) u(v_r) = E``.
Inverting the exponential utility gives

    v_r = -log(1 - alpha * E / (1 - p_r)) / alpha,

which has no solution once ``alpha * E / (1 - p_r) >= 1``: a risk-averse
attacker's utility never exceeds ``1 / alpha``. That case is reported as
``math.inf`` (saturated), not raised.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from riskgame.errors import BracketError, DomainError
from riskgame.utility import TAYLOR_CUTOFF, _u, check_probability, check_valuation

__all__ = [
    "IndifferenceQuery",
    "RegionGrid",
    "SATURATED",
    "is_saturated",
    "indifference_ratio",
    "indifference_ratio_bisect",
    "preference_region_grid",
    "DEFAULT_ALPHA_RANGE",
    "DEFAULT_RATIO_RANGE",
    "DEFAULT_STEPS",
]

SATURATED = math.inf

DEFAULT_ALPHA_RANGE = (-0.1, 0.1)
# 200 points at a spacing of exactly 0.5
DEFAULT_RATIO_RANGE = (0.5, 100.0)
DEFAULT_STEPS = 200

LOW, HIGH = "Keylogger", "Ransomware"


def is_saturated(threshold: float) -> bool:
    return math.isinf(threshold)


@dataclass(frozen=True)
class IndifferenceQuery:
    alpha: float
    p_keylogger: float
    p_ransomware: float
    v_keylogger: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha!r}")
        for name in ("p_keylogger", "p_ransomware"):
            p = check_probability(getattr(self, name))
            if p == 1.0:
                raise DomainError(f"{name} must be < 1")
        v = check_valuation(self.v_keylogger)
        if v == 0:
            raise DomainError("v_keylogger must be > 0")

    @property
    def target(self) -> float:
        """Expected utility of the keylogger attack."""
        return (1.0 - self.p_keylogger) * _u(self.alpha, self.v_keylogger)

    def gap(self, v_r: float) -> float:
        """Ransomware minus keylogger expected utility at ransomware value ``v_r``."""
        return (1.0 - self.p_ransomware) * _u(self.alpha, v_r) - self.target


def indifference_ratio(q: IndifferenceQuery) -> float:
    """Ransomware value at which both attacks have equal expected utility.

    Returns :data:`SATURATED` (``inf``) when no finite value is enough.
    """
    survive = 1.0 - q.p_ransomware
    need = q.target / survive  # utility the ransomware must reach
    if q.alpha == 0.0:
        return need
    x = q.alpha * need
    if x >= 1.0:
        return SATURATED
    if abs(x) < TAYLOR_CUTOFF:
        # alpha * need may be subnormal; -log1p(-x) / alpha = need * (1 + x/2 + ...)
        return need * (1.0 + 0.5 * x)
    return -math.log1p(-x) / q.alpha


def indifference_ratio_bisect(
    q: IndifferenceQuery, lo: float, hi: float, tol: float = 1e-9, max_iter: int = 500
) -> float:
    """Bisection root of :meth:`IndifferenceQuery.gap` on ``[lo, hi]``."""
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    f_lo, f_hi = q.gap(lo), q.gap(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={f_lo:.3g}, {f_hi:.3g}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            return mid
        f_mid = q.gap(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_hi > 0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RegionGrid:
    """Preferred family over an (alpha, ratio) lattice with ``v_k = 1``, ``v_r = ratio``.

    ``preferred[i][j]`` is the choice at ``alpha_axis[i]``, ``ratio_axis[j]``.
    """

    alpha_axis: tuple[float, ...]
    ratio_axis: tuple[float, ...]
    preferred: tuple[tuple[str, ...], ...]
    eu_keylogger: tuple[tuple[float, ...], ...]
    eu_ransomware: tuple[tuple[float, ...], ...]
    p_keylogger: float
    p_ransomware: float

    def boundary(self, i: int) -> float | None:
        """First ratio in column ``i`` where ransomware wins, or None."""
        for r, pref in zip(self.ratio_axis, self.preferred[i]):
            if pref == HIGH:
                return r
        return None

    def is_monotone(self) -> bool:
        for col in self.preferred:
            seen_high = False
            for pref in col:
                if pref == HIGH:
                    seen_high = True
                elif seen_high:
                    return False
        return True

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "ratio", "preferred", "eu_keylogger", "eu_ransomware"])
        for i, a in enumerate(self.alpha_axis):
            for j, r in enumerate(self.ratio_axis):
                w.writerow([
                    f"{a:.9g}",
                    f"{r:.9g}",
                    self.preferred[i][j],
                    f"{self.eu_keylogger[i][j]:.9g}",
                    f"{self.eu_ransomware[i][j]:.9g}",
                ])
        return buf.getvalue()


def _axis(lo: float, hi: float, steps: int) -> tuple[float, ...]:
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    if steps == 1:
        return (float(lo),)
    return tuple(float(x) for x in np.linspace(lo, hi, steps))


def _column(alpha: float, ratios: Sequence[float], p_k: float, p_r: float):
    eu_k = (1.0 - p_k) * _u(alpha, 1.0)
    prefs, euks, eurs = [], [], []
    for r in ratios:
        eu_r = (1.0 - p_r) * _u(alpha, r)
        # Ties go to the family with lower detection, keylogger if equal.
        if eu_r > eu_k or (eu_r == eu_k and p_r < p_k):
            prefs.append(HIGH)
        else:
            prefs.append(LOW)
        euks.append(eu_k)
        eurs.append(eu_r)
    return tuple(prefs), tuple(euks), tuple(eurs)


def preference_region_grid(
    alpha_range: tuple[float, float] = DEFAULT_ALPHA_RANGE,
    ratio_range: tuple[float, float] = DEFAULT_RATIO_RANGE,
    steps: int | tuple[int, int] = DEFAULT_STEPS,
    p_k: float = 0.9388,
    p_r: float = 0.9974,
    workers: int = 1,
) -> RegionGrid:
    """Keylogger/ransomware preference over a lattice of attitudes and value ratios.

    Columns are independent, so ``workers > 1`` evaluates them on a thread pool;
    the result is identical either way.
    """
    a_steps, r_steps = (steps, steps) if isinstance(steps, int) else steps
    if not alpha_range[0] <= alpha_range[1]:
        raise DomainError(f"alpha range must be ordered, got {alpha_range}")
    if not 0 <= ratio_range[0] <= ratio_range[1]:
        raise DomainError(f"ratio range must be ordered and non-negative, got {ratio_range}")
    p_k, p_r = check_probability(p_k), check_probability(p_r)
    alphas = _axis(*alpha_range, a_steps)
    ratios = _axis(*ratio_range, r_steps)

    def job(a: float):
        return _column(a, ratios, p_k, p_r)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cols = list(pool.map(job, alphas))
    else:
        cols = [job(a) for a in alphas]
    return RegionGrid(
        alpha_axis=alphas,
        ratio_axis=ratios,
        preferred=tuple(c[0] for c in cols),
        eu_keylogger=tuple(c[1] for c in cols),
        eu_ransomware=tuple(c[2] for c in cols),
        p_keylogger=p_k,
        p_ransomware=p_r,
    )
