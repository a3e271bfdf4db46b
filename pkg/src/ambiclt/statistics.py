"""Recursive drift-switching statistics.

The running statistic over a horizon of n observations is

    M_m = sum_{i<=m} x_i/n + sum_{i<=m} (x_i - mu_i)/(sigma*sqrt(n)),

where each centering mean mu_i is chosen between the interval extremes by a
threshold test on the previous value: the M-rule picks the upper mean when
M_{m-1} <= threshold(m), the M-tilde rule when M_tilde_{m-1} >= threshold(m),
with boundary ties going to the upper mean in both.  The threshold at step m
is -((mu_upper+mu_lower)/2)*(1-(m-1)/n) + c for a center parameter c; the
sentinels c = +/-inf freeze the rule at a constant mean.

Both float and exact-rational evaluation are supported.  In exact mode the
statistic is carried as u + w/sqrt(n*sigma^2) with rational u, w
(:class:`ambiclt._exact.ExactValue`), so threshold comparisons and terminal
indicator evaluations are free of rounding and path enumeration merges
states exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from ._exact import ExactValue, to_fraction
from .measures import AmbiguityInterval, MeasureSet

VARIANT_M = "M"
VARIANT_TILDE = "M-tilde"
_VARIANTS = (VARIANT_M, VARIANT_TILDE)


class HorizonExceeded(ValueError):
    """Attempted to update a statistic already at its horizon."""


class LengthMismatch(ValueError):
    """Observation path length differs from the horizon."""


@dataclass(frozen=True)
class SwitchRule:
    """Center parameter and mean interval defining the switching thresholds."""

    center: float
    interval: AmbiguityInterval

    def mean_pair(self) -> tuple[float, float]:
        return float(self.interval.mu_lower), float(self.interval.mu_upper)

    def threshold(self, m: int, n: int) -> float:
        """Threshold compared against M_{m-1} when choosing mu_m."""
        if math.isinf(self.center):
            return self.center
        mid = self.interval.center
        return -mid * (1.0 - (m - 1) / n) + float(self.center)

    def threshold_exact(self, m: int, n: int) -> Fraction:
        mid = (to_fraction(self.interval.mu_lower) + to_fraction(self.interval.mu_upper)) / 2
        return -mid * (1 - Fraction(m - 1, n)) + to_fraction(self.center)


@dataclass(frozen=True)
class StatState:
    """Statistic value after m of n steps."""

    m: int
    n: int
    M: Union[float, ExactValue]
    variant: str = VARIANT_M

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 0 <= self.m <= self.n:
            raise ValueError("need 0 <= m <= n")
        if self.m == 0:
            zero = self.M.cmp(0) == 0 if isinstance(self.M, ExactValue) else self.M == 0
            if not zero:
                raise ValueError("the statistic starts at 0")

    @property
    def exact(self) -> bool:
        return isinstance(self.M, ExactValue)

    def value(self) -> float:
        return float(self.M)


def initial_state(n: int, variant: str = VARIANT_M) -> StatState:
    return StatState(0, n, 0.0, variant)


def initial_state_exact(n: int, interval: AmbiguityInterval, variant: str = VARIANT_M) -> StatState:
    """Start an exact run; requires the interval's exact variance."""
    scale = Fraction(n) * interval.variance_exact()
    return StatState(0, n, ExactValue.zero(scale), variant)


def _select_mean(state: StatState, rule: SwitchRule, tilde: bool):
    m_next = state.m + 1
    if state.exact:
        lo, hi = to_fraction(rule.interval.mu_lower), to_fraction(rule.interval.mu_upper)
        if math.isinf(rule.center):
            at_upper = (rule.center > 0) != tilde  # +inf: M-rule upper, tilde lower
            return hi if at_upper else lo
        cmp = state.M.cmp(rule.threshold_exact(m_next, state.n))
        hit = cmp >= 0 if tilde else cmp <= 0
        return hi if hit else lo
    lo, hi = rule.mean_pair()
    thr = rule.threshold(m_next, state.n)
    hit = state.M >= thr if tilde else state.M <= thr
    return hi if hit else lo


def step_mu(state: StatState, rule: SwitchRule):
    """Mean chosen for step m+1 under the M-rule (ties go to the upper mean)."""
    if state.variant != VARIANT_M:
        raise ValueError("step_mu applies to the M variant")
    if state.m >= state.n:
        raise HorizonExceeded("no step left to choose a mean for")
    return _select_mean(state, rule, tilde=False)


def step_mu_tilde(state: StatState, rule: SwitchRule):
    """Mean chosen for step m+1 under the M-tilde rule (ties to the upper mean)."""
    if state.variant != VARIANT_TILDE:
        raise ValueError("step_mu_tilde applies to the M-tilde variant")
    if state.m >= state.n:
        raise HorizonExceeded("no step left to choose a mean for")
    return _select_mean(state, rule, tilde=True)


def update_statistic(state: StatState, x, rule: SwitchRule) -> StatState:
    """Advance one observation: M += x/n + (x - mu)/(sigma*sqrt(n))."""
    if state.m >= state.n:
        raise HorizonExceeded(f"horizon n={state.n} already reached")
    tilde = state.variant == VARIANT_TILDE
    mu = _select_mean(state, rule, tilde)
    n = state.n
    if state.exact:
        xf = to_fraction(x)
        new = state.M.shift(Fraction(xf, n), xf - mu)
    else:
        sigma = float(rule.interval.sigma)
        new = state.M + float(x) / n + (float(x) - mu) / (sigma * math.sqrt(n))
    return StatState(state.m + 1, n, new, state.variant)


def path_statistic(
    xs: Sequence, n: int, rule: SwitchRule, variant: str = VARIANT_M, exact: bool = False
):
    """Fold a full observation path; returns M_{n,n} (float, or ExactValue)."""
    if len(xs) != n:
        raise LengthMismatch(f"expected {n} observations, got {len(xs)}")
    state = initial_state_exact(n, rule.interval, variant) if exact else initial_state(n, variant)
    for x in xs:
        state = update_statistic(state, x, rule)
    return state.M


def statistic_trace(
    xs: Sequence, n: int, rule: SwitchRule, variant: str = VARIANT_M
) -> list[tuple[int, float, float]]:
    """Rows (m, mu_m, M_m) for m = 1..n, float-valued, ready for CSV."""
    if len(xs) != n:
        raise LengthMismatch(f"expected {n} observations, got {len(xs)}")
    state = initial_state(n, variant)
    rows = []
    for x in xs:
        tilde = variant == VARIANT_TILDE
        mu = _select_mean(state, rule, tilde)
        state = update_statistic(state, x, rule)
        rows.append((state.m, float(mu), state.value()))
    return rows


def read_path_csv(path) -> list[float]:
    """Read one observation per row; a single header row is skipped."""
    out: list[float] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        for row in csv.reader(handle):
            if not row:
                continue
            try:
                out.append(float(row[0]))
            except ValueError:
                if out:
                    raise
                # header row
    return out


def write_trace_csv(rows: Iterable[tuple[int, float, float]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["m", "mu_m", "M_m"])
        for m, mu, value in rows:
            writer.writerow([m, repr(mu), repr(value)])


def condition1_diagnostic(
    L: MeasureSet, n: int, delta, rule: SwitchRule
) -> float:
    """Finite-n worst-case estimate of the switching-band condition.

    Averages over steps the worst-case expected gap between the chosen
    conditional mean and the M-tilde centering mean on the band where the
    shifted statistic sits within delta of the switching threshold.  Since
    the achievable means span the full interval, each step contributes
    (mu_upper - mu_lower) times the worst-case band probability, which is
    computed exactly by the backward dynamic program.

    A value near zero supports replacing conditional means by the explicit
    switching means; the caller chooses delta (a sweep is recommended, the
    diagnostic makes no accept/reject decision).
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    from . import worst_case  # deferred: worst_case imports this module

    mu_lo, mu_hi = L.mean_bounds()
    width = mu_hi - mu_lo
    if width == 0:
        return 0.0
    total = 0.0
    for m in range(1, n + 1):
        total += worst_case.band_probability_sup(L, n, m, delta, rule)
    return float(width) * total / n
