"""Robust hypothesis testing under mean-ambiguous errors.

Data follow x_i = theta + y_i with error means only known to lie in
[-kappa, kappa] and known variance.  Calibrating an interval [a, b] so the
worst-case limiting probability that the switching statistic lands in it is
1 - alpha yields the random acceptance region C_n = [M_n - b, M_n - a]; the
null is accepted iff C_n meets the hypothesized parameter set.  Because the
limit is a worst case over laws, the coverage guarantee is one-sided: the
chance of wrongly rejecting can exceed alpha, and the closed form for the
upper probability of wrongly accepting under an offset xi is the same
indicator limit evaluated at [a - xi, b - xi], which also drives the
interval-selection program minimized here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .closed_form import BadInterval, one_sided_limit, upper_indicator_limit
from .measures import MeasureSet, interval, validate_measure_set
from .statistics import VARIANT_M, SwitchRule
from .worst_case import DriftPolicy, simulate_statistic_values

CALIBRATION_TOL = 1e-9


class Infeasible(ValueError):
    """Requested coverage is not attainable for the given left endpoint."""


class NoConvergence(RuntimeError):
    """Root finding failed to bracket or converge."""


class EmptyTheta(ValueError):
    """The hypothesized parameter set is empty."""


@dataclass(frozen=True)
class TestSpec:
    """Testing problem: error ambiguity, scale, level, null value, offset."""

    kappa: float
    sigma: float
    alpha: float
    theta0: float = 0.0
    xi: float = 0.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")

    def error_interval(self):
        return interval(-self.kappa, self.kappa, self.sigma)


def _coverage(kappa: float, a: float, b: float) -> float:
    return upper_indicator_limit(interval(-kappa, kappa), a, b)


def _bisect(fn, lo: float, hi: float, target: float) -> float:
    """Monotone-increasing root finder for fn(x) = target."""
    flo, fhi = fn(lo), fn(hi)
    if not flo <= target <= fhi:
        raise NoConvergence(
            f"target {target} not bracketed by [{flo:.6g}, {fhi:.6g}]"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def calibrate_interval(
    spec: TestSpec, symmetric: bool = True, a: float | None = None
) -> tuple[float, float]:
    """Find [a, b] whose worst-case limiting coverage equals 1 - alpha.

    Symmetric mode enforces a = -b (the unique solution, since coverage is
    strictly increasing in b).  Asymmetric mode takes the left endpoint and
    solves for b; coverage then caps at the right-tail limit, below which the
    request is Infeasible.
    """
    target = 1.0 - spec.alpha
    kappa = spec.kappa
    if symmetric:
        if a is not None:
            raise ValueError("symmetric mode determines a = -b")
        hi = 20.0 + 10.0 * kappa
        b = _bisect(lambda t: _coverage(kappa, -t, t) if t > 0 else 0.0, 0.0, hi, target)
        result = (-b, b)
    else:
        if a is None:
            raise ValueError("asymmetric mode needs the left endpoint a")
        # coverage cap as b -> inf is the right-tail upper limit at a
        cap = one_sided_limit(interval(-kappa, kappa), a, "right_tail", "upper")
        if cap <= target:
            raise Infeasible(
                f"coverage caps at {cap:.6g} < {target:.6g} for a={a!r}"
            )
        hi = a + 40.0 + 20.0 * kappa
        eps = 1e-12 * (1.0 + abs(a))
        b = _bisect(lambda t: _coverage(kappa, a, t) if t > a else 0.0, a + eps, hi, target)
        result = (a, b)
    resid = abs(_coverage(kappa, result[0], result[1]) - target)
    if resid > CALIBRATION_TOL:
        raise NoConvergence(f"calibration residual {resid:.3g} exceeds tolerance")
    return result


def wrong_acceptance(spec: TestSpec, a: float, b: float, xi: float) -> float:
    """Limiting upper probability of accepting theta0 when the truth is
    offset by xi: the indicator limit on the shifted interval [a-xi, b-xi]."""
    return upper_indicator_limit(interval(-spec.kappa, spec.kappa), a - xi, b - xi)


def optimize_ab(spec: TestSpec, xi: float) -> tuple[float, float, float]:
    """Minimize the wrong-acceptance probability at offset xi over intervals
    meeting the coverage constraint.

    The constraint binds at any optimum (shrinking the interval lowers both
    sides), so the search runs over the one-parameter family a -> b(a) with
    b solved from coverage = 1 - alpha, on a grid followed by golden-section
    refinement to 1e-6 in a.  The optimum may sit at the sweep boundary
    (one-sided intervals are the limit of the family).
    """
    if xi == 0:
        raise ValueError("xi must be nonzero; at xi = 0 the objective is flat")
    kappa = spec.kappa
    target = 1.0 - spec.alpha
    a_floor = -(20.0 + 10.0 * kappa)
    a_ceil = 20.0 + 10.0 * kappa

    # feasibility boundary: right-tail coverage cap must stay above 1 - alpha
    def cap(a: float) -> float:
        return one_sided_limit(interval(-kappa, kappa), a, "right_tail", "upper")

    if cap(a_ceil) < target:
        a_hi = _bisect(lambda t: target - cap(t), a_floor, a_ceil, 0.0)
    else:
        a_hi = a_ceil
    a_hi -= 1e-6 * (1.0 + abs(a_hi))

    def objective(a: float) -> float:
        _, b = calibrate_interval(spec, symmetric=False, a=a)
        return wrong_acceptance(spec, a, b, xi)

    grid = np.linspace(a_floor, a_hi, 201)
    vals = [objective(float(a)) for a in grid]
    k = int(np.argmin(vals))
    lo = grid[max(0, k - 1)]
    hi = grid[min(len(grid) - 1, k + 1)]
    phi_ratio = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - phi_ratio * (hi - lo)
    x2 = lo + phi_ratio * (hi - lo)
    f1, f2 = objective(float(x1)), objective(float(x2))
    while hi - lo > 1e-6:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi_ratio * (hi - lo)
            f1 = objective(float(x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi_ratio * (hi - lo)
            f2 = objective(float(x2))
    best_a = float(0.5 * (lo + hi))
    _, best_b = calibrate_interval(spec, symmetric=False, a=best_a)
    best_val = wrong_acceptance(spec, best_a, best_b, xi)
    # the coverage constraint must bind at the returned point
    assert abs(_coverage(kappa, best_a, best_b) - target) <= CALIBRATION_TOL
    return best_a, best_b, best_val


@dataclass(frozen=True)
class ThetaSet:
    """Hypothesized parameter set: a point, closed interval, or finite set."""

    kind: str
    lo: float = math.nan
    hi: float = math.nan
    points: tuple[float, ...] = ()

    @classmethod
    def point(cls, theta0: float) -> "ThetaSet":
        return cls("point", lo=float(theta0), hi=float(theta0))

    @classmethod
    def closed_interval(cls, lo: float, hi: float) -> "ThetaSet":
        if hi < lo:
            raise EmptyTheta("interval with hi < lo is empty")
        return cls("interval", lo=float(lo), hi=float(hi))

    @classmethod
    def finite(cls, points) -> "ThetaSet":
        pts = tuple(sorted(float(p) for p in points))
        if not pts:
            raise EmptyTheta("finite parameter set is empty")
        return cls("finite", points=pts)


def test_decision(M_n: float, a: float, b: float, theta: ThetaSet) -> str:
    """Accept iff the region [M_n - b, M_n - a] meets the parameter set."""
    if not a < b:
        raise BadInterval(f"need a < b, got a={a!r}, b={b!r}")
    lo, hi = M_n - b, M_n - a
    if theta.kind == "point":
        accept = lo <= theta.lo <= hi
    elif theta.kind == "interval":
        accept = theta.lo <= hi and theta.hi >= lo
    elif theta.kind == "finite":
        accept = any(lo <= p <= hi for p in theta.points)
    else:
        raise ValueError(f"unknown theta kind {theta.kind!r}")
    return "accept" if accept else "reject"


def size_power_simulation(
    L_error: MeasureSet,
    spec: TestSpec,
    a: float,
    b: float,
    theta_true: float,
    n: int,
    paths: int,
    seed: int,
    policy: DriftPolicy | None = None,
) -> tuple[float, float]:
    """Monte Carlo acceptance rate of the point-null test at theta0 when data
    are theta_true plus errors drawn under a drift policy.

    The statistic for x_i = theta + y_i equals theta plus the error-process
    statistic with the switching center translated by -theta, so paths are
    simulated directly on the error process.  Returns (accept_rate, stderr).
    """
    iv = validate_measure_set(L_error)
    c_hat = 0.5 * (a + b) - theta_true
    rule = SwitchRule(c_hat, iv)
    if policy is None:
        policy = DriftPolicy.threshold(L_error, rule)
    M_err = simulate_statistic_values(
        L_error, policy, "special", n, paths, seed, rule=rule
    )
    M = theta_true + M_err
    shifted = M - spec.theta0
    accepted = (shifted >= a) & (shifted <= b)
    rate = float(np.mean(accepted))
    stderr = math.sqrt(max(rate * (1.0 - rate), 0.0) / paths)
    return rate, stderr


def residual_statistic(xs: Sequence[float], spec: TestSpec, a: float, b: float) -> float:
    """Statistic of the residuals x_i - theta0 under the error-process rule.

    Under the null this equals M_n - theta0 exactly; it is what the
    command-line decision path evaluates against [a, b].
    """
    n = len(xs)
    if n == 0:
        raise ValueError("need at least one observation")
    iv = interval(-spec.kappa, spec.kappa, spec.sigma)
    rule = SwitchRule(0.5 * (a + b), iv)
    from .statistics import path_statistic

    ys = [x - spec.theta0 for x in xs]
    return float(path_statistic(ys, n, rule, VARIANT_M))
