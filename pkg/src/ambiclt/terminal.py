"""Terminal payoff functions shared by the dynamic programs and the PDE solver.

The supported kinds are interval indicators (two- and one-sided), their
Gaussian mollifications, and grid-tabulated values.  Mollification replaces
the indicator of [a, b] by its Gaussian smoothing at bandwidth h, which has
the closed form Phi((b-x)/h) - Phi((a-x)/h); it is symmetric about
(a+b)/2 with slope sign opposite to x - center, exactly the shape the
switching rules are built for.

Indicator kinds also evaluate *exactly* at rational statistic values, so the
dynamic programs can classify boundary atoms without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import ndtr

from ._exact import ExactValue, to_fraction

_ONE = Fraction(1)
_ZERO = Fraction(0)


@dataclass(frozen=True)
class TerminalFunction:
    """Descriptor of the payoff applied to the terminal statistic value."""

    kind: str
    a: float = math.nan
    b: float = math.nan
    h: float = math.nan
    values: tuple[float, ...] | None = None
    center_override: float | None = None
    a_exact: Fraction | None = None
    b_exact: Fraction | None = None

    # -- constructors -----------------------------------------------------

    @staticmethod
    def _endpoint(x) -> tuple[float, Fraction | None]:
        if isinstance(x, float) and math.isinf(x):
            return x, None
        exact = to_fraction(x)
        return float(exact), exact

    @classmethod
    def indicator(cls, a, b) -> "TerminalFunction":
        """Closed-interval indicator of [a, b]; endpoints may be +/-inf."""
        af, a_exact = cls._endpoint(a)
        bf, b_exact = cls._endpoint(b)
        if not af < bf:
            raise ValueError(f"need a < b, got {a!r}, {b!r}")
        return cls("indicator", a=af, b=bf, a_exact=a_exact, b_exact=b_exact)

    @classmethod
    def left(cls, b) -> "TerminalFunction":
        """Indicator of (-inf, b]."""
        bf, b_exact = cls._endpoint(b)
        return cls("left", b=bf, b_exact=b_exact)

    @classmethod
    def right(cls, a) -> "TerminalFunction":
        """Indicator of [a, inf)."""
        af, a_exact = cls._endpoint(a)
        return cls("right", a=af, a_exact=a_exact)

    @classmethod
    def smoothed_indicator(cls, a, b, h: float) -> "TerminalFunction":
        """Gaussian mollification of the indicator of [a, b] at bandwidth h.

        One-sided versions are obtained with an infinite endpoint.
        """
        af, bf = float(a), float(b)
        if not af < bf:
            raise ValueError(f"need a < b, got {a!r}, {b!r}")
        if not h > 0:
            raise ValueError("bandwidth h must be positive")
        return cls("smoothed_indicator", a=af, b=bf, h=float(h))

    @classmethod
    def tabulated(cls, values, center: float | None = None) -> "TerminalFunction":
        """Values sampled on the solver grid; usable only on that grid."""
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("tabulated terminal needs values")
        return cls("tabulated", values=vals, center_override=center)

    # -- shape metadata ----------------------------------------------------

    @property
    def center(self) -> float | None:
        if self.center_override is not None:
            return self.center_override
        if self.kind in ("indicator", "smoothed_indicator"):
            if math.isinf(self.a) or math.isinf(self.b):
                return None
            return 0.5 * (self.a + self.b)
        return None

    @property
    def is_sharp(self) -> bool:
        return self.kind in ("indicator", "left", "right")

    @property
    def supports_exact(self) -> bool:
        return self.is_sharp

    def bounds(self) -> tuple[float, float]:
        if self.kind == "tabulated":
            return min(self.values), max(self.values)
        return 0.0, 1.0

    def breakpoints(self) -> tuple[float, ...]:
        """Kink/jump locations, for adaptive quadrature."""
        pts = []
        for p in (self.a, self.b):
            if p is not None and math.isfinite(p):
                pts.append(p)
        return tuple(pts)

    # -- evaluation ---------------------------------------------------------

    def sample(self, x: np.ndarray) -> np.ndarray:
        """Evaluate on an array of points (tabulated: must match the grid)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "indicator":
            return ((x >= self.a) & (x <= self.b)).astype(float)
        if self.kind == "left":
            return (x <= self.b).astype(float)
        if self.kind == "right":
            return (x >= self.a).astype(float)
        if self.kind == "smoothed_indicator":
            hi = ndtr((self.b - x) / self.h) if math.isfinite(self.b) else np.ones_like(x)
            lo = ndtr((self.a - x) / self.h) if math.isfinite(self.a) else np.zeros_like(x)
            return np.asarray(hi - lo, dtype=float)
        if self.kind == "tabulated":
            if x.shape != (len(self.values),):
                raise ValueError("tabulated terminal is defined only on its grid")
            return np.asarray(self.values, dtype=float)
        raise ValueError(f"unknown kind {self.kind!r}")

    def __call__(self, x: float) -> float:
        if self.kind == "tabulated":
            raise TypeError("tabulated terminal cannot be evaluated off-grid")
        return float(self.sample(np.asarray([x]))[0])

    def evaluate_exact(self, value: ExactValue) -> Fraction:
        """Exact 0/1 classification of an exact statistic value."""
        if self.kind == "indicator":
            if self.a_exact is not None and value.cmp(self.a_exact) < 0:
                return _ZERO
            if self.b_exact is not None and value.cmp(self.b_exact) > 0:
                return _ZERO
            return _ONE
        if self.kind == "left":
            if self.b_exact is None:
                return _ONE if self.b > 0 else _ZERO
            return _ONE if value.cmp(self.b_exact) <= 0 else _ZERO
        if self.kind == "right":
            if self.a_exact is None:
                return _ONE if self.a < 0 else _ZERO
            return _ONE if value.cmp(self.a_exact) >= 0 else _ZERO
        raise TypeError(f"{self.kind!r} terminal has no exact evaluation")
