import logging
from dataclasses import dataclass

import numpy as np
from django.db import models

logger = logging.getLogger(__name__)


class Kind(models.TextChoices):
    RATIONAL = 'rational'
    STEP = 'step'
    PIECEWISE_LINEAR = 'piecewise_linear'


def rational_values(r, t):
    """t/(t+r) for t > 0 and 0 elsewhere; r = 0 gives 1 on t > 0."""
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = t / (t + r)
    ratio = np.where(np.isposinf(t), 1.0, ratio)
    ratio = np.where(r == 0, 1.0, ratio)
    return np.where(t > 0, ratio, 0.0)


def step_values(theta, t, inclusive=False):
    """The indicator of t > theta, or of t >= theta for the closed variant, on t > 0."""
    theta, t = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(t, dtype=float))
    above = t >= theta if inclusive else t > theta
    return np.where(above & (t > 0), 1.0, 0.0)


@dataclass(frozen=True)
class DistributionFunction:
    """
    A member of the class of distribution functions: non-decreasing, with
    values in [0, 1], infimum 0 and supremum 1.

    Three closed kinds are supported so that instances stay serializable and
    can be mutated structurally:

    * ``rational``: ``t/(t+r)`` on ``t > 0`` and 0 elsewhere;
    * ``step``: ``1`` for ``t > theta`` and 0 elsewhere (``inclusive`` switches
      to ``t >= theta`` on ``t > 0``, which is no longer left-continuous);
    * ``piecewise_linear``: linear between sorted ``(t, v)`` breakpoints, 0 left
      of the first and the last value right of the last.

    ``origin_mass`` lifts the function to at least that value on ``t >= 0``.
    It only exists to build instances that break ``f(0) = 0``.
    """
    kind: str
    parameter: float = 0.0
    breakpoints: tuple = ()
    inclusive: bool = False
    origin_mass: float = 0.0

    def __post_init__(self):
        if self.kind not in Kind.values:
            raise ValueError(f"Unknown distribution kind: {self.kind}")
        if self.kind == Kind.PIECEWISE_LINEAR:
            points = tuple((float(t), float(v)) for t, v in self.breakpoints)
            if not points:
                raise ValueError("A piecewise linear function needs at least one breakpoint.")
            ts = [t for t, _ in points]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("Breakpoints must be strictly increasing in t.")
            if any(not 0 <= v <= 1 for _, v in points):
                raise ValueError("Breakpoint values must lie in [0, 1].")
            object.__setattr__(self, 'breakpoints', points)
        else:
            if not np.isfinite(self.parameter) or self.parameter < 0:
                raise ValueError(f"The {self.kind} parameter must be finite and non-negative, got {self.parameter}.")
            object.__setattr__(self, 'parameter', float(self.parameter))
        if not 0 <= self.origin_mass <= 1:
            raise ValueError("Origin mass must lie in [0, 1].")

    @classmethod
    def rational(cls, r, **kwargs):
        return cls(Kind.RATIONAL, parameter=r, **kwargs)

    @classmethod
    def step(cls, theta, inclusive=False, **kwargs):
        return cls(Kind.STEP, parameter=theta, inclusive=inclusive, **kwargs)

    @classmethod
    def piecewise_linear(cls, breakpoints, **kwargs):
        return cls(Kind.PIECEWISE_LINEAR, breakpoints=tuple(breakpoints), **kwargs)

    def evaluate(self, t):
        """
        Evaluate at a real or an array of reals. Scalars come back as float.
        """
        points = np.asarray(t, dtype=float)
        if self.kind == Kind.RATIONAL:
            values = rational_values(self.parameter, points)
        elif self.kind == Kind.STEP:
            values = step_values(self.parameter, points, self.inclusive)
        else:
            ts, vs = zip(*self.breakpoints)
            values = np.interp(points, ts, vs, left=0.0, right=vs[-1])
        if self.origin_mass:
            values = np.where(points >= 0, np.maximum(values, self.origin_mass), values)
        if values.ndim == 0:
            return float(values)
        return values

    __call__ = evaluate

    def kinks(self):
        """Points where the function may fail to be smooth."""
        points = set()
        if self.kind == Kind.STEP:
            points.add(self.parameter)
        elif self.kind == Kind.PIECEWISE_LINEAR:
            points.update(t for t, _ in self.breakpoints)
        if self.origin_mass or (self.kind == Kind.RATIONAL and self.parameter == 0):
            points.add(0.0)
        return tuple(sorted(points))

    def scale(self):
        """A characteristic length, used to size jump steps at t = 0."""
        if self.kind == Kind.PIECEWISE_LINEAR:
            span = max(abs(t) for t, _ in self.breakpoints)
        else:
            span = self.parameter
        return span if span > 0 else 1.0

    def describe(self):
        if self.kind == Kind.PIECEWISE_LINEAR:
            return f"piecewise_linear({list(self.breakpoints)})"
        closed = ', closed' if self.inclusive else ''
        return f"{self.kind}({self.parameter:g}{closed})"


def pointwise_min(f, g, t):
    """The minimum of two distribution functions at t."""
    values = np.minimum(f.evaluate(t), g.evaluate(t))
    if np.ndim(values) == 0:
        return float(values)
    return values
