import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)

# relative scale perturbation used to spot points sitting on a step boundary
SCALE_NUDGE = 1e-9


def strict_margin():
    return settings.PM_TOPOLOGY['EPSILON_STRICT']


@dataclass(frozen=True)
class Ball:
    """
    B(x, alpha, t) = {y : mu_{x-y}(t) > 1 - alpha} in a PM-space.

    ``level`` is alpha and ``scale`` is t. Membership requires the strict
    inequality to hold with a margin of ``EPSILON_STRICT``.
    """
    space: object
    center: tuple
    level: float
    scale: float

    def __post_init__(self):
        if not 0 < self.level < 1:
            raise ValueError(f"Ball level must lie in (0, 1), got {self.level}.")
        if not self.scale > 0 or not np.isfinite(self.scale):
            raise ValueError(f"Ball scale must be positive and finite, got {self.scale}.")
        center = self.space.vector(self.center)
        object.__setattr__(self, 'center', tuple(float(c) for c in center))
        object.__setattr__(self, 'level', float(self.level))
        object.__setattr__(self, 'scale', float(self.scale))

    @classmethod
    def at_origin(cls, space, level, scale):
        return cls(space, (0.0,) * space.dim, level, scale)

    @property
    def center_vector(self):
        return np.asarray(self.center)

    @property
    def threshold(self):
        return 1.0 - self.level

    @property
    def dim(self):
        return self.space.dim

    def is_centered_at_origin(self):
        return not any(self.center)

    def values(self, ys, scale=None):
        offsets = self.center_vector - self.space.batch(ys)
        return self.space.evaluate(offsets, self.scale if scale is None else scale)

    def contains_many(self, ys):
        return self.values(ys) > self.threshold + strict_margin()

    def contains(self, y):
        return bool(self.contains_many(self.space.vector(y))[0])

    def undecided(self, ys, epsilon):
        """
        Points whose membership floating point cannot settle: mu within
        epsilon of the threshold, or membership that flips when the scale is
        nudged by a relative 1e-9.
        """
        values = self.values(ys)
        band = np.abs(values - self.threshold) <= epsilon
        below = self.values(ys, self.scale * (1 - SCALE_NUDGE)) > self.threshold + strict_margin()
        above = self.values(ys, self.scale * (1 + SCALE_NUDGE)) > self.threshold + strict_margin()
        return band | (below != above)

    def as_dict(self):
        return {'center': list(self.center), 'level': self.level, 'scale': self.scale}

    def __str__(self):
        return f"B({list(self.center)}, {self.level:g}, {self.scale:g})"


@dataclass(frozen=True)
class BallUnion:
    """A union of balls, used to exercise the convexity check on a non-convex set."""
    balls: tuple

    def __post_init__(self):
        if not self.balls:
            raise ValueError("A union needs at least one ball.")
        object.__setattr__(self, 'balls', tuple(self.balls))

    @property
    def space(self):
        return self.balls[0].space

    @property
    def dim(self):
        return self.space.dim

    def is_centered_at_origin(self):
        return self.balls[0].is_centered_at_origin()

    def contains_many(self, ys):
        return np.any([ball.contains_many(ys) for ball in self.balls], axis=0)

    def contains(self, y):
        return bool(self.contains_many(self.space.vector(y))[0])

    def undecided(self, ys, epsilon):
        return np.any([ball.undecided(ys, epsilon) for ball in self.balls], axis=0)

    def as_dict(self):
        return {'balls': [ball.as_dict() for ball in self.balls]}
