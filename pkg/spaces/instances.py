import logging
from dataclasses import dataclass, field

import numpy as np
from django.db import models

from distributions.functions import DistributionFunction, rational_values, step_values
from utils.exceptions import DimensionMismatch
from .modulars import ClassicalModular

logger = logging.getLogger(__name__)

MAX_DIM = 8


class Family(models.TextChoices):
    RATIONAL_FROM = 'rational_from'
    STEP_FROM = 'step_from'


@dataclass(frozen=True)
class ModularMap:
    """
    The rule x -> mu_x. ``rational_from`` gives ``rational(rho(x))`` and
    ``step_from`` gives ``step(rho(x))``.

    The remaining fields are the structural knobs the falsifier turns to
    build instances that break one axiom. With their defaults the map is one
    of the two reference families.
    """
    family: str
    modular: ClassicalModular
    origin_mass: float = 0.0
    collapse_below: float = 0.0
    negative_stretch: float = 1.0
    reciprocal: bool = False
    closed_step: bool = False

    def __post_init__(self):
        if self.family not in Family.values:
            raise ValueError(f"Unknown family: {self.family}")
        if self.closed_step and self.family != Family.STEP_FROM:
            raise ValueError("A closed step only exists in the step family.")
        if self.negative_stretch <= 0:
            raise ValueError("Negative stretch must be positive.")

    @property
    def is_reference(self):
        return not (self.origin_mass or self.collapse_below or self.reciprocal or self.closed_step
                    or self.negative_stretch != 1)

    def parameters(self, xs):
        """The distribution parameter of mu_x for one vector or a batch."""
        xs = np.asarray(xs, dtype=float)
        if self.negative_stretch != 1:
            xs = np.where(xs < 0, xs * self.negative_stretch, xs)
        rho = np.asarray(self.modular.value(xs), dtype=float)
        if self.reciprocal:
            with np.errstate(divide='ignore'):
                rho = np.where(rho > 0, 1.0 / rho, 0.0)
        if self.collapse_below:
            rho = np.where(rho < self.collapse_below, 0.0, rho)
        return rho

    def values(self, r, t):
        if self.family == Family.RATIONAL_FROM:
            values = rational_values(r, t)
        else:
            values = step_values(r, t, inclusive=self.closed_step)
        if self.origin_mass:
            values = np.where(np.asarray(t) >= 0, np.maximum(values, self.origin_mass), values)
        return values

    def distribution(self, r):
        if self.family == Family.RATIONAL_FROM:
            return DistributionFunction.rational(float(r), origin_mass=self.origin_mass)
        return DistributionFunction.step(float(r), inclusive=self.closed_step, origin_mass=self.origin_mass)

    def describe(self):
        knobs = {
            'origin_mass': self.origin_mass,
            'collapse_below': self.collapse_below,
            'negative_stretch': self.negative_stretch,
            'reciprocal': self.reciprocal,
            'closed_step': self.closed_step,
        }
        return {'family': self.family, 'modular': self.modular.describe(), 'knobs': knobs}


@dataclass(frozen=True)
class PMSpace:
    """
    R^dim with a modular map and the optionally declared Delta_2 constant and
    homogeneity exponent.
    """
    dim: int
    modular_map: ModularMap
    declared_c: float | None = None
    declared_beta: float | None = None
    label: str = field(default='', compare=False)

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"Dimension must be between 1 and {MAX_DIM}, got {self.dim}.")
        if self.declared_c is not None and not self.declared_c > 0:
            raise ValueError("A declared Delta_2 constant must be positive.")
        if self.declared_beta is not None and not 0 < self.declared_beta <= 1:
            raise ValueError("A declared homogeneity exponent must lie in (0, 1].")

    @classmethod
    def reference(cls, family, modular, dim, declare=True):
        """One of the two reference families, declaring its true constants."""
        return cls(
            dim=dim,
            modular_map=ModularMap(family, modular),
            declared_c=modular.delta2_constant() if declare else None,
            declared_beta=modular.homogeneity_exponent() if declare else None,
        )

    def vector(self, coords):
        vector = np.asarray(coords, dtype=float).reshape(-1)
        if vector.size != self.dim:
            raise DimensionMismatch(self.dim, vector.size)
        if not np.all(np.isfinite(vector)):
            raise ValueError("Vector coordinates must be finite.")
        return vector

    def batch(self, xs):
        xs = np.asarray(xs, dtype=float)
        if xs.ndim == 1:
            xs = xs[None, :]
        if xs.shape[-1] != self.dim:
            raise DimensionMismatch(self.dim, xs.shape[-1])
        return xs

    def mu(self, x):
        """mu_x as a DistributionFunction."""
        x = self.vector(x)
        return self.modular_map.distribution(self.modular_map.parameters(x))

    def parameters(self, xs):
        return self.modular_map.parameters(self.batch(xs))

    def evaluate(self, xs, t):
        """
        mu_x(t) for a batch of vectors, shape (m, dim), and t broadcast
        against the batch: a scalar, an (m,) array of paired scales, or an
        (m, k) array.
        """
        r = self.parameters(xs)
        t = np.asarray(t, dtype=float)
        if t.ndim == 2:
            r = r[:, None]
        return self.modular_map.values(r, t)

    def profile(self, xs, ts):
        """mu_x(t) for every vector against every scale, shape (m, k)."""
        r = self.parameters(xs)
        return self.modular_map.values(r[:, None], np.asarray(ts, dtype=float)[None, :])

    def value(self, x, t):
        return float(self.evaluate(self.vector(x), float(t))[0])

    def describe(self):
        description = {
            'dim': self.dim,
            'declared_c': self.declared_c,
            'declared_beta': self.declared_beta,
            **self.modular_map.describe(),
        }
        if self.label:
            description['label'] = self.label
        return description
