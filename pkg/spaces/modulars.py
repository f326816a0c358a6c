import logging
from dataclasses import dataclass

import numpy as np
from django.db import models

from utils.exceptions import DimensionMismatch
from utils.workers import map_chunks
from .reports import CheckReport, Violation, flagged

logger = logging.getLogger(__name__)


class ModularKind(models.TextChoices):
    P_POWER = 'p_power'
    WEIGHTED_ABS = 'weighted_abs'
    ROOT_POWER = 'root_power'


@dataclass(frozen=True)
class ClassicalModular:
    """
    A classical modular on R^n.

    ``p_power``: sum |x_i|^p with p >= 1. ``weighted_abs``: sum w_i |x_i| with
    positive weights. ``root_power``: sum |x_i|^q with q in (0, 1], which is
    |a|^q-homogeneous.
    """
    kind: str
    exponent: float = 1.0
    weights: tuple = ()

    def __post_init__(self):
        if self.kind not in ModularKind.values:
            raise ValueError(f"Unknown modular kind: {self.kind}")
        if self.kind == ModularKind.P_POWER and not self.exponent >= 1:
            raise ValueError(f"p_power needs p >= 1, got {self.exponent}.")
        if self.kind == ModularKind.ROOT_POWER and not 0 < self.exponent <= 1:
            raise ValueError(f"root_power needs q in (0, 1], got {self.exponent}.")
        if self.kind == ModularKind.WEIGHTED_ABS:
            if not self.weights or any(not w > 0 for w in self.weights):
                raise ValueError("weighted_abs needs positive weights.")
        object.__setattr__(self, 'exponent', float(self.exponent))
        object.__setattr__(self, 'weights', tuple(float(w) for w in self.weights))

    @classmethod
    def p_power(cls, p):
        return cls(ModularKind.P_POWER, exponent=p)

    @classmethod
    def weighted_abs(cls, weights):
        return cls(ModularKind.WEIGHTED_ABS, weights=tuple(weights))

    @classmethod
    def root_power(cls, q):
        return cls(ModularKind.ROOT_POWER, exponent=q)

    def value(self, xs):
        """rho of one vector, shape (n,), or of many, shape (m, n)."""
        xs = np.abs(np.asarray(xs, dtype=float))
        if self.kind == ModularKind.WEIGHTED_ABS:
            weights = np.asarray(self.weights)
            if weights.size == 1:
                weights = np.full(xs.shape[-1], weights[0])
            elif weights.size != xs.shape[-1]:
                raise DimensionMismatch(weights.size, xs.shape[-1])
            terms = xs * weights
        else:
            terms = xs ** self.exponent
        total = terms.sum(axis=-1)
        return float(total) if np.ndim(total) == 0 else total

    def delta2_constant(self):
        """The smallest c with rho(2x) <= c rho(x)."""
        if self.kind == ModularKind.WEIGHTED_ABS:
            return 2.0
        return 2.0 ** self.exponent

    def homogeneity_exponent(self):
        """beta with rho(ax) = |a|^beta rho(x), when it lies in (0, 1]."""
        if self.kind == ModularKind.WEIGHTED_ABS:
            return 1.0
        if self.exponent <= 1:
            return self.exponent
        return None

    def describe(self):
        if self.kind == ModularKind.WEIGHTED_ABS:
            return f"weighted_abs({list(self.weights)})"
        return f"{self.kind}({self.exponent:g})"


def check_modular(modular, dim, budget):
    """
    Sampled classical modular axioms: positivity away from 0, rho(0) = 0,
    symmetry and convex subadditivity.
    """
    epsilon = budget.epsilon

    def chunk(rng, count, index):
        xs = budget.draw_vectors(rng, count, dim)
        ys = budget.draw_vectors(rng, count, dim)
        g = np.abs(rng.standard_normal((count, 2)))
        a = g[:, 0] / (g[:, 0] + g[:, 1])
        rho_x, rho_y = modular.value(xs), modular.value(ys)
        rho_z = modular.value(a[:, None] * xs + (1 - a)[:, None] * ys)
        rho_minus = modular.value(-xs)
        convex, n_convex = flagged(
            rho_z > rho_x + rho_y + epsilon * (1 + rho_x + rho_y),
            lambda i: Violation({'x': xs[i].tolist(), 'y': ys[i].tolist(), 'a': float(a[i])}, float(rho_z[i]), float(rho_x[i] + rho_y[i])),
        )
        symmetric, n_symmetric = flagged(
            np.abs(rho_minus - rho_x) > epsilon * (1 + rho_x),
            lambda i: Violation({'x': xs[i].tolist()}, float(rho_minus[i]), float(rho_x[i])),
        )
        positive, n_positive = flagged(rho_x <= 0, lambda i: Violation({'x': xs[i].tolist()}, float(rho_x[i]), 0.0))
        return convex + symmetric + positive, count, n_convex + n_symmetric + n_positive

    chunks = map_chunks(chunk, budget.rng_seed, 'modular', budget.n_vectors)
    zero = modular.value(np.zeros(dim))
    origin = [] if zero == 0 else [Violation({'x': [0.0] * dim}, zero, 0.0)]
    chunks.append((origin, 1, len(origin)))
    return CheckReport.from_chunks('modular', budget.rng_seed, chunks, {'modular': modular.describe()})
