from dataclasses import dataclass

import numpy as np
from django.db import models

from utils.exceptions import DimensionMismatch


class SequenceKind(models.TextChoices):
    HARMONIC = 'harmonic'
    CONSTANT_OFFSET = 'constant_offset'
    ALTERNATING = 'alternating'
    GEOMETRIC = 'geometric'


@dataclass(frozen=True)
class SequenceSpec:
    """
    x_n built from a base point x and a direction v:

    harmonic x + v/n, constant_offset x + v, alternating x + (-1)^n v and
    geometric x + v q^n. The candidate limit defaults to x.
    """
    kind: str
    x: tuple
    v: tuple
    q: float | None = None
    candidate_limit: tuple | None = None

    def __post_init__(self):
        if self.kind not in SequenceKind.values:
            raise ValueError(f"Unknown sequence kind: {self.kind}")
        x = tuple(float(c) for c in self.x)
        v = tuple(float(c) for c in self.v)
        limit = x if self.candidate_limit is None else tuple(float(c) for c in self.candidate_limit)
        if len(v) != len(x):
            raise DimensionMismatch(len(x), len(v))
        if len(limit) != len(x):
            raise DimensionMismatch(len(x), len(limit))
        if self.kind == SequenceKind.GEOMETRIC and (self.q is None or not 0 < self.q < 1):
            raise ValueError(f"A geometric sequence needs q in (0, 1), got {self.q}.")
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'v', v)
        object.__setattr__(self, 'candidate_limit', limit)

    @property
    def dim(self):
        return len(self.x)

    def factors(self, ns):
        ns = np.asarray(ns, dtype=float)
        match self.kind:
            case SequenceKind.HARMONIC:
                return 1.0 / ns
            case SequenceKind.CONSTANT_OFFSET:
                return np.ones_like(ns)
            case SequenceKind.ALTERNATING:
                return np.where(np.mod(ns, 2) == 0, 1.0, -1.0)
            case SequenceKind.GEOMETRIC:
                return np.power(self.q, ns)

    def terms(self, ns):
        """x_n for every index in ``ns``, shape (len(ns), dim)."""
        return np.asarray(self.x)[None, :] + self.factors(ns)[:, None] * np.asarray(self.v)[None, :]

    def offsets(self, ns):
        """x_n minus the candidate limit."""
        return self.terms(ns) - np.asarray(self.candidate_limit)[None, :]

    def describe(self):
        description = {'kind': self.kind, 'x': list(self.x), 'v': list(self.v),
                       'candidate_limit': list(self.candidate_limit)}
        if self.q is not None:
            description['q'] = self.q
        return description
