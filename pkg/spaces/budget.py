import dataclasses
from dataclasses import dataclass

import numpy as np
from django.conf import settings


def log_grid(t_min, t_max, count):
    """Logarithmically spaced positive scales, both ends included."""
    if not 0 < t_min <= t_max:
        raise ValueError(f"Grid bounds must satisfy 0 < min <= max, got {t_min}, {t_max}.")
    if count < 1:
        raise ValueError(f"Grid needs at least one point, got {count}.")
    return tuple(float(t) for t in np.geomspace(t_min, t_max, int(count)))


@dataclass(frozen=True)
class SampleBudget:
    """
    How every universally quantified statement is sampled.

    Vectors follow the standard normal law scaled by ``vector_scale``;
    ``t_grid`` holds the positive scales and ``evaluation_grid`` adds the
    origin and the negative points in front of it.
    """
    n_vectors: int
    n_scalar_pairs: int
    t_grid: tuple
    epsilon: float
    rng_seed: int
    epsilon_strict: float = 1e-12
    jump_steps: tuple = (1e-3, 1e-6, 1e-9)
    negative_points: tuple = (-1.0, -1e-3)
    witness_samples: int = 200
    separation_samples: int = 1000
    vector_scale: float = 1.0

    def __post_init__(self):
        if self.n_vectors < 1 or self.n_scalar_pairs < 1:
            raise ValueError("Sample counts must be at least 1.")
        if not self.t_grid:
            raise ValueError("The t-grid must not be empty.")
        if any(t <= 0 for t in self.t_grid) or list(self.t_grid) != sorted(self.t_grid):
            raise ValueError("The t-grid must be sorted and positive.")
        if self.epsilon <= 0:
            raise ValueError("Epsilon must be positive.")

    @classmethod
    def default(cls, **overrides):
        config = settings.PM_TOPOLOGY
        values = {
            'n_vectors': config['N_VECTORS'],
            'n_scalar_pairs': config['N_SCALAR_PAIRS'],
            't_grid': log_grid(*config['T_GRID']),
            'epsilon': config['EPSILON'],
            'rng_seed': config['SEED'],
            'epsilon_strict': config['EPSILON_STRICT'],
            'jump_steps': tuple(config['JUMP_STEPS']),
            'negative_points': tuple(config['NEGATIVE_POINTS']),
            'witness_samples': config['WITNESS_SAMPLES'],
            'separation_samples': config['SEPARATION_SAMPLES'],
        }
        values.update(overrides)
        values['t_grid'] = tuple(float(t) for t in values['t_grid'])
        return cls(**values)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @property
    def grid(self):
        return np.asarray(self.t_grid, dtype=float)

    @property
    def evaluation_grid(self):
        points = sorted(set(self.negative_points) | {0.0} | set(self.t_grid))
        return np.asarray(points, dtype=float)

    @property
    def extended_grid(self):
        """The positive grid with 0 in front, for statements over t >= 0."""
        return np.concatenate([[0.0], self.grid])

    def draw_vectors(self, rng, count, dim):
        return rng.standard_normal((int(count), int(dim))) * self.vector_scale

    def as_dict(self):
        return {
            'n_vectors': self.n_vectors,
            'n_scalar_pairs': self.n_scalar_pairs,
            't_grid': [self.t_grid[0], self.t_grid[-1], len(self.t_grid)],
            'epsilon': self.epsilon,
            'seed': self.rng_seed,
        }
