import logging

from spaces.instances import Family, PMSpace
from spaces.modulars import ClassicalModular
from utils.workers import stream_rng
from .mutations import mutate, supports

logger = logging.getLogger(__name__)

MAX_GENERATED_DIM = 4


def _modular(rng, dim, convex_only=False):
    choices = ('p_power_1', 'p_power_2', 'weighted_abs') + (() if convex_only else ('root_power',))
    match choices[rng.integers(len(choices))]:
        case 'p_power_1':
            return ClassicalModular.p_power(1)
        case 'p_power_2':
            return ClassicalModular.p_power(2)
        case 'weighted_abs':
            return ClassicalModular.weighted_abs(2.0 ** rng.uniform(-1.0, 1.0, dim))
        case 'root_power':
            return ClassicalModular.root_power(0.5)


def generate_instance(seed, family, mutation=None):
    """
    A reference instance drawn from ``seed``, declaring its true Delta_2
    constant and homogeneity exponent, with ``mutation`` applied on top.
    """
    if family not in Family.values:
        raise ValueError(f"Unknown family: {family}")
    rng = stream_rng(seed, 'instance')
    dim = int(rng.integers(1, MAX_GENERATED_DIM + 1))
    convex_only = mutation is not None and not supports(mutation, ClassicalModular.root_power(0.5))
    modular = _modular(rng, dim, convex_only)
    space = PMSpace.reference(family, modular, dim)
    if mutation:
        space = mutate(space, mutation)
    logger.debug(f"Instance for seed {seed}: {space.describe()}")
    return space
