"""
Structural mutations of a PM-space, each built to break one property.

A mutation turns one knob of the modular map (or the declared Delta_2
constant) and leaves everything else as it was:

  break_pm1                 every mu_x gets mass 0.1 at the origin
  break_pm2                 mu_x is 1 on t > 0 whenever rho(x) < 0.25
  break_pm3                 negative coordinates are doubled before rho
  break_pm4                 mu_x is built from 1/rho(x)
  break_left_continuity     the closed step 1_{t >= rho(x)}
  break_delta2_declaration  the declared c is half the true one
"""
import dataclasses

from django.db import models

from spaces.instances import Family
from spaces.modulars import ModularKind

ORIGIN_MASS = 0.1
COLLAPSE_BELOW = 0.25
NEGATIVE_STRETCH = 2.0


class MutationKind(models.TextChoices):
    BREAK_PM1 = 'break_pm1'
    BREAK_PM2 = 'break_pm2'
    BREAK_PM3 = 'break_pm3'
    BREAK_PM4 = 'break_pm4'
    BREAK_LEFT_CONTINUITY = 'break_left_continuity'
    BREAK_DELTA2_DECLARATION = 'break_delta2_declaration'


# the registry predicate each mutation must make fail
TARGETS = {
    MutationKind.BREAK_PM1: 'pm1',
    MutationKind.BREAK_PM2: 'pm2',
    MutationKind.BREAK_PM3: 'pm3',
    MutationKind.BREAK_PM4: 'pm4',
    MutationKind.BREAK_LEFT_CONTINUITY: 'left_continuity',
    MutationKind.BREAK_DELTA2_DECLARATION: 'delta2',
}


def supports(mutation, modular):
    """
    Whether the mutation breaks only its target on this modular. Collapsing
    small values keeps PM4 only for a convex modular.
    """
    if mutation == MutationKind.BREAK_PM2:
        return modular.kind != ModularKind.ROOT_POWER
    return True


def mutate(space, mutation):
    if mutation not in MutationKind.values:
        raise ValueError(f"Unknown mutation: {mutation}")
    if not supports(mutation, space.modular_map.modular):
        raise ValueError(f"{mutation} is not defined on {space.modular_map.modular.kind}.")
    knobs = space.modular_map
    match mutation:
        case MutationKind.BREAK_PM1:
            knobs = dataclasses.replace(knobs, origin_mass=ORIGIN_MASS)
        case MutationKind.BREAK_PM2:
            knobs = dataclasses.replace(knobs, collapse_below=COLLAPSE_BELOW)
        case MutationKind.BREAK_PM3:
            knobs = dataclasses.replace(knobs, negative_stretch=NEGATIVE_STRETCH)
        case MutationKind.BREAK_PM4:
            knobs = dataclasses.replace(knobs, reciprocal=True)
        case MutationKind.BREAK_LEFT_CONTINUITY:
            knobs = dataclasses.replace(knobs, family=Family.STEP_FROM, closed_step=True)
        case MutationKind.BREAK_DELTA2_DECLARATION:
            return dataclasses.replace(space, declared_c=space.declared_c / 2, label=mutation)
    return dataclasses.replace(space, modular_map=knobs, label=mutation)
