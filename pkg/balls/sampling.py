"""
Rejection sampling of ball members from an isotropic Gaussian at the centre.

The Gaussian width is calibrated on small pilot batches until the acceptance
rate sits between 10% and 90%. Points whose membership is undecided in
floating point are discarded and re-drawn.
"""
import logging

import numpy as np

logger = logging.getLogger(__name__)

PILOT_SIZE = 256
MIN_ACCEPTANCE = 0.1
MAX_ACCEPTANCE = 0.9
SIGMA_CAP = 1e12
CALIBRATION_ROUNDS = 200
SAMPLING_ROUNDS = 50


def _balls(region):
    return getattr(region, 'balls', (region,))


def calibrate_sigma(ball, rng, sigma=1.0):
    centre = ball.center_vector
    for _ in range(CALIBRATION_ROUNDS):
        pilot = centre + sigma * rng.standard_normal((PILOT_SIZE, ball.dim))
        acceptance = ball.contains_many(pilot).mean()
        if acceptance < MIN_ACCEPTANCE:
            sigma /= 2
        elif acceptance > MAX_ACCEPTANCE and sigma < SIGMA_CAP:
            sigma *= 2
        else:
            break
    logger.debug(f"Calibrated sigma {sigma:.3g} for {ball}")
    return sigma


def _sample_ball(ball, rng, count, epsilon):
    sigma = calibrate_sigma(ball, rng)
    centre = ball.center_vector
    kept = []
    found = 0
    for _ in range(SAMPLING_ROUNDS):
        if found >= count:
            break
        batch = centre + sigma * rng.standard_normal((max(2 * (count - found), PILOT_SIZE), ball.dim))
        members = batch[ball.contains_many(batch) & ~ball.undecided(batch, epsilon)]
        kept.append(members)
        found += len(members)
    members = np.concatenate(kept) if kept else np.empty((0, ball.dim))
    if len(members) < count:
        logger.warning(f"Only {len(members)} of {count} members drawn from {ball}")
    return members[:count]


def sample_members(region, rng, count, epsilon):
    """
    ``count`` decided members of a ball, or of a union of balls with the
    count split evenly between them.
    """
    balls = _balls(region)
    shares = np.full(len(balls), count // len(balls))
    shares[:count % len(balls)] += 1
    members = [_sample_ball(ball, rng, int(share), epsilon) for ball, share in zip(balls, shares) if share]
    return np.concatenate(members) if members else np.empty((0, region.dim))


def sample_around(ball, rng, count, epsilon, spread=2.0):
    """
    Points near a ball, members or not, with a calibrated width widened by
    ``spread``; undecided points are dropped.
    """
    sigma = calibrate_sigma(ball, rng) * spread
    points = ball.center_vector + sigma * rng.standard_normal((count, ball.dim))
    return points[~ball.undecided(points, epsilon)]
