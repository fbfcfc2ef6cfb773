#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Deterministic quasi-random points in the ball and on the sphere of C^n."""

import numpy as np
from scipy.stats import norm, qmc

from wcolab.config import DEFAULT_SEED, SAMPLE_RADIUS

_EPS = 1e-12


def _halton(dim, count, seed):
    engine = qmc.Halton(d=dim, scramble=True, rng=np.random.default_rng(seed))
    return np.clip(engine.random(count), _EPS, 1.0 - _EPS)


def _directions(u, n):
    # Gaussian vectors in R^{2n} are uniform in direction once normalized.
    g = norm.ppf(u)
    z = g[:, :n] + 1j * g[:, n:2 * n]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sphere_samples(n, count, seed=DEFAULT_SEED) -> np.ndarray:
    """(count, n) complex points with |z| = 1."""
    if count <= 0:
        return np.zeros((0, n), dtype=complex)
    return _directions(_halton(2 * n, count, seed), n)


def ball_samples(n, count, seed=DEFAULT_SEED, radius=SAMPLE_RADIUS) -> np.ndarray:
    """
    (count, n) complex points spread over the ball of the given radius.

    The same arguments always give the same points.
    """
    if count <= 0:
        return np.zeros((0, n), dtype=complex)
    u = _halton(2 * n + 1, count, seed)
    r = radius * u[:, 2 * n] ** (1.0 / (2 * n))
    return _directions(u[:, :2 * n], n) * r[:, np.newaxis]


def sample_pairs(n, count, seed=DEFAULT_SEED, radius=SAMPLE_RADIUS):
    """Two independent point sets for two-point identities."""
    return ball_samples(n, count, seed, radius), ball_samples(n, count, seed + 1, radius)
