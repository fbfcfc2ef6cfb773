"""Shared fixtures: seeded generators and random points, unitaries and maps."""

import numpy as np
import pytest

from wcolab.analysis.ball_maps import LinearFractionalMap, lfm_compose, moebius_involution


def random_ball_point(rng, n, radius=0.8):
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z) * radius * rng.uniform() ** (1.0 / (2 * n))


def random_unitary(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_automorphism(rng, n, radius=0.8):
    """φ_b∘V for random b and unitary V."""
    b = random_ball_point(rng, n, radius)
    return lfm_compose(moebius_involution(b), LinearFractionalMap.linear(random_unitary(rng, n)))


def random_contractive_lfm(rng, n):
    """Random map with ‖A‖ + ‖B‖ < 1 - ‖C‖, hence a self-map with room to spare."""

    def scaled(shape, size):
        x = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        return x / np.linalg.norm(x, 2 if len(shape) == 2 else None) * size

    return LinearFractionalMap(scaled((n, n), 0.4), scaled((n,), 0.25), scaled((n,), 0.2), 1.0)


def random_normal_matrix(rng, n, radius=0.9, unitary=False):
    moduli = np.ones(n) if unitary else radius * rng.uniform(size=n)
    eigenvalues = moduli * np.exp(2j * np.pi * rng.uniform(size=n))
    U = random_unitary(rng, n)
    return U @ np.diag(eigenvalues) @ U.conj().T


def random_hermitian(rng, n, norm):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = X + X.conj().T
    return H / np.linalg.norm(H, 2) * norm


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
