import numpy as np
import pytest

from wcolab.analysis.sampling import ball_samples, sample_pairs, sphere_samples


@pytest.mark.parametrize("n", [1, 2, 4])
def test_sphere_points_have_unit_norm(n):
    points = sphere_samples(n, 64, seed=3)
    assert points.shape == (64, n)
    np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("radius", [0.5, 0.9, 1.0])
def test_ball_points_within_radius(radius):
    points = ball_samples(3, 200, seed=1, radius=radius)
    norms = np.linalg.norm(points, axis=1)
    assert norms.max() <= radius
    # quasi-random points fill the ball, not just a shell
    assert norms.min() < 0.6 * radius


def test_samples_are_deterministic():
    np.testing.assert_array_equal(ball_samples(2, 50, seed=7), ball_samples(2, 50, seed=7))
    assert not np.allclose(ball_samples(2, 50, seed=7), ball_samples(2, 50, seed=8))


def test_sample_pairs_are_independent_sets():
    z, w = sample_pairs(2, 30, seed=4)
    assert z.shape == w.shape == (30, 2)
    np.testing.assert_array_equal(w, ball_samples(2, 30, seed=5))
    assert not np.allclose(z, w)


def test_empty_sample_sets():
    assert sphere_samples(2, 0).shape == (0, 2)
    assert ball_samples(3, 0).shape == (0, 3)
