import numpy as np
import pytest

from wcolab.analysis.ball_maps import (
    LinearFractionalMap,
    as_ball_point,
    automorphism_identity_residual,
    fixed_point_in_ball,
    is_automorphism,
    is_constant_map,
    is_self_map,
    jacobian_at,
    lfm_adjoint,
    lfm_allclose,
    lfm_apply,
    lfm_apply_many,
    lfm_compose,
    lfm_inverse,
    make_lfm,
    moebius_involution,
)
from wcolab.errors import DomainError, NumericalError

from conftest import random_automorphism, random_ball_point, random_contractive_lfm, random_unitary

PARABOLIC_T1 = LinearFractionalMap([[1.0]], [1.0], [-1.0], 3.0)


def test_make_lfm_rejects_vanishing_denominator():
    with pytest.raises(DomainError, match="denominator may vanish on the closed ball"):
        make_lfm([[1.0]], [0.0], [1.0], 1.0)
    with pytest.raises(DomainError):
        make_lfm(np.eye(2), np.zeros(3), np.zeros(2), 1.0)
    with pytest.raises(DomainError):
        LinearFractionalMap([[np.nan]], [0.0], [0.0], 1.0)


def test_as_ball_point():
    np.testing.assert_array_equal(as_ball_point(0.5), [0.5])
    with pytest.raises(DomainError):
        as_ball_point([0.8, 0.6])
    with pytest.raises(DomainError):
        as_ball_point([0.1], n=2)


def test_apply_examples():
    z = np.array([0.3, -0.2j])
    np.testing.assert_allclose(lfm_apply(LinearFractionalMap.identity(2), z), z)
    np.testing.assert_allclose(lfm_apply(moebius_involution(np.zeros(2)), z), -z)
    assert lfm_apply(PARABOLIC_T1, [1.0])[0] == pytest.approx(1.0)
    assert PARABOLIC_T1([0.5])[0] == pytest.approx(1.5 / 2.5)


def test_apply_vanishing_denominator():
    phi = LinearFractionalMap([[1.0]], [0.0], [1.0], 1.0)
    with pytest.raises(NumericalError):
        lfm_apply(phi, [-1.0])
    with pytest.raises(NumericalError):
        lfm_apply_many(phi, [[0.0], [-1.0]])


def test_apply_many_matches_apply(rng):
    phi = random_contractive_lfm(rng, 3)
    points = np.array([random_ball_point(rng, 3) for _ in range(5)])
    expected = np.array([lfm_apply(phi, z) for z in points])
    np.testing.assert_allclose(lfm_apply_many(phi, points), expected)


def test_moebius_involution_properties(rng):
    for n in (1, 2, 3):
        a = random_ball_point(rng, n)
        phi = moebius_involution(a)
        np.testing.assert_allclose(lfm_apply(phi, a), 0, atol=1e-13)
        np.testing.assert_allclose(lfm_apply(phi, np.zeros(n)), a, atol=1e-13)
        assert lfm_allclose(lfm_compose(phi, phi), LinearFractionalMap.identity(n))
        assert lfm_allclose(lfm_adjoint(phi), phi)


def test_compose_is_function_composition(rng):
    phi, psi = random_contractive_lfm(rng, 2), random_contractive_lfm(rng, 2)
    z = random_ball_point(rng, 2)
    np.testing.assert_allclose(lfm_apply(lfm_compose(phi, psi), z), lfm_apply(phi, lfm_apply(psi, z)))
    assert lfm_allclose(lfm_compose(phi, LinearFractionalMap.identity(2)), phi)


def test_compose_parabolic_matrix_example():
    square = lfm_compose(PARABOLIC_T1, PARABOLIC_T1)
    assert square.d == 1
    assert lfm_allclose(square, LinearFractionalMap.from_matrix([[0.0, 1.0], [-1.0, 2.0]]))


def test_compose_dimension_mismatch():
    with pytest.raises(DomainError):
        lfm_compose(LinearFractionalMap.identity(1), LinearFractionalMap.identity(2))


def test_adjoint_examples(rng):
    assert lfm_allclose(lfm_adjoint(PARABOLIC_T1), PARABOLIC_T1)
    phi = random_contractive_lfm(rng, 3)
    assert lfm_allclose(lfm_adjoint(lfm_adjoint(phi)), phi)
    A = np.array([[0.2, 0.1j], [0.3, -0.4]])
    assert lfm_allclose(lfm_adjoint(LinearFractionalMap.linear(A)), LinearFractionalMap.linear(A.conj().T))


def test_adjoint_map_inner_product_relation(rng):
    # the J-form pairing moves M onto its adjoint matrix
    phi = random_contractive_lfm(rng, 2)
    sigma = lfm_adjoint(phi)
    z, w = random_ball_point(rng, 2), random_ball_point(rng, 2)
    M, J = phi.matrix, np.diag([1.0, 1.0, -1.0])
    lhs = np.vdot(np.append(w, 1.0), J @ M @ np.append(z, 1.0))
    rhs = np.vdot(J @ M.conj().T @ J @ np.append(w, 1.0), J @ np.append(z, 1.0))
    assert lhs == pytest.approx(rhs)
    assert lfm_allclose(sigma, LinearFractionalMap.from_matrix(J @ M.conj().T @ J))


def test_inverse(rng):
    psi = random_automorphism(rng, 2)
    assert lfm_allclose(lfm_compose(psi, lfm_inverse(psi)), LinearFractionalMap.identity(2))
    with pytest.raises(DomainError):
        lfm_inverse(LinearFractionalMap([[0.0]], [0.5], [0.0], 1.0))


def test_self_map_examples(rng):
    check = is_self_map(LinearFractionalMap.identity(2))
    assert check.ok and check.margin == pytest.approx(0.0, abs=1e-12)
    assert is_self_map(moebius_involution(random_ball_point(rng, 2))).ok
    assert not is_self_map(LinearFractionalMap.linear([[2.0]])).ok
    assert is_self_map(random_contractive_lfm(rng, 3)).ok
    assert not is_self_map(LinearFractionalMap([[1.0]], [0.0], [1.0], 1.0)).ok


def test_automorphism_examples(rng):
    assert is_automorphism(moebius_involution(random_ball_point(rng, 3)))
    assert is_automorphism(LinearFractionalMap.linear(random_unitary(rng, 2)))
    assert is_automorphism(random_automorphism(rng, 2))
    assert not is_automorphism(LinearFractionalMap.linear([[0.5]]))
    assert not is_automorphism(LinearFractionalMap([[0.0]], [0.5], [0.0], 1.0))


def test_fixed_points():
    assert np.allclose(fixed_point_in_ball(LinearFractionalMap.linear(np.diag([0.5, 0.2j]))), 0)
    p = fixed_point_in_ball(moebius_involution([0.5]))
    assert p[0] == pytest.approx(2 - np.sqrt(3))
    assert fixed_point_in_ball(PARABOLIC_T1) is None
    assert fixed_point_in_ball(LinearFractionalMap.linear([[1.0]])) is not None


def test_fixed_point_of_conjugated_linear_map(rng):
    p = random_ball_point(rng, 2, 0.6)
    phi_p = moebius_involution(p)
    phi = lfm_compose(phi_p, lfm_compose(LinearFractionalMap.linear(np.diag([0.5, -0.3])), phi_p))
    np.testing.assert_allclose(fixed_point_in_ball(phi), p, atol=1e-9)


def test_jacobian(rng):
    np.testing.assert_allclose(jacobian_at(LinearFractionalMap.identity(2), [0.1, 0.2]), np.eye(2))
    A = np.array([[0.2, 0.1], [0.0, 0.3j]])
    np.testing.assert_allclose(jacobian_at(LinearFractionalMap.linear(A), [0.0, 0.0]), A)
    phi = random_contractive_lfm(rng, 2)
    z, h = random_ball_point(rng, 2, 0.5), 1e-6 * np.array([1.0, 0.5j])
    numeric = (lfm_apply(phi, z + h) - lfm_apply(phi, z - h)) / 2
    np.testing.assert_allclose(jacobian_at(phi, z) @ h, numeric, atol=1e-12)


def test_constant_maps():
    assert is_constant_map(LinearFractionalMap(np.zeros((2, 2)), [0.1, 0.2], np.zeros(2), 1.0))
    assert is_constant_map(LinearFractionalMap([[0.2]], [0.4], [0.5], 1.0))
    assert not is_constant_map(LinearFractionalMap.identity(2))


def test_automorphism_identity(rng):
    assert automorphism_identity_residual(LinearFractionalMap.identity(2)) == pytest.approx(0.0, abs=1e-15)
    for n in (1, 2, 3):
        for _ in range(5):
            assert automorphism_identity_residual(random_automorphism(rng, n)) <= 1e-10
    with pytest.raises(DomainError):
        automorphism_identity_residual(LinearFractionalMap.linear([[0.5]]))
