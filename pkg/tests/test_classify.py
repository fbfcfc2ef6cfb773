import numpy as np
import pytest

from wcolab.analysis.ball_maps import LinearFractionalMap, lfm_allclose, lfm_apply, moebius_involution
from wcolab.analysis.classify import (
    Verdict,
    check_adjoint_inverse_pair,
    classify_all,
    classify_normal_fixed_point,
    classify_normal_lfm,
    classify_self_adjoint,
    classify_unitary,
    gram_preservation_residual,
    is_adjoint_pair,
    is_coisometry,
    make_normal,
    make_parabolic_1d,
    make_self_adjoint,
    make_unitary,
    normal_lfm_coefficient_test_1d,
    normal_lfm_coefficients_1d,
    normality_residual,
)
from wcolab.analysis.sampling import ball_samples
from wcolab.analysis.spectra import match_multisets
from wcolab.analysis.wco_core import (
    KernelWeight,
    WcoSymbol,
    composition_symbol,
    identity_symbol,
    make_kernel_lfm,
    symbols_equal,
    wco_adjoint_symbol,
    wco_compress,
    wco_scale,
    weight_values,
)
from wcolab.analysis.multiindex_basis import SpaceParams
from wcolab.errors import DomainError

from conftest import (
    random_automorphism,
    random_ball_point,
    random_contractive_lfm,
    random_hermitian,
    random_normal_matrix,
    random_unitary,
)


def involution_operator(a, gamma=2.0):
    return make_unitary(moebius_involution(a), gamma)


# --------------------------------------------------------------------------- unitary
def test_make_unitary_examples(rng):
    assert symbols_equal(make_unitary(LinearFractionalMap.identity(2), 1.5), identity_symbol(2, 1.5)).equal
    V = random_unitary(rng, 2)
    C_V = make_unitary(LinearFractionalMap.linear(V), 1.5, lam=1j)
    assert C_V.weight_at([0.3, 0.1]) == pytest.approx(1j)
    a = random_ball_point(rng, 2)
    U_a = involution_operator(a)
    assert U_a.weight.alpha == pytest.approx((1 - np.vdot(a, a).real) ** 1.0)
    np.testing.assert_allclose(U_a.weight.c, a)


def test_make_unitary_rejects_bad_input():
    with pytest.raises(DomainError):
        make_unitary(LinearFractionalMap.identity(1), 1.0, lam=2.0)
    with pytest.raises(DomainError):
        make_unitary(LinearFractionalMap.linear([[0.5]]), 1.0)


def test_classify_unitary_examples(rng):
    result = classify_unitary(involution_operator(random_ball_point(rng, 2)))
    assert result.verdict is Verdict.UNITARY
    assert result.witness["lambda"] == pytest.approx(1.0)
    assert result.residual <= 1e-9

    contraction = composition_symbol(LinearFractionalMap.linear([[0.5]]), 1.0)
    assert classify_unitary(contraction).reason == "map is not an automorphism of the ball"

    doubled = wco_scale(involution_operator(random_ball_point(rng, 1)), 2.0)
    rejected = classify_unitary(doubled)
    assert not rejected.holds
    assert abs(rejected.witness["lambda"]) == pytest.approx(2.0)


def test_classify_unitary_round_trip(rng):
    for n in (1, 2, 3):
        for _ in range(4):
            lam = np.exp(2j * np.pi * rng.uniform())
            W = make_unitary(random_automorphism(rng, n), 2.5, lam)
            result = classify_unitary(W)
            assert result.holds and result.residual <= 1e-9
            assert result.witness["lambda"] == pytest.approx(lam)
            assert gram_preservation_residual(W) <= 1e-10


def test_classify_unitary_degenerate_symbols():
    constant = WcoSymbol(1.0, KernelWeight.constant(1), LinearFractionalMap([[0.0]], [0.5], [0.0], 1.0))
    assert "constant map" in classify_unitary(constant).reason
    zero = WcoSymbol(1.0, KernelWeight(0.0, [0.0]), LinearFractionalMap.identity(1))
    assert classify_unitary(zero).reason == "zero weight"


def test_adjoint_inverse_pairs(rng):
    U = involution_operator(random_ball_point(rng, 2))
    pair = check_adjoint_inverse_pair(U, U)
    assert pair.holds and pair.witness["lambda"] == pytest.approx(1.0)

    scaled = check_adjoint_inverse_pair(wco_scale(U, 2.0), wco_scale(U, 0.5))
    assert scaled.holds and scaled.witness["lambda"] == pytest.approx(2.0)

    C_V = composition_symbol(LinearFractionalMap.linear(random_unitary(rng, 2)), 2.0)
    C_W = composition_symbol(LinearFractionalMap.linear(random_unitary(rng, 2)), 2.0)
    mismatch = check_adjoint_inverse_pair(C_V, C_W)
    assert not mismatch.holds and mismatch.reason == "maps differ"
    assert not check_adjoint_inverse_pair(wco_scale(U, 2.0), U).holds


def test_coisometry_is_unitary(rng):
    W = make_unitary(random_automorphism(rng, 2), 1.0, np.exp(0.3j))
    assert is_coisometry(W).verdict is Verdict.UNITARY
    assert not is_coisometry(wco_scale(W, 0.5)).holds


def test_adjoint_pairs(rng):
    W = make_kernel_lfm(random_contractive_lfm(rng, 2), 2.0, alpha=1 + 1j)
    assert is_adjoint_pair(wco_adjoint_symbol(W), W).holds
    assert not is_adjoint_pair(W, W).holds
    mismatched = WcoSymbol(2.0, KernelWeight(1.0, lfm_apply(W.map, np.zeros(2))), W.map)
    assert not is_adjoint_pair(W, mismatched).holds


# --------------------------------------------------------------------------- self-adjoint
def test_make_self_adjoint_examples(rng):
    rank_one = make_self_adjoint([0.0], [[0.0]], 1.0, 1.0)
    assert rank_one.weight_at([0.7]) == pytest.approx(1.0)
    assert lfm_apply(rank_one.map, [0.7])[0] == pytest.approx(0.0)

    A = random_hermitian(rng, 2, 0.7)
    assert symbols_equal(make_self_adjoint(np.zeros(2), A, 1.0, 2.0), composition_symbol(LinearFractionalMap.linear(A), 2.0)).equal

    gamma = 1.5
    W = make_self_adjoint([0.3], [[0.4]], 2.0, gamma)
    assert W.weight_at([0.5]) == pytest.approx(2.0 * (1 - 0.15) ** -gamma)
    assert lfm_apply(W.map, [0.5])[0] == pytest.approx(0.5 / 0.85)
    matrix = wco_compress(W, SpaceParams(1, gamma, 15))
    np.testing.assert_allclose(matrix, matrix.conj().T, atol=1e-10)


def test_make_self_adjoint_rejects_bad_input():
    with pytest.raises(DomainError, match="Hermitian"):
        make_self_adjoint([0.1, 0.0], [[0.1, 0.2], [0.0, 0.1]], 1.0, 1.0)
    with pytest.raises(DomainError, match="real"):
        make_self_adjoint([0.1], [[0.2]], 1j, 1.0)


def test_classify_self_adjoint_round_trip(rng):
    for n in (1, 2, 3):
        for _ in range(4):
            c = random_ball_point(rng, n, 0.3)
            A = random_hermitian(rng, n, 0.3)
            alpha = rng.normal()
            result = classify_self_adjoint(make_self_adjoint(c, A, alpha, 2.0))
            assert result.verdict is Verdict.SELF_ADJOINT and result.residual <= 1e-9
            np.testing.assert_allclose(result.witness["c"], c, atol=1e-12)
            np.testing.assert_allclose(result.witness["A"], A, atol=1e-12)
            assert result.witness["alpha"] == pytest.approx(alpha)


def test_classify_self_adjoint_examples(rng):
    assert classify_self_adjoint(involution_operator(random_ball_point(rng, 2))).holds
    imaginary = wco_scale(make_self_adjoint([0.2], [[0.1]], 1.0, 1.0), 1j)
    assert classify_self_adjoint(imaginary).reason == "alpha is not real"
    C_A = composition_symbol(LinearFractionalMap.linear([[0.2, 0.3], [0.0, 0.1]]), 1.0)
    assert classify_self_adjoint(C_A).reason == "A is not Hermitian"


def test_self_adjoint_compression_is_hermitian(rng):
    W = make_self_adjoint(random_ball_point(rng, 2, 0.3), random_hermitian(rng, 2, 0.3), 0.8, 2.0)
    assert classify_self_adjoint(W).holds
    matrix = wco_compress(W, SpaceParams(2, 2.0, 8))
    np.testing.assert_allclose(matrix, matrix.conj().T, atol=1e-8)


# --------------------------------------------------------------------------- normal
def test_make_normal_at_origin(rng):
    A = random_normal_matrix(rng, 2)
    W = make_normal(np.zeros(2), A, 1.5 - 1j, 2.0)
    expected = WcoSymbol(2.0, KernelWeight.constant(2, 1.5 - 1j), LinearFractionalMap.linear(A))
    assert symbols_equal(W, expected).equal


def test_make_normal_rejects_bad_input():
    with pytest.raises(DomainError, match="normal"):
        make_normal([0.1, 0.0], [[0.5, 0.5], [0.0, 0.5]], 1.0, 1.0)
    with pytest.raises(DomainError, match="contraction"):
        make_normal([0.1], [[1.5]], 1.0, 1.0)
    with pytest.raises(DomainError):
        make_normal([0.1], [[0.5]], 0.0, 1.0)


def test_classify_normal_fixed_point_round_trip(rng):
    for n in (1, 2, 3):
        for _ in range(4):
            p = random_ball_point(rng, n, 0.6)
            A = random_normal_matrix(rng, n)
            alpha = complex(rng.normal(), rng.normal())
            result = classify_normal_fixed_point(make_normal(p, A, alpha, 2.0))
            assert result.verdict is Verdict.NORMAL_FIXED_POINT and result.residual <= 1e-9
            np.testing.assert_allclose(result.witness["p"], p, atol=1e-9)
            assert result.witness["alpha"] == pytest.approx(alpha)
            assert match_multisets(np.linalg.eigvals(A), result.witness["jacobian_eigenvalues"]) <= 1e-8


def test_classify_normal_fixed_point_examples():
    C_A = composition_symbol(LinearFractionalMap.linear(np.diag([0.5, 0.3j])), 1.0)
    result = classify_normal_fixed_point(C_A)
    assert result.holds
    np.testing.assert_allclose(result.witness["p"], 0, atol=1e-12)
    assert result.witness["alpha"] == pytest.approx(1.0)

    jordan = composition_symbol(LinearFractionalMap.linear([[0.5, 0.5], [0.0, 0.5]]), 1.0)
    assert classify_normal_fixed_point(jordan).reason == "conjugated linear map is not normal"

    parabolic = make_parabolic_1d(1.0, 1.0)
    assert classify_normal_fixed_point(parabolic).reason == "no interior fixed point"


def test_jordan_block_is_not_normal():
    C_J = composition_symbol(LinearFractionalMap.linear([[0.5, 0.5], [0.0, 0.5]]), 1.0)
    assert not any(r.holds for r in classify_all(C_J).values())
    matrix = wco_compress(C_J, SpaceParams(2, 1.0, 4))
    commutator = matrix @ matrix.conj().T - matrix.conj().T @ matrix
    assert np.linalg.norm(commutator, 2) > 1e-3
    linear_part = matrix[1:3, 1:3]
    np.testing.assert_allclose(linear_part, [[0.5, 0.0], [0.5, 0.5]], atol=1e-15)
    assert np.linalg.norm(linear_part @ linear_part.conj().T - linear_part.conj().T @ linear_part, 2) == pytest.approx(0.25)


def test_normal_unitary_overlap(rng):
    W = make_normal(random_ball_point(rng, 2, 0.5), random_normal_matrix(rng, 2, unitary=True), np.exp(1j), 2.0)
    assert classify_normal_fixed_point(W).holds
    assert classify_unitary(W).holds


def test_normal_symbols_commute_with_adjoint(rng):
    W = make_normal(random_ball_point(rng, 2, 0.5), random_normal_matrix(rng, 2), 0.7j, 1.5)
    assert normality_residual(W) <= 1e-10
    for t in (0.5, 1j, 0.3 + 2j):
        assert normality_residual(make_parabolic_1d(t, 2.0)) <= 1e-10


def test_parabolic_examples():
    identity = make_parabolic_1d(0.0, 2.0)
    assert symbols_equal(identity, identity_symbol(1, 2.0)).equal

    real = make_parabolic_1d(1.0, 2.0)
    assert lfm_allclose(real.map, LinearFractionalMap([[1.0]], [1.0], [-1.0], 3.0))
    assert classify_normal_lfm(real).verdict is Verdict.NORMAL_LFM
    assert classify_self_adjoint(real).holds

    rotated = make_parabolic_1d(1j, 2.0)
    assert classify_normal_lfm(rotated).holds
    assert not classify_self_adjoint(rotated).holds

    with pytest.raises(DomainError):
        make_parabolic_1d(-0.5, 1.0)


def test_classify_normal_lfm_rejections():
    shifted = make_kernel_lfm(LinearFractionalMap([[0.5]], [0.25], [0.0], 1.0), 1.0)
    assert classify_normal_lfm(shifted).reason == "|phi(0)| != |sigma(0)|"
    plain = WcoSymbol(1.0, KernelWeight(1.0, [0.3]), LinearFractionalMap([[0.5]], [0.25], [0.0], 1.0))
    assert classify_normal_lfm(plain).reason == "weight not K_{sigma(0)}-type"


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 1j, 2 - 1j])
def test_one_dimensional_coefficient_test(t):
    W = make_parabolic_1d(t, 1.0)
    assert normal_lfm_coefficient_test_1d(W.map)
    assert normal_lfm_coefficient_test_1d(W.map) == classify_normal_lfm(W).holds


def test_one_dimensional_coefficient_test_rejects():
    assert not normal_lfm_coefficient_test_1d(LinearFractionalMap([[0.5]], [0.25], [0.0], 1.0))
    with pytest.raises(DomainError):
        normal_lfm_coefficient_test_1d(LinearFractionalMap.identity(2))


def random_disc_map(rng, kind):
    if kind == 0:
        return random_contractive_lfm(rng, 1)
    if kind == 1:
        t = abs(rng.normal()) + 1j * rng.normal()
        return make_parabolic_1d(t, 1.0).map
    if kind == 2:
        a = random_ball_point(rng, 1, 0.95)
        return make_normal(random_ball_point(rng, 1, 0.7), [a], 1.0, 1.0).map
    return random_automorphism(rng, 1)


def test_coefficient_test_agrees_with_classifier(rng):
    outcomes = []
    for k in range(200):
        W = make_kernel_lfm(random_disc_map(rng, k % 4), 1.5)
        expected = normal_lfm_coefficient_test_1d(W.map)
        classification = classify_normal_lfm(W)
        assert classification.holds == expected, (k, classification.reason)
        assert classification.witness["coefficient_test_1d"] == expected
        outcomes.append(expected)
    assert 0 < sum(outcomes) < len(outcomes)


@pytest.mark.parametrize("t", [0.5, 1.0, 1j, 1 + 1j, 2 - 3j])
def test_parabolic_coefficient_identity(t):
    abs_b, abs_c, left, right = normal_lfm_coefficients_1d(make_parabolic_1d(t, 2.0).map)
    assert abs_b == pytest.approx(abs_c)
    assert left == pytest.approx(4 * complex(t).real, abs=1e-12)
    assert right == pytest.approx(4 * complex(t).real, abs=1e-12)


# --------------------------------------------------------------------------- all
def test_classify_all_on_involution(rng):
    results = classify_all(involution_operator(random_ball_point(rng, 2)))
    assert set(results) == {"Unitary", "SelfAdjoint", "NormalFixedPoint", "NormalLfm"}
    for verdict in ("Unitary", "SelfAdjoint", "NormalFixedPoint", "NormalLfm"):
        assert results[verdict].holds, results[verdict].reason


def test_classify_all_zero_weight():
    zero = WcoSymbol(1.0, KernelWeight(0.0, [0.0, 0.0]), LinearFractionalMap.linear(0.5 * np.eye(2)))
    results = classify_all(zero)
    assert all(r.verdict is Verdict.NONE and r.reason == "zero weight" for r in results.values())


def test_classify_all_generic_operator(rng):
    W = WcoSymbol(1.0, KernelWeight(1.0, [0.1, 0.2]), random_contractive_lfm(rng, 2))
    assert not any(r.holds for r in classify_all(W).values())


def test_constructed_weights_do_not_vanish(rng):
    symbols = [
        make_unitary(random_automorphism(rng, 2), 2.0),
        make_self_adjoint(random_ball_point(rng, 2, 0.3), random_hermitian(rng, 2, 0.3), 1.0, 2.0),
        make_normal(random_ball_point(rng, 2, 0.5), random_normal_matrix(rng, 2), 1.0, 2.0),
    ]
    points = ball_samples(2, 500, radius=0.999)
    for W in symbols:
        assert np.min(np.abs(weight_values(W.weight, W.gamma, points))) > 0
