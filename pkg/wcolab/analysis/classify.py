#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Constructors and decision procedures for unitary, self-adjoint and normal
weighted composition operators.

Every classifier returns a :class:`Classification`: a verdict, the recovered
parameters (witness) and the largest residual among the identities that
certify it. A verdict other than ``Verdict.NONE`` always comes with a
residual below the tolerance; otherwise ``reason`` says what failed.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from wcolab.analysis.ball_maps import (
    LinearFractionalMap,
    as_ball_point,
    fixed_point_in_ball,
    is_automorphism,
    is_constant_map,
    jacobian_at,
    lfm_adjoint,
    lfm_allclose,
    lfm_apply,
    lfm_apply_many,
    lfm_compose,
    lfm_distance,
    lfm_inverse,
    moebius_involution,
)
from wcolab.analysis.kernels import kernel_eval, kernel_eval_many, normalized_kernel
from wcolab.analysis.sampling import ball_samples, sample_pairs
from wcolab.analysis.wco_core import (
    KernelWeight,
    WcoSymbol,
    identity_symbol,
    is_zero_weight,
    make_kernel_lfm,
    make_wco,
    simplify_weight,
    symbols_equal,
    wco_adjoint_symbol,
    wco_apply_to_kernel,
    wco_product,
    weight_values,
)
from wcolab.config import DEFAULT_SAMPLES, DEFAULT_SEED, SELF_MAP_TOL, SYMBOL_TOL
from wcolab.errors import DomainError, WcoLabError

logger = logging.getLogger(__name__)

# Input checks on user-supplied matrices and scalars.
HERMITIAN_TOL = 1e-12
NORMAL_TOL = 1e-10
UNIMODULAR_TOL = 1e-12


class Verdict(str, Enum):
    UNITARY = "Unitary"
    SELF_ADJOINT = "SelfAdjoint"
    NORMAL_FIXED_POINT = "NormalFixedPoint"
    NORMAL_LFM = "NormalLfm"
    NONE = "None"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    witness: dict = field(default_factory=dict)
    residual: float = np.inf
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict is not Verdict.NONE


def _rejected(reason, residual=np.inf, **witness):
    logger.debug("Classification rejected: %s", reason)
    return Classification(Verdict.NONE, witness, float(residual), reason)


def _relative_gap(values, expected):
    scale = max(1.0, float(np.max(np.abs(expected))))
    return float(np.max(np.abs(values - expected))) / scale


def _commutator_norm(A):
    return float(np.linalg.norm(A @ A.conj().T - A.conj().T @ A))


# --------------------------------------------------------------------------- unitary
def make_unitary(psi: LinearFractionalMap, gamma, lam=1.0, self_map_tol=SELF_MAP_TOL) -> WcoSymbol:
    """λ·W_{k_a,ψ} with a = ψ⁻¹(0)."""
    if abs(abs(lam) - 1.0) > UNIMODULAR_TOL:
        raise DomainError(f"lambda must be unimodular, got |lambda|={abs(lam)}")
    if not is_automorphism(psi):
        raise DomainError("Map is not an automorphism of the ball")
    a = lfm_apply(lfm_inverse(psi), np.zeros(psi.n))
    k_a = normalized_kernel(gamma, a)
    return make_wco(KernelWeight(lam * k_a.scale, a), psi, gamma, self_map_tol)


def gram_preservation_residual(W: WcoSymbol, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> float:
    """
    Max relative residual of <W K_z, W K_w> = K(w, z) and of W W* = I on kernels.

    Both products are formed through the adjoint symbol, so this raises
    AdjointNotWcoError when W* is not a weighted composition operator.
    """
    adjoint = wco_adjoint_symbol(W)
    products = (wco_product(adjoint, W), wco_product(W, adjoint))
    zs, ws = sample_pairs(W.n, samples, seed)
    residual = 0.0
    for z, w in zip(zs, ws):
        expected = kernel_eval(W.gamma, z, w)
        for product in products:
            residual = max(residual, abs(wco_apply_to_kernel(product, z, w) - expected) / abs(expected))
    return float(residual)


def classify_unitary(W: WcoSymbol, tol=SYMBOL_TOL, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> Classification:
    """Unitary iff φ is an automorphism and f = λ·k_{φ⁻¹(0)} with |λ| = 1."""
    if is_zero_weight(W.weight):
        return _rejected("zero weight")
    if is_constant_map(W.map):
        return _rejected("constant map; the operator has rank one")
    if not is_automorphism(W.map):
        return _rejected("map is not an automorphism of the ball")
    a = lfm_apply(lfm_inverse(W.map), np.zeros(W.n))
    k_a = normalized_kernel(W.gamma, a)
    lam = W.weight_at(np.zeros(W.n)) / k_a.scale
    if abs(abs(lam) - 1.0) > tol:
        return _rejected(f"|lambda| = {abs(lam):.12g} is not 1", abs(abs(lam) - 1.0), **{"lambda": lam, "a": a})
    points = ball_samples(W.n, samples, seed)
    weight_gap = _relative_gap(weight_values(W.weight, W.gamma, points), lam * k_a.values(points))
    if weight_gap > tol:
        return _rejected("weight is not a multiple of the normalized kernel at the inverse image of 0", weight_gap)
    residual = max(weight_gap, gram_preservation_residual(W, samples, seed))
    witness = {"lambda": lam, "a": a}
    if residual > tol:
        return _rejected("kernel Gram matrix is not preserved", residual, **witness)
    return Classification(Verdict.UNITARY, witness, residual)


class AdjointInversePair(NamedTuple):
    holds: bool
    witness: dict
    residual: float
    reason: str = ""


def check_adjoint_inverse_pair(
    W1: WcoSymbol, W2: WcoSymbol, tol=SYMBOL_TOL, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED
):
    """
    Decide W1·W2* = I.

    This holds iff both maps equal one automorphism φ, f = λ·k_a and
    g = (1/conj(λ))·k_a with a = φ⁻¹(0); the identity of the symbol
    W1·W2* is checked as well.
    """
    if W1.gamma != W2.gamma or W1.n != W2.n:
        return AdjointInversePair(False, {}, np.inf, "operators act on different spaces")
    if not lfm_allclose(W1.map, W2.map, tol):
        return AdjointInversePair(False, {}, lfm_distance(W1.map, W2.map), "maps differ")
    if not is_automorphism(W1.map):
        return AdjointInversePair(False, {}, np.inf, "map is not an automorphism of the ball")
    origin = np.zeros(W1.n)
    a = lfm_apply(lfm_inverse(W1.map), origin)
    k_a = normalized_kernel(W1.gamma, a)
    lam = W1.weight_at(origin) / k_a.scale
    witness = {"lambda": lam, "a": a}
    if lam == 0:
        return AdjointInversePair(False, witness, np.inf, "zero weight")
    points = ball_samples(W1.n, samples, seed)
    kernel_values = k_a.values(points)
    structural = max(
        _relative_gap(weight_values(W1.weight, W1.gamma, points), lam * kernel_values),
        _relative_gap(weight_values(W2.weight, W2.gamma, points), kernel_values / np.conj(lam)),
    )
    if structural > tol:
        return AdjointInversePair(False, witness, structural, "weights are not the paired kernel multiples")
    try:
        product = wco_product(W1, wco_adjoint_symbol(W2))
    except WcoLabError as exc:
        return AdjointInversePair(False, witness, np.inf, str(exc))
    comparison = symbols_equal(product, identity_symbol(W1.n, W1.gamma), samples, seed, tol)
    residual = max(structural, comparison.residual)
    if not comparison.equal:
        return AdjointInversePair(False, witness, residual, "product with the adjoint is not the identity")
    return AdjointInversePair(True, witness, residual)


def is_coisometry(W: WcoSymbol, tol=SYMBOL_TOL) -> Classification:
    """W W* = I; for weighted composition operators this already means unitary."""
    pair = check_adjoint_inverse_pair(W, W, tol)
    if not pair.holds:
        return _rejected(pair.reason, pair.residual, **pair.witness)
    return Classification(Verdict.UNITARY, pair.witness, pair.residual)


def is_adjoint_pair(
    W1: WcoSymbol, W2: WcoSymbol, tol=SYMBOL_TOL, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED
) -> AdjointInversePair:
    """
    Decide W1 = W2*.

    Holds iff W2's weight is α·K_{σ(0)} for its map ψ with adjoint map σ,
    W1's map is σ and W1's weight is conj(α)·K_{ψ(0)}.
    """
    if W1.gamma != W2.gamma or W1.n != W2.n:
        return AdjointInversePair(False, {}, np.inf, "operators act on different spaces")
    try:
        adjoint = wco_adjoint_symbol(W2, tol)
    except WcoLabError as exc:
        return AdjointInversePair(False, {}, np.inf, str(exc))
    comparison = symbols_equal(W1, adjoint, samples, seed, tol)
    witness = {"alpha": np.conj(adjoint.weight.alpha)}
    if not comparison.equal:
        return AdjointInversePair(False, witness, comparison.residual, "symbol differs from the adjoint symbol")
    return AdjointInversePair(True, witness, comparison.residual)


# --------------------------------------------------------------------------- self-adjoint
def make_self_adjoint(c, A, alpha, gamma, self_map_tol=SELF_MAP_TOL) -> WcoSymbol:
    """α·W_{K_c,φ} with φ(z) = (c + Az)/(1 - <z,c>), A Hermitian and α real."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    c = as_ball_point(c, A.shape[0])
    if np.linalg.norm(A - A.conj().T) > HERMITIAN_TOL * max(1.0, np.linalg.norm(A)):
        raise DomainError("A must be Hermitian")
    alpha = complex(alpha)
    if abs(alpha.imag) > HERMITIAN_TOL * max(1.0, abs(alpha)):
        raise DomainError(f"alpha must be real, got {alpha}")
    phi = LinearFractionalMap(A, c, -c, 1.0)
    return make_wco(KernelWeight(alpha.real, c), phi, gamma, self_map_tol)


def classify_self_adjoint(W: WcoSymbol, tol=SYMBOL_TOL, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> Classification:
    """Self-adjoint iff φ = (c+Az)/(1-<z,c>) with A Hermitian and f = α K_c with α real."""
    if is_zero_weight(W.weight):
        return _rejected("zero weight")
    phi = W.map.normalized()
    if abs(phi.d - 1.0) > tol:
        return _rejected("denominator of the map vanishes at 0")
    weight = simplify_weight(W.weight, W.gamma)
    if not isinstance(weight, KernelWeight):
        return _rejected("weight is not a multiple of a reproducing kernel")
    c = phi.B
    witness = {"c": c, "A": phi.A, "alpha": weight.alpha}
    defects = {
        "A is not Hermitian": float(np.linalg.norm(phi.A - phi.A.conj().T)),
        "map is not of the form (c+Az)/(1-<z,c>)": float(np.linalg.norm(phi.B + phi.C)),
        "weight is not a multiple of K_c with c = phi(0)": float(np.linalg.norm(weight.c - c)),
        "alpha is not real": abs(weight.alpha.imag) / max(abs(weight.alpha), 1e-300),
    }
    for reason, defect in defects.items():
        if defect > tol:
            return _rejected(reason, defect, **witness)
    try:
        comparison = symbols_equal(wco_adjoint_symbol(W, tol), W, samples, seed, tol)
    except WcoLabError as exc:
        return _rejected(str(exc), **witness)
    residual = max(max(defects.values()), comparison.residual)
    if not comparison.equal:
        return _rejected("adjoint symbol differs from the symbol", residual, **witness)
    return Classification(Verdict.SELF_ADJOINT, witness, residual)


# --------------------------------------------------------------------------- normal
def make_normal(p, A, alpha, gamma, self_map_tol=SELF_MAP_TOL) -> WcoSymbol:
    """
    The normal operator with interior fixed point p:
    φ = φ_p∘A∘φ_p and f = α·k_p/(k_p∘φ) = (α/conj(K_{φ(0)}(p)))·K_{σ(0)}.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    p = as_ball_point(p, A.shape[0])
    if _commutator_norm(A) > NORMAL_TOL:
        raise DomainError("A must be normal")
    if np.linalg.norm(A, 2) > 1.0 + HERMITIAN_TOL:
        raise DomainError("A must be a contraction")
    if alpha == 0:
        raise DomainError("alpha must be non-zero")
    phi_p = moebius_involution(p)
    phi = lfm_compose(lfm_compose(phi_p, LinearFractionalMap.linear(A)), phi_p)
    origin = np.zeros(phi.n)
    phi_0 = lfm_apply(phi, origin)
    sigma_0 = lfm_apply(lfm_adjoint(phi), origin)
    scale = alpha / np.conj(kernel_eval(gamma, phi_0, p))
    return make_wco(KernelWeight(scale, sigma_0), phi, gamma, self_map_tol)


def classify_normal_fixed_point(
    W: WcoSymbol, tol=SYMBOL_TOL, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED
) -> Classification:
    """
    Normal with an interior fixed point p iff φ_p∘φ∘φ_p is a normal linear
    map A and f = α·k_p/(k_p∘φ) with α = f(p).
    """
    if is_zero_weight(W.weight):
        return _rejected("zero weight")
    p = fixed_point_in_ball(W.map, tol)
    if p is None:
        return _rejected("no interior fixed point")
    phi_p = moebius_involution(p)
    conjugated = LinearFractionalMap.from_matrix(phi_p.matrix @ W.map.matrix @ phi_p.matrix).normalized()
    A = conjugated.A
    linear_defect = float(np.linalg.norm(conjugated.B) + np.linalg.norm(conjugated.C))
    alpha = W.weight_at(p)
    witness = {
        "p": p,
        "A": A,
        "alpha": alpha,
        "jacobian_eigenvalues": np.linalg.eigvals(jacobian_at(W.map, p)),
    }
    if linear_defect > tol:
        return _rejected("map conjugated by the involution at p is not linear", linear_defect, **witness)
    normality_defect = _commutator_norm(A)
    if normality_defect > tol:
        return _rejected("conjugated linear map is not normal", normality_defect, **witness)
    points = ball_samples(W.n, samples, seed)
    expected = alpha * kernel_eval_many(W.gamma, p, points) / kernel_eval_many(W.gamma, p, lfm_apply_many(W.map, points))
    weight_gap = _relative_gap(weight_values(W.weight, W.gamma, points), expected)
    residual = max(linear_defect, normality_defect, weight_gap)
    if weight_gap > tol:
        return _rejected("weight is not alpha k_p / (k_p o phi)", residual, **witness)
    return Classification(Verdict.NORMAL_FIXED_POINT, witness, residual)


def classify_normal_lfm(W: WcoSymbol, tol=SYMBOL_TOL) -> Classification:
    """For f = α·K_{σ(0)}: normal iff |φ(0)| = |σ(0)| and φ∘σ = σ∘φ."""
    if is_zero_weight(W.weight):
        return _rejected("zero weight")
    origin = np.zeros(W.n)
    sigma = lfm_adjoint(W.map)
    phi_0, sigma_0 = lfm_apply(W.map, origin), lfm_apply(sigma, origin)
    weight = simplify_weight(W.weight, W.gamma)
    if not isinstance(weight, KernelWeight) or np.linalg.norm(weight.c - sigma_0) > tol:
        return _rejected("weight not K_{sigma(0)}-type")
    witness = {"alpha": weight.alpha, "phi_0": phi_0, "sigma_0": sigma_0}
    if W.n == 1:
        witness["coefficient_test_1d"] = normal_lfm_coefficient_test_1d(W.map, tol)
    norm_gap = abs(np.linalg.norm(phi_0) - np.linalg.norm(sigma_0))
    if norm_gap > tol:
        return _rejected("|phi(0)| != |sigma(0)|", norm_gap, **witness)
    try:
        commutator = lfm_distance(lfm_compose(W.map, sigma), lfm_compose(sigma, W.map))
    except WcoLabError as exc:
        return _rejected(str(exc), **witness)
    residual = max(norm_gap, commutator)
    if commutator > tol:
        return _rejected("phi and sigma do not commute", residual, **witness)
    return Classification(Verdict.NORMAL_LFM, witness, residual)


def normality_residual(W: WcoSymbol, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> float:
    """Pointwise gap between the symbols of W*W and WW*."""
    adjoint = wco_adjoint_symbol(W)
    return symbols_equal(wco_product(adjoint, W), wco_product(W, adjoint), samples, seed).residual


def normal_lfm_coefficients_1d(phi: LinearFractionalMap):
    """For φ(z) = (az+b)/(cz+d): (|b|, |c|, conj(a)b - conj(c)d, b conj(d) - a conj(c))."""
    if phi.n != 1:
        raise DomainError("The coefficient test is one-dimensional")
    (a, b), (c, d) = phi.matrix
    return abs(b), abs(c), np.conj(a) * b - np.conj(c) * d, b * np.conj(d) - a * np.conj(c)


def normal_lfm_coefficient_test_1d(phi: LinearFractionalMap, tol=SYMBOL_TOL) -> bool:
    """|b| = |c| and conj(a)b - conj(c)d = b conj(d) - a conj(c)."""
    abs_b, abs_c, left, right = normal_lfm_coefficients_1d(phi)
    scale = max(1.0, float(np.max(np.abs(phi.matrix))) ** 2)
    return abs(abs_b - abs_c) <= tol * np.sqrt(scale) and abs(left - right) <= tol * scale


def make_parabolic_1d(t, gamma, self_map_tol=SELF_MAP_TOL) -> WcoSymbol:
    """W_{K_{σ(0)},φ} for φ(z) = ((2-t)z + t)/(-tz + 2 + t) on the disc."""
    t = complex(t)
    if t.real < 0:
        raise DomainError(f"Re(t) must be >= 0, got t={t}")
    phi = LinearFractionalMap([[2.0 - t]], [t], [-np.conj(t)], 2.0 + t)
    return make_kernel_lfm(phi, gamma, self_map_tol=self_map_tol)


def classify_all(W: WcoSymbol, tol=SYMBOL_TOL, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> dict:
    """
    Run every classifier on the same ``samples`` points drawn with ``seed``.

    Failures become a rejected classification with the error as reason.
    """
    classifiers = {
        Verdict.UNITARY: lambda: classify_unitary(W, tol, samples, seed),
        Verdict.SELF_ADJOINT: lambda: classify_self_adjoint(W, tol, samples, seed),
        Verdict.NORMAL_FIXED_POINT: lambda: classify_normal_fixed_point(W, tol, samples, seed),
        Verdict.NORMAL_LFM: lambda: classify_normal_lfm(W, tol),
    }
    results = {}
    for verdict, run in classifiers.items():
        try:
            results[verdict.value] = run()
        except WcoLabError as exc:
            logger.exception("Classifier %s failed", verdict.value)
            results[verdict.value] = _rejected(str(exc))
    return results
