#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Weighted composition operators W_{f,φ} h = f·(h∘φ) with linear fractional φ.

Weights come in three forms:

* :class:`KernelWeight` ``α·K^γ_c``, exact;
* :class:`QuotientWeight` ``α·Π((u+<z,v>)/(s+<z,t>))^p``, exact, closed under
  composition with linear fractional maps, used for products of kernel
  weights;
* :class:`SeriesWeight`, a truncated power series.

Each factor of a quotient weight has a base with positive real part on the
ball, so principal powers compose without branch jumps.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from wcolab.analysis.ball_maps import (
    LinearFractionalMap,
    as_ball_point,
    is_self_map,
    lfm_adjoint,
    lfm_apply,
    lfm_apply_many,
    lfm_compose,
)
from wcolab.analysis.kernels import KernelVector, kernel_eval, kernel_eval_many
from wcolab.analysis.multiindex_basis import (
    SpaceParams,
    kernel_coefficients,
)
from wcolab.analysis.power_series import (
    TruncatedSeries,
    series_eval_many,
    series_mul,
    series_real_power,
    series_degree,
    series_reciprocal,
    substitution_powers,
)
from wcolab.analysis.sampling import ball_samples, sample_pairs
from wcolab.config import (
    CONSTANT_TERM_TOL,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    MAX_WORKERS,
    SELF_MAP_TOL,
    SYMBOL_TOL,
)
from wcolab.errors import AdjointNotWcoError, DomainError, NumericalError

logger = logging.getLogger(__name__)

# Collapsing a quotient weight to a kernel weight must hold to this relative accuracy.
COLLAPSE_TOL = 1e-10
_COLLAPSE_SAMPLES = 24


# --------------------------------------------------------------------------- weights
@dataclass(frozen=True, eq=False)
class KernelWeight:
    """f = α·K^γ_c; α = 0 is the zero weight."""

    alpha: complex
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "c", as_ball_point(self.c))

    @classmethod
    def constant(cls, n, alpha=1.0):
        return cls(alpha, np.zeros(n))


@dataclass(frozen=True)
class AffineRatioFactor:
    """((u + <z,v>) / (s + <z,t>))^p, principal branch."""

    u: complex
    v: tuple
    s: complex
    t: tuple
    p: float

    @classmethod
    def kernel(cls, c, gamma):
        """K^γ_c as a factor: (1 - <z,c>)^(-γ)."""
        c = np.asarray(c, dtype=complex)
        return cls(1.0, tuple(-c), 1.0, tuple(np.zeros_like(c)), -float(gamma))

    def numerator(self, points):
        return self.u + points @ np.conj(np.asarray(self.v))

    def denominator(self, points):
        return self.s + points @ np.conj(np.asarray(self.t))

    def values(self, points) -> np.ndarray:
        return (self.numerator(points) / self.denominator(points)) ** self.p

    def compose(self, phi: LinearFractionalMap):
        """The factor evaluated at φ(z); the common denominator <z,C>+d cancels."""
        v, t = np.asarray(self.v), np.asarray(self.t)
        u2 = self.u * phi.d + np.vdot(v, phi.B)
        v2 = np.conj(self.u) * phi.C + phi.A.conj().T @ v
        s2 = self.s * phi.d + np.vdot(t, phi.B)
        t2 = np.conj(self.s) * phi.C + phi.A.conj().T @ t
        return AffineRatioFactor(complex(u2), tuple(v2), complex(s2), tuple(t2), self.p)

    @property
    def is_constant(self) -> bool:
        return not (np.any(np.asarray(self.v)) or np.any(np.asarray(self.t)))


@dataclass(frozen=True, eq=False)
class QuotientWeight:
    """f = α·Π factors."""

    alpha: complex
    factors: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "factors", tuple(self.factors))
        for factor in self.factors:
            if len(factor.v) != self.n or len(factor.t) != self.n:
                raise DomainError(f"Quotient factor of C^{len(factor.v)} in a weight on C^{self.n}")


@dataclass(frozen=True, eq=False)
class SeriesWeight:
    """f given by a truncated power series."""

    series: TruncatedSeries


WeightSpec = Union[KernelWeight, QuotientWeight, SeriesWeight]


def weight_dimension(weight: WeightSpec) -> int:
    if isinstance(weight, KernelWeight):
        return weight.c.shape[0]
    if isinstance(weight, QuotientWeight):
        return weight.n
    return weight.series.params.n


def as_quotient(weight: WeightSpec, gamma) -> QuotientWeight:
    """Exact weights as quotient weights; kernel weights become one factor."""
    if isinstance(weight, QuotientWeight):
        return weight
    if isinstance(weight, KernelWeight):
        return QuotientWeight(weight.alpha, (AffineRatioFactor.kernel(weight.c, gamma),), weight.c.shape[0])
    raise DomainError("Series weights have no exact quotient form")


def weight_values(weight: WeightSpec, gamma, points) -> np.ndarray:
    """f at every row of a (k, n) array."""
    points = np.asarray(points, dtype=complex).reshape(-1, weight_dimension(weight))
    if isinstance(weight, KernelWeight):
        return weight.alpha * kernel_eval_many(gamma, weight.c, points)
    if isinstance(weight, QuotientWeight):
        out = np.full(points.shape[0], weight.alpha, dtype=complex)
        for factor in weight.factors:
            out *= factor.values(points)
        return out
    return series_eval_many(weight.series, points)


def weight_at(weight: WeightSpec, gamma, z) -> complex:
    return complex(weight_values(weight, gamma, np.atleast_1d(np.asarray(z, dtype=complex)))[0])


def is_zero_weight(weight: WeightSpec) -> bool:
    if isinstance(weight, SeriesWeight):
        return not np.any(weight.series.coeffs)
    return weight.alpha == 0


def compose_weight(weight: WeightSpec, phi: LinearFractionalMap, gamma) -> WeightSpec:
    """The weight f∘φ; exact for kernel and quotient weights."""
    if isinstance(weight, SeriesWeight):
        return SeriesWeight(series_compose_lfm(weight.series, phi))
    q = as_quotient(weight, gamma)
    return QuotientWeight(q.alpha, tuple(f.compose(phi) for f in q.factors), phi.n)


def simplify_weight(weight: WeightSpec, gamma, tol=COLLAPSE_TOL) -> WeightSpec:
    """
    Collapse a quotient weight to a kernel weight when they agree pointwise.

    Constant factors are folded into α. The kernel candidate α'·K^γ_c is read
    off from f(0) and the gradient of log f at 0, then accepted only if it
    matches f on sample points to relative accuracy ``tol``.
    """
    if not isinstance(weight, QuotientWeight):
        return weight
    n = weight.n
    if weight.alpha == 0:
        return KernelWeight.constant(n, 0.0)

    alpha = weight.alpha
    factors = []
    for factor in weight.factors:
        if factor.p == 0:
            continue
        if factor.is_constant:
            alpha *= (factor.u / factor.s) ** factor.p
        else:
            factors.append(factor)
    if not factors:
        return KernelWeight.constant(n, alpha)

    reduced = QuotientWeight(alpha, tuple(factors), n)
    if any(min(abs(f.u), abs(f.s)) <= CONSTANT_TERM_TOL for f in factors):
        return reduced
    gradient = np.zeros(n, dtype=complex)
    for factor in factors:
        gradient += factor.p * (np.conj(np.asarray(factor.v)) / factor.u - np.conj(np.asarray(factor.t)) / factor.s)
    c = np.conj(gradient) / gamma
    if not np.linalg.norm(c) < 1.0:
        return reduced
    candidate = KernelWeight(weight_at(reduced, gamma, np.zeros(n)), c)
    points = ball_samples(n, _COLLAPSE_SAMPLES, DEFAULT_SEED)
    exact = weight_values(reduced, gamma, points)
    approx = weight_values(candidate, gamma, points)
    if np.max(np.abs(exact - approx)) <= tol * max(1.0, float(np.max(np.abs(exact)))):
        return candidate
    return reduced


def scale_weight(weight: WeightSpec, factor) -> WeightSpec:
    if isinstance(weight, KernelWeight):
        return KernelWeight(weight.alpha * factor, weight.c)
    if isinstance(weight, QuotientWeight):
        return QuotientWeight(weight.alpha * factor, weight.factors, weight.n)
    return SeriesWeight(weight.series * factor)


# --------------------------------------------------------------------------- symbols
@dataclass(frozen=True, eq=False)
class WcoSymbol:
    """The operator W_{f,φ} on H_γ."""

    gamma: float
    weight: WeightSpec
    map: LinearFractionalMap

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma!r}")
        object.__setattr__(self, "gamma", float(self.gamma))
        if weight_dimension(self.weight) != self.map.n:
            raise DomainError("Weight and map live in different dimensions")

    @property
    def n(self) -> int:
        return self.map.n

    def weight_at(self, z) -> complex:
        return weight_at(self.weight, self.gamma, z)


def make_wco(weight: WeightSpec, phi: LinearFractionalMap, gamma, self_map_tol=SELF_MAP_TOL) -> WcoSymbol:
    """Build a symbol, rejecting maps that are not self-maps of the ball to within ``self_map_tol``."""
    check = is_self_map(phi, tol=self_map_tol)
    if not check.ok:
        raise DomainError(f"Map is not a self-map of the ball (margin {check.margin:.3g})")
    return WcoSymbol(gamma, weight, phi)


def identity_symbol(n, gamma) -> WcoSymbol:
    return WcoSymbol(gamma, KernelWeight.constant(n), LinearFractionalMap.identity(n))


def composition_symbol(phi: LinearFractionalMap, gamma) -> WcoSymbol:
    """C_φ, the symbol with weight ≡ 1."""
    return make_wco(KernelWeight.constant(phi.n), phi, gamma)


def make_kernel_lfm(phi: LinearFractionalMap, gamma, alpha=1.0, self_map_tol=SELF_MAP_TOL) -> WcoSymbol:
    """α·W_{K_{σ(0)},φ}, whose adjoint is again a weighted composition operator."""
    sigma_0 = lfm_apply(lfm_adjoint(phi), np.zeros(phi.n))
    return make_wco(KernelWeight(alpha, sigma_0), phi, gamma, self_map_tol)


def wco_scale(W: WcoSymbol, factor) -> WcoSymbol:
    """factor·W."""
    return WcoSymbol(W.gamma, scale_weight(W.weight, factor), W.map)


def wco_apply_to_kernel(W: WcoSymbol, z, w) -> complex:
    """(W K_z)(w) = f(w)·K_z(φ(w))."""
    return W.weight_at(w) * kernel_eval(W.gamma, z, lfm_apply(W.map, w))


def wco_apply_to_kernel_many(W: WcoSymbol, z, points) -> np.ndarray:
    points = np.asarray(points, dtype=complex).reshape(-1, W.n)
    return weight_values(W.weight, W.gamma, points) * kernel_eval_many(
        W.gamma, z, lfm_apply_many(W.map, points)
    )


def wco_adjoint_on_kernel(W: WcoSymbol, z) -> KernelVector:
    """W* K_z = conj(f(z)) K_{φ(z)}."""
    z = as_ball_point(z, W.n)
    return KernelVector(W.gamma, lfm_apply(W.map, z), np.conj(W.weight_at(z)))


def _check_gamma(W1, W2):
    if W1.gamma != W2.gamma:
        raise DomainError(f"Kernel exponents differ: {W1.gamma} vs {W2.gamma}")
    if W1.n != W2.n:
        raise DomainError(f"Dimensions differ: {W1.n} vs {W2.n}")


def wco_product(W1: WcoSymbol, W2: WcoSymbol) -> WcoSymbol:
    """
    W_{f,φ} W_{g,ψ} = W_{f·(g∘φ), ψ∘φ}.

    Exact weights stay exact (collapsed to a kernel weight when possible);
    a series operand makes the product a series weight.
    """
    _check_gamma(W1, W2)
    gamma, phi = W1.gamma, W1.map
    composite = lfm_compose(W2.map, phi)
    f, g = W1.weight, W2.weight
    if not isinstance(f, SeriesWeight) and not isinstance(g, SeriesWeight):
        f_q = as_quotient(f, gamma)
        g_phi = compose_weight(g, phi, gamma)
        weight = QuotientWeight(f_q.alpha * g_phi.alpha, f_q.factors + g_phi.factors, phi.n)
        return WcoSymbol(gamma, simplify_weight(weight, gamma), composite)

    params = f.series.params if isinstance(f, SeriesWeight) else g.series.params
    f_series = weight_as_series(f, params, gamma)
    if isinstance(g, SeriesWeight):
        g_phi = series_compose_lfm(_retruncate(g.series, params), phi)
    else:
        g_phi = weight_as_series(compose_weight(g, phi, gamma), params, gamma)
    return WcoSymbol(gamma, SeriesWeight(series_mul(f_series, g_phi)), composite)


def wco_adjoint_symbol(W: WcoSymbol, tol=SYMBOL_TOL) -> WcoSymbol:
    """
    (α·W_{K_{σ(0)},φ})* = conj(α)·W_{K_{φ(0)},σ} with σ the adjoint map.

    Raises
    ------
    AdjointNotWcoError
        If the weight is not a multiple of K^γ_{σ(0)}.
    """
    n = W.n
    origin = np.zeros(n)
    sigma = lfm_adjoint(W.map)
    phi_0 = lfm_apply(W.map, origin)
    weight = simplify_weight(W.weight, W.gamma) if isinstance(W.weight, QuotientWeight) else W.weight
    if isinstance(weight, SeriesWeight):
        raise AdjointNotWcoError("The adjoint of an operator with a series weight is not available")
    if isinstance(weight, QuotientWeight):
        raise AdjointNotWcoError("Weight is not a kernel function; the adjoint is not a weighted composition operator")
    if weight.alpha == 0:
        return WcoSymbol(W.gamma, KernelWeight(0.0, phi_0), sigma)
    sigma_0 = lfm_apply(sigma, origin)
    if np.linalg.norm(weight.c - sigma_0) > tol:
        raise AdjointNotWcoError(
            f"Weight is a multiple of K_c with c={weight.c.tolist()}, not of K_σ(0) with σ(0)={sigma_0.tolist()}"
        )
    if not is_self_map(sigma).ok:
        logger.warning("Adjoint map failed the self-map re-check: %r", sigma)
    return WcoSymbol(W.gamma, KernelWeight(np.conj(weight.alpha), phi_0), sigma)


class SymbolComparison(NamedTuple):
    equal: bool
    residual: float


def symbols_equal(W1: WcoSymbol, W2: WcoSymbol, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED, tol=SYMBOL_TOL):
    """
    Pointwise comparison of weights and maps on deterministic samples.

    The pair (f, φ) determines the operator, except that every zero weight
    gives the zero operator whatever the map.
    """
    if W1.gamma != W2.gamma or W1.n != W2.n:
        return SymbolComparison(False, np.inf)
    points = ball_samples(W1.n, samples, seed)
    f1 = weight_values(W1.weight, W1.gamma, points)
    f2 = weight_values(W2.weight, W2.gamma, points)
    scale = max(1.0, float(np.max(np.abs(f2))))
    weight_residual = float(np.max(np.abs(f1 - f2))) / scale
    if weight_residual <= tol and float(np.max(np.abs(f2))) <= tol:
        return SymbolComparison(True, weight_residual)
    map_residual = float(np.max(np.linalg.norm(lfm_apply_many(W1.map, points) - lfm_apply_many(W2.map, points), axis=1)))
    residual = max(weight_residual, map_residual)
    return SymbolComparison(residual <= tol, residual)


# --------------------------------------------------------------------------- series model
def _retruncate(series: TruncatedSeries, params: SpaceParams) -> TruncatedSeries:
    if series.params == params:
        return series
    if series.params.n != params.n:
        raise DomainError(f"Series in {series.params.n} variables used in C^{params.n}")
    return TruncatedSeries.from_dict(params, series.to_dict())


def _factor_series(factor: AffineRatioFactor, params: SpaceParams, tol=CONSTANT_TERM_TOL) -> TruncatedSeries:
    if abs(factor.s) <= tol:
        raise NumericalError("Quotient factor has a pole at the origin")
    if abs(factor.u) <= tol:
        # only polynomial factors survive a zero at the origin
        if not (float(factor.p).is_integer() and factor.p >= 0):
            raise NumericalError(f"Quotient factor vanishes at the origin with exponent {factor.p}")
        ratio = series_mul(
            TruncatedSeries.affine(params, factor.u, np.conj(np.asarray(factor.v))),
            series_reciprocal(TruncatedSeries.affine(params, factor.s, np.conj(np.asarray(factor.t))), tol),
        )
        return series_real_power(ratio, factor.p, tol)
    numerator = TruncatedSeries.affine(params, 1.0, np.conj(np.asarray(factor.v)) / factor.u)
    denominator = TruncatedSeries.affine(params, 1.0, np.conj(np.asarray(factor.t)) / factor.s)
    ratio = series_mul(numerator, series_reciprocal(denominator, tol))
    return series_real_power(ratio, factor.p, tol) * ((factor.u / factor.s) ** factor.p)


def weight_as_series(weight: WeightSpec, params: SpaceParams, gamma=None, tol=CONSTANT_TERM_TOL) -> TruncatedSeries:
    """
    Truncated Taylor expansion of a weight.

    ``gamma`` defaults to ``params.gamma``; kernel weights expand through
    series_real_power of 1 - <z,c>. Constant terms of at most ``tol`` count
    as vanishing.
    """
    gamma = params.gamma if gamma is None else gamma
    if isinstance(weight, SeriesWeight):
        return _retruncate(weight.series, params)
    if weight_dimension(weight) != params.n:
        raise DomainError("Weight dimension does not match the space")
    if isinstance(weight, KernelWeight):
        base = TruncatedSeries.affine(params, 1.0, -np.conj(weight.c))
        return series_real_power(base, -gamma, tol) * weight.alpha
    out = TruncatedSeries.constant(params, weight.alpha)
    for factor in weight.factors:
        out = series_mul(out, _factor_series(factor, params, tol))
    return out


def _map_components(phi: LinearFractionalMap, params: SpaceParams, tol=CONSTANT_TERM_TOL):
    denominator = TruncatedSeries.affine(params, phi.d, np.conj(phi.C))
    reciprocal = series_reciprocal(denominator, tol)
    return [
        series_mul(TruncatedSeries.affine(params, phi.B[j], phi.A[j]), reciprocal)
        for j in range(phi.n)
    ]


def series_compose_lfm(h: TruncatedSeries, phi: LinearFractionalMap) -> TruncatedSeries:
    """Truncated expansion of h∘φ; exact through degree D when h is a polynomial of degree ≤ D."""
    params = h.params
    if phi.n != params.n:
        raise DomainError(f"Map of C^{phi.n} composed with a series in {params.n} variables")
    powers = substitution_powers(params, _map_components(phi, params), series_degree(h))
    out = np.zeros(params.size, dtype=complex)
    for coeff, power in zip(h.coeffs, powers):
        if coeff != 0:
            out += coeff * power.coeffs
    return TruncatedSeries(params, out)


def series_coordinates(series: TruncatedSeries) -> np.ndarray:
    """Coordinates in the orthonormal basis √c_m z^m."""
    return series.coeffs / np.sqrt(kernel_coefficients(series.params))


def coordinates_to_series(params: SpaceParams, vector) -> TruncatedSeries:
    return TruncatedSeries(params, np.asarray(vector, dtype=complex) * np.sqrt(kernel_coefficients(params)))


def wco_apply_series(W: WcoSymbol, h: TruncatedSeries) -> TruncatedSeries:
    """Truncated expansion of f·(h∘φ)."""
    return series_mul(weight_as_series(W.weight, h.params, W.gamma), series_compose_lfm(h, W.map))


def wco_compress(
    W: WcoSymbol, params: SpaceParams, max_workers=MAX_WORKERS, constant_tol=CONSTANT_TERM_TOL
) -> np.ndarray:
    """
    Matrix of P_D W P_D in the orthonormal basis e_m = √c_m z^m.

    Entry (k, m) is √(c_m/c_k) times the z^k coefficient of f·(z^m∘φ).
    Columns are filled by index, so the result does not depend on the
    thread schedule.

    Raises
    ------
    NumericalError
        If the denominator of φ or a factor of the weight has a constant
        term of modulus at most ``constant_tol``.
    """
    if params.n != W.n or params.gamma != W.gamma:
        raise DomainError(f"Symbol (n={W.n}, gamma={W.gamma}) does not match {params}")
    f_series = weight_as_series(W.weight, params, W.gamma, constant_tol)
    powers = substitution_powers(params, _map_components(W.map, params, constant_tol))
    sqrt_c = np.sqrt(kernel_coefficients(params))
    matrix = np.zeros((params.size, params.size), dtype=complex)

    def column(m):
        matrix[:, m] = series_mul(f_series, powers[m]).coeffs * sqrt_c[m] / sqrt_c

    logger.debug("Compressing %s onto %d basis vectors", W.map, params.size)
    with ThreadPoolExecutor(max_workers=max(1, int(max_workers))) as executor:
        list(executor.map(column, range(params.size)))
    return matrix


# --------------------------------------------------------------------------- residual checks
def adjoint_duality_residual(W: WcoSymbol, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> float:
    """
    Max relative residual of <W K_y, K_z> = <K_y, W† K_z> over sample pairs,
    with W† = wco_adjoint_symbol(W) acting through its own symbol.
    """
    adjoint = wco_adjoint_symbol(W)
    ys, zs = sample_pairs(W.n, samples, seed)
    residual = 0.0
    for y, z in zip(ys, zs):
        lhs = wco_apply_to_kernel(W, y, z)
        rhs = np.conj(wco_apply_to_kernel(adjoint, z, y))
        residual = max(residual, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return float(residual)


def product_law_residual(W1: WcoSymbol, W2: WcoSymbol, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED) -> float:
    """Max relative residual between the product symbol and two-step application on kernels."""
    product = wco_product(W1, W2)
    zs, ws = sample_pairs(W1.n, samples, seed)
    residual = 0.0
    for z, w in zip(zs, ws):
        phi_w = lfm_apply(W1.map, w)
        two_step = W1.weight_at(w) * W2.weight_at(phi_w) * kernel_eval(W1.gamma, z, lfm_apply(W2.map, phi_w))
        one_step = wco_apply_to_kernel(product, z, w)
        residual = max(residual, abs(one_step - two_step) / max(1.0, abs(two_step)))
    return float(residual)


def series_inner_product(a: TruncatedSeries, b: TruncatedSeries) -> complex:
    """<a, b> in H_γ, i.e. Σ a_m conj(b_m) / c_m."""
    if a.params != b.params:
        raise DomainError(f"Series parameters differ: {a.params} vs {b.params}")
    return complex(np.vdot(series_coordinates(b), series_coordinates(a)))
