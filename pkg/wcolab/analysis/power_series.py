#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Truncated multivariate complex power series.

A :class:`TruncatedSeries` stores one complex coefficient per multi-index of
degree at most D, in the canonical graded ordering of
:mod:`wcolab.analysis.multiindex_basis`. Every operation truncates its result
at degree D; coefficients of degree ≤ D are exact (up to rounding) whenever
the inputs are.
"""

from dataclasses import dataclass

import numpy as np

from wcolab.analysis.multiindex_basis import (
    SpaceParams,
    as_multiindex,
    degree_offsets,
    exponent_matrix,
    index_of,
    parent_table,
    product_table,
)
from wcolab.config import CONSTANT_TERM_TOL
from wcolab.errors import DomainError, NumericalError


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Σ_{|m|≤D} coeffs[m] z^m with dense graded storage."""

    params: SpaceParams
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        if coeffs.shape != (self.params.size,):
            raise DomainError(
                f"Expected {self.params.size} coefficients for {self.params}, got {coeffs.shape[0]}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    # ------------------------------------------------------------- builders
    @classmethod
    def zero(cls, params):
        return cls(params, np.zeros(params.size, dtype=complex))

    @classmethod
    def constant(cls, params, value):
        coeffs = np.zeros(params.size, dtype=complex)
        coeffs[0] = value
        return cls(params, coeffs)

    @classmethod
    def monomial(cls, params, m, value=1.0):
        """value·z^m, or zero when |m| > D."""
        m = as_multiindex(m)
        if len(m) != params.n:
            raise DomainError(f"Multi-index {m} has wrong length for n={params.n}")
        coeffs = np.zeros(params.size, dtype=complex)
        if sum(m) <= params.degree_cap:
            coeffs[index_of(params.n, params.degree_cap)[m]] = value
        return cls(params, coeffs)

    @classmethod
    def from_dict(cls, params, terms):
        """Build from ``{multi-index: coefficient}``; terms above degree D are dropped."""
        coeffs = np.zeros(params.size, dtype=complex)
        lookup = index_of(params.n, params.degree_cap)
        for m, value in terms.items():
            m = as_multiindex(m)
            if len(m) != params.n:
                raise DomainError(f"Multi-index {m} has wrong length for n={params.n}")
            if sum(m) <= params.degree_cap:
                coeffs[lookup[m]] += value
        return cls(params, coeffs)

    @classmethod
    def affine(cls, params, constant, linear):
        """constant + Σ_j linear[j]·z_j."""
        linear = np.asarray(linear, dtype=complex).reshape(params.n)
        coeffs = np.zeros(params.size, dtype=complex)
        coeffs[0] = constant
        if params.degree_cap >= 1:
            coeffs[1:params.n + 1] = linear
        return cls(params, coeffs)

    # ------------------------------------------------------------- access
    def coefficient(self, m) -> complex:
        m = as_multiindex(m)
        if sum(m) > self.params.degree_cap:
            return 0j
        return complex(self.coeffs[index_of(self.params.n, self.params.degree_cap)[m]])

    def to_dict(self, tol=0.0) -> dict:
        exps = exponent_matrix(self.params.n, self.params.degree_cap)
        return {
            tuple(int(x) for x in exps[i]): complex(c)
            for i, c in enumerate(self.coeffs)
            if abs(c) > tol
        }

    def homogeneous_part(self, degree):
        """The degree-``degree`` component as a series."""
        offsets = degree_offsets(self.params.n, self.params.degree_cap)
        coeffs = np.zeros(self.params.size, dtype=complex)
        if 0 <= degree <= self.params.degree_cap:
            lo, hi = offsets[degree], offsets[degree + 1]
            coeffs[lo:hi] = self.coeffs[lo:hi]
        return TruncatedSeries(self.params, coeffs)

    def euler(self):
        """Σ_j z_j ∂_j, which scales the degree-d part by d."""
        degrees = exponent_matrix(self.params.n, self.params.degree_cap).sum(axis=1)
        return TruncatedSeries(self.params, self.coeffs * degrees)

    # ------------------------------------------------------------- arithmetic
    def __add__(self, other):
        if np.isscalar(other):
            return series_add(self, TruncatedSeries.constant(self.params, other))
        return series_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.params, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self.params, self.coeffs * other)
        return series_mul(self, other)

    __rmul__ = __mul__

    def __call__(self, z):
        return series_eval(self, z)


def _check_same(a, b):
    if a.params != b.params:
        raise DomainError(f"Series parameters differ: {a.params} vs {b.params}")


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Coefficient-wise sum."""
    _check_same(a, b)
    return TruncatedSeries(a.params, a.coeffs + b.coeffs)


def _cauchy(a_coeffs, b_coeffs, params):
    left, right, target = product_table(params.n, params.degree_cap)
    prod = a_coeffs[left] * b_coeffs[right]
    size = params.size
    return (
        np.bincount(target, weights=prod.real, minlength=size)
        + 1j * np.bincount(target, weights=prod.imag, minlength=size)
    )


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product with every term of total degree > D discarded."""
    _check_same(a, b)
    return TruncatedSeries(a.params, _cauchy(a.coeffs, b.coeffs, a.params))


def series_reciprocal(a: TruncatedSeries, tol=CONSTANT_TERM_TOL) -> TruncatedSeries:
    """
    Series r with a·r = 1 through degree D, by degree-by-degree back-substitution.

    Raises
    ------
    NumericalError
        If ``|a_0| <= tol``.
    """
    params = a.params
    a0 = a.coeffs[0]
    if abs(a0) <= tol:
        raise NumericalError(f"Cannot invert a series with constant term {a0!r}")
    offsets = degree_offsets(params.n, params.degree_cap)
    r = np.zeros(params.size, dtype=complex)
    r[0] = 1.0 / a0
    for degree in range(1, params.degree_cap + 1):
        lo, hi = offsets[degree], offsets[degree + 1]
        # a·r currently equals 1 below this degree; cancel the degree-d part.
        residual = _cauchy(a.coeffs, r, params)
        r[lo:hi] = -residual[lo:hi] / a0
    return TruncatedSeries(params, r)


def _is_integer(x):
    return float(x).is_integer()


def series_real_power(a: TruncatedSeries, gamma, tol=CONSTANT_TERM_TOL) -> TruncatedSeries:
    """
    The series exp(γ·log a) truncated at degree D.

    The constant term must be 1, a positive real (``a0**γ`` is factored out),
    or any non-zero complex number when γ is an integer. Coefficients come
    from matching a·E(b) = γ·E(a)·b degree by degree, where E is the Euler
    operator Σ z_j ∂_j.

    Raises
    ------
    DomainError
        Non-real or non-positive constant term with non-integer γ.
    NumericalError
        Vanishing constant term with a negative or fractional exponent.
    """
    params = a.params
    gamma = float(gamma)
    a0 = complex(a.coeffs[0])

    if _is_integer(gamma) and gamma >= 0:
        result = TruncatedSeries.constant(params, 1.0)
        base, k = a, int(gamma)
        while k:
            if k & 1:
                result = series_mul(result, base)
            k >>= 1
            if k:
                base = series_mul(base, base)
        return result

    if abs(a0) <= tol:
        raise NumericalError(f"Cannot raise a series with constant term {a0!r} to power {gamma}")
    if _is_integer(gamma):
        prefactor = a0 ** int(gamma)
    elif abs(a0.imag) <= tol * abs(a0) and a0.real > 0:
        prefactor = a0.real ** gamma
    else:
        raise DomainError(
            f"Branch of power {gamma} is ambiguous for constant term {a0!r}; "
            "normalize the constant term to 1 first"
        )

    unit = a.coeffs / a0
    e_unit = unit * exponent_matrix(params.n, params.degree_cap).sum(axis=1)
    shifted = unit.copy()
    shifted[0] = 0.0
    offsets = degree_offsets(params.n, params.degree_cap)
    b = np.zeros(params.size, dtype=complex)
    b[0] = 1.0
    for degree in range(1, params.degree_cap + 1):
        lo, hi = offsets[degree], offsets[degree + 1]
        e_b = b * exponent_matrix(params.n, params.degree_cap).sum(axis=1)
        rhs = gamma * _cauchy(e_unit, b, params) - _cauchy(shifted, e_b, params)
        b[lo:hi] = rhs[lo:hi] / degree
    return TruncatedSeries(params, prefactor * b)


def series_eval(a: TruncatedSeries, z) -> complex:
    """Σ coeffs[m]·z^m at a point of C^n."""
    n, D = a.params.n, a.params.degree_cap
    z = np.asarray(z, dtype=complex).reshape(n)
    return complex(np.dot(a.coeffs, np.prod(z[np.newaxis, :] ** exponent_matrix(n, D), axis=1)))


def series_eval_many(a: TruncatedSeries, points) -> np.ndarray:
    """Vectorized :func:`series_eval` over an (k, n) array of points."""
    n, D = a.params.n, a.params.degree_cap
    points = np.asarray(points, dtype=complex).reshape(-1, n)
    values = np.prod(points[:, np.newaxis, :] ** exponent_matrix(n, D)[np.newaxis, :, :], axis=2)
    return values @ a.coeffs


def substitution_powers(params: SpaceParams, components, max_degree=None) -> list:
    """
    Products Π_j components[j]^{m_j} for the canonical multi-indices.

    Parameters
    ----------
    params : SpaceParams
    components : sequence of TruncatedSeries
        One series per variable (the substituted coordinate functions).
    max_degree : int, optional
        Only powers with |m| up to this degree are built.

    Returns
    -------
    list of TruncatedSeries
        Entry i is the power for the i-th canonical multi-index.
    """
    D = params.degree_cap
    limit = D if max_degree is None else min(D, max_degree)
    count = degree_offsets(params.n, D)[limit + 1]
    parents, variables = parent_table(params.n, D)
    powers = [TruncatedSeries.constant(params, 1.0)]
    for i in range(1, count):
        powers.append(series_mul(powers[parents[i]], components[variables[i]]))
    return powers


def series_degree(h) -> int:
    """Largest total degree with a non-zero coefficient (0 for the zero series)."""
    nonzero = np.flatnonzero(h.coeffs)
    if nonzero.size == 0:
        return 0
    return int(exponent_matrix(h.params.n, h.params.degree_cap)[nonzero[-1]].sum())


def series_compose_affine(h: TruncatedSeries, A, b) -> TruncatedSeries:
    """
    Truncated expansion of h(Az + b).

    Exact through degree D when ``b == 0``; otherwise terms of h above degree
    D are unknown and their contribution to lower degrees is lost.
    """
    params = h.params
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if A.shape != (params.n, params.n) or b.shape != (params.n,):
        raise DomainError(f"Affine map shapes {A.shape}, {b.shape} do not match n={params.n}")
    components = [TruncatedSeries.affine(params, b[j], A[j]) for j in range(params.n)]
    powers = substitution_powers(params, components, series_degree(h))
    out = np.zeros(params.size, dtype=complex)
    for coeff, power in zip(h.coeffs, powers):
        if coeff != 0:
            out += coeff * power.coeffs
    return TruncatedSeries(params, out)
