#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Multi-indices and the monomial basis of H_γ.

All vectors and matrices in the package are indexed by the canonical
degree-graded ordering produced by :func:`enumerate_multiindices`: total
degree ascending, then lexicographic descending inside each degree, so for
``n=2`` the order starts ``(0,0), (1,0), (0,1), (2,0), (1,1), (0,2)``.

The reproducing kernel of H_γ expands as

    (1 - <w,z>)^(-γ) = Σ_m c_m w^m conj(z)^m,   c_m = Γ(γ+|m|) / (Γ(γ) m!)

so ``‖z^m‖² = 1/c_m`` and ``√c_m z^m`` is an orthonormal basis. The
coefficients are built by the recurrence ``c_{m+e_j} (m_j+1) = c_m (γ+|m|)``
instead of Gamma functions.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from wcolab.errors import CoefficientRangeError, DomainError


# A multi-index is a plain tuple of non-negative ints.
MultiIndex = tuple


@dataclass(frozen=True)
class SpaceParams:
    """Working model of H_γ on the ball of C^n, truncated at total degree D."""

    n: int
    gamma: float
    degree_cap: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"Dimension n must be a positive integer, got {self.n!r}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"Kernel exponent gamma must be > 0, got {self.gamma!r}")
        if int(self.degree_cap) != self.degree_cap or self.degree_cap < 0:
            raise DomainError(f"Degree cap must be a non-negative integer, got {self.degree_cap!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "degree_cap", int(self.degree_cap))

    @property
    def size(self) -> int:
        """Number of basis monomials, C(n+D, n)."""
        return math.comb(self.n + self.degree_cap, self.n)


def as_multiindex(m) -> MultiIndex:
    """Validate and return ``m`` as a tuple of non-negative ints."""
    try:
        out = tuple(int(x) for x in m)
    except TypeError as exc:
        raise DomainError(f"Not a multi-index: {m!r}") from exc
    if any(x < 0 for x in out) or any(int(x) != x for x in m):
        raise DomainError(f"Multi-index entries must be non-negative integers: {m!r}")
    return out


def total_degree(m) -> int:
    return int(sum(m))


def _compositions(n, degree):
    """All m with |m| = degree, lexicographically descending."""
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in _compositions(n - 1, degree - first):
            yield (first,) + rest


@lru_cache(maxsize=64)
def _enumeration(n, D):
    return tuple(m for degree in range(D + 1) for m in _compositions(n, degree))


def enumerate_multiindices(n, D) -> list:
    """
    List every multi-index of total degree at most ``D`` in canonical order.

    Parameters
    ----------
    n : int
        Number of variables, ``n >= 1``.
    D : int
        Degree cap, ``D >= 0``.

    Returns
    -------
    list of tuple
        ``C(n+D, n)`` multi-indices, degree-graded, lexicographically
        descending within a degree.
    """
    if n < 1 or D < 0:
        raise DomainError(f"Need n >= 1 and D >= 0, got n={n}, D={D}")
    return list(_enumeration(int(n), int(D)))


@lru_cache(maxsize=64)
def exponent_matrix(n, D) -> np.ndarray:
    """(N, n) integer array whose rows are the canonical multi-indices."""
    out = np.array(_enumeration(n, D), dtype=np.int64).reshape(-1, n)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def index_of(n, D) -> dict:
    """Map multi-index -> position in the canonical ordering."""
    return {m: i for i, m in enumerate(_enumeration(n, D))}


@lru_cache(maxsize=64)
def degree_offsets(n, D) -> np.ndarray:
    """``offsets[d]`` is the number of multi-indices with degree < d (length D+2)."""
    counts = [math.comb(n - 1 + d, n - 1) for d in range(D + 1)]
    out = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def parent_table(n, D):
    """
    For each index i > 0, a parent index and variable j with m_i = m_parent + e_j.

    ``j`` is the first non-zero coordinate of ``m_i``; entry 0 is ``(-1, -1)``.
    """
    exps = exponent_matrix(n, D)
    lookup = index_of(n, D)
    parents = np.full(len(exps), -1, dtype=np.int64)
    variables = np.full(len(exps), -1, dtype=np.int64)
    for i, m in enumerate(exps[1:], start=1):
        j = int(np.flatnonzero(m)[0])
        prev = list(int(x) for x in m)
        prev[j] -= 1
        parents[i] = lookup[tuple(prev)]
        variables[i] = j
    parents.setflags(write=False)
    variables.setflags(write=False)
    return parents, variables


@lru_cache(maxsize=32)
def product_table(n, D):
    """
    Index triples for truncated Cauchy products.

    Returns arrays ``(left, right, target)`` listing every pair of basis
    indices whose degrees sum to at most ``D`` together with the index of the
    product monomial.
    """
    exps = exponent_matrix(n, D)
    offsets = degree_offsets(n, D)
    degrees = exps.sum(axis=1)
    # Mixed-radix keys add like the multi-indices as long as no digit exceeds D.
    radix = (D + 1) ** np.arange(n, dtype=np.int64)
    keys = exps @ radix
    order = np.argsort(keys)
    sorted_keys = keys[order]

    reach = offsets[D - degrees + 1]
    left = np.repeat(np.arange(len(exps), dtype=np.int64), reach)
    right = np.concatenate([np.arange(r, dtype=np.int64) for r in reach])
    target = order[np.searchsorted(sorted_keys, keys[left] + keys[right])]
    for arr in (left, right, target):
        arr.setflags(write=False)
    return left, right, target


def kernel_coefficient(m, gamma) -> float:
    """
    Coefficient c_m of w^m conj(z)^m in the kernel (1 - <w,z>)^(-γ).

    Raises
    ------
    CoefficientRangeError
        If c_m overflows the floating point range.
    """
    if not gamma > 0:
        raise DomainError(f"gamma must be > 0, got {gamma!r}")
    m = as_multiindex(m)
    c = 1.0
    degree = 0
    for mj in m:
        for step in range(mj):
            c *= (gamma + degree) / (step + 1)
            degree += 1
    if not math.isfinite(c) or c == 0.0:
        raise CoefficientRangeError(f"Kernel coefficient for m={m}, gamma={gamma} is out of range")
    return c


def monomial_norm_sq(m, gamma) -> float:
    """Squared H_γ norm of z^m, i.e. 1 / c_m."""
    return 1.0 / kernel_coefficient(m, gamma)


@lru_cache(maxsize=64)
def _coefficients(n, D, gamma):
    parents, variables = parent_table(n, D)
    exps = exponent_matrix(n, D)
    degrees = exps.sum(axis=1)
    c = np.ones(len(exps))
    with np.errstate(over="ignore"):
        for i in range(1, len(exps)):
            p = parents[i]
            c[i] = c[p] * (gamma + degrees[p]) / exps[i, variables[i]]
    if not np.all(np.isfinite(c)) or np.any(c == 0.0):
        raise CoefficientRangeError(f"Kernel coefficients overflow for n={n}, D={D}, gamma={gamma}")
    c.setflags(write=False)
    return c


def kernel_coefficients(params: SpaceParams) -> np.ndarray:
    """Vector of c_m over the canonical ordering of ``params``."""
    return _coefficients(params.n, params.degree_cap, params.gamma)


def monomial_values(z, n, D) -> np.ndarray:
    """Values z^m for every canonical multi-index (``0**0 == 1``)."""
    z = np.asarray(z, dtype=complex).reshape(n)
    return np.prod(z[np.newaxis, :] ** exponent_matrix(n, D), axis=1)


def truncated_kernel(params: SpaceParams, z, w) -> complex:
    """Partial sum Σ_{|m|≤D} c_m w^m conj(z)^m of the reproducing kernel."""
    n, D = params.n, params.degree_cap
    zc = np.conj(np.asarray(z, dtype=complex))
    return complex(np.sum(kernel_coefficients(params) * monomial_values(w, n, D) * monomial_values(zc, n, D)))
