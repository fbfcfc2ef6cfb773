#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Reproducing kernels of H_γ as exact symbols.

K^γ_z(w) = (1 - <w,z>)^(-γ). ``1 - <w,z>`` has positive real part on the
ball, so the principal power is used throughout and powers of products are
taken factor by factor.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from wcolab.analysis.ball_maps import (
    LinearFractionalMap,
    as_ball_point,
    is_automorphism,
    is_self_map,
    lfm_adjoint,
    lfm_apply,
    lfm_apply_many,
    lfm_inverse,
)
from wcolab.analysis.sampling import ball_samples
from wcolab.config import DEFAULT_SAMPLES, DEFAULT_SEED
from wcolab.errors import DomainError


def kernel_eval(gamma, z, w) -> complex:
    """K^γ_z(w) = (1 - <w,z>)^(-γ)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    return complex((1.0 - np.vdot(z, w)) ** (-gamma))


def kernel_eval_many(gamma, z, points) -> np.ndarray:
    """K^γ_z evaluated at every row of ``points``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    points = np.asarray(points, dtype=complex).reshape(-1, z.shape[0])
    return (1.0 - points @ np.conj(z)) ** (-gamma)


@dataclass(frozen=True, eq=False)
class KernelVector:
    """The vector scale·K^γ_base; scale = 0 encodes the zero vector."""

    gamma: float
    base: np.ndarray
    scale: complex = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma!r}")
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "base", as_ball_point(self.base))
        object.__setattr__(self, "scale", complex(self.scale))

    def __call__(self, w) -> complex:
        return self.scale * kernel_eval(self.gamma, self.base, w)

    def values(self, points) -> np.ndarray:
        return self.scale * kernel_eval_many(self.gamma, self.base, points)

    @property
    def norm_sq(self) -> float:
        return float(inner_product(self, self).real)

    @property
    def is_zero(self) -> bool:
        return self.scale == 0


def normalized_kernel(gamma, a) -> KernelVector:
    """Unit vector k^γ_a = (1-|a|²)^(γ/2) K^γ_a."""
    a = as_ball_point(a)
    return KernelVector(gamma, a, (1.0 - np.vdot(a, a).real) ** (gamma / 2.0))


def inner_product(u: KernelVector, v: KernelVector) -> complex:
    """<u, v> = scale_u conj(scale_v) K^γ(base_v, base_u)."""
    if u.gamma != v.gamma:
        raise DomainError(f"Kernel exponents differ: {u.gamma} vs {v.gamma}")
    if u.base.shape != v.base.shape:
        raise DomainError("Kernel vectors live in different dimensions")
    return u.scale * np.conj(v.scale) * kernel_eval(u.gamma, u.base, v.base)


def kernel_gram(gamma, points) -> np.ndarray:
    """Gram matrix G[i, j] = <K_{z_j}, K_{z_i}> = (1 - <z_i, z_j>)^(-γ)."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    return (1.0 - points @ points.conj().T) ** (-gamma)


def check_reciprocal_identity(
    psi: LinearFractionalMap, gamma, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED
) -> float:
    """
    Max over sample points of |k_a(z)·k_b(ψ(z)) - 1| with a = ψ⁻¹(0), b = ψ(0).

    Raises
    ------
    DomainError
        If ψ is not an automorphism.
    """
    if not is_automorphism(psi):
        raise DomainError("Map is not an automorphism of the ball")
    n = psi.n
    origin = np.zeros(n)
    k_a = normalized_kernel(gamma, lfm_apply(lfm_inverse(psi), origin))
    k_b = normalized_kernel(gamma, lfm_apply(psi, origin))
    z = ball_samples(n, samples, seed)
    products = k_a.values(z) * k_b.values(lfm_apply_many(psi, z))
    return float(np.max(np.abs(products - 1.0)))


class KernelTransformResidual(NamedTuple):
    forward: float
    backward: float


def check_kernel_transform(
    phi: LinearFractionalMap, gamma, a, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED
) -> KernelTransformResidual:
    """
    Residuals of the two kernel transforms under a map and its adjoint map σ.

        K_{φ(0)} · (K_a ∘ σ) = conj(K_{σ(0)}(a)) K_{φ(a)}
        K_{σ(0)} · (K_a ∘ φ) = conj(K_{φ(0)}(a)) K_{σ(a)}

    Residuals are relative to the size of the right-hand side.
    """
    a = as_ball_point(a, phi.n)
    sigma = lfm_adjoint(phi)
    for label, m in (("map", phi), ("adjoint map", sigma)):
        if not is_self_map(m).ok:
            raise DomainError(f"The {label} is not a self-map of the ball")

    origin = np.zeros(phi.n)
    z = ball_samples(phi.n, samples, seed)

    def residual(first, second):
        first_0, second_0 = lfm_apply(first, origin), lfm_apply(second, origin)
        lhs = kernel_eval_many(gamma, first_0, z) * kernel_eval_many(gamma, a, lfm_apply_many(second, z))
        rhs = np.conj(kernel_eval(gamma, second_0, a)) * kernel_eval_many(gamma, lfm_apply(first, a), z)
        return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))

    return KernelTransformResidual(residual(phi, sigma), residual(sigma, phi))
