#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Linear fractional self-maps of the unit ball of C^n.

A map φ(z) = (Az + B) / (<z,C> + d) is handled through its projective
(n+1)×(n+1) matrix

    M = [[A,   B],
         [C^*, d]]

so composition is matrix multiplication and the adjoint map
σ(z) = (A^* z - C) / (-<z,B> + conj(d)) has matrix J M^* J with
J = diag(1, ..., 1, -1). Here <z,w> = Σ z_j conj(w_j).
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space

from wcolab.analysis.sampling import ball_samples, sample_pairs, sphere_samples
from wcolab.config import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DENOMINATOR_TOL,
    SELF_MAP_SAMPLES,
    SELF_MAP_TOL,
    SYMBOL_TOL,
)
from wcolab.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

# Fixed points closer than this to the sphere count as boundary points.
INTERIOR_MARGIN = 1e-8
# Inverses of projective matrices worse conditioned than this are degenerate.
MAX_CONDITION = 1e12
_CLUSTER_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class LinearFractionalMap:
    """Data (A, B, C, d) of φ(z) = (Az+B)/(<z,C>+d), up to projective scaling."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    d: complex

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.A, dtype=complex))
        n = A.shape[0]
        if A.shape != (n, n):
            raise DomainError(f"A must be square, got shape {A.shape}")
        B = np.array(self.B, dtype=complex).reshape(-1)
        C = np.array(self.C, dtype=complex).reshape(-1)
        if B.shape != (n,) or C.shape != (n,):
            raise DomainError(f"B and C must have length {n}, got {B.shape} and {C.shape}")
        d = complex(np.asarray(self.d, dtype=complex).reshape(-1)[0])
        for arr in (A, B, C):
            if not np.all(np.isfinite(arr)):
                raise DomainError("Map data must be finite")
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        n = self.n
        M = np.empty((n + 1, n + 1), dtype=complex)
        M[:n, :n] = self.A
        M[:n, n] = self.B
        M[n, :n] = np.conj(self.C)
        M[n, n] = self.d
        return M

    @classmethod
    def from_matrix(cls, M):
        M = np.asarray(M, dtype=complex)
        n = M.shape[0] - 1
        if n < 1 or M.shape != (n + 1, n + 1):
            raise DomainError(f"Projective matrix must be (n+1)x(n+1) with n >= 1, got {M.shape}")
        return cls(M[:n, :n], M[:n, n], np.conj(M[n, :n]), M[n, n])

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n), np.zeros(n), np.zeros(n), 1.0)

    @classmethod
    def linear(cls, A):
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        n = A.shape[0]
        return cls(A, np.zeros(n), np.zeros(n), 1.0)

    def normalized(self):
        """The same map scaled so d = 1 (or, when d ≈ 0, the largest entry is 1)."""
        M = self.matrix
        if abs(self.d) > DENOMINATOR_TOL:
            return LinearFractionalMap.from_matrix(M / self.d)
        flat = M.reshape(-1)
        return LinearFractionalMap.from_matrix(M / flat[np.argmax(np.abs(flat))])

    def __call__(self, z):
        return lfm_apply(self, z)

    def __repr__(self):
        phi = self.normalized()
        return (
            f"LinearFractionalMap(n={phi.n}, A={phi.A.tolist()}, B={phi.B.tolist()}, "
            f"C={phi.C.tolist()}, d={phi.d})"
        )


def _check_denominator(phi: LinearFractionalMap):
    norm_c = float(np.linalg.norm(phi.C))
    if not abs(phi.d) > norm_c + DENOMINATOR_TOL * max(1.0, abs(phi.d)):
        raise DomainError(
            f"denominator may vanish on the closed ball (|d|={abs(phi.d):.6g}, |C|={norm_c:.6g})"
        )


def make_lfm(A, B, C, d) -> LinearFractionalMap:
    """Build a map and enforce |d| > |C|, so <z,C>+d never vanishes on the closed ball."""
    phi = LinearFractionalMap(A, B, C, d)
    _check_denominator(phi)
    return phi


def as_ball_point(z, n=None) -> np.ndarray:
    """Validate ``z`` as a point of the open unit ball and return it as a complex vector."""
    z = np.atleast_1d(np.asarray(z, dtype=complex)).reshape(-1)
    if n is not None and z.shape != (n,):
        raise DomainError(f"Expected a point of C^{n}, got {z.shape[0]} coordinates")
    if not np.all(np.isfinite(z)):
        raise DomainError("Ball point must be finite")
    if not np.linalg.norm(z) < 1.0:
        raise DomainError(f"Point {z.tolist()} is not in the open unit ball (|z| >= 1)")
    return z


def lfm_apply(phi: LinearFractionalMap, z) -> np.ndarray:
    """
    Evaluate φ(z).

    Raises
    ------
    NumericalError
        If the denominator <z,C>+d is below ``DENOMINATOR_TOL``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex)).reshape(-1)
    if z.shape != (phi.n,):
        raise DomainError(f"Point of dimension {z.shape[0]} given to a map of C^{phi.n}")
    denominator = np.vdot(phi.C, z) + phi.d
    if abs(denominator) < DENOMINATOR_TOL:
        raise NumericalError(f"Denominator of the map vanishes at {z.tolist()}")
    return (phi.A @ z + phi.B) / denominator


def lfm_apply_many(phi: LinearFractionalMap, points) -> np.ndarray:
    """Evaluate φ on every row of a (k, n) array; raises like :func:`lfm_apply`."""
    points = np.asarray(points, dtype=complex).reshape(-1, phi.n)
    denominators = points @ np.conj(phi.C) + phi.d
    if np.any(np.abs(denominators) < DENOMINATOR_TOL):
        raise NumericalError("Denominator of the map vanishes at a sample point")
    return (points @ phi.A.T + phi.B) / denominators[:, np.newaxis]


def moebius_involution(a) -> LinearFractionalMap:
    """
    The involutive automorphism φ_a exchanging 0 and a.

    φ_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z,a>), with P_a the orthogonal
    projection onto span(a), Q_a = I - P_a and s_a = sqrt(1 - |a|²). For
    a = 0 this is z ↦ -z.
    """
    a = as_ball_point(a)
    n = a.shape[0]
    norm_sq = float(np.vdot(a, a).real)
    if norm_sq == 0.0:
        P = np.zeros((n, n), dtype=complex)
    else:
        P = np.outer(a, np.conj(a)) / norm_sq
    Q = np.eye(n) - P
    s = np.sqrt(1.0 - norm_sq)
    return LinearFractionalMap(-(P + s * Q), a, -a, 1.0)


def _from_product(M, check=True):
    phi = LinearFractionalMap.from_matrix(M).normalized()
    if check:
        _check_denominator(phi)
    return phi


def lfm_compose(phi: LinearFractionalMap, psi: LinearFractionalMap) -> LinearFractionalMap:
    """
    The map φ∘ψ, normalized to d = 1.

    Raises
    ------
    DomainError
        Dimension mismatch, or the composite violates |d| > |C|.
    """
    if phi.n != psi.n:
        raise DomainError(f"Cannot compose maps of C^{phi.n} and C^{psi.n}")
    return _from_product(phi.matrix @ psi.matrix)


def lfm_adjoint(phi: LinearFractionalMap) -> LinearFractionalMap:
    """The adjoint map σ(z) = (A^* z - C)/(-<z,B> + conj(d)), normalized when possible."""
    sigma = LinearFractionalMap(phi.A.conj().T, -phi.C, -phi.B, np.conj(phi.d))
    return sigma.normalized()


def lfm_inverse(phi: LinearFractionalMap) -> LinearFractionalMap:
    """
    The projective inverse of φ.

    Raises
    ------
    DomainError
        If the projective matrix is singular or the inverse map has a
        denominator that may vanish on the closed ball.
    """
    M = phi.matrix
    if np.linalg.cond(M) > MAX_CONDITION:
        raise DomainError("Projective matrix of the map is singular; the map has no inverse")
    return _from_product(np.linalg.inv(M))


def lfm_distance(phi: LinearFractionalMap, psi: LinearFractionalMap) -> float:
    """Distance between projective matrices scaled to unit norm and aligned in phase."""
    if phi.n != psi.n:
        return np.inf
    M1, M2 = phi.matrix, psi.matrix
    M1 = M1 / np.linalg.norm(M1)
    M2 = M2 / np.linalg.norm(M2)
    overlap = np.vdot(M2, M1)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(M1 - phase * M2))


def lfm_allclose(phi, psi, tol=SYMBOL_TOL) -> bool:
    """Projective equality of two maps."""
    return lfm_distance(phi, psi) <= tol


class SelfMapCheck(NamedTuple):
    ok: bool
    margin: float


def is_self_map(
    phi: LinearFractionalMap, samples=SELF_MAP_SAMPLES, seed=DEFAULT_SEED, tol=SELF_MAP_TOL
) -> SelfMapCheck:
    """
    Sampled test that φ maps the ball into its closure.

    The supremum of |φ| is taken over ``samples`` quasi-random sphere points
    plus an interior set a quarter that size; ``margin`` is 1 - sup|φ|.
    """
    points = np.vstack(
        [
            sphere_samples(phi.n, samples, seed),
            ball_samples(phi.n, max(samples // 4, 1), seed, radius=1.0),
        ]
    )
    try:
        values = lfm_apply_many(phi, points)
    except NumericalError:
        logger.debug("Map denominator vanishes on the closed ball")
        return SelfMapCheck(False, -np.inf)
    sup = float(np.max(np.linalg.norm(values, axis=1)))
    return SelfMapCheck(sup <= 1.0 + tol, 1.0 - sup)


def is_automorphism(phi: LinearFractionalMap, tol=SYMBOL_TOL) -> bool:
    """True iff φ and its projective inverse are both self-maps composing to the identity."""
    M = phi.matrix
    if np.linalg.cond(M) > MAX_CONDITION:
        return False
    psi = LinearFractionalMap.from_matrix(np.linalg.inv(M)).normalized()
    if not (is_self_map(phi).ok and is_self_map(psi).ok):
        return False
    identity = LinearFractionalMap.identity(phi.n)
    forward = LinearFractionalMap.from_matrix(phi.matrix @ psi.matrix)
    backward = LinearFractionalMap.from_matrix(psi.matrix @ phi.matrix)
    return lfm_allclose(forward, identity, tol) and lfm_allclose(backward, identity, tol)


def _eigenvalue_clusters(values):
    clusters = []
    for value in values:
        for cluster in clusters:
            if abs(value - np.mean(cluster)) <= _CLUSTER_TOL * max(1.0, abs(value)):
                cluster.append(value)
                break
        else:
            clusters.append([value])
    return [complex(np.mean(c)) for c in clusters]


def _candidate(space, n):
    """Point of minimal norm in the affine chart of an eigenspace, or None."""
    Q, _ = np.linalg.qr(space)
    v = Q @ np.conj(Q[n, :])
    if abs(v[n]) < 1e-12:
        return None
    return v[:n] / v[n]


def fixed_point_in_ball(phi: LinearFractionalMap, tol=SYMBOL_TOL):
    """
    A fixed point of φ with |p| < 1 - 1e-8, or None.

    Fixed points are eigenvectors of the projective matrix; each eigenspace
    contributes its point closest to the origin and the smallest valid
    candidate is returned.
    """
    M = phi.normalized().matrix
    n = phi.n
    values, vectors = np.linalg.eig(M)
    candidates = []
    for value in _eigenvalue_clusters(values):
        space = null_space(M - value * np.eye(n + 1), rcond=1e-8)
        if space.shape[1] == 0:
            nearest = np.argmin(np.abs(values - value))
            space = vectors[:, [nearest]]
        p = _candidate(space, n)
        if p is None or not np.all(np.isfinite(p)):
            continue
        if np.linalg.norm(p) >= 1.0 - INTERIOR_MARGIN:
            continue
        if np.linalg.norm(lfm_apply(phi, p) - p) <= tol:
            candidates.append(p)
    if not candidates:
        return None
    return min(candidates, key=np.linalg.norm)


def jacobian_at(phi: LinearFractionalMap, p) -> np.ndarray:
    """Complex Jacobian φ'(p) = A/D - (Ap+B) C^*/D² with D = <p,C>+d."""
    p = np.atleast_1d(np.asarray(p, dtype=complex)).reshape(phi.n)
    numerator = phi.A @ p + phi.B
    denominator = np.vdot(phi.C, p) + phi.d
    if abs(denominator) < DENOMINATOR_TOL:
        raise NumericalError(f"Denominator of the map vanishes at {p.tolist()}")
    return phi.A / denominator - np.outer(numerator, np.conj(phi.C)) / denominator**2


def is_constant_map(phi: LinearFractionalMap, tol=SYMBOL_TOL) -> bool:
    """φ is constant iff A·d = B C^*."""
    scale = max(np.linalg.norm(phi.matrix), 1.0)
    defect = phi.A * phi.d - np.outer(phi.B, np.conj(phi.C))
    return float(np.linalg.norm(defect)) <= tol * scale**2


def automorphism_identity_residual(
    psi: LinearFractionalMap, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED
) -> float:
    """
    Max relative residual of

        1 - <ψ(z),ψ(w)> = (1-|a|²)(1-<z,w>) / ((1-<z,a>)(1-<a,w>)),  a = ψ⁻¹(0)

    over deterministic sample pairs.
    """
    if not is_automorphism(psi):
        raise DomainError("Map is not an automorphism of the ball")
    a = lfm_apply(lfm_inverse(psi), np.zeros(psi.n))
    z, w = sample_pairs(psi.n, samples, seed)
    pz, pw = lfm_apply_many(psi, z), lfm_apply_many(psi, w)
    lhs = 1.0 - np.sum(pz * np.conj(pw), axis=1)
    rhs = (
        (1.0 - np.vdot(a, a).real)
        * (1.0 - np.sum(z * np.conj(w), axis=1))
        / ((1.0 - z @ np.conj(a)) * (1.0 - w.conj() @ a))
    )
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))
