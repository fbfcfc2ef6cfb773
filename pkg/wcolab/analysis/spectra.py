#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Spectra of normal weighted composition operators and finite-section cross-checks.

The exact spectrum of a normal operator with an interior fixed point is the
closure of {f(p)·λ^m}; it is represented here by the finite generator set
with |m| ≤ D plus the known limit points.
"""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import polars as pl
from scipy.linalg import LinAlgError, eigvals, schur
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import directed_hausdorff

from wcolab.analysis.ball_maps import fixed_point_in_ball, moebius_involution
from wcolab.analysis.classify import (
    Verdict,
    classify_all,
    classify_normal_fixed_point,
    classify_unitary,
)
from wcolab.analysis.kernels import normalized_kernel
from wcolab.analysis.multiindex_basis import SpaceParams, enumerate_multiindices, exponent_matrix
from wcolab.analysis.power_series import TruncatedSeries, substitution_powers
from wcolab.analysis.wco_core import (
    KernelWeight,
    WcoSymbol,
    series_inner_product,
    wco_apply_series,
    wco_compress,
)
from wcolab.config import CONSTANT_TERM_TOL, DEFAULT_SAMPLES, DEFAULT_SEED, MATRIX_TOL, MAX_WORKERS, SYMBOL_TOL
from wcolab.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

NORMAL_TOL = 1e-10
# Moduli are rounded to this many decimals before ordering so ties sort by argument.
_SORT_DECIMALS = 10


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues λ^m (or f(p)·λ^m) with their eigenfunctions, indexed by multi-index."""

    params: SpaceParams
    multiindices: list
    eigenvalues: np.ndarray
    eigenfunctions: list
    limit_points: list = field(default_factory=list)

    def __post_init__(self):
        if not (len(self.multiindices) == len(self.eigenvalues) == len(self.eigenfunctions)):
            raise DomainError("Eigen-system lengths do not match")

    def to_frame(self) -> pl.DataFrame:
        values = np.asarray(self.eigenvalues, dtype=complex)
        return pl.DataFrame(
            {
                "multiindex": [list(m) for m in self.multiindices],
                "degree": [int(sum(m)) for m in self.multiindices],
                "re": values.real,
                "im": values.imag,
                "modulus": np.abs(values),
                "argument": np.angle(values),
            }
        )


def sort_spectrum(values) -> np.ndarray:
    """Order by modulus descending, then argument ascending."""
    values = np.asarray(values, dtype=complex).reshape(-1)
    frame = pl.DataFrame(
        {
            "idx": np.arange(values.size),
            "modulus": np.round(np.abs(values), _SORT_DECIMALS),
            "argument": np.round(np.angle(values), _SORT_DECIMALS),
        }
    ).sort(["modulus", "argument"], descending=[True, False])
    return values[frame["idx"].to_numpy()]


def match_multisets(exact, approx) -> float:
    """Largest distance in a minimum-cost pairing of two multisets (the smaller one is fully matched)."""
    exact = np.asarray(exact, dtype=complex).reshape(-1)
    approx = np.asarray(approx, dtype=complex).reshape(-1)
    if exact.size == 0 or approx.size == 0:
        return 0.0 if exact.size == approx.size else np.inf
    cost = np.abs(exact[:, np.newaxis] - approx[np.newaxis, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def _as_plane(values):
    values = np.asarray(values, dtype=complex).reshape(-1)
    return np.column_stack([values.real, values.imag])


def directed_distance(source, target) -> float:
    """max over source of the distance to the nearest target point."""
    return float(directed_hausdorff(_as_plane(source), _as_plane(target))[0])


def hausdorff_distance(first, second) -> float:
    return max(directed_distance(first, second), directed_distance(second, first))


def _unit_norm(series: TruncatedSeries) -> TruncatedSeries:
    norm = np.sqrt(series_inner_product(series, series).real)
    return series * (1.0 / norm) if norm > 0 else series


def _diagonalize_normal(A, tol=NORMAL_TOL):
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    if np.linalg.norm(A @ A.conj().T - A.conj().T @ A) > tol * max(1.0, np.linalg.norm(A) ** 2):
        raise DomainError("A is not normal")
    if np.linalg.norm(A, 2) > 1.0 + 1e-12:
        raise DomainError("A is not a contraction")
    T, U = schur(A, output="complex")
    return np.diag(T).copy(), U


def _limit_points(lam):
    return [0j] if np.any(np.abs(lam) < 1.0) else []


def normal_linear_spectrum(A, params: SpaceParams) -> EigenSystem:
    """
    Eigen-system of C_A for a normal contraction A = U diag(λ) U*.

    f_m(z) = Π <z,u_j>^{m_j} (u_j the columns of U) has eigenvalue λ^m.
    """
    lam, U = _diagonalize_normal(A)
    if U.shape[0] != params.n:
        raise DomainError(f"A acts on C^{U.shape[0]}, space is C^{params.n}")
    forms = [TruncatedSeries.affine(params, 0.0, np.conj(U[:, j])) for j in range(params.n)]
    eigenfunctions = [_unit_norm(f) for f in substitution_powers(params, forms)]
    exps = exponent_matrix(params.n, params.degree_cap)
    eigenvalues = np.prod(lam[np.newaxis, :] ** exps, axis=1)
    return EigenSystem(params, enumerate_multiindices(params.n, params.degree_cap), eigenvalues, eigenfunctions, _limit_points(lam))


def normal_wco_spectrum(W: WcoSymbol, params: SpaceParams, classification=None) -> EigenSystem:
    """
    Eigen-system α·λ^m, g_m = U_p f_m of a normal operator with interior fixed point p.

    λ are the eigenvalues of φ'(p), paired with those of the witness A;
    f_m comes from :func:`normal_linear_spectrum` of A.
    """
    classification = classification or classify_normal_fixed_point(W)
    if classification.verdict is not Verdict.NORMAL_FIXED_POINT:
        raise DomainError(f"Operator is not normal with an interior fixed point: {classification.reason}")
    p, A, alpha = (classification.witness[k] for k in ("p", "A", "alpha"))
    linear = normal_linear_spectrum(A, params)

    lam_A, _ = _diagonalize_normal(A)
    lam_jac = np.asarray(classification.witness["jacobian_eigenvalues"], dtype=complex)
    rows, cols = linear_sum_assignment(np.abs(lam_A[:, np.newaxis] - lam_jac[np.newaxis, :]))
    lam = np.empty_like(lam_A)
    lam[rows] = lam_jac[cols]
    exps = exponent_matrix(params.n, params.degree_cap)
    eigenvalues = alpha * np.prod(lam[np.newaxis, :] ** exps, axis=1)

    involution = WcoSymbol(W.gamma, KernelWeight(normalized_kernel(W.gamma, p).scale, p), moebius_involution(p))
    eigenfunctions = [_unit_norm(wco_apply_series(involution, f)) for f in linear.eigenfunctions]
    return EigenSystem(params, linear.multiindices, eigenvalues, eigenfunctions, _limit_points(lam))


def compression_eigenvalues(
    W: WcoSymbol, params: SpaceParams, max_workers=MAX_WORKERS, constant_tol=CONSTANT_TERM_TOL
) -> np.ndarray:
    """Eigenvalues of the compression of W, sorted by modulus then argument."""
    matrix = wco_compress(W, params, max_workers, constant_tol)
    try:
        values = eigvals(matrix)
    except LinAlgError as exc:
        raise NumericalError(f"Eigensolver failed on the {matrix.shape[0]}x{matrix.shape[0]} compression") from exc
    logger.debug("Solved a %d-dimensional compression eigenproblem", matrix.shape[0])
    return sort_spectrum(values)


@dataclass
class SpectrumReport:
    classification: dict
    exact: EigenSystem = None
    jacobian_eigenvalues: np.ndarray = None
    compression: np.ndarray = None
    hausdorff: float = None
    exact_to_compression: float = None
    notes: list = field(default_factory=list)


def spectrum_report(
    W: WcoSymbol,
    params: SpaceParams,
    tol=SYMBOL_TOL,
    matrix_tol=MATRIX_TOL,
    max_workers=MAX_WORKERS,
    constant_tol=CONSTANT_TERM_TOL,
    samples=DEFAULT_SAMPLES,
    seed=DEFAULT_SEED,
) -> SpectrumReport:
    """Classification, exact spectrum when known, and compression eigenvalues with their distances."""
    classification = classify_all(W, tol, samples, seed)
    report = SpectrumReport(classification)
    report.compression = compression_eigenvalues(W, params, max_workers, constant_tol)
    normal = classification[Verdict.NORMAL_FIXED_POINT.value]
    if normal.holds:
        report.exact = normal_wco_spectrum(W, params, normal)
        report.jacobian_eigenvalues = normal.witness["jacobian_eigenvalues"]
        exact = sort_spectrum(report.exact.eigenvalues)
        report.hausdorff = hausdorff_distance(exact, report.compression)
        report.exact_to_compression = directed_distance(exact, report.compression)
    else:
        report.notes.append("no exact spectrum available")
    if classification[Verdict.SELF_ADJOINT.value].holds:
        imaginary = float(np.max(np.abs(report.compression.imag)))
        if imaginary > matrix_tol:
            report.notes.append(f"self-adjoint operator has compression eigenvalues off the real line by {imaginary:.3g}")
    return report


class UnitaryFixedPointCheck(NamedTuple):
    p: np.ndarray
    weight_modulus: float
    max_modulus_defect: float


def unitary_fixed_point_check(W: WcoSymbol, params: SpaceParams) -> UnitaryFixedPointCheck:
    """For unitary W fixing p: |f(p)| and max ||μ| - 1| over the exact eigenvalues."""
    if not classify_unitary(W).holds:
        raise DomainError("Operator is not unitary")
    p = fixed_point_in_ball(W.map)
    if p is None:
        raise DomainError("Unitary operator has no interior fixed point")
    system = normal_wco_spectrum(W, params)
    defect = float(np.max(np.abs(np.abs(system.eigenvalues) - 1.0)))
    return UnitaryFixedPointCheck(p, abs(W.weight_at(p)), defect)
