#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command-line front end: ``wco-lab <command> --job job.json``.

A job is one JSON document naming the space, one operator (two for
``compose``), optional tolerance overrides and a seed. The report is one JSON
document with complex numbers written as ``[re, im]``. Exit codes: 2 for
malformed jobs, 3 for inputs outside the mathematical domain, 4 for
numerical failures.
"""

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from wcolab.analysis.ball_maps import (
    LinearFractionalMap,
    automorphism_identity_residual,
    is_automorphism,
    make_lfm,
    moebius_involution,
)
from wcolab.analysis.classify import (
    check_adjoint_inverse_pair,
    classify_all,
    is_adjoint_pair,
    make_normal,
    make_parabolic_1d,
    make_self_adjoint,
    make_unitary,
)
from wcolab.analysis.kernels import check_kernel_transform, check_reciprocal_identity
from wcolab.analysis.multiindex_basis import SpaceParams, enumerate_multiindices
from wcolab.analysis.power_series import TruncatedSeries
from wcolab.analysis.sampling import ball_samples
from wcolab.analysis.spectra import spectrum_report
from wcolab.analysis.wco_core import (
    AffineRatioFactor,
    KernelWeight,
    QuotientWeight,
    SeriesWeight,
    WcoSymbol,
    adjoint_duality_residual,
    identity_symbol,
    make_kernel_lfm,
    make_wco,
    product_law_residual,
    symbols_equal,
    wco_adjoint_symbol,
    wco_compress,
    wco_product,
)
from wcolab.config import (
    DEFAULT_DEGREE,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    LOG_LEVEL,
    MAX_WORKERS,
    Tolerances,
)
from wcolab.errors import DomainError, JobParseError, NumericalError, WcoLabError

logger = logging.getLogger(__name__)

COMMANDS = ("classify", "adjoint", "compose", "verify", "spectrum", "compress")
EXIT_PARSE, EXIT_DOMAIN, EXIT_NUMERICAL = 2, 3, 4

MAP_FORMS = ("map", "moebius", "linear", "parabolic1d", "normal_fixed_point", "self_adjoint")
WEIGHT_FORMS = ("kernel", "series", "quotient", "normalized_kernel_at_inverse_zero", "kernel_at_sigma_zero")
JOB_KEYS = ("command", "space", "operator", "second_operator", "tolerances", "seed", "samples")
SPACE_KEYS = ("n", "gamma", "degree_cap")
FACTOR_KEYS = ("u", "v", "s", "t", "p")
BODY_KEYS = {
    "map": ("A", "B", "C", "d"),
    "normal_fixed_point": ("p", "A", "alpha"),
    "self_adjoint": ("c", "A", "alpha"),
    "kernel": ("alpha", "c"),
    "quotient": ("alpha", "factors"),
}


@dataclass
class Job:
    command: str
    params: SpaceParams
    operator: WcoSymbol
    second_operator: WcoSymbol = None
    tolerances: Tolerances = Tolerances()
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES


# --------------------------------------------------------------------------- JSON in
def _number(value, what) -> complex:
    if isinstance(value, bool):
        raise JobParseError(f"{what}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        return complex(value[0], value[1])
    raise JobParseError(f"{what}: expected a number or [re, im], got {value!r}")


def _real(value, what) -> float:
    z = _number(value, what)
    if z.imag != 0:
        raise JobParseError(f"{what}: expected a real number, got {value!r}")
    return z.real


def _vector(value, n, what) -> np.ndarray:
    if not isinstance(value, (list, tuple)):
        raise JobParseError(f"{what}: expected a list of {n} numbers")
    out = np.array([_number(x, f"{what}[{i}]") for i, x in enumerate(value)], dtype=complex)
    if out.shape != (n,):
        raise JobParseError(f"{what}: expected {n} entries, got {len(value)}")
    return out


def _matrix(value, n, what) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise JobParseError(f"{what}: expected {n} rows")
    return np.array([_vector(row, n, f"{what}[{i}]") for i, row in enumerate(value)])


def _require(mapping, key, what):
    if not isinstance(mapping, dict):
        raise JobParseError(f"{what}: expected an object")
    if key not in mapping:
        raise JobParseError(f"{what}: missing key {key!r}")
    return mapping[key]


def _check_keys(mapping, allowed, what):
    if not isinstance(mapping, dict):
        raise JobParseError(f"{what}: expected an object")
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise JobParseError(f"{what}: unknown keys {unknown}; allowed are {list(allowed)}")
    return mapping


def _single_key(mapping, forms, what, extra=()):
    _check_keys(mapping, tuple(forms) + tuple(extra), what)
    keys = [k for k in mapping if k in forms]
    if len(keys) != 1:
        raise JobParseError(f"{what}: expected exactly one of {list(forms)}, got {sorted(mapping)}")
    return keys[0]


def _integer(value, what) -> int:
    x = _real(value, what)
    if not x.is_integer():
        raise JobParseError(f"{what}: expected an integer, got {value!r}")
    return int(x)


def parse_space(payload, degree=None) -> SpaceParams:
    space = _check_keys(_require(payload, "space", "job"), SPACE_KEYS, "space")
    try:
        n = _integer(_require(space, "n", "space"), "space.n")
        gamma = _real(_require(space, "gamma", "space"), "space.gamma")
        cap = degree if degree is not None else _integer(space.get("degree_cap", DEFAULT_DEGREE), "space.degree_cap")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, WcoLabError):
            raise
        raise JobParseError(f"space: {exc}") from exc
    return SpaceParams(n, gamma, cap)


def _parse_factor(raw, n, i):
    what = f"weight.quotient.factors[{i}]"
    _check_keys(raw, FACTOR_KEYS, what)
    return AffineRatioFactor(
        _number(_require(raw, "u", what), f"{what}.u"),
        tuple(_vector(_require(raw, "v", what), n, f"{what}.v")),
        _number(_require(raw, "s", what), f"{what}.s"),
        tuple(_vector(_require(raw, "t", what), n, f"{what}.t")),
        _real(_require(raw, "p", what), f"{what}.p"),
    )


def _parse_weight(raw, phi, params, self_map_tol):
    n, gamma = params.n, params.gamma
    if raw is None:
        return KernelWeight.constant(n)
    form = _single_key(raw, WEIGHT_FORMS, "weight")
    body = raw[form]
    if form in BODY_KEYS:
        _check_keys(body, BODY_KEYS[form], f"weight.{form}")
    if form == "kernel":
        return KernelWeight(
            _number(_require(body, "alpha", "weight.kernel"), "weight.kernel.alpha"),
            _vector(_require(body, "c", "weight.kernel"), n, "weight.kernel.c"),
        )
    if form == "series":
        if not isinstance(body, list) or len(body) > params.size:
            raise JobParseError(f"weight.series: expected at most {params.size} coefficients")
        coeffs = np.zeros(params.size, dtype=complex)
        coeffs[: len(body)] = [_number(x, f"weight.series[{i}]") for i, x in enumerate(body)]
        return SeriesWeight(TruncatedSeries(params, coeffs))
    if form == "quotient":
        factors = _require(body, "factors", "weight.quotient")
        if not isinstance(factors, list):
            raise JobParseError("weight.quotient.factors: expected a list")
        return QuotientWeight(
            _number(_require(body, "alpha", "weight.quotient"), "weight.quotient.alpha"),
            tuple(_parse_factor(f, n, i) for i, f in enumerate(factors)),
            n,
        )
    if form == "normalized_kernel_at_inverse_zero":
        lam = _number(body, "weight.normalized_kernel_at_inverse_zero")
        return make_unitary(phi, gamma, lam, self_map_tol).weight
    return make_kernel_lfm(phi, gamma, _number(body, "weight.kernel_at_sigma_zero"), self_map_tol).weight


def parse_operator(raw, params, what="operator", tolerances=None) -> WcoSymbol:
    """Build a symbol from the job's operator object, admitting maps up to ``tolerances.self_map``."""
    n, gamma = params.n, params.gamma
    self_map_tol = (tolerances or Tolerances()).self_map
    form = _single_key(raw, MAP_FORMS, what, extra=("weight",))
    body = raw[form]
    if form in BODY_KEYS:
        _check_keys(body, BODY_KEYS[form], f"{what}.{form}")
    if form == "normal_fixed_point":
        return make_normal(
            _vector(_require(body, "p", form), n, f"{form}.p"),
            _matrix(_require(body, "A", form), n, f"{form}.A"),
            _number(body.get("alpha", 1.0), f"{form}.alpha"),
            gamma,
            self_map_tol,
        )
    if form == "self_adjoint":
        return make_self_adjoint(
            _vector(_require(body, "c", form), n, f"{form}.c"),
            _matrix(_require(body, "A", form), n, f"{form}.A"),
            _real(body.get("alpha", 1.0), f"{form}.alpha"),
            gamma,
            self_map_tol,
        )
    if form == "parabolic1d":
        if n != 1:
            raise DomainError("parabolic1d maps live in dimension 1")
        symbol = make_parabolic_1d(_number(body, "parabolic1d"), gamma, self_map_tol)
        if "weight" not in raw:
            return symbol
        phi = symbol.map
    elif form == "map":
        phi = make_lfm(
            _matrix(_require(body, "A", "map"), n, "map.A"),
            _vector(_require(body, "B", "map"), n, "map.B"),
            _vector(_require(body, "C", "map"), n, "map.C"),
            _number(_require(body, "d", "map"), "map.d"),
        )
    elif form == "moebius":
        phi = moebius_involution(_vector(body, n, "moebius"))
    else:
        phi = LinearFractionalMap.linear(_matrix(body, n, "linear"))
    return make_wco(_parse_weight(raw.get("weight"), phi, params, self_map_tol), phi, gamma, self_map_tol)


def parse_job(payload, command, degree=None, tolerance_overrides=None, seed=None) -> Job:
    """Validate a job document; CLI flags win over values in the document."""
    if not isinstance(payload, dict):
        raise JobParseError("Job must be a JSON object")
    _check_keys(payload, JOB_KEYS, "job")
    if payload.get("command", command) != command:
        logger.warning("Job names command %r; running %r", payload["command"], command)
    params = parse_space(payload, degree)
    overrides = payload.get("tolerances") or {}
    if not isinstance(overrides, dict):
        raise JobParseError("tolerances: expected an object")
    overrides = dict(overrides)
    overrides.update({k: v for k, v in (tolerance_overrides or {}).items() if v is not None})
    tolerances = Tolerances.from_overrides(overrides)
    job_seed = seed if seed is not None else payload.get("seed", DEFAULT_SEED)
    if isinstance(job_seed, bool) or not isinstance(job_seed, int):
        raise JobParseError(f"seed must be an integer, got {job_seed!r}")
    samples = payload.get("samples", DEFAULT_SAMPLES)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        raise JobParseError(f"samples must be a positive integer, got {samples!r}")
    operator = parse_operator(_require(payload, "operator", "job"), params, tolerances=tolerances)
    second = payload.get("second_operator")
    if command == "compose" and second is None:
        raise JobParseError("compose needs a second_operator")
    return Job(
        command,
        params,
        operator,
        parse_operator(second, params, "second_operator", tolerances) if second is not None else None,
        tolerances,
        job_seed,
        samples,
    )


def load_job(path) -> dict:
    try:
        with Path(path).open("r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise JobParseError(f"Cannot read job file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise JobParseError(f"Job file {path} is not valid JSON: {exc}") from exc


# --------------------------------------------------------------------------- JSON out
def to_jsonable(value):
    """Complex → [re, im]; arrays → nested lists; non-finite floats → strings."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    return value


def classification_to_dict(c) -> dict:
    return {
        "verdict": c.verdict.value,
        "holds": c.holds,
        "witness": c.witness,
        "residual": c.residual,
        "reason": c.reason,
    }


def weight_to_dict(weight) -> dict:
    if isinstance(weight, KernelWeight):
        return {"kernel": {"alpha": weight.alpha, "c": weight.c}}
    if isinstance(weight, QuotientWeight):
        factors = [{"u": f.u, "v": list(f.v), "s": f.s, "t": list(f.t), "p": f.p} for f in weight.factors]
        return {"quotient": {"alpha": weight.alpha, "factors": factors}}
    return {"series": weight.series.coeffs}


def symbol_to_dict(W: WcoSymbol) -> dict:
    """Operator object in the job format, so reports can be fed back as jobs."""
    phi = W.map.normalized()
    return {
        "map": {"A": phi.A, "B": phi.B, "C": phi.C, "d": phi.d},
        "weight": weight_to_dict(W.weight),
    }


# --------------------------------------------------------------------------- commands
def _classify(job):
    W, tol = job.operator, job.tolerances.symbol
    results = classify_all(W, tol, job.samples, job.seed)
    report = {
        "verdicts": {name: c.holds for name, c in results.items()},
        "classifications": {name: classification_to_dict(c) for name, c in results.items()},
        "identity": symbols_equal(W, identity_symbol(W.n, W.gamma), job.samples, job.seed, tol)._asdict(),
    }
    if job.second_operator is not None:
        second, samples, seed = job.second_operator, job.samples, job.seed
        report["adjoint_inverse_pair"] = check_adjoint_inverse_pair(W, second, tol, samples, seed)._asdict()
        report["adjoint_pair"] = is_adjoint_pair(second, W, tol, samples, seed)._asdict()
    return report


def _adjoint(job):
    return {"operator": symbol_to_dict(wco_adjoint_symbol(job.operator, job.tolerances.symbol))}


def _compose(job):
    product = wco_product(job.operator, job.second_operator)
    return {
        "operator": symbol_to_dict(product),
        "product_law_residual": product_law_residual(job.operator, job.second_operator, job.samples, job.seed),
    }


def _check(label, run, tol):
    try:
        residual = run()
    except WcoLabError as exc:
        logger.debug("Skipping %s: %s", label, exc)
        return {"skipped": str(exc)}
    if isinstance(residual, tuple):
        residual = max(residual)
    return {"residual": residual, "passed": residual <= tol}


def _verify(job):
    W, tol, samples, seed = job.operator, job.tolerances.symbol, job.samples, job.seed
    phi = W.map
    a = ball_samples(W.n, 1, seed + 2)[0]
    second = job.second_operator or W
    checks = {
        "kernel_transform": lambda: check_kernel_transform(phi, W.gamma, a, samples, seed),
        "adjoint_duality": lambda: adjoint_duality_residual(W, samples, seed),
        "product_law": lambda: product_law_residual(W, second, samples, seed),
    }
    if is_automorphism(phi):
        checks["automorphism_identity"] = lambda: automorphism_identity_residual(phi, samples, seed)
        checks["reciprocal_identity"] = lambda: check_reciprocal_identity(phi, W.gamma, samples, seed)
    report = {name: _check(name, run, tol) for name, run in checks.items()}
    for name in ("automorphism_identity", "reciprocal_identity"):
        report.setdefault(name, {"skipped": "map is not an automorphism of the ball"})
    return {"checks": report}


def _spectrum(job):
    tol = job.tolerances
    report = spectrum_report(
        job.operator, job.params, tol.symbol, tol.matrix, MAX_WORKERS, tol.constant_term, job.samples, job.seed
    )
    out = {
        "verdicts": {name: c.holds for name, c in report.classification.items()},
        "compression_eigenvalues": report.compression,
        "notes": report.notes,
    }
    if report.exact is not None:
        frame = report.exact.to_frame().sort(["modulus", "argument"], descending=[True, False])
        out["exact"] = {
            "eigenvalues": frame.to_dicts(),
            "limit_points": report.exact.limit_points,
            "jacobian_eigenvalues": report.jacobian_eigenvalues,
            "hausdorff": report.hausdorff,
            "exact_to_compression": report.exact_to_compression,
        }
    return out


def _compress(job):
    matrix = wco_compress(job.operator, job.params, MAX_WORKERS, job.tolerances.constant_term)
    return {
        "size": matrix.shape[0],
        "multiindices": enumerate_multiindices(job.params.n, job.params.degree_cap),
        "matrix": matrix,
    }


HANDLERS = {
    "classify": _classify,
    "adjoint": _adjoint,
    "compose": _compose,
    "verify": _verify,
    "spectrum": _spectrum,
    "compress": _compress,
}


def run(job: Job) -> dict:
    """Execute a parsed job and return the JSON-ready report."""
    start = time.perf_counter()
    body = HANDLERS[job.command](job)
    report = {
        "command": job.command,
        "space": {"n": job.params.n, "gamma": job.params.gamma, "degree_cap": job.params.degree_cap},
        "seed": job.seed,
        "tolerances": asdict(job.tolerances),
        "result": body,
        "timing": {"seconds": time.perf_counter() - start},
    }
    return to_jsonable(report)


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


# --------------------------------------------------------------------------- entry point
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--job", type=Path, required=True, help="Job description (JSON)")
    common.add_argument("--out", type=Path, default=None, help="Write the report here instead of stdout")
    common.add_argument("--degree", type=int, default=None, help="Override space.degree_cap")
    common.add_argument("--tol-symbol", type=float, default=None)
    common.add_argument("--tol-matrix", type=float, default=None)
    common.add_argument("--tol-self-map", type=float, default=None)
    common.add_argument("--tol-constant", type=float, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--verbose", "-v", action="store_true")

    parser = argparse.ArgumentParser(
        prog="wco-lab",
        description="Weighted composition operators on the kernel spaces of the unit ball",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "classify": "Run every classifier",
        "adjoint": "Adjoint symbol",
        "compose": "Product of operator and second_operator",
        "verify": "Identity residual suite",
        "spectrum": "Exact and compressed spectra",
        "compress": "Dump the compression matrix",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        job = parse_job(
            load_job(args.job),
            args.command,
            degree=args.degree,
            tolerance_overrides={
                "symbol": args.tol_symbol,
                "matrix": args.tol_matrix,
                "self_map": args.tol_self_map,
                "constant_term": args.tol_constant,
            },
            seed=args.seed,
        )
        text = dumps(run(job))
    except JobParseError as exc:
        logger.exception("Malformed job %s", args.job)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        logger.exception("Domain violation in job %s", args.job)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericalError as exc:
        logger.exception("Numerical failure in job %s", args.job)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if args.out is not None:
        args.out.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0
