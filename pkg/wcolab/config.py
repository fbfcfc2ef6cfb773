#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Runtime defaults for wco-lab.

Values are read once from the environment (a ``.env`` file in the working
directory is honoured) and exposed as module-level constants. Jobs that need
different tolerances build a :class:`Tolerances` from the defaults with
:meth:`Tolerances.from_overrides`.
"""

import logging
import os
from dataclasses import dataclass, fields, replace

from dotenv import load_dotenv

from wcolab.errors import JobParseError

load_dotenv()

logger = logging.getLogger(__name__)


def _env_number(name, default, cast=float):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return cast(raw)
    except ValueError:
        logger.exception("Ignoring malformed %s=%r, using %r", name, raw, default)
        return default


DEFAULT_DEGREE = _env_number("WCO_LAB_DEGREE", 15, int)
SYMBOL_TOL = _env_number("WCO_LAB_TOL_SYMBOL", 1e-9)
MATRIX_TOL = _env_number("WCO_LAB_TOL_MATRIX", 1e-8)
SELF_MAP_TOL = _env_number("WCO_LAB_TOL_SELF_MAP", 1e-9)
CONSTANT_TERM_TOL = _env_number("WCO_LAB_TOL_CONSTANT", 1e-12)
SELF_MAP_SAMPLES = _env_number("WCO_LAB_SELF_MAP_SAMPLES", 4096, int)
DEFAULT_SAMPLES = _env_number("WCO_LAB_SAMPLES", 100, int)
DEFAULT_SEED = _env_number("WCO_LAB_SEED", 0, int)
MAX_WORKERS = _env_number("WCO_LAB_MAX_WORKERS", 4, int)
LOG_LEVEL = os.getenv("WCO_LAB_LOG_LEVEL", "WARNING").upper()

# Denominators of linear fractional maps below this are treated as vanishing.
DENOMINATOR_TOL = 1e-12

# Sample points for residual checks stay inside this radius.
SAMPLE_RADIUS = 0.9


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances of one job; defaults come from the environment."""

    symbol: float = SYMBOL_TOL
    matrix: float = MATRIX_TOL
    self_map: float = SELF_MAP_TOL
    constant_term: float = CONSTANT_TERM_TOL

    @classmethod
    def from_overrides(cls, overrides=None):
        """
        Return the defaults with selected entries replaced.

        Parameters
        ----------
        overrides : dict or None
            Mapping with any of ``symbol``, ``matrix``, ``self_map`` and
            ``constant_term``. ``None`` values are ignored.

        Returns
        -------
        Tolerances
        """
        base = cls()
        if not overrides:
            return base
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise JobParseError(f"Unknown tolerance keys: {sorted(unknown)}")
        values = {}
        for key, value in overrides.items():
            if value is None:
                continue
            try:
                value = float(value)
            except (TypeError, ValueError) as exc:
                raise JobParseError(f"Tolerance {key!r} must be a number") from exc
            if not value > 0:
                raise JobParseError(f"Tolerance {key!r} must be positive")
            values[key] = value
        return replace(base, **values)
