#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Exception types raised by wco-lab. The CLI maps them to exit codes."""


class WcoLabError(Exception):
    """Base class for all wco-lab errors."""


class DomainError(WcoLabError, ValueError):
    """Input outside the mathematical domain (point off the ball, γ ≤ 0, ...)."""


class AdjointNotWcoError(DomainError):
    """The adjoint of the operator is not a weighted composition operator."""


class NumericalError(WcoLabError, ArithmeticError):
    """A computation hit a singularity or the eigensolver failed."""


class CoefficientRangeError(NumericalError, OverflowError):
    """A kernel coefficient left the floating point range."""


class JobParseError(WcoLabError, ValueError):
    """A job description could not be parsed."""
