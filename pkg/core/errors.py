"""Typed errors for the exact-geometry engine.

Every error may carry a lattice ``location`` (a vertex tuple, optionally with
axes) so that reports can point at the offending square, cube or edge.
"""

from __future__ import annotations

from typing import Any, Optional


class GrassnetError(Exception):
    """Base class of all domain errors."""

    def __init__(self, message: str = "", location: Optional[Any] = None):
        self.location = location
        if location is not None:
            message = f"{message} at {format_location(location)}"
        super().__init__(message)


def format_location(location: Any) -> str:
    if isinstance(location, dict):
        return " ".join(f"{k}={_fmt(v)}" for k, v in location.items())
    return _fmt(location)


def _fmt(value: Any) -> str:
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    return str(value)


# ----------------------------------------------------------------------------
# Linear algebra
# ----------------------------------------------------------------------------

class LinalgError(GrassnetError):
    pass


class NoSolution(LinalgError):
    """The linear system X·a = b is inconsistent."""


class Singular(LinalgError, ZeroDivisionError):
    """A matrix that must be inverted has rank below its size."""


class ShapeMismatch(LinalgError, ValueError):
    pass


# ----------------------------------------------------------------------------
# Grassmannian geometry
# ----------------------------------------------------------------------------

class GeometryError(GrassnetError):
    pass


class AmbientMismatch(GeometryError, ValueError):
    pass


class NotAffine(GeometryError):
    """Trailing (r+1)×(r+1) block of the subspace is singular."""


# ----------------------------------------------------------------------------
# Degeneracies (violated general position)
# ----------------------------------------------------------------------------

class DegeneracyError(GrassnetError):
    pass


class DegenerateInput(DegeneracyError):
    pass


class DegenerateIntersection(DegeneracyError):
    pass


class DegenerateSlice(DegeneracyError):
    pass


class UnderDetermined(DegeneracyError):
    pass


class Inconsistent(DegeneracyError):
    pass


class SingularDenominator(DegeneracyError, Singular):
    """I − b^{jk} b^{kj} is not invertible: a singularity of the evolution."""


# ----------------------------------------------------------------------------
# Lattice storage
# ----------------------------------------------------------------------------

class LatticeError(GrassnetError):
    pass


class MissingVertex(LatticeError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class MissingEdge(LatticeError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class MissingPlaquette(LatticeError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class NotClosed(LatticeError):
    """Multiplicative one-form fails a^j(n+e_k)a^k(n) = a^k(n+e_j)a^j(n)."""


# ----------------------------------------------------------------------------
# Files / configuration
# ----------------------------------------------------------------------------

class FormatError(GrassnetError, ValueError):
    pass


class ConfigError(GrassnetError, ValueError):
    pass
