"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class TdsVaporError(Exception):
    """Base class for every error raised by the package."""


class FormatError(TdsVaporError, ValueError):
    """Malformed input file or record."""


class GridMismatchError(TdsVaporError, ValueError):
    """Two spectra/responses/signals live on incompatible grids."""


class NumericalError(TdsVaporError, ArithmeticError):
    """A computation cannot proceed (empty window energy, corrupt spectrum, ...)."""
