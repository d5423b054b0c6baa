"""Lorentzian resonances and the complex transfer functions built from them.

Profiles use a unit-peak convention: with the default normalization the
absorption profile equals 1 at line center, so a line strength is directly
the peak optical depth (amplitude attenuation ``exp(-strength)`` at
resonance).  Humidity, path length and the frequency factor of the
propagation exponent are all absorbed into that strength.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .catalog import AtmosphereConditions, LineCatalog, SpectralLine, scale_linewidth
from .errors import GridMismatchError

SPEED_OF_LIGHT = 2.99792458e8  # m/s


@dataclass(frozen=True)
class FrequencyGrid:
    """One-sided DFT grid: bin ``k`` sits at ``k * bin_spacing`` GHz."""

    bin_spacing: float  # GHz
    bin_count: int
    n_samples: int | None = None  # length of the real signal the grid came from

    def __post_init__(self):
        if not self.bin_spacing > 0:
            raise ValueError("bin_spacing must be > 0")
        if self.bin_count < 2:
            raise ValueError("bin_count must be >= 2")
        if self.n_samples is None:
            object.__setattr__(self, "n_samples", 2 * (self.bin_count - 1))
        elif self.n_samples // 2 + 1 != self.bin_count:
            raise ValueError("n_samples inconsistent with bin_count")

    @classmethod
    def for_signal(cls, n_samples: int, sample_spacing_ps: float) -> "FrequencyGrid":
        return cls(1000.0 / (n_samples * sample_spacing_ps), n_samples // 2 + 1, n_samples)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.bin_count) * self.bin_spacing

    @property
    def has_nyquist(self) -> bool:
        return self.n_samples % 2 == 0

    def matches(self, other: "FrequencyGrid") -> bool:
        return (
            self.bin_count == other.bin_count
            and self.n_samples == other.n_samples
            and np.isclose(self.bin_spacing, other.bin_spacing, rtol=1e-12, atol=0)
        )


@dataclass(frozen=True)
class ComplexResponse:
    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.bin_count,):
            raise ValueError("response length must equal grid.bin_count")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __mul__(self, other: "ComplexResponse") -> "ComplexResponse":
        if not self.grid.matches(other.grid):
            raise GridMismatchError("responses live on different grids")
        return ComplexResponse(self.grid, self.values * other.values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("freq_ghz,real,imag\n")
        for f, v in zip(self.grid.frequencies, self.values):
            buf.write(f"{float(f)!r},{float(v.real)!r},{float(v.imag)!r}\n")
        return buf.getvalue()


def lorentz_absorption(f, f_a: float, hwhm: float, reference_hwhm: float | None = None):
    """Absorption profile ``C*hwhm / ((f_a - f)**2 + hwhm**2)``.

    ``C`` is ``reference_hwhm`` (defaults to ``hwhm``), giving unit peak when
    the two widths coincide.
    """
    if not hwhm > 0:
        raise ValueError("hwhm must be > 0")
    c = hwhm if reference_hwhm is None else reference_hwhm
    x = f_a - np.asarray(f, dtype=float)
    return c * hwhm / (x * x + hwhm * hwhm)


def lorentz_dispersion(f, f_a: float, hwhm: float, reference_hwhm: float | None = None):
    """Dispersion profile ``C*(f_a - f) / ((f_a - f)**2 + hwhm**2)``, same ``C`` as absorption."""
    if not hwhm > 0:
        raise ValueError("hwhm must be > 0")
    c = hwhm if reference_hwhm is None else reference_hwhm
    x = f_a - np.asarray(f, dtype=float)
    return c * x / (x * x + hwhm * hwhm)


def line_hwhms(catalog: LineCatalog, conditions: AtmosphereConditions) -> np.ndarray:
    return np.array([scale_linewidth(ln.reference_fwhm, conditions) / 2.0 for ln in catalog])


def _check_aligned(catalog: LineCatalog, *arrays) -> None:
    for arr in arrays:
        if len(arr) != len(catalog):
            raise ValueError(
                f"per-line vector of length {len(arr)} does not match {len(catalog)} catalog lines"
            )


def ensemble_index(
    grid: FrequencyGrid,
    catalog: LineCatalog,
    strengths: Sequence[float],
    conditions: AtmosphereConditions,
) -> np.ndarray:
    """Complex index ``(n - 1) - j*kappa`` summed over all lines (offsets zero)."""
    _check_aligned(catalog, strengths)
    if any(s < 0 for s in strengths):
        raise ValueError("strengths must be nonnegative")
    f = grid.frequencies
    index = np.zeros(grid.bin_count, dtype=complex)
    for line, s, hw in zip(catalog, strengths, line_hwhms(catalog, conditions)):
        if s == 0:
            continue
        index += s * (
            lorentz_dispersion(f, line.center_frequency, hw)
            - 1j * lorentz_absorption(f, line.center_frequency, hw)
        )
    return index


def index_to_response(grid: FrequencyGrid, index: np.ndarray) -> ComplexResponse:
    """``exp(-j * index)`` with zero phase forced at DC (and Nyquist when present).

    A real impulse response needs real values at those bins; the dropped
    phase term is the index offset at zero frequency, which carries no
    information about the resonances.
    """
    exponent = -1j * np.asarray(index, dtype=complex)
    exponent[0] = exponent[0].real
    if grid.has_nyquist:
        exponent[-1] = exponent[-1].real
    return ComplexResponse(grid, np.exp(exponent))


def single_line_response(
    grid: FrequencyGrid, line: SpectralLine, strength: float, hwhm: float
) -> ComplexResponse:
    f = grid.frequencies
    index = strength * (
        lorentz_dispersion(f, line.center_frequency, hwhm)
        - 1j * lorentz_absorption(f, line.center_frequency, hwhm)
    )
    return index_to_response(grid, index)


def line_response_bank(
    grid: FrequencyGrid, line: SpectralLine, strengths: np.ndarray, hwhm: float
) -> np.ndarray:
    """Rows of ``single_line_response`` values, one per candidate strength."""
    f = grid.frequencies
    profile = lorentz_dispersion(f, line.center_frequency, hwhm) - 1j * lorentz_absorption(
        f, line.center_frequency, hwhm
    )
    exponent = -1j * np.outer(np.asarray(strengths, dtype=float), profile)
    exponent[:, 0] = exponent[:, 0].real
    if grid.has_nyquist:
        exponent[:, -1] = exponent[:, -1].real
    return np.exp(exponent)


def water_response(
    grid: FrequencyGrid,
    catalog: LineCatalog,
    strengths: Sequence[float],
    hwhms: Sequence[float],
) -> ComplexResponse:
    """Product of every line's response; the vacuum propagation factor is not included."""
    _check_aligned(catalog, strengths, hwhms)
    values = np.ones(grid.bin_count, dtype=complex)
    for line, s, hw in zip(catalog, strengths, hwhms):
        if s < 0:
            raise ValueError("strengths must be nonnegative")
        if s == 0:
            continue
        values = values * single_line_response(grid, line, s, hw).values
    return ComplexResponse(grid, values)


def vacuum_response(grid: FrequencyGrid, path_length: float) -> ComplexResponse:
    if path_length < 0:
        raise ValueError("path_length must be >= 0")
    f_hz = grid.frequencies * 1e9
    return ComplexResponse(grid, np.exp(-2j * np.pi * f_hz * path_length / SPEED_OF_LIGHT))
