"""Spectral-line catalogs: parsing, filtering and linewidth scaling.

Two input formats are understood.  The canonical one is a small CSV::

    # comment lines are skipped
    freq_ghz,intensity,fwhm_ghz
    556.936,1.0,6.0

where ``fwhm_ghz`` is optional (default 6 GHz).  The second is the fixed-width
record layout of the JPL molecular catalog, of which only two fields are read:
columns 1-13 (frequency, MHz) and columns 22-29 (log10 of the integrated
intensity).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from .errors import FormatError

DEFAULT_FWHM_GHZ = 6.0
DEFAULT_TEMPERATURE_INDEX = 0.68
STANDARD_PRESSURE_HPA = 1013.25
REFERENCE_TEMPERATURE_K = 296.0
# lines closer than this are treated as one blended resonance
MERGE_TOLERANCE_GHZ = 1e-6

CSV_HEADER = ("freq_ghz", "intensity", "fwhm_ghz")


@dataclass(frozen=True)
class SpectralLine:
    center_frequency: float  # GHz
    integrated_intensity: float
    nominal_strength: float
    reference_fwhm: float = DEFAULT_FWHM_GHZ  # GHz, at reference conditions

    def __post_init__(self):
        if not self.center_frequency > 0:
            raise ValueError(f"center_frequency must be > 0, got {self.center_frequency}")
        if not self.integrated_intensity >= 0 or not self.nominal_strength >= 0:
            raise ValueError("intensity and nominal strength must be nonnegative")
        if not self.reference_fwhm > 0:
            raise ValueError(f"reference_fwhm must be > 0, got {self.reference_fwhm}")


@dataclass(frozen=True)
class LineCatalog:
    lines: tuple[SpectralLine, ...] = ()
    source_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        freqs = [ln.center_frequency for ln in self.lines]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("catalog lines must be strictly ascending in frequency")

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    def __getitem__(self, i):
        return self.lines[i]

    @property
    def frequencies(self) -> list[float]:
        return [ln.center_frequency for ln in self.lines]


@dataclass(frozen=True)
class AtmosphereConditions:
    """Measurement conditions entering the linewidth law.

    The defaults describe the reference state itself, so linewidths come out
    unscaled unless pressure or temperature are changed.
    """

    pressure: float = STANDARD_PRESSURE_HPA  # hPa
    temperature: float = REFERENCE_TEMPERATURE_K  # K
    reference_pressure: float = STANDARD_PRESSURE_HPA
    reference_temperature: float = REFERENCE_TEMPERATURE_K
    temperature_index: float = DEFAULT_TEMPERATURE_INDEX
    relative_humidity: float = 0.5
    path_length: float = 1.0  # m

    def __post_init__(self):
        for name in ("pressure", "temperature", "reference_pressure",
                     "reference_temperature", "path_length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not 0.0 <= self.relative_humidity <= 1.0:
            raise ValueError("relative_humidity must lie in [0, 1]")
        if not 0.5 <= self.temperature_index <= 1.0:
            raise ValueError("temperature_index must lie in [0.5, 1.0]")

    @classmethod
    def from_dict(cls, d: dict | None) -> "AtmosphereConditions":
        if not d:
            return cls()
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown condition fields: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in d.items()})


def scale_linewidth(reference_fwhm: float, conditions: AtmosphereConditions) -> float:
    """Collision-broadened width at the measurement conditions (GHz).

    ``width = reference_fwhm * (p / p0) * (T0 / T) ** m``
    """
    c = conditions
    return (
        reference_fwhm
        * (c.pressure / c.reference_pressure)
        * (c.reference_temperature / c.temperature) ** c.temperature_index
    )


def build_catalog(rows: Iterable[tuple[float, float, float]], source_label: str = "") -> LineCatalog:
    """Sort, merge duplicates and normalize nominal strengths.

    ``rows`` holds ``(freq_ghz, intensity, fwhm_ghz)`` triples.  Nominal
    strength is intensity / frequency, scaled so the largest equals 1.
    """
    rows = sorted(rows, key=lambda r: r[0])
    if not rows:
        raise FormatError("catalog is empty")
    merged: list[list[float]] = []
    for f, inten, fwhm in rows:
        if merged and abs(f - merged[-1][0]) <= MERGE_TOLERANCE_GHZ:
            merged[-1][1] += inten
        else:
            merged.append([f, inten, fwhm])

    raw = [inten / f for f, inten, _ in merged]
    peak = max(raw)
    lines = []
    for (f, inten, fwhm), r in zip(merged, raw):
        lines.append(SpectralLine(f, inten, r / peak if peak > 0 else 0.0, fwhm))
    return LineCatalog(tuple(lines), source_label)


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, raw


def parse_catalog_csv(text: str, source_label: str = "csv") -> LineCatalog:
    records = list(_data_lines(text))
    if not records:
        raise FormatError("catalog is empty")
    header_lineno, header_raw = records[0]
    header = [h.strip() for h in next(csv.reader([header_raw]))]
    if header[:2] != ["freq_ghz", "intensity"] or len(header) > 3 or (
        len(header) == 3 and header[2] != "fwhm_ghz"
    ):
        raise FormatError(f"line {header_lineno}: expected header freq_ghz,intensity[,fwhm_ghz]")

    rows = []
    for row_no, (lineno, raw) in enumerate(records[1:], start=1):
        cells = [c.strip() for c in next(csv.reader([raw]))]
        if len(cells) not in (2, 3) or len(cells) > len(header):
            raise FormatError(f"row {row_no} (line {lineno}): expected {len(header)} fields")
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise FormatError(f"row {row_no} (line {lineno}): non-numeric field") from None
        if not all(math.isfinite(v) for v in values):
            raise FormatError(f"row {row_no} (line {lineno}): non-finite field")
        freq, inten = values[0], values[1]
        fwhm = values[2] if len(values) == 3 else DEFAULT_FWHM_GHZ
        if freq <= 0:
            raise FormatError(f"row {row_no} (line {lineno}): frequency must be positive")
        if inten < 0:
            raise FormatError(f"row {row_no} (line {lineno}): negative intensity")
        if fwhm <= 0:
            raise FormatError(f"row {row_no} (line {lineno}): fwhm must be positive")
        rows.append((freq, inten, fwhm))
    return build_catalog(rows, source_label)


def parse_catalog_jpl(text: str, source_label: str = "jpl") -> LineCatalog:
    rows = []
    record_no = 0
    for lineno, raw in _data_lines(text):
        record_no += 1
        if len(raw) < 29:
            raise FormatError(f"record {record_no} (line {lineno}): shorter than 29 characters")
        try:
            freq_mhz = float(raw[0:13])
            log_intensity = float(raw[21:29])
        except ValueError:
            raise FormatError(f"record {record_no} (line {lineno}): unparsable numeric field") from None
        if not (math.isfinite(freq_mhz) and math.isfinite(log_intensity)) or freq_mhz <= 0:
            raise FormatError(f"record {record_no} (line {lineno}): invalid frequency or intensity")
        rows.append((freq_mhz / 1000.0, 10.0 ** log_intensity, DEFAULT_FWHM_GHZ))
    if not rows:
        raise FormatError("catalog is empty")
    return build_catalog(rows, source_label)


def format_catalog_csv(catalog: LineCatalog) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for ln in catalog:
        buf.write(f"{ln.center_frequency!r},{ln.integrated_intensity!r},{ln.reference_fwhm!r}\n")
    return buf.getvalue()


def filter_lines(
    catalog: LineCatalog, f_min: float, f_max: float, relative_threshold: float
) -> LineCatalog:
    """Keep in-band lines whose nominal strength reaches a fraction of the band maximum."""
    if not 0 <= f_min < f_max:
        raise ValueError("need 0 <= f_min < f_max")
    if not 0 <= relative_threshold <= 1:
        raise ValueError("relative_threshold must lie in [0, 1]")
    in_band = [ln for ln in catalog if f_min <= ln.center_frequency <= f_max]
    if not in_band:
        return LineCatalog((), catalog.source_label)
    floor = relative_threshold * max(ln.nominal_strength for ln in in_band)
    return LineCatalog(
        tuple(ln for ln in in_band if ln.nominal_strength >= floor), catalog.source_label
    )


def load_catalog(path, fmt: str | None = None) -> LineCatalog:
    """Read a catalog file; ``fmt`` is ``"csv"``, ``"jpl"`` or inferred from the suffix."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "jpl"
    if fmt == "csv":
        return parse_catalog_csv(text, source_label=path.name)
    if fmt == "jpl":
        return parse_catalog_jpl(text, source_label=path.name)
    raise ValueError(f"unknown catalog format {fmt!r}")


def with_fwhm(catalog: LineCatalog, fwhm: float) -> LineCatalog:
    """Copy of ``catalog`` with every reference width set to ``fwhm``."""
    return LineCatalog(tuple(replace(ln, reference_fwhm=fwhm) for ln in catalog), catalog.source_label)
