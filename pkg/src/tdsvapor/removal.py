"""Line-by-line strength tuning that removes resonance ringing from a pulse.

Every catalog line in the interrogated band is tried at each candidate
strength: the candidate's resonance response is divided out of the current
spectrum, the result is transformed back, and its fluctuation ratio is
measured against a Gaussian window on the main pulse.  The best candidate
(zero included) is applied permanently before moving to the next line.
Passes over the line list repeat until the ratio stops improving.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .catalog import AtmosphereConditions, LineCatalog, SpectralLine, filter_lines
from .errors import GridMismatchError
from .lineshape import ComplexResponse, line_hwhms, line_response_bank
from .signal import (
    Spectrum,
    TimeSignal,
    WindowSpec,
    band_energy,
    find_main_peak,
    fluctuation_ratio,
    fluctuation_ratios,
    forward_transform,
    gaussian_window,
    inverse_transform,
    mse_percent,
)

REPORT_SCHEMA = 1

SKIP_BELOW_THRESHOLD = "below_threshold"
SKIP_NO_IMPROVEMENT = "no_improvement"


def default_strength_grid(points: int = 60, low: float = 0.01, high: float = 3.0) -> tuple[float, ...]:
    """Zero followed by ``points`` log-spaced multipliers from ``low`` to ``high``."""
    if points < 1 or not 0 < low < high:
        raise ValueError("need points >= 1 and 0 < low < high")
    return (0.0,) + tuple(float(v) for v in np.geomspace(low, high, points))


@dataclass(frozen=True)
class RemovalConfig:
    """Tuning-search parameters.

    ``strength_grid`` holds multipliers of a per-line scale when
    ``relative_grid`` is set: the strongest in-band line gets scale
    ``peak_optical_depth`` and weaker lines proportionally less, following
    their nominal strengths.  With ``relative_grid=False`` the grid values
    are used as absolute strengths for every line.
    """

    band_min: float = 0.0  # GHz
    band_max: float = 4000.0  # GHz
    relative_threshold: float = 0.01
    strength_grid: tuple[float, ...] = field(default_factory=default_strength_grid)
    relative_grid: bool = True
    peak_optical_depth: float = 3.0
    window_fwhm: float = 3.0  # ps
    max_iterations: int = 5
    min_ratio_decrease: float = 1e-4
    # a nonzero strength must beat the zero candidate by this relative margin
    acceptance_margin: float = 1e-3
    recenter_window: bool = False
    conditions: AtmosphereConditions = field(default_factory=AtmosphereConditions)

    def __post_init__(self):
        grid = tuple(float(v) for v in self.strength_grid)
        object.__setattr__(self, "strength_grid", grid)
        if not grid or grid[0] != 0.0:
            raise ValueError("strength_grid must start with 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("strength_grid must be strictly ascending")
        if not 0 <= self.band_min < self.band_max:
            raise ValueError("need 0 <= band_min < band_max")
        if not 0 <= self.relative_threshold <= 1:
            raise ValueError("relative_threshold must lie in [0, 1]")
        if not self.window_fwhm > 0 or not self.peak_optical_depth > 0:
            raise ValueError("window_fwhm and peak_optical_depth must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0 < self.min_ratio_decrease < 1:
            raise ValueError("min_ratio_decrease must lie in (0, 1)")
        if not 0 <= self.acceptance_margin < 1:
            raise ValueError("acceptance_margin must lie in [0, 1)")

    @classmethod
    def from_dict(cls, d: dict) -> "RemovalConfig":
        d = dict(d)
        points = d.pop("grid_points", None)
        low = d.pop("grid_min_fraction", 0.01)
        high = d.pop("grid_max_fraction", 3.0)
        if "grid_max_depth" in d:
            d["peak_optical_depth"] = d.pop("grid_max_depth")
        if points is not None and "strength_grid" not in d:
            d["strength_grid"] = default_strength_grid(int(points), float(low), float(high))
        if "conditions" in d:
            d["conditions"] = AtmosphereConditions.from_dict(d["conditions"])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["strength_grid"] = list(self.strength_grid)
        return d


@dataclass(frozen=True)
class LineTuningRecord:
    line_index: int
    freq_ghz: float
    chosen_strength: float
    ratio_before: float
    ratio_after: float
    skipped: str | None = None

    def to_dict(self) -> dict:
        return {
            "line_index": self.line_index,
            "freq_ghz": self.freq_ghz,
            "chosen_strength": self.chosen_strength,
            "ratio_before": self.ratio_before,
            "ratio_after": self.ratio_after,
            "skipped": self.skipped,
        }


@dataclass
class RemovalReport:
    line_frequencies: list[float] = field(default_factory=list)
    iterations: list[list[LineTuningRecord]] = field(default_factory=list)
    ratio_trace: list[float] = field(default_factory=list)
    cumulative_strengths: list[float] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "note": self.note,
            "config": self.config,
            "line_frequencies": self.line_frequencies,
            "iterations": [{"lines": [r.to_dict() for r in it]} for it in self.iterations],
            "ratio_trace": self.ratio_trace,
            "cumulative_strengths": self.cumulative_strengths,
            "metrics": self.metrics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"


def deconvolve_line(spectrum: Spectrum, line_response: ComplexResponse) -> Spectrum:
    if not spectrum.grid.matches(line_response.grid):
        raise GridMismatchError("spectrum and line response are on different grids")
    return spectrum.with_values(spectrum.values / line_response.values)


def line_candidates(line: SpectralLine, band_peak_nominal: float, config: RemovalConfig) -> np.ndarray:
    grid = np.asarray(config.strength_grid)
    if not config.relative_grid:
        return grid
    scale = config.peak_optical_depth * line.nominal_strength / band_peak_nominal
    return grid * scale


def _pick(ratios: np.ndarray, candidates: np.ndarray, margin: float) -> int:
    """Index of the minimum ratio; ties go to the smaller strength.

    Candidates are ascending and ``argmin`` returns the first minimum, which
    is the tie rule.  The zero candidate (index 0) also wins unless the best
    one improves on it by more than ``margin`` (relative).
    """
    best = int(np.argmin(ratios))
    if best != 0 and candidates[0] == 0 and ratios[best] >= ratios[0] * (1.0 - margin):
        return 0
    return best


def tune_line(
    current_spectrum: Spectrum,
    line: SpectralLine,
    hwhm: float,
    config: RemovalConfig,
    window: WindowSpec,
    candidates: Sequence[float] | None = None,
    line_index: int = 0,
) -> tuple[float, float, LineTuningRecord]:
    """Grid-search one line's strength against the fluctuation ratio.

    Returns ``(chosen_strength, ratio_after, record)``.  ``candidates``
    defaults to ``config.strength_grid`` taken as absolute strengths.
    """
    if candidates is None:
        candidates = config.strength_grid
    candidates = np.asarray(candidates, dtype=float)
    bank = line_response_bank(current_spectrum.grid, line, candidates, hwhm)
    trial = np.fft.irfft(current_spectrum.values[None, :] / bank, current_spectrum.source_length, axis=-1)
    g = gaussian_window(current_spectrum.times, window)
    ratios = fluctuation_ratios(trial, g)
    best = _pick(ratios, candidates, config.acceptance_margin)

    zero_ratio = float(ratios[0]) if candidates[0] == 0 else float(
        fluctuation_ratios(np.fft.irfft(current_spectrum.values, current_spectrum.source_length), g)[0]
    )
    chosen = float(candidates[best])
    ratio_after = float(ratios[best])
    record = LineTuningRecord(
        line_index=line_index,
        freq_ghz=line.center_frequency,
        chosen_strength=chosen,
        ratio_before=zero_ratio,
        ratio_after=ratio_after,
        skipped=None if chosen > 0 else SKIP_NO_IMPROVEMENT,
    )
    return chosen, ratio_after, record


def remove_water_vapor(
    signal: TimeSignal,
    catalog: LineCatalog,
    config: RemovalConfig | None = None,
    reference: TimeSignal | None = None,
) -> tuple[TimeSignal, RemovalReport]:
    """Remove resonance ringing from ``signal`` using the lines of ``catalog``.

    ``reference`` (a clean signal on the same grid) is optional and only
    feeds the ``mse_percent`` metric.
    """
    config = config or RemovalConfig()
    window = WindowSpec(find_main_peak(signal), config.window_fwhm)
    spectrum = forward_transform(signal)
    initial_ratio = fluctuation_ratio(signal, window)

    in_band = filter_lines(catalog, config.band_min, config.band_max, 0.0)
    working = filter_lines(catalog, config.band_min, config.band_max, config.relative_threshold)
    report = RemovalReport(
        line_frequencies=working.frequencies,
        ratio_trace=[initial_ratio],
        cumulative_strengths=[0.0] * len(working),
        config=config.to_dict(),
    )
    energy_before = band_energy(spectrum, config.band_min, config.band_max)

    if len(working) == 0:
        report.note = "no catalog lines in band after filtering; signal returned unchanged"
        report.metrics = _metrics(initial_ratio, initial_ratio, energy_before, energy_before,
                                  signal, signal, reference)
        return signal, report

    hwhms = line_hwhms(working, config.conditions)
    peak_nominal = max(ln.nominal_strength for ln in working)
    candidates = [line_candidates(ln, peak_nominal, config) for ln in working]
    weak = [ln for ln in in_band if ln not in set(working.lines)]
    current = spectrum
    ratio = initial_ratio

    for _ in range(config.max_iterations):
        start_ratio = ratio
        records: list[LineTuningRecord] = []
        if config.recenter_window:
            window = WindowSpec(find_main_peak(inverse_transform(current)), config.window_fwhm)
            ratio = fluctuation_ratio(inverse_transform(current), window)
            start_ratio = ratio
        for i, line in enumerate(working):
            chosen, ratio_after, rec = tune_line(
                current, line, hwhms[i], config, window, candidates[i], line_index=i
            )
            if chosen > 0:
                bank = line_response_bank(current.grid, line, np.array([chosen]), hwhms[i])[0]
                current = current.with_values(current.values / bank)
                report.cumulative_strengths[i] += chosen
                ratio = ratio_after
            records.append(rec)
        records += [
            LineTuningRecord(-1, ln.center_frequency, 0.0, ratio, ratio, SKIP_BELOW_THRESHOLD)
            for ln in weak
        ]
        records.sort(key=lambda r: r.freq_ghz)
        report.iterations.append(records)
        report.ratio_trace.append(ratio)
        if start_ratio == 0 or (start_ratio - ratio) / start_ratio < config.min_ratio_decrease:
            break

    if not any(report.cumulative_strengths):
        report.note = "no line improved the fluctuation ratio; signal returned unchanged"
        report.metrics = _metrics(initial_ratio, initial_ratio, energy_before, energy_before,
                                  signal, signal, reference)
        return signal, report
    out = inverse_transform(current)
    final_ratio = fluctuation_ratio(out, window)
    report.metrics = _metrics(
        initial_ratio, final_ratio, energy_before,
        band_energy(current, config.band_min, config.band_max), signal, out, reference,
    )
    return out, report


def _metrics(ratio_before, ratio_after, energy_before, energy_after, signal, out, reference) -> dict:
    m = {
        "fluctuation_ratio_before": float(ratio_before),
        "fluctuation_ratio_after": float(ratio_after),
        "band_energy_before": float(energy_before),
        "band_energy_after": float(energy_after),
    }
    if reference is not None:
        m["mse_percent_before"] = mse_percent(reference, signal)
        m["mse_percent"] = mse_percent(reference, out)
    return m
