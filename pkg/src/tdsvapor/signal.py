"""Time/frequency representations, the fluctuation ratio and evaluation metrics.

Transforms use the unnormalized one-sided DFT (``numpy.fft.rfft``): a
constant signal ``c`` of length ``N`` has ``N*c`` in bin 0.  Under this
convention Parseval reads::

    N * sum(y**2) == |Y[0]|**2 + 2 * sum(|Y[1:nyq]|**2) + |Y[nyq]|**2

where the Nyquist term exists only for even ``N``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, GridMismatchError, NumericalError
from .lineshape import ComplexResponse, FrequencyGrid

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
MIN_SAMPLES = 8
# relative tolerance on the sample spacing of a loaded signal
SPACING_TOLERANCE = 1e-6
# noise bins below this fraction of the reference peak are clamped to it,
# capping the dynamic range at 1e15
NOISE_FLOOR_EPS = 1e-15


def _frozen(arr, dtype) -> np.ndarray:
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeSignal:
    samples: np.ndarray
    sample_spacing: float  # ps
    start_time: float = 0.0  # ps

    def __post_init__(self):
        samples = _frozen(self.samples, float)
        if samples.ndim != 1 or samples.size < MIN_SAMPLES:
            raise ValueError(f"a signal needs at least {MIN_SAMPLES} samples")
        if not self.sample_spacing > 0:
            raise ValueError("sample_spacing must be > 0")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.sample_spacing * np.arange(self.samples.size)

    def with_samples(self, samples) -> "TimeSignal":
        return TimeSignal(samples, self.sample_spacing, self.start_time)

    def same_grid(self, other: "TimeSignal") -> bool:
        return (
            len(self) == len(other)
            and math.isclose(self.sample_spacing, other.sample_spacing, rel_tol=1e-9)
            and math.isclose(self.start_time, other.start_time, rel_tol=1e-9, abs_tol=1e-9)
        )


@dataclass(frozen=True)
class Spectrum:
    grid: FrequencyGrid
    values: np.ndarray
    source_length: int
    source_spacing: float  # ps
    source_start: float = 0.0  # ps

    def __post_init__(self):
        values = _frozen(self.values, complex)
        if values.shape != (self.grid.bin_count,):
            raise ValueError("spectrum length must equal grid.bin_count")
        if self.source_length // 2 + 1 != self.grid.bin_count:
            raise ValueError("source_length inconsistent with grid")
        object.__setattr__(self, "values", values)

    def with_values(self, values) -> "Spectrum":
        return Spectrum(self.grid, values, self.source_length, self.source_spacing, self.source_start)

    @property
    def times(self) -> np.ndarray:
        return self.source_start + self.source_spacing * np.arange(self.source_length)

    def to_csv(self) -> str:
        return ComplexResponse(self.grid, self.values).to_csv()


@dataclass(frozen=True)
class WindowSpec:
    center: float  # ps
    fwhm: float  # ps

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError("window fwhm must be > 0")

    @property
    def sigma(self) -> float:
        return self.fwhm / FWHM_PER_SIGMA


def forward_transform(signal: TimeSignal) -> Spectrum:
    n = len(signal)
    grid = FrequencyGrid.for_signal(n, signal.sample_spacing)
    return Spectrum(grid, np.fft.rfft(signal.samples), n, signal.sample_spacing, signal.start_time)


def inverse_transform(spectrum: Spectrum) -> TimeSignal:
    v = spectrum.values
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    if abs(v[0].imag) > 1e-9 * max(scale, 1e-300):
        raise NumericalError("bin 0 of the spectrum is not real; spectrum is corrupted")
    samples = np.fft.irfft(v, spectrum.source_length)
    return TimeSignal(samples, spectrum.source_spacing, spectrum.source_start)


def gaussian_window(times, spec: WindowSpec) -> np.ndarray:
    t = np.asarray(times, dtype=float) - spec.center
    return np.exp(-(t * t) / (2.0 * spec.sigma**2))


def find_main_peak(signal: TimeSignal) -> float:
    """Time of the largest-magnitude sample (earliest on ties)."""
    mag = np.abs(signal.samples)
    if not np.any(mag > 0):
        raise NumericalError("cannot locate the main peak of an all-zero signal")
    return float(signal.times[int(np.argmax(mag))])


def fluctuation_ratios(samples: np.ndarray, window: np.ndarray) -> np.ndarray:
    """Fluctuation ratio of each row of ``samples`` against a sampled window.

    Rectangular-rule integrals; the sample spacing cancels.
    """
    samples = np.atleast_2d(samples)
    outside = np.sum((samples * (1.0 - window)) ** 2, axis=-1)
    inside = np.sum((samples * window) ** 2, axis=-1)
    if np.any(inside <= 0):
        raise NumericalError("zero energy inside the window; it misses the pulse")
    return outside / inside


def fluctuation_ratio(signal: TimeSignal, spec: WindowSpec) -> float:
    g = gaussian_window(signal.times, spec)
    return float(fluctuation_ratios(signal.samples, g)[0])


def pulse_tail_energy_ratio(signal: TimeSignal, spec: WindowSpec) -> float:
    """Main-pulse energy over tail energy; ``inf`` when the tail is empty."""
    f = fluctuation_ratio(signal, spec)
    return math.inf if f == 0 else 1.0 / f


def mse(reference: TimeSignal, candidate: TimeSignal) -> float:
    if len(reference) != len(candidate) or not math.isclose(
        reference.sample_spacing, candidate.sample_spacing, rel_tol=1e-9
    ):
        raise GridMismatchError("signals differ in length or sample spacing")
    d = candidate.samples - reference.samples
    return float(np.mean(d * d))


def mse_percent(reference: TimeSignal, candidate: TimeSignal) -> float:
    """MSE as a percentage of the reference mean-square."""
    ms = float(np.mean(reference.samples**2))
    if ms == 0:
        raise NumericalError("reference signal has zero mean-square")
    return 100.0 * mse(reference, candidate) / ms


def band_energy(spectrum: Spectrum, f_min: float, f_max: float) -> float:
    if not f_min < f_max:
        raise ValueError("need f_min < f_max")
    f = spectrum.grid.frequencies
    sel = (f >= f_min) & (f <= f_max)
    return float(np.sum(np.abs(spectrum.values[sel]) ** 2))


def parseval_energy(spectrum: Spectrum) -> float:
    """Time-domain energy ``sum(y**2)`` recovered from the one-sided spectrum."""
    p = np.abs(spectrum.values) ** 2
    total = 2.0 * np.sum(p) - p[0]
    if spectrum.source_length % 2 == 0:
        total -= p[-1]
    return float(total / spectrum.source_length)


def dynamic_range(reference_spectrum: Spectrum, noise_floor_spectrum: Spectrum) -> np.ndarray:
    """Per-bin ``|reference| / |noise|``, never below 1."""
    if not reference_spectrum.grid.matches(noise_floor_spectrum.grid):
        raise GridMismatchError("reference and noise spectra are on different grids")
    ref = np.abs(reference_spectrum.values)
    floor = max(NOISE_FLOOR_EPS * float(np.max(ref)), np.finfo(float).tiny)
    noise = np.maximum(np.abs(noise_floor_spectrum.values), floor)
    return np.maximum(ref / noise, 1.0)


# -- signal CSV ---------------------------------------------------------------

def format_signal_csv(signal: TimeSignal) -> str:
    buf = io.StringIO()
    buf.write("time_ps,amplitude\n")
    for t, y in zip(signal.times, signal.samples):
        buf.write(f"{float(t)!r},{float(y)!r}\n")
    return buf.getvalue()


def _spacing_reproducing(times: np.ndarray) -> float:
    """A sample spacing that regenerates ``times`` exactly when possible."""
    n = times.size
    k = np.arange(n)
    estimate = (times[-1] - times[0]) / (n - 1)
    # spacings are usually short decimals; cancellation against a large
    # start time can push the plain estimate many ulps away from them
    candidates = [float(f"{estimate:.{p}g}") for p in range(6, 17)]
    candidates += [estimate, times[1] - times[0]]
    for base in list(candidates):
        lo = hi = base
        for _ in range(4):
            lo, hi = np.nextafter(lo, -np.inf), np.nextafter(hi, np.inf)
            candidates += [lo, hi]
    for dt in candidates:
        if np.array_equal(times[0] + dt * k, times):
            return float(dt)
    return float(estimate)


def parse_signal_csv(text: str) -> TimeSignal:
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or [c.strip() for c in rows[0].split(",")] != ["time_ps", "amplitude"]:
        raise FormatError("expected header time_ps,amplitude")
    t, y = [], []
    for i, row in enumerate(rows[1:], start=1):
        cells = row.split(",")
        if len(cells) != 2:
            raise FormatError(f"row {i}: expected 2 fields")
        try:
            t.append(float(cells[0]))
            y.append(float(cells[1]))
        except ValueError:
            raise FormatError(f"row {i}: non-numeric field") from None
    if len(t) < MIN_SAMPLES:
        raise FormatError(f"signal needs at least {MIN_SAMPLES} samples, got {len(t)}")
    times = np.array(t)
    steps = np.diff(times)
    dt = (times[-1] - times[0]) / (len(times) - 1)
    if not dt > 0 or np.max(np.abs(steps - dt)) > SPACING_TOLERANCE * dt:
        raise FormatError("time axis is not uniformly spaced")
    samples = np.array(y)
    if not np.all(np.isfinite(samples)):
        raise FormatError("non-finite amplitude")
    return TimeSignal(samples, _spacing_reproducing(times), float(times[0]))
