"""Numerical removal of water-vapor resonances from T-ray (THz-TDS) signals."""

__version__ = "0.1.0"

from .catalog import (
    AtmosphereConditions,
    LineCatalog,
    SpectralLine,
    filter_lines,
    load_catalog,
    parse_catalog_csv,
    parse_catalog_jpl,
    scale_linewidth,
)
from .lineshape import (
    ComplexResponse,
    FrequencyGrid,
    ensemble_index,
    lorentz_absorption,
    lorentz_dispersion,
    single_line_response,
    vacuum_response,
    water_response,
)
from .removal import RemovalConfig, RemovalReport, deconvolve_line, remove_water_vapor, tune_line
from .signal import (
    Spectrum,
    TimeSignal,
    WindowSpec,
    band_energy,
    find_main_peak,
    fluctuation_ratio,
    forward_transform,
    gaussian_window,
    inverse_transform,
    mse,
)
from .synth import PulseSpec, SyntheticScene, generate_pulse, render_scene
