"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 input format error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import load_catalog
from .errors import FormatError, GridMismatchError, NumericalError
from .removal import RemovalConfig, remove_water_vapor
from .signal import (
    WindowSpec,
    band_energy,
    find_main_peak,
    fluctuation_ratio,
    format_signal_csv,
    forward_transform,
    mse_percent,
    parse_signal_csv,
)
from .synth import load_scene, render_scene

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_NUMERICAL = 4


class InputError(FormatError):
    """Unreadable or invalid command input."""


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _read_signal(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_signal_csv(text)


def _read_json(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def build_config(config_file=None, **overrides) -> RemovalConfig:
    """Defaults, then the config file, then explicit (non-None) overrides."""
    data = _read_json(config_file) if config_file else {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RemovalConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid removal config: {exc}") from None


def cmd_synth(args) -> int:
    try:
        scene = load_scene(args.scene)
    except OSError as exc:
        raise InputError(f"cannot read {args.scene}: {exc.strerror or exc}") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.scene}: invalid scene ({exc})") from None
    if args.seed is not None:
        scene = replace(scene, seed=args.seed)
    wet, dry = render_scene(scene)
    _write(args.out_wet, format_signal_csv(wet))
    _write(args.out_dry, format_signal_csv(dry))
    return EXIT_OK


def cmd_remove(args) -> int:
    signal = _read_signal(args.signal)
    try:
        catalog = load_catalog(args.catalog, args.catalog_format)
    except OSError as exc:
        raise InputError(f"cannot read {args.catalog}: {exc.strerror or exc}") from None
    config = build_config(
        args.config,
        band_min=args.band_min,
        band_max=args.band_max,
        relative_threshold=args.threshold,
        window_fwhm=args.window_fwhm_ps,
        max_iterations=args.iterations,
        grid_points=args.grid_points,
        grid_max_depth=args.grid_max_depth,
    )
    reference = _read_signal(args.reference) if args.reference else None
    out, report = remove_water_vapor(signal, catalog, config, reference=reference)
    _write(args.out_signal, format_signal_csv(out))
    _write(args.out_report, report.to_json())
    m = report.metrics
    print(
        f"{m['fluctuation_ratio_before']!r} {m['fluctuation_ratio_after']!r} "
        f"{m['band_energy_before']!r} {m['band_energy_after']!r}"
    )
    return EXIT_OK


def cmd_compare(args) -> int:
    ref = _read_signal(args.reference)
    cand = _read_signal(args.candidate)
    if not ref.same_grid(cand):
        raise GridMismatchError("reference and candidate are sampled on different grids")
    f_ref = fluctuation_ratio(ref, WindowSpec(find_main_peak(ref), args.window_fwhm_ps))
    f_cand = fluctuation_ratio(cand, WindowSpec(find_main_peak(cand), args.window_fwhm_ps))
    e_ref = band_energy(forward_transform(ref), args.band_min, args.band_max)
    e_cand = band_energy(forward_transform(cand), args.band_min, args.band_max)
    if e_ref == 0:
        raise NumericalError("reference has no energy in the band")
    print(f"{mse_percent(ref, cand)!r} {f_ref!r} {f_cand!r} {e_cand / e_ref!r}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    spec = forward_transform(_read_signal(args.signal))
    lines = ["freq_ghz,magnitude,phase_rad"]
    for f, v in zip(spec.grid.frequencies, spec.values):
        lines.append(f"{float(f)!r},{float(abs(v))!r},{float(np.angle(v))!r}")
    _write(args.out_csv, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tdsvapor",
        description="Remove water-vapor resonance ringing from T-ray time-domain signals.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="render a synthetic scene to wet/dry signal CSVs")
    s.add_argument("scene", help="scene JSON file")
    s.add_argument("out_wet")
    s.add_argument("out_dry")
    s.add_argument("--seed", type=int, help="override the scene's noise seed")
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("remove", help="run the strength-tuning removal on a signal")
    r.add_argument("signal", help="signal CSV (time_ps,amplitude)")
    r.add_argument("catalog", help="line catalog (.csv, otherwise JPL fixed-width)")
    r.add_argument("out_signal")
    r.add_argument("out_report")
    r.add_argument("--config", help="removal config JSON")
    r.add_argument("--catalog-format", choices=("csv", "jpl"))
    r.add_argument("--reference", help="clean signal CSV for the MSE metric")
    r.add_argument("--band-min", type=float)
    r.add_argument("--band-max", type=float)
    r.add_argument("--threshold", type=float)
    r.add_argument("--window-fwhm-ps", type=float)
    r.add_argument("--iterations", type=int)
    r.add_argument("--grid-points", type=int)
    r.add_argument("--grid-max-depth", type=float,
                   help="peak optical depth assigned to the strongest in-band line")
    r.set_defaults(func=cmd_remove)

    c = sub.add_parser("compare", help="MSE, fluctuation ratios and energy ratio of two signals")
    c.add_argument("reference")
    c.add_argument("candidate")
    c.add_argument("--window-fwhm-ps", type=float, default=3.0)
    c.add_argument("--band-min", type=float, default=0.0)
    c.add_argument("--band-max", type=float, default=4000.0)
    c.set_defaults(func=cmd_compare)

    sp = sub.add_parser("spectrum", help="write the magnitude/phase spectrum of a signal")
    sp.add_argument("signal")
    sp.add_argument("out_csv")
    sp.set_defaults(func=cmd_spectrum)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, GridMismatchError) as exc:
        print(f"tdsvapor: error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (NumericalError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"tdsvapor: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"tdsvapor: error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
