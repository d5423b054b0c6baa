"""Synthetic T-ray scenes with known ground truth.

A scene is a Gaussian-derivative pulse plus delayed echoes (the "dry"
signal), passed through the resonance response of a set of injected lines
and topped with seeded white noise (the "wet" signal).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import AtmosphereConditions, LineCatalog, build_catalog
from .lineshape import line_hwhms, water_response
from .signal import TimeSignal, forward_transform, inverse_transform

PULSE_KINDS = ("gaussian_derivative_1", "gaussian_derivative_2")
DEFAULT_N = 2048
DEFAULT_DT_PS = 0.0667


@dataclass(frozen=True)
class PulseSpec:
    kind: str = "gaussian_derivative_1"
    center: float = 10.0  # ps
    width_sigma: float = 0.15  # ps
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in PULSE_KINDS:
            raise ValueError(f"pulse kind must be one of {PULSE_KINDS}")
        if not self.width_sigma > 0:
            raise ValueError("width_sigma must be > 0")


@dataclass(frozen=True)
class SyntheticScene:
    pulse: PulseSpec = field(default_factory=PulseSpec)
    echoes: tuple[tuple[float, float], ...] = ()  # (delay ps, relative amplitude)
    lines: LineCatalog = field(default_factory=LineCatalog)
    strengths: tuple[float, ...] = ()
    noise_rms: float = 0.0
    n: int = DEFAULT_N
    dt: float = DEFAULT_DT_PS
    seed: int = 0
    conditions: AtmosphereConditions = field(default_factory=AtmosphereConditions)

    def __post_init__(self):
        object.__setattr__(self, "echoes", tuple((float(d), float(a)) for d, a in self.echoes))
        object.__setattr__(self, "strengths", tuple(float(s) for s in self.strengths))
        for delay, amp in self.echoes:
            if not delay > 0:
                raise ValueError("echo delays must be > 0")
            if not -1 < amp < 1:
                raise ValueError("echo amplitudes must lie in (-1, 1)")
        if len(self.strengths) != len(self.lines):
            raise ValueError("one strength per injected line is required")
        if any(s < 0 for s in self.strengths):
            raise ValueError("strengths must be nonnegative")
        if not self.noise_rms >= 0:
            raise ValueError("noise_rms must be >= 0")
        if self.n < 8 or not self.dt > 0:
            raise ValueError("record needs n >= 8 and dt > 0")


def _pulse_shape(kind: str, u: np.ndarray) -> np.ndarray:
    if kind == "gaussian_derivative_1":
        # peak |.| of u*exp(-u^2/2) is exp(-1/2) at u = -1
        return -u * np.exp(-0.5 * u * u) / np.exp(-0.5)
    return (1.0 - u * u) * np.exp(-0.5 * u * u)


def generate_pulse(spec: PulseSpec, n: int, dt: float) -> TimeSignal:
    if not 0 <= spec.center <= n * dt:
        raise ValueError("pulse center lies outside the record")
    t = dt * np.arange(n)
    u = (t - spec.center) / spec.width_sigma
    return TimeSignal(spec.amplitude * _pulse_shape(spec.kind, u), dt, 0.0)


def render_dry(scene: SyntheticScene) -> TimeSignal:
    p = scene.pulse
    t = scene.dt * np.arange(scene.n)
    y = p.amplitude * _pulse_shape(p.kind, (t - p.center) / p.width_sigma)
    for delay, amp in scene.echoes:
        y = y + amp * p.amplitude * _pulse_shape(p.kind, (t - p.center - delay) / p.width_sigma)
    return TimeSignal(y, scene.dt, 0.0)


def render_scene(scene: SyntheticScene) -> tuple[TimeSignal, TimeSignal]:
    """Return ``(wet, dry)`` for a scene."""
    dry = render_dry(scene)
    wet = dry
    if len(scene.lines) and any(s > 0 for s in scene.strengths):
        spec = forward_transform(dry)
        hw = line_hwhms(scene.lines, scene.conditions)
        response = water_response(spec.grid, scene.lines, scene.strengths, hw)
        wet = inverse_transform(spec.with_values(spec.values * response.values))
    if scene.noise_rms > 0:
        rng = np.random.default_rng(scene.seed)
        wet = wet.with_samples(wet.samples + rng.normal(0.0, scene.noise_rms, scene.n))
    return wet, dry


# -- scene JSON -----------------------------------------------------------------

def scene_from_dict(d: dict) -> SyntheticScene:
    """Build a scene from its JSON form.

    ``lines`` is a list of ``{"freq_ghz", "strength", "intensity"?, "fwhm_ghz"?}``.
    """
    pulse = PulseSpec(**d.get("pulse", {}))
    entries = d.get("lines", [])
    if entries:
        rows = [
            (float(e["freq_ghz"]), float(e.get("intensity", 1.0)), float(e.get("fwhm_ghz", 6.0)))
            for e in entries
        ]
        order = sorted(range(len(rows)), key=lambda i: rows[i][0])
        catalog = build_catalog([rows[i] for i in order], "scene")
        if len(catalog) != len(rows):
            raise ValueError("scene lines must have distinct frequencies")
        strengths = [float(entries[i]["strength"]) for i in order]
    else:
        catalog, strengths = LineCatalog(), []
    record = d.get("record", {})
    return SyntheticScene(
        pulse=pulse,
        echoes=tuple(tuple(e) for e in d.get("echoes", [])),
        lines=catalog,
        strengths=tuple(strengths),
        noise_rms=float(d.get("noise_rms", 0.0)),
        n=int(record.get("n", DEFAULT_N)),
        dt=float(record.get("dt", DEFAULT_DT_PS)),
        seed=int(d.get("seed", 0)),
        conditions=AtmosphereConditions.from_dict(d.get("conditions")),
    )


def scene_to_dict(scene: SyntheticScene) -> dict:
    return {
        "pulse": {
            "kind": scene.pulse.kind,
            "center": scene.pulse.center,
            "width_sigma": scene.pulse.width_sigma,
            "amplitude": scene.pulse.amplitude,
        },
        "echoes": [list(e) for e in scene.echoes],
        "lines": [
            {
                "freq_ghz": ln.center_frequency,
                "intensity": ln.integrated_intensity,
                "fwhm_ghz": ln.reference_fwhm,
                "strength": s,
            }
            for ln, s in zip(scene.lines, scene.strengths)
        ],
        "noise_rms": scene.noise_rms,
        "record": {"n": scene.n, "dt": scene.dt},
        "seed": scene.seed,
        "conditions": dict(vars(scene.conditions)),
    }


def load_scene(path) -> SyntheticScene:
    return scene_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
