import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.signal import hilbert

from tdsvapor.catalog import AtmosphereConditions, LineCatalog, SpectralLine
from tdsvapor.lineshape import (
    FrequencyGrid,
    ensemble_index,
    line_hwhms,
    lorentz_absorption,
    lorentz_dispersion,
    single_line_response,
    vacuum_response,
    water_response,
)

GRID = FrequencyGrid.for_signal(2048, 0.0667)
LINE = SpectralLine(557.0, 1.0, 1.0)


def on_bin_line(k=76):
    return SpectralLine(k * GRID.bin_spacing, 1.0, 1.0)


def test_grid_from_signal():
    g = FrequencyGrid.for_signal(2048, 0.0667)
    assert g.bin_count == 1025
    assert g.bin_spacing == pytest.approx(1000 / (2048 * 0.0667), rel=1e-15)
    assert FrequencyGrid.for_signal(9, 1.0).bin_count == 5
    assert not FrequencyGrid.for_signal(9, 1.0).has_nyquist


def test_absorption_analytics():
    f_a, hw = 557.0, 3.0
    peak = lorentz_absorption(f_a, f_a, hw)
    assert peak == 1.0
    assert lorentz_absorption(f_a, f_a, hw, reference_hwhm=6.0) == pytest.approx(6.0 / 3.0 / 1.0 * 1.0)
    assert lorentz_absorption(f_a + hw, f_a, hw) == pytest.approx(peak / 2, rel=1e-12)
    assert lorentz_absorption(f_a - hw, f_a, hw) == pytest.approx(peak / 2, rel=1e-12)
    assert lorentz_absorption(1e12, f_a, hw) < 1e-20


def test_dispersion_analytics():
    f_a, hw = 557.0, 3.0
    assert lorentz_dispersion(f_a, f_a, hw) == 0.0
    assert lorentz_dispersion(f_a - hw, f_a, hw) == pytest.approx(1 / 2, rel=1e-12)
    d = np.linspace(0.1, 50, 20)
    np.testing.assert_allclose(lorentz_dispersion(f_a + d, f_a, hw), -lorentz_dispersion(f_a - d, f_a, hw),
                               rtol=1e-14)
    grid = np.linspace(f_a - 40, f_a + 40, 80001)
    assert grid[np.argmax(lorentz_dispersion(grid, f_a, hw))] == pytest.approx(f_a - hw, abs=1e-3)


def test_kramers_kronig_consistency():
    hw = 3.0
    df = hw / 20
    half_span = 200 * hw
    f = np.arange(-half_span, half_span + df / 2, df)
    kappa = lorentz_absorption(f, 0.0, hw)
    disp = lorentz_dispersion(f, 0.0, hw)
    # analytic-signal Hilbert transform: H[kappa] = -(n - 1) with x = f_a - f
    estimate = -np.imag(hilbert(kappa))
    q = f.size // 4
    central = slice(q, f.size - q)
    err = np.max(np.abs(estimate[central] - disp[central])) / np.max(np.abs(disp))
    assert err < 0.01


def test_ensemble_index():
    cond = AtmosphereConditions()
    cat1 = LineCatalog((LINE,))
    assert np.all(ensemble_index(GRID, LineCatalog(), [], cond) == 0)
    assert np.all(ensemble_index(GRID, cat1, [0.0], cond) == 0)
    twin = LineCatalog((LINE, SpectralLine(557.0 + 1e-3, 1.0, 1.0)))
    # two lines a hair apart: the sum is linear, compare with single line at double strength
    double = ensemble_index(GRID, cat1, [1.4], cond)
    pair = ensemble_index(GRID, twin, [0.7, 0.7], cond)
    np.testing.assert_allclose(pair, double, rtol=1e-3, atol=1e-6)
    with pytest.raises(ValueError):
        ensemble_index(GRID, cat1, [1.0, 2.0], cond)


def test_ensemble_hwhm_from_linewidth_law():
    cond = AtmosphereConditions(pressure=2 * AtmosphereConditions().reference_pressure)
    assert line_hwhms(LineCatalog((LINE,)), cond)[0] == 6.0
    idx = ensemble_index(GRID, LineCatalog((on_bin_line(),)), [1.0], cond)
    # absorption part is -imag; unit peak at line center regardless of width
    assert -idx[76].imag == pytest.approx(1.0, rel=1e-14)


def test_single_line_response_basics():
    line = on_bin_line()
    k = 76
    assert np.all(single_line_response(GRID, line, 0.0, 3.0).values == 1)
    w = single_line_response(GRID, line, 1.3, 3.0).values
    assert np.angle(w[k]) == pytest.approx(0.0, abs=1e-15)
    assert abs(w[k]) == pytest.approx(np.exp(-1.3), rel=1e-14)
    assert w[0].imag == 0


@given(st.floats(0, 5), st.floats(0, 5))
def test_single_line_response_additive(s1, s2):
    a = single_line_response(GRID, LINE, s1, 3.0).values
    b = single_line_response(GRID, LINE, s2, 3.0).values
    c = single_line_response(GRID, LINE, s1 + s2, 3.0).values
    np.testing.assert_allclose(a * b, c, rtol=1e-12)


@given(st.floats(0, 20), st.floats(100, 3000), st.floats(0.5, 10))
def test_single_line_passive(strength, f_a, hw):
    w = single_line_response(GRID, SpectralLine(f_a, 1, 1), strength, hw).values
    assert np.all(np.abs(w) <= 1.0)


def test_single_line_impulse_response_causal():
    # long record so the ringing dies out before wrapping into negative time
    n = 2**16
    grid = FrequencyGrid.for_signal(n, 0.0667)
    h = np.fft.irfft(single_line_response(grid, LINE, 1.0, 3.0).values, n)
    pre = np.sum(h[n // 2:] ** 2)
    assert pre / np.sum(h**2) < 1e-6


def test_water_response(test_catalog):
    hw = line_hwhms(test_catalog, AtmosphereConditions())
    zeros = [0.0] * len(test_catalog)
    assert np.all(water_response(GRID, test_catalog, zeros, hw).values == 1)
    one = LineCatalog((LINE,))
    np.testing.assert_array_equal(
        water_response(GRID, one, [0.9], [3.0]).values, single_line_response(GRID, LINE, 0.9, 3.0).values
    )
    with pytest.raises(ValueError):
        water_response(GRID, test_catalog, zeros[:-1], hw)


def test_water_response_matches_exponentiated_ensemble(test_catalog):
    cond = AtmosphereConditions()
    rng = np.random.default_rng(3)
    strengths = rng.uniform(0, 2, len(test_catalog))
    product = water_response(GRID, test_catalog, strengths, line_hwhms(test_catalog, cond)).values
    index = ensemble_index(GRID, test_catalog, strengths, cond)
    direct = np.exp(-1j * index)
    # interior bins compare directly; DC and Nyquist carry zero phase by construction
    np.testing.assert_allclose(product[1:-1], direct[1:-1], rtol=1e-10)
    np.testing.assert_allclose(np.abs(product[[0, -1]]), np.abs(direct[[0, -1]]), rtol=1e-10)


@settings(max_examples=20)
@given(st.permutations(range(20)))
def test_water_response_order_invariant(test_catalog, perm):
    hw = line_hwhms(test_catalog, AtmosphereConditions())
    s = np.linspace(0.1, 2.0, 20)
    ref = water_response(GRID, test_catalog, s, hw).values
    values = np.ones(GRID.bin_count, dtype=complex)
    for i in perm:
        values = values * single_line_response(GRID, test_catalog[i], s[i], hw[i]).values
    np.testing.assert_allclose(values, ref, rtol=1e-12)


def test_vacuum_response():
    assert np.all(vacuum_response(GRID, 0.0).values == 1)
    v = vacuum_response(GRID, 0.3)
    np.testing.assert_allclose(np.abs(v.values), 1.0, rtol=1e-15)
    k = np.arange(1, 40)
    expected = -2 * np.pi * (k * GRID.bin_spacing * 1e9) * 0.3 / 2.99792458e8
    np.testing.assert_allclose(v.values[1:40], np.exp(1j * expected), rtol=1e-9)


def test_response_csv():
    text = single_line_response(GRID, LINE, 1.0, 3.0).to_csv()
    lines = text.splitlines()
    assert lines[0] == "freq_ghz,real,imag"
    assert len(lines) == GRID.bin_count + 1
