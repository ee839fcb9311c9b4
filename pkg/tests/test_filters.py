"""Decoupling filter functions and the attenuation integral."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from ddgates.filters import (
    SpectrumTable,
    chi_integral,
    filter_cpmg_closed,
    filter_fid,
    filter_general,
    filter_hybrid,
    filter_udd_unit_mp,
    filter_uddn,
    udd_suppression_slope,
)
from ddgates.sequences import cpmg_fractions, hybrid_fractions


def test_filter_fid_and_empty_sequence():
    x = np.linspace(0.1, 20.0, 50)
    assert_allclose(filter_fid(x), np.sin(x / 2.0) ** 2, atol=1e-15)
    # no pulses: |1 - e^{ix}|^2 = 4 sin^2(x/2)
    assert_allclose(filter_general([], x), 4.0 * np.sin(x / 2.0) ** 2,
                    atol=1e-12)
    assert filter_fid(0.3) == pytest.approx(math.sin(0.15) ** 2)


def test_cpmg_closed_hand_value():
    # n = 1 at x = pi: 16 sec^2(pi/4) sin^2(pi/2) sin^4(pi/8) = 12 - 8 sqrt(2)
    assert filter_cpmg_closed(1, math.pi) == pytest.approx(
        12.0 - 8.0 * math.sqrt(2.0), rel=1e-12)


def test_cpmg_closed_matches_general():
    rng = np.random.default_rng(51)
    worst = 0.0
    for _ in range(2000):
        n = int(rng.integers(1, 31))
        x = rng.uniform(0.1, 50.0)
        if abs(math.cos(x / (4.0 * n))) < 1e-2:
            continue
        f_gen = filter_general(cpmg_fractions(n), x)
        if f_gen < 1e-6:
            continue
        f_closed = filter_cpmg_closed(n, x)
        worst = max(worst, abs(f_closed - f_gen) / f_gen)
    assert worst < 1e-9


def test_cpmg_closed_pole_is_removable():
    # x = 2 pi n sits on a sec^2 pole; the closed form must fall back
    for n in (1, 3, 7):
        x = 2.0 * math.pi * n
        val = filter_cpmg_closed(n, x)
        assert np.isfinite(val)
        assert val == pytest.approx(filter_general(cpmg_fractions(n), x),
                                    abs=1e-9)


def test_udd2_equals_cpmg():
    x = np.linspace(0.05, 60.0, 400)
    for n in (1, 2, 5):
        assert_allclose(filter_uddn(2, n, x), filter_cpmg_closed(n, x),
                        rtol=1e-12, atol=1e-12)


def test_hybrid_filter_limits():
    x = np.linspace(0.1, 40.0, 200)
    assert_allclose(filter_hybrid(3, 4, 0, x), filter_cpmg_closed(3, x),
                    atol=1e-12)
    assert_allclose(filter_hybrid(1, 2, 1, x),
                    filter_general(cpmg_fractions(2), x), atol=1e-12)
    h = filter_hybrid(2, 4, 1, x)
    assert_allclose(h, filter_general(hybrid_fractions(2, 4, 1), x),
                    atol=1e-12)


def test_filter_general_scalar_and_pulse_count_override():
    fr = cpmg_fractions(2)
    x = 1.7
    assert filter_general(fr, x) == pytest.approx(
        filter_general(fr, x, total_pulses=len(fr)), rel=1e-14)
    # flipping the boundary parity changes the value
    assert filter_general(fr, x) != pytest.approx(
        filter_general(fr, x, total_pulses=len(fr) + 1), rel=1e-6)


def test_udd_low_frequency_suppression_slopes():
    # single-unit floor steepens as x^(2 n + 2)
    for order in (2, 3, 4, 5, 6):
        slope = udd_suppression_slope(order)
        assert slope == pytest.approx(2.0 * order + 2.0, abs=0.2)


def test_udd_mp_matches_float64_at_moderate_x():
    for order in (2, 4, 6):
        f_mp = float(filter_udd_unit_mp(order, 0.7))
        f_np = filter_general(np.sin(
            math.pi * np.arange(1, order + 1) / (2 * order + 2)) ** 2, 0.7)
        assert f_mp == pytest.approx(f_np, rel=1e-8)


def test_spectrum_table_validation():
    with pytest.raises(ValueError):
        SpectrumTable(np.array([1.0, 2.0]), np.array([1.0, -0.5]))
    with pytest.raises(ValueError):
        SpectrumTable(np.array([2.0, 1.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        SpectrumTable(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        SpectrumTable(np.array([1.0]), np.array([1.0]))


def test_spectrum_table_csv_and_interp(tmp_path):
    path = tmp_path / "spectrum.csv"
    path.write_text("omega_over_2pi_khz,s_value\n1.0,4.0\n10.0,2.0\n")
    table = SpectrumTable.from_csv(path)
    assert_allclose(table.omega, [2e3 * math.pi, 2e4 * math.pi])
    assert table.interp(2e3 * math.pi) == pytest.approx(4.0)
    # clamped outside the grid
    assert table.interp(1.0) == pytest.approx(4.0)
    assert table.interp(1e9) == pytest.approx(2.0)
    bad = tmp_path / "bad.csv"
    bad.write_text("freq,val\n1,2\n")
    with pytest.raises(ValueError):
        SpectrumTable.from_csv(bad)


def _lorentzian_table(points):
    s0, wc = 1e4, 2.0 * math.pi * 50e3
    omega = np.geomspace(1e-1, 2.0 * math.pi * 2e6, points)
    return SpectrumTable(omega, s0 / (1.0 + (omega / wc) ** 2)), s0, wc


def test_chi_integral_lorentzian_cpmg():
    # independent oracle: adaptive quadrature of the same integrand with
    # the spectrum kept analytic
    table, s0, wc = _lorentzian_table(12000)
    t_total = 50e-6
    fr = cpmg_fractions(4)
    chi = chi_integral(table, fr, t_total, 2.0 * math.pi * 2e6)
    assert chi == pytest.approx(0.2246737, rel=1e-5)

    def integrand(w):
        j = np.arange(1, 9)
        s = (1.0 + (-1.0) ** 9 * np.exp(1j * w * t_total)
             + 2.0 * np.sum((-1.0) ** j * np.exp(1j * w * t_total * fr)))
        return s0 / (1.0 + (w / wc) ** 2) / w ** 2 * abs(s) ** 2

    val, err = quad(integrand, 1e-3, 2.0 * math.pi * 2e6, limit=2000)
    oracle = 2.0 / math.pi * val
    assert err < 1e-6 * val
    assert chi == pytest.approx(oracle, rel=5e-6)


def test_chi_integral_warns_on_sparse_grid():
    table, _, _ = _lorentzian_table(100)
    with pytest.warns(UserWarning, match="points per decade"):
        chi_integral(table, cpmg_fractions(4), 50e-6, 2.0 * math.pi * 2e6)


def test_chi_integral_validation():
    table, _, _ = _lorentzian_table(2000)
    with pytest.raises(ValueError):
        chi_integral(table, cpmg_fractions(4), 0.0, 1e6)
    with pytest.raises(ValueError):
        chi_integral(table, cpmg_fractions(4), 50e-6, 1e-3)
