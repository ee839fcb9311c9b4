"""Branch Hamiltonians, units, dipolar geometry, register parsing."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from ddgates.spin_model import (
    FieldConfig,
    GAMMA_C13,
    GAMMA_E,
    HBAR,
    HyperfineParams,
    KHZ,
    MU0,
    branch_hamiltonians,
    branch_rotations,
    hyperfine_from_geometry,
    khz_to_rad,
    omega_tilde,
    rad_to_khz,
    read_register,
)
from ddgates.su2 import SIGMA_X, SIGMA_Z, su2_exp


def _fig_spin():
    return HyperfineParams(a_par=khz_to_rad(30.6), a_perp=khz_to_rad(25.7),
                           label="spin2")


def _fig_field():
    return FieldConfig(omega_larmor=khz_to_rad(314.0))


def test_unit_conversions_round_trip():
    assert_allclose(khz_to_rad(1.0), 2.0 * math.pi * 1e3)
    assert_allclose(rad_to_khz(khz_to_rad(123.456)), 123.456)
    assert_allclose(KHZ, 2.0 * math.pi * 1e3)


def test_branch_hamiltonian_entries():
    p, f = _fig_spin(), _fig_field()
    h = branch_hamiltonians(p, f)
    wl = f.omega_larmor
    assert_allclose(h.h0, 0.5 * wl * SIGMA_Z, atol=1e-9)
    assert_allclose(h.h1, 0.5 * ((wl - p.a_par) * SIGMA_Z
                                 - p.a_perp * SIGMA_X), atol=1e-9)


def test_omega_tilde_value():
    # sqrt((314 - 30.6)^2 + 25.7^2) kHz evaluated independently
    w = omega_tilde(_fig_spin(), _fig_field())
    assert_allclose(rad_to_khz(w), math.hypot(314.0 - 30.6, 25.7), rtol=1e-14)
    assert_allclose(rad_to_khz(w), 284.56291044336757, rtol=1e-13)


def test_branch_rotations_match_expm():
    p, f = _fig_spin(), _fig_field()
    h = branch_hamiltonians(p, f)
    axis0, rate0, axis1, rate1 = branch_rotations(p, f)
    rng = np.random.default_rng(21)
    for _ in range(10):
        t = rng.uniform(0.1e-6, 5e-6)
        assert_allclose(su2_exp(axis0, rate0 * t), expm(-1j * h.h0 * t),
                        atol=1e-12)
        assert_allclose(su2_exp(axis1, rate1 * t), expm(-1j * h.h1 * t),
                        atol=1e-12)
    assert rate1 == pytest.approx(omega_tilde(p, f))
    assert_allclose(axis0, [0.0, 0.0, 1.0])


def test_parameter_validation():
    with pytest.raises(ValueError):
        HyperfineParams(a_par=1.0, a_perp=-0.1)
    with pytest.raises(ValueError):
        FieldConfig(omega_larmor=0.0)
    with pytest.raises(ValueError):
        FieldConfig(omega_larmor=-5.0)


def test_dipolar_axial_and_equatorial_limits():
    # on-axis: A_par = -2C, A_perp = 0; in-plane: A_par = +C, A_perp = 0
    r_z = np.array([0.0, 0.0, 1.0e-9])
    r_x = np.array([1.0e-9, 0.0, 0.0])
    c = MU0 * GAMMA_E * GAMMA_C13 * HBAR / (4.0 * math.pi * 1e-27)
    p_z = hyperfine_from_geometry(r_z)
    p_x = hyperfine_from_geometry(r_x)
    assert_allclose(p_z.a_par, -2.0 * c, rtol=1e-12)
    assert_allclose(p_z.a_perp, 0.0, atol=abs(c) * 1e-12)
    assert_allclose(p_x.a_par, c, rtol=1e-12)
    assert_allclose(p_x.a_perp, 0.0, atol=abs(c) * 1e-12)


def test_dipolar_magnitude_and_scaling():
    # |A_par| on axis at 0.5 nm, computed once by hand from the constants
    p = hyperfine_from_geometry(np.array([0.0, 0.0, 0.5e-9]))
    assert_allclose(abs(p.a_par) / KHZ, 318.175, rtol=1e-3)
    # doubling the distance divides the tensor by 8
    p2 = hyperfine_from_geometry(np.array([0.0, 0.0, 1.0e-9]))
    assert_allclose(p2.a_par * 8.0, p.a_par, rtol=1e-12)


def test_dipolar_general_direction_oracle():
    # independent oracle: build the full 3x3 tensor and read the sz row
    rng = np.random.default_rng(22)
    for _ in range(20):
        r = rng.normal(size=3) * 1e-9
        rn = np.linalg.norm(r)
        rhat = r / rn
        c = MU0 * GAMMA_E * GAMMA_C13 * HBAR / (4.0 * math.pi * rn ** 3)
        tensor = c * (np.eye(3) - 3.0 * np.outer(rhat, rhat))
        a_par = tensor[2, 2]
        a_perp = math.hypot(tensor[2, 0], tensor[2, 1])
        p = hyperfine_from_geometry(r)
        assert_allclose(p.a_par, a_par, rtol=1e-10)
        assert_allclose(p.a_perp, a_perp, rtol=1e-10, atol=1e-10)
        assert p.a_perp >= 0.0


def test_dipolar_rejects_zero_separation():
    with pytest.raises(ValueError, match="singular geometry"):
        hyperfine_from_geometry(np.zeros(3))


def test_read_register(tmp_path):
    path = tmp_path / "register.csv"
    path.write_text("label,apar_khz,aperp_khz\n"
                    "spin1,15.3,12.9\n"
                    "spin2,30.6,25.7\n")
    spins = read_register(path)
    assert [s.label for s in spins] == ["spin1", "spin2"]
    assert_allclose(spins[0].a_par, khz_to_rad(15.3))
    assert_allclose(spins[1].a_perp, khz_to_rad(25.7))


def test_read_register_rejects_duplicate_labels(tmp_path):
    path = tmp_path / "register.csv"
    path.write_text("label,apar_khz,aperp_khz\n"
                    "spin1,15.3,12.9\n"
                    "spin1,30.6,25.7\n")
    with pytest.raises(ValueError):
        read_register(path)


def test_read_register_rejects_bad_header(tmp_path):
    path = tmp_path / "register.csv"
    path.write_text("name,apar,aperp\nspin1,1,2\n")
    with pytest.raises(ValueError):
        read_register(path)
