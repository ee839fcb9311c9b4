"""Gate targets, fidelity metric, iterated-unit synthesis."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ddgates.gates import (
    CNOT,
    average_fidelity,
    cnot_equivalence_check,
    cnot_reference,
    crx_target,
    rx,
    rz,
    synthesize_crx,
    synthesize_rx_unconditional,
    two_qubit_gate,
)
from ddgates.sequences import BranchPair, conditional_evolution
from ddgates.spin_model import FieldConfig, HyperfineParams, khz_to_rad

US = 1e-6


def _fig_system():
    p = HyperfineParams(a_par=khz_to_rad(30.6), a_perp=khz_to_rad(25.7))
    f = FieldConfig(omega_larmor=khz_to_rad(314.0))
    return p, f


def _gate_system(larmor_khz):
    p = HyperfineParams(a_par=khz_to_rad(170.0), a_perp=khz_to_rad(70.0))
    f = FieldConfig(omega_larmor=khz_to_rad(larmor_khz))
    return p, f


def test_crx_target_blocks():
    theta = 1.23
    g = crx_target(theta)
    assert_allclose(g[0:2, 0:2], rx(theta), atol=1e-15)
    assert_allclose(g[2:4, 2:4], rx(-theta), atol=1e-15)
    assert_allclose(g[0:2, 2:4], 0.0, atol=1e-15)
    assert_allclose(g @ g.conj().T, np.eye(4), atol=1e-14)


def test_crx_quarter_turn_is_dressed_cnot():
    # CRX(pi/2) equals exp(i pi/4) (Rz x Rx)(pi/2) CNOT entry by entry
    lhs = crx_target(math.pi / 2.0)
    rhs = (np.exp(1.0j * math.pi / 4.0)
           * np.kron(rz(math.pi / 2.0), rx(math.pi / 2.0)) @ CNOT)
    assert_allclose(lhs, rhs, atol=1e-12)
    assert_allclose(lhs, cnot_reference(), atol=1e-12)
    assert cnot_equivalence_check(crx_target(math.pi / 2.0)) < 1e-10


def test_cnot_equivalence_check_distances():
    assert cnot_equivalence_check(cnot_reference()) == pytest.approx(0.0,
                                                                     abs=1e-12)
    assert cnot_equivalence_check(np.eye(4, dtype=complex)) > 0.5
    with pytest.raises(ValueError, match="dimension mismatch"):
        cnot_equivalence_check(np.eye(2))


def test_average_fidelity_hand_values():
    # unitary n = 4: F = (n + |tr(target^+ u)|^2) / (n (n + 1))
    assert average_fidelity(CNOT, CNOT) == pytest.approx(1.0)
    assert average_fidelity(CNOT, np.eye(4)) == pytest.approx(0.4)
    assert average_fidelity(np.eye(4), crx_target(math.pi / 2.0)) == \
        pytest.approx(0.6)
    with pytest.raises(ValueError, match="dimension mismatch"):
        average_fidelity(np.eye(4), np.eye(2))


def test_two_qubit_gate_block_embedding():
    u0 = rx(0.3)
    u1 = rz(1.1)
    g = two_qubit_gate(BranchPair(u0, u1, 1.0))
    assert_allclose(g, np.kron(np.diag([1.0, 0.0]), u0)
                    + np.kron(np.diag([0.0, 1.0]), u1), atol=1e-15)


def test_synthesize_crx_cpmg_strong_field():
    p, f = _gate_system(2000.0)
    rep = synthesize_crx(p, f, math.pi / 2.0, protocol="cpmg")
    assert rep.protocol == "cpmg"
    assert rep.n_cpmg == 21
    assert rep.n_udd == 0
    assert rep.total_time == pytest.approx(10.9648 * US, rel=1e-3)
    assert rep.fidelity == pytest.approx(0.999674, abs=5e-5)
    assert not rep.flagged
    assert rep.total_time == pytest.approx(rep.n_cpmg * rep.unit_time,
                                           rel=1e-12)
    assert_allclose(rep.gate @ rep.gate.conj().T, np.eye(4), atol=1e-10)
    # report carries the refined resonance the unit was built from
    assert rep.point_cpmg.t_refined == pytest.approx(rep.unit_time)


def test_synthesize_crx_hybrid_strong_field():
    p, f = _gate_system(2000.0)
    rep = synthesize_crx(p, f, math.pi / 2.0, protocol="hybrid")
    assert rep.protocol == "hybrid"
    assert (rep.n_cpmg, rep.n_udd) == (21, 2)
    assert rep.udd_order == 4
    assert rep.total_time == pytest.approx(12.0091 * US, rel=1e-3)
    assert rep.fidelity == pytest.approx(0.999860, abs=5e-5)
    assert rep.total_time == pytest.approx(
        rep.n_cpmg * rep.unit_time + rep.n_udd * rep.udd_unit_time, rel=1e-12)
    assert not rep.flagged


def test_synthesize_crx_weak_field():
    p, f = _gate_system(500.0)
    rep_c = synthesize_crx(p, f, math.pi / 2.0, protocol="cpmg")
    assert rep_c.n_cpmg == 4
    assert rep_c.total_time == pytest.approx(9.6178 * US, rel=1e-3)
    assert rep_c.fidelity == pytest.approx(0.9976492, abs=1e-4)
    rep_h = synthesize_crx(p, f, math.pi / 2.0, protocol="hybrid")
    assert rep_h.fidelity > 0.99
    assert rep_h.fidelity >= rep_c.fidelity - 1e-6


def test_synthesize_crx_validation():
    p, f = _gate_system(2000.0)
    with pytest.raises(ValueError, match="no conditional coupling"):
        synthesize_crx(HyperfineParams(a_par=khz_to_rad(170.0), a_perp=0.0),
                       f, math.pi / 2.0)
    with pytest.raises(ValueError):
        synthesize_crx(p, f, 0.0)
    with pytest.raises(ValueError):
        synthesize_crx(p, f, 2.0 * math.pi)
    with pytest.raises(ValueError):
        synthesize_crx(p, f, math.pi / 2.0, protocol="udd")


def test_synthesize_crx_flags_iteration_cap():
    p, f = _fig_system()
    rep = synthesize_crx(p, f, math.pi / 2.0, n_cap=3)
    assert rep.n_cpmg == 3
    assert rep.flagged


def test_synthesize_rx_unconditional():
    p, f = _fig_system()
    rep = synthesize_rx_unconditional(p, f, math.pi / 2.0)
    assert rep.n_cpmg == 169
    assert rep.total_time == pytest.approx(1129.26 * US, rel=1e-3)
    assert rep.fidelity == pytest.approx(0.993541, abs=5e-4)
    assert not rep.flagged
    # both branch blocks implement nearly the same rotation; the axis
    # tilt left by the plateau bounds the overlap away from one
    overlap = abs(np.trace(rep.gate[0:2, 0:2].conj().T
                           @ rep.gate[2:4, 2:4])) / 2.0
    assert overlap > 0.98
    assert average_fidelity(rep.gate[0:2, 0:2], rx(math.pi / 2.0)) > 0.99


def test_synthesize_rx_trivial_target():
    p, f = _fig_system()
    rep = synthesize_rx_unconditional(p, f, 0.0)
    assert rep.n_cpmg == 0
    assert rep.fidelity == 1.0
    assert rep.total_time == 0.0
    assert_allclose(rep.gate, np.eye(4), atol=1e-15)


def test_synthesize_rx_validation():
    f = FieldConfig(omega_larmor=khz_to_rad(314.0))
    with pytest.raises(ValueError, match="unconditional x-rotation angle"):
        synthesize_rx_unconditional(
            HyperfineParams(a_par=khz_to_rad(30.6), a_perp=0.0), f, 1.0)
    with pytest.raises(ValueError, match="unconditional x-rotation angle"):
        synthesize_rx_unconditional(
            HyperfineParams(a_par=0.0, a_perp=khz_to_rad(25.7)), f, 1.0)
    with pytest.raises(ValueError):
        synthesize_rx_unconditional(
            HyperfineParams(a_par=khz_to_rad(30.6),
                            a_perp=khz_to_rad(25.7)), f, -0.5)


def test_synthesized_gate_matches_regenerated_unit():
    # the reported gate equals the unit propagator pair raised to N
    p, f = _gate_system(2000.0)
    rep = synthesize_crx(p, f, math.pi / 2.0, protocol="cpmg")
    pair = conditional_evolution(p, f, "cpmg", rep.unit_time, rep.n_cpmg)
    assert_allclose(rep.gate, two_qubit_gate(pair), atol=1e-10)


def test_fidelity_decays_within_dip_width():
    # detuning the unit time off resonance only ever costs fidelity
    from ddgates.resonance import selectivity_fwhm

    p, f = _gate_system(2000.0)
    rep = synthesize_crx(p, f, math.pi / 2.0, protocol="cpmg")
    width, _ = selectivity_fwhm(p, f, "cpmg", "conditional", 1)
    target = crx_target(math.pi / 2.0)
    for sign in (-1.0, +1.0):
        fids = []
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            t = rep.unit_time + sign * frac * width
            pair = conditional_evolution(p, f, "cpmg", t, rep.n_cpmg)
            fids.append(average_fidelity(two_qubit_gate(pair), target))
        assert fids[0] == pytest.approx(rep.fidelity, abs=1e-12)
        for a, b in zip(fids, fids[1:]):
            assert b <= a + 1e-12
        # a full half width off resonance costs real fidelity
        assert fids[-1] < 0.9


def test_equivalence_distance_fidelity_bound():
    # D^2 = 2 (4 - |tr|) and 1 - F = (16 - |tr|^2) / 20 combine into
    # D^2 = 40 (1 - F) / (4 + |tr|) <= 10 (1 - F) for any unitary
    p, f = _gate_system(2000.0)
    rep = synthesize_crx(p, f, math.pi / 2.0, protocol="cpmg")
    d = cnot_equivalence_check(rep.gate)
    assert d**2 <= 10.0 * (1.0 - rep.fidelity) + 1e-12
    assert d**2 == pytest.approx(1.6311e-3, rel=1e-3)

    rng = np.random.default_rng(20240811)
    for _ in range(50):
        m = rng.normal(size=(4, 4)) + 1.0j * rng.normal(size=(4, 4))
        q, _ = np.linalg.qr(m)
        d2 = cnot_equivalence_check(q)**2
        gap = 10.0 * (1.0 - average_fidelity(q, cnot_reference()))
        assert d2 <= gap + 1e-12
