"""Brute-force dense oracles for cross-checking the block-diagonal model.

These build the full electron (x) nuclei Hilbert space, evolve piecewise
with matrix exponentials and explicit electron pi-pulses, and are meant
for tests and spot checks only (register size capped at 6 nuclei).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .sequences import BranchPair, unit_fractions
from .spin_model import FieldConfig, HyperfineParams, branch_hamiltonians
from .su2 import IDENTITY2, SIGMA_X, SIGMA_Y

_MAX_DENSE_SPINS = 6


def _kron_all(ops) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def _embed(op: np.ndarray, slot: int, n_slots: int) -> np.ndarray:
    ops = [IDENTITY2] * n_slots
    ops[slot] = op
    return _kron_all(ops)


def _sequence_propagator(h_first: np.ndarray, h_second: np.ndarray,
                         pulse: np.ndarray, fractions, span: float,
                         reps: int) -> np.ndarray:
    """Piecewise-exponential propagator with a pulse at every fraction."""
    bounds = np.concatenate([[0.0], np.asarray(fractions, float), [1.0]])
    durations = np.diff(bounds) * span
    u = np.eye(h_first.shape[0], dtype=complex)
    hams = (h_first, h_second)
    for k, dt in enumerate(durations):
        u = expm(-1.0j * hams[k % 2] * dt) @ u
        if k < len(durations) - 1:
            u = pulse @ u
    return np.linalg.matrix_power(u, reps)


def dense_branch_pair(p: HyperfineParams, f: FieldConfig, protocol,
                      unit_time: float, iterations: int) -> BranchPair:
    """Electron (x) single-nucleus propagator, reduced to branch blocks.

    Builds the full 4x4 sequence propagator with explicit pi-pulses and
    extracts the electron-diagonal blocks; the off-diagonal blocks must
    vanish (even pulse count per unit) and are asserted to.
    """
    if unit_time <= 0.0:
        raise ValueError("unit time must be positive")
    fr, mult = unit_fractions(protocol)
    if iterations % mult != 0:
        raise ValueError("odd-n UDD requires even N")
    h = branch_hamiltonians(p, f)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    h_full = np.kron(p0, h.h0) + np.kron(p1, h.h1)
    pulse = np.kron(SIGMA_X, IDENTITY2)
    u = _sequence_propagator(h_full, h_full, pulse, fr, mult * unit_time,
                             iterations // mult)
    # pulses toggle which nuclear Hamiltonian acts, the full H is static
    if max(np.abs(u[0:2, 2:4]).max(), np.abs(u[2:4, 0:2]).max()) > 1e-9:
        raise AssertionError("propagator is not electron-diagonal")
    return BranchPair(u[0:2, 0:2], u[2:4, 2:4], iterations * unit_time)


def dense_register_coherence(spins, f: FieldConfig, protocol,
                             unit_time: float, iterations: int) -> complex:
    """Normalized electron coherence L(T) from a full-register simulation.

    The register starts in |x><x| (x) (1/2)^n, evolves under the pulsed
    Hamiltonian, and L = tr[rho(T) S+] / tr[rho(0) S+] with S+ the
    electron raising operator.  Supports up to 6 nuclei.
    """
    spins = list(spins)
    n = len(spins)
    if n > _MAX_DENSE_SPINS:
        raise ValueError(f"dense oracle capped at {_MAX_DENSE_SPINS} spins")
    fr, mult = unit_fractions(protocol)
    if iterations % mult != 0:
        raise ValueError("odd-n UDD requires even N")

    slots = n + 1  # electron first
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    dim = 2 ** slots
    h_full = np.zeros((dim, dim), dtype=complex)
    for k, spin in enumerate(spins):
        h = branch_hamiltonians(spin, f)
        h_full += np.kron(p0, _embed(h.h0, k, n)) + np.kron(p1, _embed(h.h1, k, n))
    pulse = _embed(SIGMA_X, 0, slots)
    u = _sequence_propagator(h_full, h_full, pulse, fr, mult * unit_time,
                             iterations // mult)

    plus_x = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    rho_e = np.outer(plus_x, plus_x.conj())
    rho = _kron_all([rho_e] + [0.5 * IDENTITY2] * n)
    rho_t = u @ rho @ u.conj().T
    s_plus = _embed(0.5 * (SIGMA_X + 1.0j * SIGMA_Y), 0, slots)
    return complex(np.trace(rho_t @ s_plus) / np.trace(rho @ s_plus))
