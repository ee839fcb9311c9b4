"""Pulse sequences and conditional two-branch evolution.

A sequence unit is specified by normalized pulse fractions in (0, 1).
Supported protocols:

  * cpmg       two pulses per unit at 1/4 and 3/4
  * uddN       N pulses per unit at sin^2(pi j / (2N + 2)); odd N adds
               a pulse at the unit boundary, so odd orders are exposed
               only as a doubled unit spanning two nominal unit times
               and an even iteration count is required
  * hybrid     a block of CPMG units followed by a block of UDD units
               sharing one unit time (HybridSpec)

Between pulses the nucleus evolves under one of the two branch
Hamiltonians; each ideal electron pi-pulse swaps the active branch.
Branch 0 starts in h0, branch 1 starts in h1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spin_model import FieldConfig, HyperfineParams, branch_rotations
from .su2 import su2_exp


@dataclass(frozen=True)
class HybridSpec:
    """Composite protocol: n_cpmg CPMG units then n_udd UDD-`order` units."""

    n_cpmg: int
    order: int
    n_udd: int

    def __post_init__(self):
        if self.n_cpmg < 1 or self.n_udd < 1:
            raise ValueError("hybrid blocks need n_cpmg >= 1 and n_udd >= 1")
        if self.order < 1:
            raise ValueError("UDD order must be >= 1")


@dataclass(frozen=True)
class PulseSchedule:
    """Resolved pulse pattern: fractions of one unit, unit span, protocol."""

    fractions: tuple
    unit_multiplier: int  # nominal unit times covered by one resolved unit
    iterations: int
    protocol: str


@dataclass(frozen=True)
class BranchPair:
    """Propagators of the two conditional branches over the same duration."""

    u0: np.ndarray
    u1: np.ndarray
    total_time: float


def cpmg_fractions(n: int) -> np.ndarray:
    """CPMG pulse fractions over the full n-unit sequence: (j - 1/2)/(2n)."""
    if n < 1:
        raise ValueError("pulse count must be >= 1")
    j = np.arange(1, 2 * n + 1, dtype=float)
    return (j - 0.5) / (2.0 * n)


def udd_fractions(n: int) -> np.ndarray:
    """UDD-n pulse fractions within one unit: sin^2(pi j / (2n + 2))."""
    if n < 1:
        raise ValueError("pulse count must be >= 1")
    j = np.arange(1, n + 1, dtype=float)
    return np.sin(np.pi * j / (2.0 * n + 2.0)) ** 2


def iterated_fractions(unit: np.ndarray, n: int) -> np.ndarray:
    """Fractions of n back-to-back copies of a unit, renormalized to [0, 1]."""
    if n < 1:
        raise ValueError("iteration count must be >= 1")
    unit = np.asarray(unit, dtype=float)
    blocks = [(l + unit) / n for l in range(n)]
    return np.concatenate(blocks)


def hybrid_fractions(n_cpmg: int, order: int, n_udd: int) -> np.ndarray:
    """Fractions of a CPMG block followed by UDD-`order` units, shared timing.

    The CPMG block contributes (j - 1/2) / (2 (n_cpmg + n_udd)) for
    j = 1 .. 2 n_cpmg; each UDD unit l contributes
    (l + n_cpmg + sin^2-pattern) / (n_cpmg + n_udd).
    """
    spec = HybridSpec(n_cpmg, order, n_udd)
    total = spec.n_cpmg + spec.n_udd
    j = np.arange(1, 2 * spec.n_cpmg + 1, dtype=float)
    parts = [(j - 0.5) / (2.0 * total)]
    udd = udd_fractions(spec.order)
    for l in range(spec.n_cpmg, total):
        parts.append((l + udd) / total)
    return np.concatenate(parts)


def delta_weights(n: int) -> np.ndarray:
    """Normalized UDD-n inter-pulse durations, delta_0 = delta_n = 1.

    delta_j = [sin^2(pi (j+1) / (2n+2)) - sin^2(pi j / (2n+2))]
              / sin^2(pi / (2n+2)) for j = 0 .. n.
    """
    if n < 1:
        raise ValueError("pulse count must be >= 1")
    j = np.arange(0, n + 2, dtype=float)
    edges = np.sin(np.pi * j / (2.0 * n + 2.0)) ** 2
    return np.diff(edges) / edges[1]


def unit_fractions(protocol) -> tuple[np.ndarray, int]:
    """Resolve a protocol tag into (unit fractions, unit multiplier).

    The multiplier is 1 except for odd UDD orders, whose boundary pulse
    forces a doubled unit spanning two nominal unit times.
    """
    if isinstance(protocol, HybridSpec):
        total = protocol.n_cpmg + protocol.n_udd
        return hybrid_fractions(protocol.n_cpmg, protocol.order,
                                protocol.n_udd), total
    tag = str(protocol).lower()
    if tag == "cpmg":
        return np.array([0.25, 0.75]), 1
    if tag.startswith("udd"):
        try:
            order = int(tag[3:])
        except ValueError:
            raise ValueError(f"unknown protocol: {protocol!r}") from None
        fr = udd_fractions(order)
        if order % 2 == 0:
            return fr, 1
        # odd order: fold the boundary pulse into a doubled unit
        return np.concatenate([0.5 * fr, 0.5 + 0.5 * fr]), 2
    raise ValueError(f"unknown protocol: {protocol!r}")


def schedule(protocol, unit_time: float, iterations: int) -> PulseSchedule:
    """Resolved schedule for `iterations` nominal units of length `unit_time`."""
    fr, mult = unit_fractions(protocol)
    if iterations % mult != 0:
        raise ValueError("odd-n UDD requires even N")
    tag = protocol if isinstance(protocol, str) else repr(protocol)
    return PulseSchedule(tuple(fr), mult, iterations, tag)


def _branch_product(axes, rates, durations) -> np.ndarray:
    """Time-ordered product of free precessions, earliest factor rightmost."""
    u = np.eye(2, dtype=complex)
    for axis, rate, dt in zip(axes, rates, durations):
        u = su2_exp(axis, rate * dt) @ u
    return u


def conditional_evolution(p: HyperfineParams, f: FieldConfig, protocol,
                          unit_time: float, iterations: int) -> BranchPair:
    """Two-branch propagators for `iterations` units of a pulse protocol.

    unit_time is the nominal unit duration in seconds (so the pair spans
    iterations * unit_time in total, also for doubled odd-order units).
    The unit propagator is computed once and raised to the iteration
    count.  Odd UDD orders require an even iteration count.
    """
    if unit_time <= 0.0:
        raise ValueError("unit time must be positive")
    if iterations < 1:
        raise ValueError("iteration count must be >= 1")
    fr, mult = unit_fractions(protocol)
    if iterations % mult != 0:
        raise ValueError("odd-n UDD requires even N")
    axis0, rate0, axis1, rate1 = branch_rotations(p, f)

    span = mult * unit_time
    bounds = np.concatenate([[0.0], np.asarray(fr, float), [1.0]])
    durations = np.diff(bounds) * span

    n_seg = len(durations)
    axes_a = [axis0 if k % 2 == 0 else axis1 for k in range(n_seg)]
    rates_a = [rate0 if k % 2 == 0 else rate1 for k in range(n_seg)]
    axes_b = [axis1 if k % 2 == 0 else axis0 for k in range(n_seg)]
    rates_b = [rate1 if k % 2 == 0 else rate0 for k in range(n_seg)]

    u0_unit = _branch_product(axes_a, rates_a, durations)
    u1_unit = _branch_product(axes_b, rates_b, durations)

    reps = iterations // mult
    u0 = np.linalg.matrix_power(u0_unit, reps)
    u1 = np.linalg.matrix_power(u1_unit, reps)
    return BranchPair(u0, u1, iterations * unit_time)


def pair_power(pair: BranchPair, n: int) -> BranchPair:
    """n-fold repetition of an existing branch pair."""
    if n < 1:
        raise ValueError("iteration count must be >= 1")
    return BranchPair(np.linalg.matrix_power(pair.u0, n),
                      np.linalg.matrix_power(pair.u1, n),
                      n * pair.total_time)


def compose(later: BranchPair, earlier: BranchPair) -> BranchPair:
    """Branch pair of `earlier` followed in time by `later`."""
    return BranchPair(later.u0 @ earlier.u0, later.u1 @ earlier.u1,
                      later.total_time + earlier.total_time)
