"""Electron coherence under sequences coupled to a nuclear register.

For unpolarized (maximally mixed) nuclei the electron coherence
factorizes exactly over the register,

    L(T) = prod_k M_k,   M_k = Re tr(u0_k u1_k^+) / 2,

and the probability of recovering the initial |x> state after the
sequence is Px = (1 + L) / 2.  Maximal electron-nuclear entanglement
with a single spin shows up as Px = 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sequences import BranchPair, conditional_evolution, unit_fractions
from .spin_model import FieldConfig, HyperfineParams
from .su2 import axis_angle

N_ENTANGLE_CAP = 500


@dataclass(frozen=True)
class SpinRegister:
    """A set of nuclear spins sharing one field, with unique labels."""

    spins: tuple
    f: FieldConfig

    def __post_init__(self):
        object.__setattr__(self, "spins", tuple(self.spins))
        labels = [s.label for s in self.spins]
        if len(set(labels)) != len(labels):
            raise ValueError("register labels must be unique")

    def __len__(self):
        return len(self.spins)

    def by_label(self, label: str) -> HyperfineParams:
        for s in self.spins:
            if s.label == label:
                return s
        raise ValueError(f"no spin labeled {label!r}")


@dataclass(frozen=True)
class CoherenceCurve:
    """Px versus unit time: joint curve plus one curve per spin."""

    t: np.ndarray
    px_joint: np.ndarray
    px_by_spin: dict
    labels: tuple
    iterations: int


def single_spin_M(pair: BranchPair) -> float:
    """Coherence factor of one spin: Re tr(u0 u1^+) / 2, in [-1, 1]."""
    return float(np.real(np.trace(pair.u0 @ pair.u1.conj().T)) / 2.0)


def register_coherence(register: SpinRegister, protocol, unit_time: float,
                       iterations: int) -> float:
    """Product-form electron coherence L(T) over the register."""
    l_total = 1.0
    for spin in register.spins:
        pair = conditional_evolution(spin, register.f, protocol, unit_time,
                                     iterations)
        l_total *= single_spin_M(pair)
    return l_total


def register_px(register: SpinRegister, protocol, unit_time: float,
                iterations: int) -> float:
    """Recovery probability Px = (1 + L) / 2 for unpolarized nuclei."""
    return 0.5 * (1.0 + register_coherence(register, protocol, unit_time,
                                           iterations))


def entangling_iterations(p: HyperfineParams, f: FieldConfig, protocol,
                          unit_time: float,
                          n_cap: int = N_ENTANGLE_CAP) -> int:
    """Iteration count driving one spin to its first Px = 1/2 crossing.

    On a conditional resonance each resolved unit deviates from the
    identity by eps = min(phi, 2 pi - phi), so maximal electron-nuclear
    entanglement (Px = 1/2) is first reached near N eps = pi / 2.  The
    floor/ceil integer pair around (pi/2)/eps is rescored by the exact
    coherence factor and the closer one returned, as a nominal-unit
    count (a multiple of the resolved-unit span, capped at n_cap).
    """
    _, mult = unit_fractions(protocol)
    pair = conditional_evolution(p, f, protocol, unit_time, mult)
    decomposed = axis_angle(pair.u0)
    eps = min(decomposed.angle, 2.0 * np.pi - decomposed.angle)
    if decomposed.degenerate or eps <= 0.0:
        raise ValueError("no conditional rotation accumulates")
    guess = (0.5 * np.pi) / eps
    blocks = sorted({min(n_cap, max(1, math.floor(guess))),
                     min(n_cap, max(1, math.ceil(guess)))})

    def miss(n_blocks: int) -> float:
        u0 = np.linalg.matrix_power(pair.u0, n_blocks)
        u1 = np.linalg.matrix_power(pair.u1, n_blocks)
        m = float(np.real(np.trace(u0 @ u1.conj().T)) / 2.0)
        return abs(0.5 * (1.0 + m) - 0.5)

    return min(blocks, key=miss) * mult


def selectivity_scan(register: SpinRegister, protocol, t_min: float,
                     t_max: float, points: int,
                     iterations: int) -> CoherenceCurve:
    """Px against unit time for the joint register and each spin alone.

    The iteration count is held fixed across the scan, as in a
    resonance-targeting experiment where N is chosen once for the spin
    of interest.
    """
    if not (0.0 < t_min < t_max):
        raise ValueError("need 0 < t_min < t_max")
    if points < 2:
        raise ValueError("points must be >= 2")
    if iterations < 1:
        raise ValueError("iteration count must be >= 1")
    ts = np.linspace(t_min, t_max, points)
    per_spin = {s.label: np.empty(points) for s in register.spins}
    joint = np.ones(points)
    for i, t in enumerate(ts):
        l_joint = 1.0
        for spin in register.spins:
            pair = conditional_evolution(spin, register.f, protocol, t,
                                         iterations)
            m = single_spin_M(pair)
            per_spin[spin.label][i] = 0.5 * (1.0 + m)
            l_joint *= m
        joint[i] = 0.5 * (1.0 + l_joint)
    return CoherenceCurve(ts, joint, per_spin,
                          tuple(s.label for s in register.spins), iterations)


def px_dip_fwhm(p: HyperfineParams, f: FieldConfig, protocol,
                t_center: float, iterations: int,
                window: float = 0.02) -> float:
    """Full width at half depth of the Px dip around a resonant unit time.

    The dip is located by direct search inside the window; half depth is
    midway between 1 and the dip minimum.  The width shrinks roughly as
    1/N since N iterations deepen and narrow the coherence collapse.
    """
    from scipy.optimize import brentq, minimize_scalar

    reg = SpinRegister((p,), f)

    def px(t):
        return register_px(reg, protocol, t, iterations)

    lo, hi = t_center * (1.0 - window), t_center * (1.0 + window)
    ts = np.linspace(lo, hi, 513)
    vals = np.array([px(t) for t in ts])
    i = int(np.argmin(vals))
    if 0 < i < len(ts) - 1:
        res = minimize_scalar(px, bracket=(ts[i - 1], ts[i], ts[i + 1]),
                              method="golden", options={"xtol": 1e-9})
        t_min_loc, px_min = float(res.x), float(res.fun)
    else:
        t_min_loc, px_min = float(ts[i]), float(vals[i])
    half = 0.5 * (1.0 + px_min)

    def excess(t):
        return px(t) - half

    edges = []
    for sign in (-1.0, +1.0):
        step = t_center * 1e-6
        t_out = t_min_loc
        for _ in range(64):
            t_out = t_min_loc + sign * step
            if excess(t_out) > 0.0:
                break
            step *= 2.0
        else:
            raise ValueError("dip too shallow for FWHM")
        a, b = sorted((t_min_loc, t_out))
        edges.append(brentq(excess, a, b, xtol=1e-15,
                            rtol=4.0 * np.finfo(float).eps))
    return float(edges[1] - edges[0])
