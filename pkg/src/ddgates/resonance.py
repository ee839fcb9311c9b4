"""Resonance analytics: closed-form timings, numerical refinement, scans.

A conditional resonance is a unit time where the two branch rotation
axes anti-align (axes dot -> -1), making the unit a conditional rotation
of the nucleus.  An unconditional point is where both branches rotate
about the same transverse axis (here +-x), so the sequence drives the
nucleus identically in both branches.

Closed forms exist for CPMG, UDD3 (as its doubled unit) and UDD4; all
unit times are nominal unit times in seconds and all angles radians.
The closed-form expressions for the unconditional *angles* are leading
-order estimates and are kept only as seeds and documentation; refined
values are always preferred.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .sequences import conditional_evolution, unit_fractions
from .spin_model import FieldConfig, HyperfineParams
from .su2 import axis_angle

_SQRT2 = math.sqrt(2.0)
_SQRT5 = math.sqrt(5.0)

ANALYTIC_PROTOCOLS = ("cpmg", "udd3", "udd4")
RESONANCE_KINDS = ("conditional", "unconditional", "udd4_set2")

# golden-section relative tolerance on the refined unit time
_REFINE_XTOL = 1e-6
_GRID_POINTS = 257
_DENSE_GRID_POINTS = 4097


@dataclass(frozen=True)
class ResonancePoint:
    """One resonance of a protocol: analytic seed plus refined values."""

    protocol: str
    kind: str
    k: int
    t_analytic: float
    phi_analytic: float
    t_refined: float | None = None
    phi_refined: float | None = None
    dot_refined: float | None = None
    n0x_refined: float | None = None


@dataclass(frozen=True)
class SweepResult:
    """Axis geometry along a unit-time grid (branch-0 angle, x-components)."""

    t: np.ndarray
    dot: np.ndarray
    phi: np.ndarray
    n0x: np.ndarray
    n1x: np.ndarray


@dataclass(frozen=True)
class RobustnessCurve:
    """Axes dot against relative timing error around a refined resonance."""

    label: str
    t_ref: float
    epsilon: np.ndarray
    dot: np.ndarray


def analytic_resonance(protocol: str, kind: str, k: int, p: HyperfineParams,
                       f: FieldConfig) -> ResonancePoint:
    """Closed-form resonance unit time and rotation angle.

    protocol is one of cpmg/udd3/udd4 and kind one of conditional,
    unconditional, udd4_set2 (the second conditional family unique to
    UDD4).  k >= 1 indexes the resonance order.  UDD3 times are nominal
    unit times of the doubled unit.  Unconditional angle formulas are
    coarse seeds; refine before quoting them.
    """
    protocol = protocol.lower()
    if protocol not in ANALYTIC_PROTOCOLS:
        raise ValueError(f"no analytic resonance for protocol {protocol!r}")
    if kind not in RESONANCE_KINDS:
        raise ValueError(f"unknown resonance kind {kind!r}")
    if kind == "udd4_set2" and protocol != "udd4":
        raise ValueError("udd4_set2 resonances exist only for udd4")
    if k < 1:
        raise ValueError("resonance order k must be >= 1")

    wl = f.omega_larmor
    apar, aperp = p.a_par, p.a_perp
    d = 2.0 * wl - apar
    if d <= 0.0:
        raise ValueError("resonance denominator 2*omega_L - a_par must be positive")
    denom = wl - apar
    odd = 2 * k - 1

    if protocol == "cpmg":
        if kind == "conditional":
            t = 4.0 * math.pi * odd / d
            phi = 2.0 * math.pi - 2.0 * aperp / denom
        else:
            t = 8.0 * math.pi * k / d
            phi = k * math.pi * aperp * apar / denom ** 2
    elif protocol == "udd3":
        if kind == "conditional":
            t = 2.0 * math.pi * odd / d
            phi = 2.0 * math.pi - 2.0 * aperp * (
                1.0 - 2.0 * math.cos(odd * math.pi / (2.0 * _SQRT2))) / denom
        else:
            t = 4.0 * math.pi * k / d
            trig_c = (math.cos(_SQRT2 * math.pi * k)
                      + 2.0 * _SQRT2 * math.cos(math.pi * k / _SQRT2) + 2.0)
            trig_s = (math.pi * k + math.sin(_SQRT2 * math.pi * k)
                      - 2.0 * math.sin(math.pi * k / _SQRT2))
            phi = (2.0 * aperp / ((2.0 * _SQRT2 + 2.0) * denom ** 2)) * math.sqrt(
                (math.pi * apar * k) ** 2 * trig_c
                + (2.0 * _SQRT2 + 3.0) * aperp ** 2 * trig_s ** 2)
    else:  # udd4
        if kind == "conditional":
            t = 4.0 * math.pi * odd / d
            phi = 2.0 * math.pi - 2.0 * _SQRT2 * aperp * math.cos(
                odd * _SQRT5 * math.pi / 4.0) / denom
        elif kind == "udd4_set2":
            t = 8.0 * math.pi * odd / d
            phi = 4.0 * aperp * math.cos(odd * _SQRT5 * math.pi / 2.0) / denom
        else:
            t = 16.0 * math.pi * k / d
            phi = (2.0 * k * aperp * math.pi
                   * math.sqrt(aperp ** 2
                               + apar ** 2 * math.cos(k * _SQRT5 * math.pi) ** 2)
                   / denom ** 2)
    return ResonancePoint(protocol, kind, k, t, phi)


def branch_geometry(p: HyperfineParams, f: FieldConfig, protocol,
                    unit_time: float, iterations: int = 0):
    """(dot, phi0, n0x, n1x) of the branch pair at one unit time.

    iterations = 0 selects the smallest iteration count valid for the
    protocol (1, or 2 for doubled odd-order units); the axes dot does
    not depend on it.  Degenerate pairs report dot = 1 and zero
    x-components.
    """
    _, mult = unit_fractions(protocol)
    n = iterations if iterations else mult
    pair = conditional_evolution(p, f, protocol, unit_time, n)
    a0 = axis_angle(pair.u0)
    a1 = axis_angle(pair.u1)
    if a0.degenerate or a1.degenerate:
        return 1.0, a0.angle, 0.0, 0.0
    return float(a0.axis @ a1.axis), a0.angle, float(a0.axis[0]), float(a1.axis[0])


def _valid_iterations(protocol, n_probe: int) -> int:
    _, mult = unit_fractions(protocol)
    return max(1, -(-n_probe // mult)) * mult


def _golden_minimize(objective, ts, values):
    """Golden-section polish of a gridded minimum; falls back to bounded."""
    i = int(np.argmin(values))
    if 0 < i < len(ts) - 1 and values[i] < values[i - 1] and values[i] < values[i + 1]:
        res = minimize_scalar(objective, bracket=(ts[i - 1], ts[i], ts[i + 1]),
                              method="golden", options={"xtol": _REFINE_XTOL})
        return float(res.x)
    lo = ts[max(0, i - 1)]
    hi = ts[min(len(ts) - 1, i + 1)]
    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                          options={"xatol": _REFINE_XTOL * ts[i]})
    return float(res.x)


def refine_resonance(point: ResonancePoint, p: HyperfineParams, f: FieldConfig,
                     n_probe: int = 1, window: float = 0.02) -> ResonancePoint:
    """Numerically refine an analytic resonance within a relative window.

    Conditional resonances (and the udd4 second set) are located by
    minimizing the branch axes dot; the refinement fails with
    "no resonance in window" if the dot never drops below zero there.
    Unconditional points maximize |n0x|, the x-component of the branch-0
    axis, which approaches 1 where both branches rotate about x.
    Returns a copy with t_refined, phi_refined, dot_refined and
    n0x_refined populated.
    """
    if n_probe < 1:
        raise ValueError("n_probe must be >= 1")
    if window <= 0.0:
        raise ValueError("window must be positive")
    n_iter = _valid_iterations(point.protocol, n_probe)

    def geometry(t):
        return branch_geometry(p, f, point.protocol, t, n_iter)

    lo = point.t_analytic * (1.0 - window)
    hi = point.t_analytic * (1.0 + window)

    if point.kind in ("conditional", "udd4_set2"):
        def objective(t):
            return geometry(t)[0]

        ts = np.linspace(lo, hi, _GRID_POINTS)
        vals = np.array([objective(t) for t in ts])
        if vals.min() > 0.0:
            ts = np.linspace(lo, hi, _DENSE_GRID_POINTS)
            vals = np.array([objective(t) for t in ts])
            if vals.min() > 0.0:
                raise ValueError("no resonance in window")
        t_star = _golden_minimize(objective, ts, vals)
    else:
        def objective(t):
            return -abs(geometry(t)[2])

        ts = np.linspace(lo, hi, _GRID_POINTS)
        vals = np.array([objective(t) for t in ts])
        if vals.min() > -1e-9:
            raise ValueError("no resonance in window")
        t_star = _golden_minimize(objective, ts, vals)

    dot, phi, n0x, _ = geometry(t_star)
    return dataclasses.replace(point, t_refined=t_star, phi_refined=phi,
                               dot_refined=dot, n0x_refined=n0x)


def locate(protocol: str, kind: str, k: int, p: HyperfineParams,
           f: FieldConfig, n_probe: int = 1,
           window: float = 0.02) -> ResonancePoint:
    """Analytic seed plus refinement in one call."""
    return refine_resonance(analytic_resonance(protocol, kind, k, p, f),
                            p, f, n_probe=n_probe, window=window)


def sweep(p: HyperfineParams, f: FieldConfig, protocol, t_min: float,
          t_max: float, points: int, iterations: int = 0) -> SweepResult:
    """Branch-axis geometry on a uniform unit-time grid."""
    if not (0.0 < t_min < t_max):
        raise ValueError("need 0 < t_min < t_max")
    if points < 2:
        raise ValueError("points must be >= 2")
    ts = np.linspace(t_min, t_max, points)
    rows = [branch_geometry(p, f, protocol, t, iterations) for t in ts]
    dot, phi, n0x, n1x = (np.array(col) for col in zip(*rows))
    return SweepResult(ts, dot, phi, n0x, n1x)


def selectivity_fwhm(p: HyperfineParams, f: FieldConfig, protocol,
                     kind: str = "conditional", k: int = 1,
                     iterations: int = 1, window: float = 0.02,
                     point: ResonancePoint | None = None
                     ) -> tuple[float, ResonancePoint]:
    """Full width of a conditional dip at axes dot = -1/2, in seconds.

    The resonance is refined first; each flank is then bisected for the
    dot = -1/2 crossing.  Dips whose refined dot stays above -1/2 raise
    "dip too shallow for FWHM".

    Powering a rotation leaves its axis unchanged, so the returned width
    does not depend on iterations; the parameter only sets the repeat
    count at which the geometry is evaluated.  A pre-refined point may be
    supplied for protocols without an analytic seed.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if point is None:
        point = locate(protocol, kind, k, p, f, window=window)
    elif point.t_refined is None:
        point = refine_resonance(point, p, f, window=window)
    if point.dot_refined is None or point.dot_refined > -0.5:
        raise ValueError("dip too shallow for FWHM")
    n_iter = _valid_iterations(protocol, iterations)

    def excess(t):
        return branch_geometry(p, f, protocol, t, n_iter)[0] + 0.5

    t0 = point.t_refined
    edges = []
    for sign in (-1.0, +1.0):
        step = t0 * 1e-6
        t_out = t0
        for _ in range(64):
            t_out = t0 + sign * step
            if excess(t_out) > 0.0:
                break
            step *= 2.0
        else:
            raise ValueError("dip too shallow for FWHM")
        a, b = sorted((t0, t_out))
        edges.append(brentq(excess, a, b, xtol=1e-15,
                            rtol=4.0 * np.finfo(float).eps))
    return float(edges[1] - edges[0]), point


def timing_robustness(p: HyperfineParams, f: FieldConfig, entries,
                      epsilon: float = 0.003,
                      points: int = 201) -> list[RobustnessCurve]:
    """Axes dot versus relative unit-time error for several resonances.

    entries is an iterable of (label, protocol, kind, k); each resonance
    is refined and the dot evaluated at t_ref * (1 + eps) over a
    symmetric epsilon grid.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if points < 3:
        raise ValueError("points must be >= 3")
    eps = np.linspace(-epsilon, epsilon, points)
    curves = []
    for label, protocol, kind, k in entries:
        point = locate(protocol, kind, k, p, f)
        n_iter = _valid_iterations(protocol, 1)
        dot = np.array([branch_geometry(p, f, protocol,
                                        point.t_refined * (1.0 + e),
                                        n_iter)[0]
                        for e in eps])
        curves.append(RobustnessCurve(label, point.t_refined, eps, dot))
    return curves
