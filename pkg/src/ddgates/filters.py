"""Decoupling filter functions and noise-overlap integrals.

The filter of a sequence with pi-pulses at fractions delta_1..delta_m of
a total time T, evaluated at x = omega T, is

    F(x) = |1 + (-1)^(m+1) e^(i x) + 2 sum_j (-1)^j e^(i delta_j x)|^2.

Free decay corresponds to the empty pulse list up to a factor 4:
filter_fid returns the conventional sin^2(x/2), while filter_general of
an empty list returns 4 sin^2(x/2).  Low-frequency suppression steepens
with UDD order: F_UDDn ~ x^(2n+2) for x -> 0, which float64 cannot
resolve below x ~ 1e-2 for large n; filter_udd_unit_mp evaluates the
single-unit filter in arbitrary precision for that regime.

The attenuation functional of a noise spectrum S(omega) >= 0 is

    chi(T) = (2/pi) Integral_0^omega_max S(omega)/omega^2 F(omega T) d omega.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .sequences import cpmg_fractions, hybrid_fractions, iterated_fractions, udd_fractions

_POLE_TOL = 1e-8  # |cos(x/4N)| below this: evaluate via the general form
_MIN_POINTS_PER_DECADE = 50


def filter_general(fractions, omega_t, total_pulses: int | None = None):
    """Filter of an arbitrary normalized pulse-fraction list.

    fractions must lie in (0, 1) and be sorted; omega_t is a scalar or
    array of x = omega T values.  total_pulses overrides the pulse
    count used in the boundary sign (defaults to len(fractions)).
    """
    fractions = np.asarray(fractions, dtype=float)
    x = np.asarray(omega_t, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    m = len(fractions) if total_pulses is None else int(total_pulses)
    j = np.arange(1, len(fractions) + 1)
    s = 1.0 + (-1.0) ** (m + 1) * np.exp(1.0j * x)
    if len(fractions):
        s = s + 2.0 * np.sum((-1.0) ** j * np.exp(1.0j * np.outer(x, fractions)),
                             axis=1)
    out = np.abs(s) ** 2
    return float(out[0]) if scalar else out


def filter_cpmg_closed(n: int, omega_t):
    """Closed-form CPMG filter, 16 sec^2(x/4n) sin^2(x/2) sin^4(x/8n).

    The sec^2 poles are removable (the sin^2 zero wins); points within
    _POLE_TOL of a pole are delegated to the general form.
    """
    if n < 1:
        raise ValueError("pulse count must be >= 1")
    x = np.asarray(omega_t, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    c = np.cos(x / (4.0 * n))
    safe = np.abs(c) > _POLE_TOL
    out = np.empty_like(x)
    xs = x[safe]
    out[safe] = (16.0 / np.cos(xs / (4.0 * n)) ** 2 * np.sin(xs / 2.0) ** 2
                 * np.sin(xs / (8.0 * n)) ** 4)
    if not safe.all():
        out[~safe] = filter_general(cpmg_fractions(n), x[~safe])
    return float(out[0]) if scalar else out


def filter_uddn(order: int, n_units: int, omega_t):
    """Filter of n_units back-to-back UDD-`order` units."""
    if n_units < 1:
        raise ValueError("iteration count must be >= 1")
    fr = iterated_fractions(udd_fractions(order), n_units)
    return filter_general(fr, omega_t)


def filter_hybrid(n_cpmg: int, order: int, n_udd: int, omega_t):
    """Filter of a CPMG block followed by UDD units with shared timing.

    n_udd = 0 reduces to the closed-form CPMG filter.
    """
    if n_udd == 0:
        return filter_cpmg_closed(n_cpmg, omega_t)
    return filter_general(hybrid_fractions(n_cpmg, order, n_udd), omega_t)


def filter_fid(omega_t):
    """Free-decay filter sin^2(x/2)."""
    x = np.asarray(omega_t, dtype=float)
    out = np.sin(x / 2.0) ** 2
    return float(out) if out.ndim == 0 else out


def filter_udd_unit_mp(order: int, omega_t, dps: int = 50):
    """Single-unit UDD filter in arbitrary precision (mpmath).

    Resolves the ~x^(2 order + 2) low-frequency floor that underflows
    float64.  Returns an mpf for scalar input, else a list of mpf.
    """
    if order < 1:
        raise ValueError("pulse count must be >= 1")
    with mp.workdps(dps):
        def one(xv):
            xv = mp.mpf(str(xv)) if not isinstance(xv, mp.mpf) else xv
            s = 1 + (-1) ** (order + 1) * mp.e ** (1j * xv)
            for j in range(1, order + 1):
                f = mp.sin(mp.pi * j / (2 * order + 2)) ** 2
                s += 2 * (-1) ** j * mp.e ** (1j * f * xv)
            return abs(s) ** 2

        if np.ndim(omega_t) == 0:
            return one(omega_t)
        return [one(xv) for xv in omega_t]


def udd_suppression_slope(order: int, x_low: float = 1e-4,
                          x_high: float = 1e-2, dps: int = 50) -> float:
    """Log-log slope of the single-unit UDD filter between two small x.

    Approaches 2 order + 2 as x -> 0.
    """
    with mp.workdps(dps):
        f1 = filter_udd_unit_mp(order, mp.mpf(str(x_low)), dps=dps)
        f2 = filter_udd_unit_mp(order, mp.mpf(str(x_high)), dps=dps)
        slope = (mp.log(f2) - mp.log(f1)) / (mp.log(mp.mpf(str(x_high)))
                                             - mp.log(mp.mpf(str(x_low))))
        return float(slope)


@dataclass(frozen=True)
class SpectrumTable:
    """Tabulated one-sided noise spectrum on an ascending angular grid."""

    omega: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        s = np.asarray(self.s, dtype=float)
        if omega.ndim != 1 or omega.shape != s.shape or len(omega) < 2:
            raise ValueError("spectrum needs matching 1-d omega and s arrays")
        if omega[0] <= 0.0 or np.any(np.diff(omega) <= 0.0):
            raise ValueError("spectrum grid must be positive and ascending")
        if np.any(s < 0.0):
            raise ValueError("spectral density must be non-negative")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "s", s)

    @classmethod
    def from_csv(cls, path) -> "SpectrumTable":
        """Load from CSV with header omega_over_2pi_khz,s_value."""
        omegas, values = [], []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"omega_over_2pi_khz", "s_value"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ValueError(
                    "spectrum file must have header omega_over_2pi_khz,s_value")
            for row in reader:
                omegas.append(2.0 * math.pi * 1e3 * float(row["omega_over_2pi_khz"]))
                values.append(float(row["s_value"]))
        return cls(np.array(omegas), np.array(values))

    def interp(self, omega):
        """Linear interpolation, clamped to the boundary values outside."""
        return np.interp(omega, self.omega, self.s)


def chi_integral(spectrum: SpectrumTable, fractions, total_time: float,
                 omega_max: float, total_pulses: int | None = None) -> float:
    """Attenuation chi(T) = (2/pi) int S/omega^2 F(omega T) domega.

    Trapezoid on the union of the user grid (clipped to (0, omega_max]),
    a log-spaced refinement below the first filter lobe at 2 pi / T, and
    a linear refinement fine enough to resolve the filter oscillations.
    The spectrum is clamp-extrapolated beyond its grid.  Warns when the
    user grid is coarser than 50 points per decade.
    """
    if total_time <= 0.0:
        raise ValueError("total time must be positive")
    if omega_max <= spectrum.omega[0]:
        raise ValueError("omega_max must exceed the lowest grid point")

    decades = math.log10(spectrum.omega[-1] / spectrum.omega[0])
    if decades > 0 and len(spectrum.omega) / decades < _MIN_POINTS_PER_DECADE:
        warnings.warn("spectrum grid is coarser than 50 points per decade; "
                      "interpolation error may dominate chi", stacklevel=2)

    lobe = 2.0 * math.pi / total_time
    user = spectrum.omega[(spectrum.omega > 0.0) & (spectrum.omega <= omega_max)]
    low_start = min(user[0], lobe * 1e-4)
    low = np.geomspace(low_start, min(lobe, omega_max), 800)
    # resolve F oscillations: >= 32 samples per 2 pi / T period
    n_lin = max(4000, int(32.0 * omega_max * total_time / (2.0 * math.pi)))
    lin = np.linspace(min(lobe, omega_max), omega_max, n_lin)
    grid = np.unique(np.concatenate([user, low, lin]))

    integrand = (spectrum.interp(grid) / grid ** 2
                 * filter_general(fractions, grid * total_time, total_pulses))
    return float(2.0 / math.pi * np.trapezoid(integrand, grid))
