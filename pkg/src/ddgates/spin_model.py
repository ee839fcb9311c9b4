"""Two-branch spin model: hyperfine parameters, fields, branch Hamiltonians.

The electron is treated as a two-level system whose state selects one of
two nuclear Hamiltonians (hbar = 1, angular frequencies in rad/s):

    h0 = omega_L * Iz                              electron in |0>
    h1 = (omega_L - A_par) * Iz - A_perp * Ix      electron in |1>

with Iz = sigma_z / 2 and Ix = sigma_x / 2.  Branch 1 is a precession at

    omega_tilde = sqrt((omega_L - A_par)^2 + A_perp^2)

about the tilted axis (-A_perp, 0, omega_L - A_par) / omega_tilde.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .su2 import SIGMA_X, SIGMA_Z

# SI constants used by the point-dipole hyperfine map
MU0 = 4.0e-7 * math.pi  # vacuum permeability, T m / A
HBAR = 1.054571817e-34  # reduced Planck constant, J s
GAMMA_E = -1.76085963023e11  # electron gyromagnetic ratio, rad s^-1 T^-1
GAMMA_C13 = 6.728284e7  # 13C gyromagnetic ratio, rad s^-1 T^-1

# unit helpers: the library works in angular rad/s and seconds throughout;
# interfaces quote ordinary frequencies in kHz and times in microseconds
KHZ = 2.0 * math.pi * 1.0e3
MHZ = 2.0 * math.pi * 1.0e6
US = 1.0e-6


def khz_to_rad(f_khz: float) -> float:
    """Ordinary frequency in kHz -> angular frequency in rad/s."""
    return float(f_khz) * KHZ


def rad_to_khz(omega: float) -> float:
    """Angular frequency in rad/s -> ordinary frequency in kHz."""
    return float(omega) / KHZ


@dataclass(frozen=True)
class HyperfineParams:
    """Secular hyperfine coupling of one nuclear spin, in rad/s.

    a_par is the component along the electron quantization axis and may
    take either sign; a_perp is the transverse magnitude and must be
    non-negative (the transverse phase is gauged away by choice of the
    nuclear x axis).
    """

    a_par: float
    a_perp: float
    label: str = ""

    def __post_init__(self):
        if self.a_perp < 0.0:
            raise ValueError("a_perp must be non-negative")

    @property
    def coupling_norm(self) -> float:
        return math.hypot(self.a_par, self.a_perp)


@dataclass(frozen=True)
class FieldConfig:
    """Static field seen by the nucleus: Larmor frequency in rad/s, > 0."""

    omega_larmor: float

    def __post_init__(self):
        if self.omega_larmor <= 0.0:
            raise ValueError("omega_larmor must be positive")


@dataclass(frozen=True)
class BranchHamiltonians:
    """The two conditional nuclear Hamiltonians as dense 2x2 arrays."""

    h0: np.ndarray
    h1: np.ndarray


def branch_hamiltonians(p: HyperfineParams, f: FieldConfig) -> BranchHamiltonians:
    iz = 0.5 * SIGMA_Z
    ix = 0.5 * SIGMA_X
    h0 = f.omega_larmor * iz
    h1 = (f.omega_larmor - p.a_par) * iz - p.a_perp * ix
    return BranchHamiltonians(h0, h1)


def branch_rotations(p: HyperfineParams, f: FieldConfig):
    """Axis-rate form of the two branches.

    Returns (axis0, rate0, axis1, rate1) with h = (rate/2) * axis.sigma,
    so evolution for a time dt is su2_exp(axis, rate * dt).  A vanishing
    branch-1 rate (omega_tilde = 0) degrades gracefully to the identity
    with a +z placeholder axis.
    """
    axis0 = np.array([0.0, 0.0, 1.0])
    rate0 = f.omega_larmor
    vec1 = np.array([-p.a_perp, 0.0, f.omega_larmor - p.a_par])
    rate1 = float(np.linalg.norm(vec1))
    axis1 = vec1 / rate1 if rate1 > 0.0 else np.array([0.0, 0.0, 1.0])
    return axis0, rate0, axis1, rate1


def omega_tilde(p: HyperfineParams, f: FieldConfig) -> float:
    """Precession rate of branch 1, rad/s."""
    return math.hypot(f.omega_larmor - p.a_par, p.a_perp)


def hyperfine_from_geometry(r, gamma_e: float = GAMMA_E,
                            gamma_n: float = GAMMA_C13,
                            hbar: float = HBAR,
                            label: str = "") -> HyperfineParams:
    """Point-dipole hyperfine parameters from a nuclear position vector.

    The coupling tensor is A = C (1 - 3 rhat rhat^T) with
    C = mu0 * gamma_e * gamma_n * hbar / (4 pi r^3), from which
    a_par = A_zz and a_perp = sqrt(A_zx^2 + A_zy^2).  r is in meters and
    the quantization axis is z.  A zero-length r is rejected.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError("r must be a 3-vector")
    norm = float(np.linalg.norm(r))
    if norm == 0.0:
        raise ValueError("singular geometry")
    rhat = r / norm
    prefactor = MU0 * gamma_e * gamma_n * hbar / (4.0 * math.pi * norm ** 3)
    tensor = prefactor * (np.eye(3) - 3.0 * np.outer(rhat, rhat))
    a_par = float(tensor[2, 2])
    a_perp = float(math.hypot(tensor[2, 0], tensor[2, 1]))
    return HyperfineParams(a_par=a_par, a_perp=a_perp, label=label)


def read_register(path) -> list[HyperfineParams]:
    """Load nuclear spins from a CSV with header label,apar_khz,aperp_khz."""
    spins = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"label", "apar_khz", "aperp_khz"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError("register file must have header label,apar_khz,aperp_khz")
        for row in reader:
            spins.append(HyperfineParams(
                a_par=khz_to_rad(float(row["apar_khz"])),
                a_perp=khz_to_rad(float(row["aperp_khz"])),
                label=row["label"].strip(),
            ))
    labels = [s.label for s in spins]
    if len(set(labels)) != len(labels):
        raise ValueError("register labels must be unique")
    return spins
