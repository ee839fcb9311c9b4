"""Exact SU(2) algebra: axis-angle construction and decomposition.

All rotations are stored as plain 2x2 complex numpy arrays.  The angle
convention is fixed once and for all by the trace of the matrix itself:

    U = cos(angle/2) * 1 - i sin(angle/2) * (n . sigma)

with angle in [0, 2pi) and sin(angle/2) >= 0.  Under this convention the
decomposition is unique away from angle = 0 and angle = 2pi, where the
axis is unobservable and the result is flagged degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)

# angle closer than this to 0 or 2pi: axis is numerically unobservable
DEGENERATE_ANGLE_TOL = 1e-9
_UNITARY_TOL = 1e-9

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class AxisAngle:
    """Axis-angle decomposition of an SU(2) element.

    axis is a unit 3-vector; angle is in [0, 2pi); degenerate marks
    rotations indistinguishable from the identity, for which the axis
    is reported as +z by convention and must not be trusted.
    """

    axis: np.ndarray
    angle: float
    degenerate: bool = False


def su2_exp(axis, angle: float) -> np.ndarray:
    """Rotation by `angle` about `axis`: exp(-i * angle/2 * n.sigma).

    The axis need not be normalized; only its direction is used.  A zero
    axis is allowed for zero angle (identity) and rejected otherwise.
    """
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,):
        raise ValueError("axis must be a 3-vector")
    norm = float(np.linalg.norm(axis))
    if norm == 0.0:
        if angle == 0.0:
            return IDENTITY2.copy()
        raise ValueError("degenerate axis")
    n = axis / norm
    half = 0.5 * float(angle)
    n_dot_sigma = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return np.cos(half) * IDENTITY2 - 1.0j * np.sin(half) * n_dot_sigma


def _require_su2(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if not np.allclose(u.conj().T @ u, IDENTITY2, atol=_UNITARY_TOL):
        raise ValueError("matrix is not unitary")
    if abs(np.linalg.det(u) - 1.0) > _UNITARY_TOL:
        raise ValueError("matrix is not special unitary")
    return u


def axis_angle(u) -> AxisAngle:
    """Decompose an SU(2) matrix into AxisAngle under the fixed convention.

    angle = 2 arccos(Re tr(u) / 2) lies in [0, 2pi] and is folded into
    [0, 2pi); sin(angle/2) >= 0 by construction, so the axis sign is
    determined by the matrix.  Within DEGENERATE_ANGLE_TOL of the
    identity (angle near 0 or 2pi) the axis defaults to +z and the
    result is flagged degenerate.
    """
    u = _require_su2(u)
    cos_half = float(np.real(u[0, 0] + u[1, 1])) / 2.0
    cos_half = min(1.0, max(-1.0, cos_half))
    angle = 2.0 * np.arccos(cos_half)
    if angle <= DEGENERATE_ANGLE_TOL or (TWO_PI - angle) <= DEGENERATE_ANGLE_TOL:
        return AxisAngle(np.array([0.0, 0.0, 1.0]), angle % TWO_PI, True)
    sin_half = np.sqrt(max(0.0, 1.0 - cos_half * cos_half))
    nx = -float(np.imag(u[0, 1] + u[1, 0])) / (2.0 * sin_half)
    ny = float(np.real(u[1, 0] - u[0, 1])) / (2.0 * sin_half)
    nz = -float(np.imag(u[0, 0] - u[1, 1])) / (2.0 * sin_half)
    axis = np.array([nx, ny, nz])
    axis /= np.linalg.norm(axis)
    return AxisAngle(axis, float(angle), False)


def axes_dot(u0, u1, angle_tol: float | None = 1e-6) -> tuple[float, float]:
    """Dot product of the rotation axes of two SU(2) elements.

    Returns (dot, angle) where angle is the branch-0 rotation angle.
    Both inputs must be non-degenerate.  When angle_tol is not None the
    two rotation angles must agree within it; sequences built from the
    same pulse timing satisfy this exactly for symmetric units and to a
    few parts in 1e3 for the higher-order nonuniform ones, so callers
    comparing such branches relax or disable the check.
    """
    a0 = axis_angle(u0)
    a1 = axis_angle(u1)
    if a0.degenerate or a1.degenerate:
        raise ValueError("degenerate axis")
    if angle_tol is not None and abs(a0.angle - a1.angle) > angle_tol:
        raise ValueError("branch angle mismatch")
    return float(a0.axis @ a1.axis), a0.angle
