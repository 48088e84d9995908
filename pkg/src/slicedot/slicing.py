"""Slicing operators on S^{d-1} and SO(3) and measure pushforwards.

The function-valued transforms in this module are direct quadrature
discretizations of their defining integrals; they serve as independent
oracles for the harmonic (SVD-based) implementations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .manifold import Rotation, UnitVector, rotation_angle_arr, rotation_axis_angle, rotation_euler_zyz
from .ot1d import CircleMeasure, Measure1D

_TWO_PI = 2.0 * np.pi


def as_direction(direction) -> np.ndarray:
    """Coerce a slice direction (UnitVector, Rotation, or array) to an array."""
    if isinstance(direction, UnitVector):
        return direction.coords
    if isinstance(direction, Rotation):
        return direction.matrix
    return np.asarray(direction, dtype=float)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted point cloud on the sphere S^{d-1} or on SO(3).

    ``points`` is an (N, d) array of unit vectors for the sphere, or an
    (N, 3, 3) array of rotation matrices for SO(3); ``weights`` lies on the
    probability simplex (uniform by default).
    """

    manifold: str
    points: np.ndarray
    weights: np.ndarray

    @staticmethod
    def sphere(points, weights=None) -> "DiscreteMeasure":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] < 2:
            raise ValueError("sphere points must form an (N, d) array with d >= 2")
        nrm = np.linalg.norm(pts, axis=1)
        if np.max(np.abs(nrm - 1.0)) > 1e-9:
            raise ValueError("points must lie on the unit sphere")
        return DiscreteMeasure("sphere", pts, _check_weights(weights, pts.shape[0]))

    @staticmethod
    def so3(points, weights=None) -> "DiscreteMeasure":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 2:
            pts = pts[None]
        if pts.ndim != 3 or pts.shape[1:] != (3, 3):
            raise ValueError("SO(3) points must form an (N, 3, 3) array")
        err = np.max(np.abs(np.swapaxes(pts, 1, 2) @ pts - np.eye(3)))
        if err > 1e-8:
            raise ValueError("points must be orthogonal matrices")
        if np.any(np.linalg.det(pts) < 0):
            raise ValueError("points must have determinant +1")
        return DiscreteMeasure("so3", pts, _check_weights(weights, pts.shape[0]))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        if self.manifold != "sphere":
            raise AttributeError("dim is only defined for sphere measures")
        return self.points.shape[1]

    def rotated(self, Q) -> "DiscreteMeasure":
        """Pushforward under the rotation Q (left action)."""
        Q = np.asarray(Q, dtype=float)
        if self.manifold == "sphere":
            return DiscreteMeasure("sphere", self.points @ Q.T, self.weights)
        return DiscreteMeasure("so3", Q[None] @ self.points, self.weights)


def _check_weights(weights, n: int) -> np.ndarray:
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float).ravel()
    if w.size != n:
        raise ValueError("weights length mismatch")
    if np.any(w < -1e-15) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must lie on the probability simplex")
    return np.maximum(w, 0.0)


# ---------------------------------------------------------------------------
# scalar slicing maps


def slice_parallel(psi, xi) -> float:
    """Parallel slicing <xi, psi> in [-1, 1]."""
    return float(np.clip(np.asarray(psi, float) @ np.asarray(xi, float), -1.0, 1.0))


def frame_of_direction(psi) -> np.ndarray:
    """Rotation eul(phi, theta, 0) whose third column is psi = Phi(phi, theta)."""
    psi = np.asarray(psi, dtype=float)
    theta = float(np.arccos(np.clip(psi[2], -1.0, 1.0)))
    phi = float(np.arctan2(psi[1], psi[0]))
    return rotation_euler_zyz(phi, theta, 0.0)


def slice_semicircular(psi, xi) -> tuple[float, bool]:
    """Semicircular slicing: azimuth of xi in the frame rotated to psi.

    Returns (angle in [0, 2 pi), degenerate_flag); the flag is set when the
    back-rotated point sits at a pole, where the azimuth is undefined and 0 is
    returned by convention.
    """
    R = frame_of_direction(psi)
    p = R.T @ np.asarray(xi, dtype=float)
    if p[0] * p[0] + p[1] * p[1] < 1e-28:
        return 0.0, True
    return float(np.mod(np.arctan2(p[1], p[0]), _TWO_PI)), False


def semicircular_angles(psi, points: np.ndarray) -> np.ndarray:
    """Vectorized semicircular slicing of an (N, 3) point array."""
    R = frame_of_direction(psi)
    p = points @ R
    return np.mod(np.arctan2(p[:, 1], p[:, 0]), _TWO_PI)


def slice_so3_angle(Q, P) -> float:
    """Rotation-angle slicing d_Q(P) = angle(Q^T P) in [0, pi]."""
    Q = np.asarray(Q, dtype=float)
    P = np.asarray(P, dtype=float)
    return float(rotation_angle_arr(Q.T @ P))


def slice_so3_trace(psi, R) -> float:
    """Trace slicing trace(R^T psi) = 1 + 2 cos(d_psi(R)) in [-1, 3]."""
    return float(np.sum(np.asarray(R, float) * np.asarray(psi, float)))


def so3_angles(Q, points: np.ndarray) -> np.ndarray:
    """Vectorized d_Q over an (N, 3, 3) rotation array."""
    Q = np.asarray(Q, dtype=float)
    tr = np.einsum("ji,njk->nik", Q, points).trace(axis1=1, axis2=2)
    return np.arccos(np.clip((tr - 1.0) / 2.0, -1.0, 1.0))


def so3_traces(psi, points: np.ndarray) -> np.ndarray:
    """Vectorized trace slicing over an (N, 3, 3) rotation array."""
    return np.einsum("nij,ij->n", points, np.asarray(psi, float))


# ---------------------------------------------------------------------------
# measure pushforward


def pushforward(m: DiscreteMeasure, direction, kind: str):
    """Pushforward of a discrete measure under a scalar slicing map.

    kind in {parallel, semicircular, so3-angle, so3-trace}; returns a sorted
    Measure1D (interval cases) or CircleMeasure (semicircular).  Weights are
    carried along unchanged, so total mass is preserved exactly.  Directions
    may be UnitVector/Rotation values or plain arrays.
    """
    direction = as_direction(direction)
    if kind == "parallel":
        if m.manifold != "sphere":
            raise ValueError("parallel slicing needs a sphere measure")
        vals = m.points @ np.asarray(direction, dtype=float)
        return Measure1D.discrete(np.clip(vals, -1.0, 1.0), m.weights, lo=-1.0, hi=1.0)
    if kind == "semicircular":
        if m.manifold != "sphere" or m.dim != 3:
            raise ValueError("semicircular slicing needs a measure on S^2")
        return CircleMeasure.make(semicircular_angles(direction, m.points), m.weights)
    if kind == "so3-angle":
        if m.manifold != "so3":
            raise ValueError("angle slicing needs an SO(3) measure")
        return Measure1D.discrete(so3_angles(direction, m.points), m.weights, lo=0.0, hi=np.pi)
    if kind == "so3-trace":
        if m.manifold != "so3":
            raise ValueError("trace slicing needs an SO(3) measure")
        return Measure1D.discrete(so3_traces(direction, m.points), m.weights, lo=-1.0, hi=3.0)
    raise ValueError(f"unknown slicing kind: {kind!r}")


# ---------------------------------------------------------------------------
# quadrature transforms (oracles)


def subcircle_points(psi, t: float, order: int) -> np.ndarray:
    """Uniform sample of the subsphere {<xi, psi> = t} on S^2.

    The orthonormal frame {u, v} orthogonal to psi is built by Gram-Schmidt
    against the least-aligned canonical axis, which stays stable for all psi.
    """
    psi = np.asarray(psi, dtype=float)
    k = int(np.argmin(np.abs(psi)))
    e = np.zeros(3)
    e[k] = 1.0
    u = e - (e @ psi) * psi
    u /= np.linalg.norm(u)
    v = np.cross(psi, u)
    ang = _TWO_PI * np.arange(order) / order
    r = np.sqrt(max(1.0 - t * t, 0.0))
    return t * psi + r * (np.cos(ang)[:, None] * u + np.sin(ang)[:, None] * v)


def slice_transform_function(f, psi, t: float, quad_order: int = 64):
    """Parallel slice transform of a function on S^2 at direction psi, level t.

    (1/(|S^2| sqrt(1-t^2))) times the line integral over the subcircle,
    evaluated with the trapezoidal rule (exact for band-limited f once the
    order exceeds twice the degree).  At t = +-1 the continuity value
    f(+-psi)/2 is returned; quadrature never uses it.
    """
    if abs(t) >= 1.0:
        xi = np.sign(t) * np.asarray(psi, dtype=float)
        return 0.5 * np.asarray(f(xi[None])).ravel()[0]
    if quad_order < 8:
        raise ValueError("quad_order must be >= 8")
    pts = subcircle_points(psi, t, quad_order)
    vals = np.asarray(f(pts))
    # arclength element sqrt(1-t^2) cancels the prefactor's sqrt(1-t^2)
    return np.mean(vals) * _TWO_PI / (4.0 * np.pi)


def sphere_quadrature(n_theta: int = 32, n_phi: int = 64):
    """Gauss-Legendre x uniform-azimuth quadrature on S^2.

    Returns (points (n,3), weights summing to 4 pi).
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = _TWO_PI * np.arange(n_phi) / n_phi
    st = np.sqrt(1.0 - x**2)
    pts = np.empty((n_theta, n_phi, 3))
    pts[..., 0] = st[:, None] * np.cos(phi)[None, :]
    pts[..., 1] = st[:, None] * np.sin(phi)[None, :]
    pts[..., 2] = x[:, None]
    wt = np.broadcast_to(w[:, None] * (_TWO_PI / n_phi), (n_theta, n_phi))
    return pts.reshape(-1, 3), wt.ravel().copy()


def so3_radon_function(f, Q, omega: float, n_theta: int = 32, n_phi: int = 64):
    """Radon transform on SO(3) at (Q, omega) by direct sphere quadrature.

    (1/(4 pi^2)) (1 - cos omega) * integral over axes xi of f(Q R_xi(omega)).
    """
    Q = np.asarray(Q, dtype=float)
    pts, wts = sphere_quadrature(n_theta, n_phi)
    rots = np.empty((pts.shape[0], 3, 3))
    for i, xi in enumerate(pts):
        rots[i] = Q @ rotation_axis_angle(xi, omega)
    vals = np.asarray(f(rots))
    integral = np.sum(wts * vals)
    return (1.0 - np.cos(omega)) / (4.0 * np.pi**2) * integral
