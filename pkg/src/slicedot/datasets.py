"""Synthetic measures on S^2 used by the experiments.

von Mises-Fisher sampling and density (exact inverse-CDF sampler, stable for
large concentrations), the frozen benchmark shapes, and vMF kernel density
estimation for rendering point clouds as densities.

Shape definitions (the published experiments leave them informal; these are
the reproducible stand-ins used throughout this repository):

- ``croissant``: area-uniform band of width 20 degrees around the phi = 0
  meridian, spanning pole to pole.
- ``smiley``: two vMF "eyes" (kappa = 80) at Phi(+-20 deg, 70 deg), weight
  1/4 each, and a 90-degree "mouth" arc at theta = 115 deg, weight 1/2.
- ``equator``: uniform on the great circle xi_3 = 0.
- ``antipodal-diracs``: two points +-e^3 with weights 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harmonics import SphereGrid
from .manifold import rotation_axis_angle
from .slicing import DiscreteMeasure

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class VmfParams:
    """von Mises-Fisher parameters: unit center and concentration kappa > 0."""

    center: np.ndarray
    kappa: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.shape != (3,) or abs(np.linalg.norm(c) - 1.0) > 1e-9:
            raise ValueError("center must be a unit 3-vector")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        object.__setattr__(self, "center", c)


def _tangent_frame(eta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = int(np.argmin(np.abs(eta)))
    e = np.zeros(3)
    e[k] = 1.0
    u = e - (e @ eta) * eta
    u /= np.linalg.norm(u)
    return u, np.cross(eta, u)


def vmf_sample(params: VmfParams, n: int, seed) -> DiscreteMeasure:
    """Exact vMF sampling via the inverse CDF of the center-alignment coordinate.

    With u = <xi, eta>, the CDF inverts to u = 1 + log(r + (1-r) e^{-2 kappa})
    / kappa, which stays finite for arbitrarily large kappa; the azimuth
    around the center is uniform.
    """
    rg = np.random.default_rng(seed)
    draws = rg.random((n, 2))
    kappa = params.kappa
    u = 1.0 + np.log(draws[:, 0] + (1.0 - draws[:, 0]) * np.exp(-2.0 * kappa)) / kappa
    u = np.clip(u, -1.0, 1.0)
    phi = _TWO_PI * draws[:, 1]
    t1, t2 = _tangent_frame(params.center)
    s = np.sqrt(np.maximum(1.0 - u * u, 0.0))
    pts = (
        u[:, None] * params.center[None, :]
        + s[:, None] * (np.cos(phi)[:, None] * t1 + np.sin(phi)[:, None] * t2)
    )
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return DiscreteMeasure.sphere(pts)


def vmf_mean_alignment(kappa: float) -> float:
    """E[<xi, eta>] = coth(kappa) - 1/kappa."""
    return 1.0 / np.tanh(kappa) - 1.0 / kappa


def vmf_density(params: VmfParams, xi) -> np.ndarray | float:
    """vMF density kappa e^{kappa <xi, eta>} / (4 pi sinh kappa) w.r.t. sigma.

    Evaluated in log space so that large concentrations do not overflow.
    """
    pts = np.atleast_2d(np.asarray(xi, dtype=float))
    inner = pts @ params.center
    kappa = params.kappa
    # log(4 pi sinh k) = log(2 pi) + k + log1p(-exp(-2k))
    log_norm = np.log(2.0 * np.pi) + kappa + np.log1p(-np.exp(-2.0 * kappa))
    out = np.exp(np.log(kappa) + kappa * inner - log_norm)
    return float(out[0]) if np.asarray(xi).ndim == 1 else out


def _sph(phi, theta):
    return np.stack(
        [np.cos(phi) * np.sin(theta), np.sin(phi) * np.sin(theta), np.cos(theta)], axis=-1
    )


def shape_measure(name: str, n: int, seed) -> DiscreteMeasure:
    """Sample one of the frozen benchmark shapes (see module docstring)."""
    rg = np.random.default_rng(seed)
    if name == "antipodal-diracs":
        pts = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        return DiscreteMeasure.sphere(pts, [0.5, 0.5])
    if name == "equator":
        phi = _TWO_PI * rg.random(n)
        return DiscreteMeasure.sphere(np.stack([np.cos(phi), np.sin(phi), np.zeros(n)], axis=1))
    if name == "croissant":
        half = np.deg2rad(10.0)
        phi = rg.uniform(-half, half, n)
        theta = np.arccos(rg.uniform(-1.0, 1.0, n))
        return DiscreteMeasure.sphere(_sph(phi, theta))
    if name == "smiley":
        kinds = rg.random(n)
        phi_eye = np.deg2rad(20.0)
        theta_eye = np.deg2rad(70.0)
        eyes = [_sph(s * phi_eye, theta_eye) for s in (-1.0, 1.0)]
        pts = np.empty((n, 3))
        for i in range(n):
            if kinds[i] < 0.5:  # mouth arc
                phi = rg.uniform(-np.pi / 4, np.pi / 4)
                pts[i] = _sph(phi, np.deg2rad(115.0))
            else:
                center = eyes[0] if kinds[i] < 0.75 else eyes[1]
                pts[i] = vmf_sample(VmfParams(center, 80.0), 1, rg.integers(2**63)).points[0]
        return DiscreteMeasure.sphere(pts)
    raise ValueError(f"unknown shape: {name!r}")


def rotate_measure(m: DiscreteMeasure, axis, angle: float) -> DiscreteMeasure:
    """Rotate a sphere measure rigidly about an axis."""
    return m.rotated(rotation_axis_angle(np.asarray(axis, float), angle))


def kde_vmf(m: DiscreteMeasure, kappa_kernel: float, grid: SphereGrid) -> np.ndarray:
    """Kernel density estimate on the grid with vMF kernels at the sample points.

    A mixture of normalized kernels, so the result integrates to 1 under the
    grid quadrature up to quadrature error.
    """
    if m.manifold != "sphere" or m.dim != 3:
        raise ValueError("kde_vmf needs a measure on S^2")
    pts = grid.points
    inner = pts @ m.points.T  # (n_grid, N)
    kappa = kappa_kernel
    log_norm = np.log(2.0 * np.pi) + kappa + np.log1p(-np.exp(-2.0 * kappa))
    kernels = np.exp(np.log(kappa) + kappa * inner - log_norm)
    return kernels @ m.weights
