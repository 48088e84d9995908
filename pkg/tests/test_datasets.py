import numpy as np
import pytest

from slicedot.datasets import (
    VmfParams,
    kde_vmf,
    rotate_measure,
    shape_measure,
    vmf_density,
    vmf_mean_alignment,
    vmf_sample,
)
from slicedot.harmonics import SphereGrid

E3 = np.array([0.0, 0.0, 1.0])


class TestVmfSampling:
    def test_mean_alignment(self):
        kappa = 100.0
        m = vmf_sample(VmfParams(E3, kappa), 10_000, 0)
        u = m.points @ E3
        expect = vmf_mean_alignment(kappa)
        stderr = np.std(u, ddof=1) / np.sqrt(u.size)
        assert abs(np.mean(u) - expect) < 3 * stderr

    def test_high_concentration_tail(self):
        m = vmf_sample(VmfParams(E3, 400.0), 1000, 1)
        angles = np.degrees(np.arccos(np.clip(m.points @ E3, -1, 1)))
        assert np.max(angles) < 15.0

    def test_determinism(self):
        a = vmf_sample(VmfParams(E3, 50.0), 20, 7)
        b = vmf_sample(VmfParams(E3, 50.0), 20, 7)
        assert np.array_equal(a.points, b.points)

    def test_center_equivariance(self):
        # empirical mean points toward the center
        center = np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
        m = vmf_sample(VmfParams(center, 200.0), 2000, 2)
        mean = m.points.mean(axis=0)
        assert np.dot(mean / np.linalg.norm(mean), center) > 0.999

    def test_kappa_validation(self):
        with pytest.raises(ValueError):
            VmfParams(E3, -1.0)
        with pytest.raises(ValueError):
            VmfParams(np.array([1.0, 1.0, 1.0]), 1.0)


class TestVmfDensity:
    def test_center_value(self):
        kappa = 10.0
        expect = kappa * np.exp(kappa) / (4 * np.pi * np.sinh(kappa))
        assert vmf_density(VmfParams(E3, kappa), E3) == pytest.approx(expect)

    def test_normalization_on_grid(self):
        grid = SphereGrid.for_degree(48)
        for kappa in (5.0, 40.0, 100.0):
            f = vmf_density(VmfParams(E3, kappa), grid.points)
            assert np.sum(f * grid.quad_weights) == pytest.approx(1.0, abs=1e-6)

    def test_small_kappa_limit(self):
        grid = SphereGrid.for_degree(8)
        f = vmf_density(VmfParams(E3, 1e-4), grid.points)
        assert np.max(np.abs(f - 1 / (4 * np.pi))) < 1e-4

    def test_large_kappa_no_overflow(self):
        f = vmf_density(VmfParams(E3, 2000.0), np.array([0.0, 1.0, 0.0]))
        assert np.isfinite(f)


class TestShapeMeasures:
    def test_equator_on_equator(self):
        m = shape_measure("equator", 200, 3)
        assert np.max(np.abs(m.points[:, 2])) < 1e-12

    def test_antipodal_diracs(self):
        m = shape_measure("antipodal-diracs", 100, 4)
        assert m.n == 2
        assert np.allclose(m.points, [[0, 0, 1], [0, 0, -1]])
        assert np.allclose(m.weights, [0.5, 0.5])

    def test_croissant_band(self):
        m = shape_measure("croissant", 500, 5)
        phi = np.arctan2(m.points[:, 1], m.points[:, 0])
        assert np.max(np.abs(phi)) <= np.deg2rad(10.0) + 1e-12

    def test_croissant_rotation_equivariance(self):
        from slicedot.manifold import rotation_axis_angle

        base = shape_measure("croissant", 120, 6)
        rotated = rotate_measure(base, E3, np.deg2rad(120.0))
        Q = rotation_axis_angle(E3, np.deg2rad(120.0))
        assert np.allclose(rotated.points, base.points @ Q.T)

    def test_smiley_components(self):
        m = shape_measure("smiley", 600, 7)
        theta = np.degrees(np.arccos(np.clip(m.points[:, 2], -1, 1)))
        mouth = np.abs(theta - 115.0) < 1e-9
        assert 0.4 < np.mean(mouth) < 0.6

    def test_unknown_shape(self):
        with pytest.raises(ValueError):
            shape_measure("torus", 10, 0)


class TestKdeVmf:
    def test_single_point_matches_density(self):
        grid = SphereGrid.for_degree(16)
        m = shape_measure("antipodal-diracs", 2, 8)
        single = m.points[:1]
        from slicedot.slicing import DiscreteMeasure

        kde = kde_vmf(DiscreteMeasure.sphere(single), 25.0, grid)
        expect = vmf_density(VmfParams(single[0], 25.0), grid.points)
        assert np.max(np.abs(kde - expect)) < 1e-12

    def test_integrates_to_one(self):
        grid = SphereGrid.for_degree(32)
        m = vmf_sample(VmfParams(E3, 30.0), 50, 9)
        kde = kde_vmf(m, 40.0, grid)
        assert np.sum(kde * grid.quad_weights) == pytest.approx(1.0, abs=1e-6)

    def test_mirror_symmetry(self):
        grid = SphereGrid.for_degree(12)
        pts = np.array([[0.6, 0.0, 0.8], [-0.6, 0.0, 0.8]])
        from slicedot.slicing import DiscreteMeasure

        kde = kde_vmf(DiscreteMeasure.sphere(pts), 15.0, grid)
        mirrored = grid.points.copy()
        mirrored[:, 0] = -mirrored[:, 0]
        kde_m = kde_vmf(DiscreteMeasure.sphere(pts), 15.0, grid)
        # evaluate at mirrored points via a fresh kernel sum
        inner = mirrored @ pts.T
        kappa = 15.0
        log_norm = np.log(2 * np.pi) + kappa + np.log1p(-np.exp(-2 * kappa))
        ref = np.exp(np.log(kappa) + kappa * inner - log_norm) @ np.array([0.5, 0.5])
        assert np.max(np.abs(kde - ref)) < 1e-10
