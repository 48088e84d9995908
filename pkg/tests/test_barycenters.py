import numpy as np
import pytest

from slicedot.barycenters import (
    FixedSupportProblem,
    RadonBarycenterConfig,
    SgdConfig,
    barycenter_fixed,
    barycenter_free_so3,
    barycenter_free_sphere,
    barycenter_radon,
    fixed_support_1d_value_and_grad,
    project_simplex,
    radon_eval,
    sw_gradient_free,
)
from slicedot.datasets import VmfParams, kde_vmf, shape_measure, vmf_density, vmf_sample
from slicedot.distances import SliceBudget, psw
from slicedot.harmonics import HarmonicCoeffs, SphereGrid, sht_inverse
from slicedot.manifold import (
    proj_tangent_so3,
    rotation_angle,
    rotation_axis_angle,
    sample_uniform_so3,
    sample_uniform_sphere,
)
from slicedot.ot1d import Measure1D, wasserstein_1d
from slicedot.slicing import DiscreteMeasure

E3 = np.array([0.0, 0.0, 1.0])


class TestFreeGradient:
    def test_zero_at_coincidence(self):
        X = sample_uniform_sphere(3, 10, 0)
        m = DiscreteMeasure.sphere(X)
        dirs = sample_uniform_sphere(3, 16, 1)
        g, cost = sw_gradient_free(m, m, dirs, "parallel")
        assert np.max(np.abs(g)) == 0.0
        assert cost == 0.0

    def test_single_direction_meridian(self):
        # points on one meridian sliced by e3: tangent gradient is the
        # inner-product mismatch times the projected direction
        thetas_x = np.array([0.3, 1.1, 2.0])
        thetas_y = np.array([0.5, 1.3, 2.4])
        X = np.stack([np.sin(thetas_x), np.zeros(3), np.cos(thetas_x)], axis=1)
        Y = np.stack([np.sin(thetas_y), np.zeros(3), np.cos(thetas_y)], axis=1)
        dirs = E3[None]
        g, _ = sw_gradient_free(DiscreteMeasure.sphere(X), DiscreteMeasure.sphere(Y), dirs, "parallel")
        # slice values are cos(theta); both lists sorted the same way by theta
        proj_dir = np.stack([dirs[0] - (X @ dirs[0])[k] * X[k] for k in range(3)])
        expect = (2.0 / 3.0) * (np.cos(thetas_x) - np.cos(thetas_y))[:, None] * proj_dir
        assert np.allclose(g, expect, atol=1e-12)

    def test_finite_differences_sphere(self):
        rng = np.random.default_rng(2)
        N = 6
        X = sample_uniform_sphere(3, N, 3)
        Y = sample_uniform_sphere(3, N, 4)
        dirs = sample_uniform_sphere(3, 30, 5)
        g, _ = sw_gradient_free(DiscreteMeasure.sphere(X), DiscreteMeasure.sphere(Y), dirs, "parallel")

        def obj(Xp):
            sx = np.sort(dirs @ Xp.T, axis=1)
            sy = np.sort(dirs @ Y.T, axis=1)
            return np.mean(np.sum((sx - sy) ** 2, axis=1) / N)

        h = 1e-6
        eucl = np.zeros_like(X)
        for k in range(N):
            for a in range(3):
                Xp, Xm = X.copy(), X.copy()
                Xp[k, a] += h
                Xm[k, a] -= h
                eucl[k, a] = (obj(Xp) - obj(Xm)) / (2 * h)
        proj = eucl - np.sum(X * eucl, axis=1, keepdims=True) * X
        assert np.max(np.abs(proj - g)) < 1e-4 * max(1.0, np.max(np.abs(g)))

    def test_finite_differences_so3(self):
        N = 4
        X = sample_uniform_so3(N, 6)
        Y = sample_uniform_so3(N, 7)
        dirs = sample_uniform_so3(25, 8)
        g, _ = sw_gradient_free(DiscreteMeasure.so3(X), DiscreteMeasure.so3(Y), dirs, "so3-trace")

        def obj(Xp):
            sx = np.sort(np.einsum("qab,nab->qn", dirs, Xp), axis=1)
            sy = np.sort(np.einsum("qab,nab->qn", dirs, Y), axis=1)
            return np.mean(np.sum((sx - sy) ** 2, axis=1) / N)

        h = 1e-6
        eucl = np.zeros_like(X)
        for k in range(N):
            for a in range(3):
                for b in range(3):
                    Xp, Xm = X.copy(), X.copy()
                    Xp[k, a, b] += h
                    Xm[k, a, b] -= h
                    eucl[k, a, b] = (obj(Xp) - obj(Xm)) / (2 * h)
        proj = np.array([proj_tangent_so3(X[k], eucl[k]) for k in range(N)])
        assert np.max(np.abs(proj - g)) < 1e-4 * max(1.0, np.max(np.abs(g)))

    def test_duplicate_points_flagged(self):
        X = np.tile(E3, (3, 1))
        Y = DiscreteMeasure.sphere(sample_uniform_sphere(3, 3, 9))
        with pytest.warns(RuntimeWarning, match="duplicate"):
            sw_gradient_free(
                DiscreteMeasure.sphere(X), Y, sample_uniform_sphere(3, 4, 9), "parallel"
            )

    def test_batch_averaging_converges(self):
        # averaging gradients over K independent batches concentrates ~ K^{-1/2}
        X = sample_uniform_sphere(3, 8, 10)
        Y = sample_uniform_sphere(3, 8, 11)
        mx, my = DiscreteMeasure.sphere(X), DiscreteMeasure.sphere(Y)

        def spread(K):
            grads = []
            for i in range(K):
                dirs = sample_uniform_sphere(3, 16, 100 + i)
                g, _ = sw_gradient_free(mx, my, dirs, "parallel")
                grads.append(g)
            grads = np.array(grads)
            return np.linalg.norm(grads.std(axis=0) / np.sqrt(K))

        assert spread(64) == pytest.approx(spread(16) / 2.0, rel=0.4)


class TestFreeSupportSphere:
    def test_single_input_stationary(self):
        Y = DiscreteMeasure.sphere(sample_uniform_sphere(3, 15, 12))
        cfg = SgdConfig.constant_step(10, 16, 1.0, seed=13, init=Y)
        res = barycenter_free_sphere([Y], [1.0], cfg)
        assert np.array_equal(res.measure.points, Y.points)
        assert np.max(np.abs(res.loss_trace)) == 0.0

    def test_iterates_stay_on_sphere(self):
        inputs = [
            DiscreteMeasure.sphere(sample_uniform_sphere(3, 20, s)) for s in (14, 15)
        ]
        res = barycenter_free_sphere(inputs, [0.5, 0.5], SgdConfig.constant_step(40, 32, 10.0, seed=16))
        norms = np.linalg.norm(res.measure.points, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-12

    def test_two_vmf_loss_decreases(self):
        m1 = vmf_sample(VmfParams(np.array([1.0, 0, 0]), 100.0), 60, 17)
        m2 = vmf_sample(VmfParams(np.array([0, 1.0, 0]), 100.0), 60, 18)
        cfg = SgdConfig.constant_step(250, 128, 40.0, seed=19)
        res = barycenter_free_sphere([m1, m2], [0.5, 0.5], cfg)
        tr = res.loss_trace
        assert np.mean(tr[-25:]) < 0.55 * tr[0]

    def test_antipodal_high_concentration_stays_spread(self):
        # flat landscape: energy stays at the antipodal constant and the
        # iterate remains close to its uniform initialization
        m1 = vmf_sample(VmfParams(E3, 400.0), 80, 20)
        m2 = vmf_sample(VmfParams(-E3, 400.0), 80, 21)
        cfg = SgdConfig.constant_step(200, 128, 40.0, seed=22)
        res = barycenter_free_sphere([m1, m2], [0.5, 0.5], cfg)
        assert res.loss_trace[-1] == pytest.approx(2.0 / 3.0, abs=0.08)
        init = DiscreteMeasure.sphere(sample_uniform_sphere(3, 80, 22))
        moved = psw(res.measure, init, SliceBudget(P=1500, seed=23))
        assert moved.value < 0.25

    def test_input_validation(self):
        m = DiscreteMeasure.sphere(sample_uniform_sphere(3, 5, 24))
        with pytest.raises(ValueError):
            barycenter_free_sphere([m], [0.7], SgdConfig.constant_step(1, 4, 1.0))
        with pytest.raises(ValueError):
            barycenter_free_sphere([], [], SgdConfig.constant_step(1, 4, 1.0))


class TestFreeSupportSO3:
    def test_single_input_stationary(self):
        Y = DiscreteMeasure.so3(sample_uniform_so3(10, 25))
        cfg = SgdConfig.constant_step(5, 16, 1.0, seed=26, init=Y)
        res = barycenter_free_so3([Y], [1.0], cfg)
        assert np.max(np.abs(res.loss_trace)) < 1e-28

    def test_two_clusters_between(self):
        def cluster(center, seed, n=60, spread=0.15):
            rg = np.random.default_rng(seed)
            pts = np.empty((n, 3, 3))
            for i in range(n):
                ax = rg.standard_normal(3)
                ax /= np.linalg.norm(ax)
                pts[i] = center @ rotation_axis_angle(ax, abs(rg.normal(0, spread)))
            return DiscreteMeasure.so3(pts)

        C1 = np.eye(3)
        C2 = rotation_axis_angle(E3, np.deg2rad(92.0))
        m1, m2 = cluster(C1, 27), cluster(C2, 28)
        cfg = SgdConfig.constant_step(250, 128, 2.0, seed=29)
        res = barycenter_free_so3([m1, m2], [0.5, 0.5], cfg)
        assert res.loss_trace[-1] < 0.5 * res.loss_trace[0]
        a1 = np.rad2deg(np.mean([rotation_angle(C1.T @ R) for R in res.measure.points]))
        a2 = np.rad2deg(np.mean([rotation_angle(C2.T @ R) for R in res.measure.points]))
        assert 30.0 < a1 < 70.0
        assert 30.0 < a2 < 70.0

    def test_iterates_remain_rotations(self):
        inputs = [DiscreteMeasure.so3(sample_uniform_so3(12, s)) for s in (30, 31)]
        res = barycenter_free_so3(inputs, [0.5, 0.5], SgdConfig.constant_step(120, 32, 1.0, seed=32))
        X = res.measure.points
        err = np.max(np.abs(np.swapaxes(X, 1, 2) @ X - np.eye(3)))
        assert err < 1e-8


class TestFixedSupport1D:
    def test_identical_weights(self):
        t = np.array([-0.5, 0.0, 0.7])
        w = np.array([0.2, 0.5, 0.3])
        val, g = fixed_support_1d_value_and_grad(t, w, w, 2.0)
        assert val == 0.0
        assert np.max(np.abs(g)) == 0.0

    def test_value_matches_quantile_sweep(self):
        rng = np.random.default_rng(33)
        for _ in range(400):
            N = int(rng.integers(2, 11))
            t = np.sort(rng.uniform(-1, 1, N))
            if np.any(np.diff(t) < 1e-9):
                continue
            w = rng.dirichlet(np.ones(N))
            v = rng.dirichlet(np.ones(N))
            p = float(rng.choice([1.0, 2.0]))
            val, _ = fixed_support_1d_value_and_grad(t, w, v, p)
            ref = wasserstein_1d(Measure1D.discrete(t, w), Measure1D.discrete(t, v), p) ** p
            assert val == pytest.approx(ref, abs=1e-10)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(34)
        checked = 0
        while checked < 60:
            N = int(rng.integers(3, 9))
            t = np.sort(rng.uniform(-1, 1, N))
            if np.any(np.diff(t) < 1e-3):
                continue
            w = rng.dirichlet(np.ones(N) * 5) * 0.9 + 0.1 / N
            w /= w.sum()
            v = rng.dirichlet(np.ones(N))
            _, g = fixed_support_1d_value_and_grad(t, w, v, 2.0)
            h = 1e-6
            ok = True
            for i in range(N - 1):
                d = np.zeros(N)
                d[i] = 1.0
                d -= d.mean()
                vp, _ = fixed_support_1d_value_and_grad(t, w + h * d, v, 2.0)
                vm, _ = fixed_support_1d_value_and_grad(t, w - h * d, v, 2.0)
                fd = (vp - vm) / (2 * h)
                if abs(fd - g @ d) > 1e-4 * max(1.0, abs(fd)):
                    ok = False
            assert ok
            checked += 1

    def test_gradient_lies_in_hyperplane(self):
        rng = np.random.default_rng(35)
        t = np.sort(rng.uniform(-1, 1, 7))
        _, g = fixed_support_1d_value_and_grad(t, rng.dirichlet(np.ones(7)), rng.dirichlet(np.ones(7)), 2.0)
        assert g.sum() == pytest.approx(0.0, abs=1e-14)


class TestProjectSimplex:
    def test_fixed_point(self):
        x = np.array([0.2, 0.5, 0.3])
        assert np.allclose(project_simplex(x), x)

    def test_two_dim_example(self):
        assert np.allclose(project_simplex(np.array([2.0, 0.0])), [1.0, 0.0])

    def test_symmetric_example(self):
        assert np.allclose(project_simplex(np.array([0.4, 0.4, 0.4])), np.ones(3) / 3)

    def test_against_grid_search(self):
        rng = np.random.default_rng(36)
        grid = np.linspace(0, 1, 4001)
        cand = np.stack([grid, 1 - grid], axis=1)
        for _ in range(20):
            x = rng.normal(size=2) * 2
            px = project_simplex(x)
            best = cand[np.argmin(np.sum((cand - x) ** 2, axis=1))]
            assert np.linalg.norm(px - best) < 1e-3

    def test_output_on_simplex(self):
        rng = np.random.default_rng(37)
        for _ in range(50):
            px = project_simplex(rng.normal(size=10) * 3)
            assert px.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(px >= 0)


class TestBarycenterFixed:
    def test_single_input_stationary(self):
        sup = DiscreteMeasure.sphere(sample_uniform_sphere(3, 30, 38))
        rng = np.random.default_rng(39)
        v = rng.dirichlet(np.ones(30))
        prob = FixedSupportProblem(sup, v[None], np.array([1.0]))
        init = DiscreteMeasure.sphere(sup.points, v)
        res = barycenter_fixed(prob, SgdConfig(8, 16, lambda l: 0.01, seed=40, init=init))
        assert np.allclose(res.measure.weights, v, atol=1e-12)
        assert np.max(res.loss_trace) < 1e-20

    def test_weights_stay_on_simplex(self):
        sup = DiscreteMeasure.sphere(sample_uniform_sphere(3, 40, 41))
        rng = np.random.default_rng(42)
        vs = np.stack([rng.dirichlet(np.ones(40)) for _ in range(2)])
        prob = FixedSupportProblem(sup, vs, np.array([0.5, 0.5]))
        res = barycenter_fixed(prob, SgdConfig(30, 16, lambda l: 0.01, seed=43))
        w = res.measure.weights
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(w >= 0)

    def test_smiley_loss_decreases_after_smoothing(self):
        grid = SphereGrid.for_degree(20, n_theta=16, n_phi=48)
        sup = DiscreteMeasure.sphere(grid.points)
        va = kde_vmf(vmf_sample(VmfParams(np.array([1.0, 0, 0]), 30.0), 300, 44), 30.0, grid)
        vb = kde_vmf(shape_measure("smiley", 300, 45), 80.0, grid)
        wa = va * grid.quad_weights
        wa /= wa.sum()
        wb = vb * grid.quad_weights
        wb /= wb.sum()
        prob = FixedSupportProblem(sup, np.stack([wa, wb]), np.array([0.5, 0.5]))
        cfg = SgdConfig(120, 50, lambda l: 0.005 * (1 + l / 20) ** -0.5, seed=46)
        res = barycenter_fixed(prob, cfg)
        tr = res.loss_trace
        sm = np.convolve(tr, np.ones(20) / 20, mode="valid")
        assert sm[-1] < 0.25 * sm[0]
        # plateau noise allowance: 2% of the initial smoothed loss
        assert np.max(np.diff(sm)) < 0.02 * sm[0]


def bandlimited_density(grid, degree, seed):
    rng = np.random.default_rng(seed)
    c = HarmonicCoeffs.zeros("sphere2", degree)
    for n in range(degree + 1):
        c.set(complex(rng.normal() * 0.6**n), n, 0)
        for k in range(1, n + 1):
            v = (rng.normal() + 1j * rng.normal()) * 0.6**n
            c.set(v, n, k)
            c.set((-1) ** k * np.conj(v), n, -k)
    g = np.real(sht_inverse(c, grid))
    f = g**2 + 0.05
    return f / np.sum(f * grid.quad_weights)


class TestBarycenterRadon:
    def test_identity_reproduces_input(self):
        D = 16
        grid = SphereGrid.for_degree(D)
        f = bandlimited_density(grid, 7, 47)
        res = barycenter_radon([f], [1.0], RadonBarycenterConfig(D=D, grid=grid))
        w = grid.quad_weights
        rel = np.sqrt(np.sum((res["values"] - f) ** 2 * w) / np.sum(f**2 * w))
        assert rel < 1e-3

    def test_equal_inputs_reproduced(self):
        D = 12
        grid = SphereGrid.for_degree(D)
        f = bandlimited_density(grid, 5, 48)
        res = barycenter_radon([f, f], [0.5, 0.5], RadonBarycenterConfig(D=D, grid=grid))
        w = grid.quad_weights
        rel = np.sqrt(np.sum((res["values"] - f) ** 2 * w) / np.sum(f**2 * w))
        assert rel < 2e-3

    def test_output_is_probability_density(self):
        D = 12
        grid = SphereGrid.for_degree(D)
        f1 = vmf_density(VmfParams(E3, 20.0), grid.points)
        f2 = vmf_density(VmfParams(np.array([1.0, 0, 0]), 20.0), grid.points)
        res = barycenter_radon([f1, f2], [0.5, 0.5], RadonBarycenterConfig(D=D, grid=grid))
        assert np.all(res["values"] >= 0)
        assert np.sum(res["values"] * grid.quad_weights) == pytest.approx(1.0, abs=1e-10)

    def test_rotation_equivariance(self):
        D = 24
        grid = SphereGrid.for_degree(D)
        Q = rotation_axis_angle(np.array([1.0, 1.0, 0.0]) / np.sqrt(2), 0.7)
        cfg = RadonBarycenterConfig(D=D, grid=grid)
        p1 = VmfParams(E3, 30.0)
        p2 = VmfParams(np.array([0.0, 1.0, 0.0]), 30.0)
        base = barycenter_radon(
            [vmf_density(p1, grid.points), vmf_density(p2, grid.points)], [0.5, 0.5], cfg
        )
        rot = barycenter_radon(
            [
                vmf_density(VmfParams(Q @ p1.center, 30.0), grid.points),
                vmf_density(VmfParams(Q @ p2.center, 30.0), grid.points),
            ],
            [0.5, 0.5],
            cfg,
        )
        ref = radon_eval(base, grid.points @ Q)
        w = grid.quad_weights
        rel = np.sqrt(np.sum((rot["values"] - ref) ** 2 * w) / np.sum(ref**2 * w))
        assert rel < 5e-2

    def test_rejects_zero_mass(self):
        grid = SphereGrid.for_degree(8)
        with pytest.raises(ValueError):
            barycenter_radon([np.zeros(grid.n_points)], [1.0], RadonBarycenterConfig(D=8, grid=grid))
