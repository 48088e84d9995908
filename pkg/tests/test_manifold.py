import numpy as np
import pytest

from slicedot.manifold import (
    Quaternion,
    Rotation,
    TangentVector,
    UnitVector,
    euler_zyz_angles,
    exp_so3,
    exp_sphere,
    geodesic_dist_sphere,
    proj_tangent_so3,
    proj_tangent_sphere,
    quat_mul,
    quat_to_rotation,
    rotation_angle,
    rotation_axis_angle,
    rotation_euler_zyz,
    rotation_to_quat,
    sample_uniform_so3,
    sample_uniform_sphere,
)

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def uv(*coords):
    return UnitVector(np.asarray(coords, dtype=float))


class TestGeodesicDistance:
    def test_identical(self):
        assert geodesic_dist_sphere(uv(1, 0, 0), uv(1, 0, 0)) == 0.0

    def test_orthogonal(self):
        assert geodesic_dist_sphere(uv(1, 0, 0), uv(0, 1, 0)) == pytest.approx(np.pi / 2)

    def test_antipodal(self):
        assert geodesic_dist_sphere(uv(0, 0, 1), uv(0, 0, -1)) == pytest.approx(np.pi)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            geodesic_dist_sphere(uv(1, 0, 0), uv(1, 0, 0, 0))

    def test_euclidean_bounds(self):
        # chordal distance <= geodesic <= (pi/2) chordal, on random pairs
        rng = np.random.default_rng(0)
        for d in (3, 5, 10):
            a = sample_uniform_sphere(d, 50, rng.integers(2**32))
            b = sample_uniform_sphere(d, 50, rng.integers(2**32))
            chord = np.linalg.norm(a - b, axis=1)
            geo = np.arccos(np.clip(np.sum(a * b, axis=1), -1, 1))
            assert np.all(chord <= geo + 1e-12)
            assert np.all(geo <= np.pi / 2 * chord + 1e-12)


class TestSphereExpMap:
    def test_zero_vector(self):
        x = uv(1, 0, 0)
        assert np.allclose(exp_sphere(x, TangentVector(x, np.zeros(3))).coords, E1)

    def test_quarter_great_circle(self):
        x = uv(1, 0, 0)
        v = TangentVector(x, (np.pi / 2) * E2)
        assert np.allclose(exp_sphere(x, v).coords, E2, atol=1e-15)

    def test_half_great_circle(self):
        x = uv(1, 0, 0)
        v = TangentVector(x, np.pi * E2)
        assert np.allclose(exp_sphere(x, v).coords, -E1, atol=1e-15)

    def test_distance_equals_norm(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            x = UnitVector(sample_uniform_sphere(4, 1, rng.integers(2**32))[0])
            raw = rng.normal(size=4)
            v = proj_tangent_sphere(x, raw)
            scale = rng.uniform(0.0, np.pi) / max(v.norm, 1e-9)
            v = TangentVector(x, v.vec * scale)
            y = exp_sphere(x, v)
            assert geodesic_dist_sphere(x, y) == pytest.approx(v.norm, abs=1e-10)


class TestTangentProjection:
    def test_radial_killed(self):
        assert np.allclose(proj_tangent_sphere(uv(1, 0, 0), E1).vec, 0.0)

    def test_already_tangent(self):
        assert np.allclose(proj_tangent_sphere(uv(1, 0, 0), E2).vec, E2)

    def test_direct_evaluation(self):
        got = proj_tangent_sphere(uv(0, 0, 1), np.array([1.0, 1.0, 1.0]))
        assert np.allclose(got.vec, [1.0, 1.0, 0.0])


class TestUniformSphereSampling:
    def test_second_moment(self):
        psi = sample_uniform_sphere(3, 1000, 42)
        assert np.mean(psi[:, 2] ** 2) == pytest.approx(1.0 / 3.0, abs=0.03)

    def test_determinism(self):
        a = sample_uniform_sphere(3, 10, 7)
        b = sample_uniform_sphere(3, 10, 7)
        assert np.array_equal(a, b)

    def test_mean_symmetry(self):
        x = sample_uniform_sphere(10, 5000, 3)
        assert np.max(np.abs(x.mean(axis=0))) < 0.05

    def test_prefix_stability(self):
        # the first rows of a longer draw coincide with a shorter draw
        short = sample_uniform_sphere(5, 100, 11)
        long = sample_uniform_sphere(5, 200, 11)
        assert np.array_equal(short, long[:100])

    def test_bad_dim(self):
        with pytest.raises(ValueError):
            sample_uniform_sphere(1, 5, 0)


class TestAxisAngle:
    def test_zero_angle(self):
        assert np.allclose(rotation_axis_angle(E3, 0.0), np.eye(3))

    def test_z_quarter_turn(self):
        R = rotation_axis_angle(E3, np.pi / 2)
        assert np.allclose(R @ E1, E2, atol=1e-15)

    def test_x_half_turn(self):
        assert np.allclose(rotation_axis_angle(E1, np.pi), np.diag([1.0, -1.0, -1.0]))

    def test_valid_rotation(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = sample_uniform_sphere(3, 1, rng.integers(2**32))[0]
            R = rotation_axis_angle(n, rng.uniform(0, 2 * np.pi))
            Rotation(R)  # invariant check


class TestEulerZYZ:
    def test_identity(self):
        assert np.allclose(rotation_euler_zyz(0, 0, 0), np.eye(3))

    def test_degenerate_beta(self):
        a, g = 0.7, 1.9
        assert np.allclose(rotation_euler_zyz(a, 0.0, g), rotation_axis_angle(E3, a + g))

    def test_matrix_product_oracle(self):
        def rz(t):
            c, s = np.cos(t), np.sin(t)
            return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])

        def ry(t):
            c, s = np.cos(t), np.sin(t)
            return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])

        got = rotation_euler_zyz(np.pi / 2, np.pi / 2, 0.0)
        assert np.allclose(got, rz(np.pi / 2) @ ry(np.pi / 2), atol=1e-15)

    def test_extraction_round_trip(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            Q = sample_uniform_so3(1, rng.integers(2**32))[0]
            a, b, g = euler_zyz_angles(Q)
            assert 0.0 <= b <= np.pi
            assert np.allclose(rotation_euler_zyz(a, b, g), Q, atol=1e-12)

    def test_extraction_gimbal(self):
        for b in (0.0, np.pi):
            Q = rotation_euler_zyz(0.4, b, 1.1)
            a2, b2, g2 = euler_zyz_angles(Q)
            assert g2 == 0.0
            assert np.allclose(rotation_euler_zyz(a2, b2, g2), Q, atol=1e-12)


class TestRotationAngle:
    def test_identity(self):
        assert rotation_angle(np.eye(3)) == 0.0

    def test_axis_angle_in_range(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            n = sample_uniform_sphere(3, 1, rng.integers(2**32))[0]
            w = rng.uniform(0, np.pi)
            assert rotation_angle(rotation_axis_angle(n, w)) == pytest.approx(w, abs=1e-12)

    def test_reflex_angle_wraps(self):
        R = rotation_axis_angle(E3, 3 * np.pi / 2)
        assert rotation_angle(R) == pytest.approx(np.pi / 2, abs=1e-12)

    def test_bi_invariance(self):
        rng = np.random.default_rng(3)
        Q, P, A = sample_uniform_so3(3, 17)
        lhs = rotation_angle((A @ Q).T @ (A @ P))
        rhs = rotation_angle(Q.T @ P)
        assert lhs == pytest.approx(rhs, abs=1e-12)
        assert rotation_angle(P.T @ Q) == pytest.approx(rhs, abs=1e-12)


class TestQuaternions:
    def test_identity(self):
        assert np.allclose(quat_to_rotation(Quaternion(1.0, np.zeros(3))), np.eye(3))

    def test_axis_angle_form(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            n = sample_uniform_sphere(3, 1, rng.integers(2**32))[0]
            w = rng.uniform(0, 2 * np.pi)
            q = Quaternion(np.cos(w / 2), np.sin(w / 2) * n)
            assert np.allclose(quat_to_rotation(q), rotation_axis_angle(n, w), atol=1e-12)

    def test_homomorphism(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            q = rotation_to_quat(sample_uniform_so3(1, rng.integers(2**32))[0])
            r = rotation_to_quat(sample_uniform_so3(1, rng.integers(2**32))[0])
            lhs = quat_to_rotation(quat_mul(q, r))
            rhs = quat_to_rotation(q) @ quat_to_rotation(r)
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_sign_flip_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            q = rotation_to_quat(sample_uniform_so3(1, rng.integers(2**32))[0])
            assert np.array_equal(quat_to_rotation(q), quat_to_rotation(-q))

    def test_round_trip(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            R = sample_uniform_so3(1, rng.integers(2**32))[0]
            assert np.allclose(quat_to_rotation(rotation_to_quat(R)), R, atol=1e-12)


class TestUniformSO3Sampling:
    def test_determinism(self):
        assert np.array_equal(sample_uniform_so3(5, 3), sample_uniform_so3(5, 3))

    def test_harmonic_orthonormality_mc(self):
        # Monte Carlo of the weighted L2 norm of the degree-1 harmonic
        from slicedot.harmonics import wigner_D_normalized

        rots = sample_uniform_so3(10_000, 123)
        vals = np.array([wigner_D_normalized(1, 0, 0, R) for R in rots])
        # uniform measure = sigma / (8 pi^2), so E|D~|^2 = 1/(8 pi^2)
        est = 8 * np.pi**2 * np.mean(np.abs(vals) ** 2)
        assert est == pytest.approx(1.0, abs=0.05)

    def test_angle_density_chi2(self):
        from scipy.stats import chi2

        rots = sample_uniform_so3(100_000, 99)
        tr = np.trace(rots, axis1=1, axis2=2)
        ang = np.arccos(np.clip((tr - 1) / 2, -1, 1))
        edges = np.linspace(0, np.pi, 21)
        counts, _ = np.histogram(ang, edges)
        # density (1 - cos w)/pi integrates bin-wise in closed form
        cdf = (edges - np.sin(edges)) / np.pi
        expected = np.diff(cdf) * ang.size
        stat = np.sum((counts - expected) ** 2 / expected)
        assert stat < chi2.ppf(0.999, df=len(counts) - 1)


class TestSO3Tangent:
    def test_skew_passthrough(self):
        S = np.array([[0.0, -0.3, 0.2], [0.3, 0.0, -0.1], [-0.2, 0.1, 0.0]])
        assert np.allclose(proj_tangent_so3(np.eye(3), S), S)

    def test_symmetric_killed(self):
        A = np.array([[1.0, 0.5, 0.2], [0.5, 2.0, 0.1], [0.2, 0.1, 3.0]])
        assert np.allclose(proj_tangent_so3(np.eye(3), A), 0.0)

    def test_result_is_tangent(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            R = sample_uniform_so3(1, rng.integers(2**32))[0]
            A = rng.normal(size=(3, 3))
            T = proj_tangent_so3(R, A)
            S = R.T @ T
            assert np.max(np.abs(S + S.T)) < 1e-12


class TestSO3ExpMap:
    def test_zero_tangent(self):
        R = sample_uniform_so3(1, 13)[0]
        assert np.allclose(exp_so3(R, np.zeros((3, 3))), R)

    def test_rodrigues_oracle(self):
        for w in (0.3, 1.2, 2.9):
            S = w * np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
            assert np.allclose(exp_so3(np.eye(3), S), rotation_axis_angle(E3, w), atol=1e-12)

    def test_group_closure(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            R = sample_uniform_so3(1, rng.integers(2**32))[0]
            V = proj_tangent_so3(R, rng.normal(size=(3, 3)))
            Rotation(exp_so3(R, V))

    def test_qr_retraction_close_for_small_steps(self):
        rng = np.random.default_rng(15)
        R = sample_uniform_so3(1, 16)[0]
        V = 1e-3 * proj_tangent_so3(R, rng.normal(size=(3, 3)))
        exact = exp_so3(R, V)
        retr = exp_so3(R, V, retraction=True)
        Rotation(retr)
        assert np.max(np.abs(exact - retr)) < 1e-5


class TestTypeInvariants:
    def test_unit_vector_norm(self):
        with pytest.raises(ValueError):
            UnitVector(np.array([1.0, 1.0]))

    def test_rotation_orthogonality(self):
        with pytest.raises(ValueError):
            Rotation(np.eye(3) * 1.001)

    def test_rotation_det(self):
        with pytest.raises(ValueError):
            Rotation(np.diag([1.0, 1.0, -1.0]))

    def test_tangent_sphere(self):
        x = uv(1, 0, 0)
        with pytest.raises(ValueError):
            TangentVector(x, E1)

    def test_tangent_so3(self):
        with pytest.raises(ValueError):
            TangentVector(Rotation(np.eye(3)), np.eye(3))

    def test_quaternion_norm(self):
        with pytest.raises(ValueError):
            Quaternion(1.0, np.array([0.1, 0.0, 0.0]))
