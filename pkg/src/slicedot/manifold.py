"""Geometry primitives for the unit sphere S^{d-1} and the rotation group SO(3).

Points are stored as plain numpy arrays; the thin wrapper classes below
validate the manifold invariants on construction and are used at API
boundaries.  All sampling routines take an explicit seed so that runs are
reproducible and common-random-number comparisons are possible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_NORM_TOL = 1e-12
_ORTHO_TOL = 1e-10


def _as_float_array(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class UnitVector:
    """A point on S^{d-1}, stored as a unit-norm coordinate vector."""

    coords: np.ndarray

    def __post_init__(self):
        c = _as_float_array(self.coords, "coords")
        if c.ndim != 1 or c.size < 2:
            raise ValueError("UnitVector needs a 1-d coordinate vector of length >= 2")
        if abs(np.linalg.norm(c) - 1.0) > _NORM_TOL:
            raise ValueError("UnitVector coordinates must have unit norm (tol 1e-12)")
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return self.coords.size


@dataclass(frozen=True)
class Rotation:
    """An element of SO(3) stored as a 3x3 matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_float_array(self.matrix, "matrix")
        if m.shape != (3, 3):
            raise ValueError("Rotation matrix must be 3x3")
        if np.max(np.abs(m.T @ m - np.eye(3))) > _ORTHO_TOL:
            raise ValueError("Rotation matrix is not orthogonal (tol 1e-10)")
        if abs(np.linalg.det(m) - 1.0) > _ORTHO_TOL:
            raise ValueError("Rotation matrix must have determinant 1 (tol 1e-10)")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector at a base point of S^{d-1} or SO(3).

    For a sphere base the vector must be orthogonal to the base point; for a
    rotation base R, R^T vec must be skew-symmetric.
    """

    base: object
    vec: np.ndarray

    def __post_init__(self):
        v = _as_float_array(self.vec, "vec")
        if isinstance(self.base, UnitVector):
            if v.shape != self.base.coords.shape:
                raise ValueError("tangent vector shape mismatch")
            if abs(float(v @ self.base.coords)) > _ORTHO_TOL:
                raise ValueError("vector is not tangent to the sphere at base")
        elif isinstance(self.base, Rotation):
            if v.shape != (3, 3):
                raise ValueError("SO(3) tangent vector must be a 3x3 matrix")
            s = self.base.matrix.T @ v
            if np.max(np.abs(s + s.T)) > _ORTHO_TOL:
                raise ValueError("base^T vec is not skew-symmetric")
        else:
            raise TypeError("base must be a UnitVector or a Rotation")
        object.__setattr__(self, "vec", v)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


@dataclass(frozen=True)
class Quaternion:
    """Unit quaternion (q0, qv) with q0^2 + |qv|^2 = 1."""

    q0: float
    qv: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        qv = _as_float_array(self.qv, "qv")
        if qv.shape != (3,):
            raise ValueError("qv must be a 3-vector")
        q0 = float(self.q0)
        if abs(q0 * q0 + qv @ qv - 1.0) > _NORM_TOL:
            raise ValueError("quaternion must have unit norm (tol 1e-12)")
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "qv", qv)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.q0, -self.qv)


def quat_mul(q: Quaternion, r: Quaternion) -> Quaternion:
    """Quaternion product q * r (the diamond product)."""
    q0 = q.q0 * r.q0 - q.qv @ r.qv
    qv = q.q0 * r.qv + r.q0 * q.qv + np.cross(q.qv, r.qv)
    n = np.sqrt(q0 * q0 + qv @ qv)
    return Quaternion(q0 / n, qv / n)


# ---------------------------------------------------------------------------
# sphere operations


def _clamp(x, lo=-1.0, hi=1.0):
    return np.clip(x, lo, hi)


def geodesic_dist_sphere(a: UnitVector, b: UnitVector) -> float:
    """Great-circle distance arccos(<a, b>) in [0, pi]."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    return float(np.arccos(_clamp(a.coords @ b.coords)))


def geodesic_dist_sphere_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized geodesic distance for arrays of unit vectors (..., d)."""
    return np.arccos(_clamp(np.sum(a * b, axis=-1)))


def proj_tangent_sphere(x: UnitVector, v) -> TangentVector:
    """Orthogonal projection of an ambient vector onto the tangent plane at x."""
    v = _as_float_array(v, "v")
    if v.shape != x.coords.shape:
        raise ValueError("length mismatch")
    w = v - (x.coords @ v) * x.coords
    return TangentVector(x, w)


def exp_sphere(x: UnitVector, v: TangentVector) -> UnitVector:
    """Exponential map cos(|v|) x + sin(|v|) v/|v|; returns x for |v| ~ 0."""
    if v.base is not x and not np.array_equal(v.base.coords, x.coords):
        raise ValueError("tangent vector is not based at x")
    return UnitVector(exp_sphere_arr(x.coords, v.vec))


def exp_sphere_arr(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized sphere exponential map for stacked points/tangents (..., d).

    Tangency of v is assumed; the |v| -> 0 singularity is removable and the
    base point is returned bitwise unchanged there.
    """
    nrm = np.linalg.norm(v, axis=-1, keepdims=True)
    small = nrm < 1e-14
    safe = np.where(small, 1.0, nrm)
    out = np.cos(nrm) * x + np.sin(nrm) * (v / safe)
    out = out / np.linalg.norm(out, axis=-1, keepdims=True)
    return np.where(small, x, out)


def sample_uniform_sphere(dim: int, n: int, seed) -> np.ndarray:
    """Draw n i.i.d. uniform points on S^{dim-1}; returns an (n, dim) array.

    Normalized i.i.d. Gaussian vectors; deterministic given the seed, and the
    first rows of a longer draw coincide with a shorter draw of the same seed.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    rg = np.random.default_rng(seed)
    x = rg.standard_normal((n, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# rotation parameterizations


def rotation_axis_angle(n, omega: float) -> np.ndarray:
    """Rotation matrix with axis n in S^2 and angle omega (Rodrigues form).

    R = (1-cos w) n n^T + cos w I + sin w [n]_x.  The (2,3)/(3,2) entries of
    the axis-angle matrix must carry opposite signs for R to be orthogonal.
    """
    n = _as_float_array(n, "axis")
    if n.shape != (3,):
        raise ValueError("axis must be a 3-vector")
    c, s = np.cos(omega), np.sin(omega)
    cross = np.array(
        [
            [0.0, -n[2], n[1]],
            [n[2], 0.0, -n[0]],
            [-n[1], n[0], 0.0],
        ]
    )
    return (1.0 - c) * np.outer(n, n) + c * np.eye(3) + s * cross


def rotation_euler_zyz(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """ZYZ Euler angles: R_z(alpha) R_y(beta) R_z(gamma)."""
    e3 = np.array([0.0, 0.0, 1.0])
    e2 = np.array([0.0, 1.0, 0.0])
    return rotation_axis_angle(e3, alpha) @ rotation_axis_angle(e2, beta) @ rotation_axis_angle(e3, gamma)


def euler_zyz_angles(R: np.ndarray) -> tuple[float, float, float]:
    """Extract (alpha, beta, gamma) with beta in [0, pi] from a rotation matrix.

    At the gimbal configurations beta in {0, pi} the decomposition is not
    unique; gamma is set to 0 there (harmonics depend only on alpha+gamma,
    resp. alpha-gamma).
    """
    beta = float(np.arccos(_clamp(R[2, 2])))
    sb = np.sin(beta)
    if sb > 1e-12:
        alpha = float(np.arctan2(R[1, 2], R[0, 2]))
        gamma = float(np.arctan2(R[2, 1], -R[2, 0]))
    elif R[2, 2] > 0.0:  # beta = 0, R = R_z(alpha + gamma)
        alpha = float(np.arctan2(R[1, 0], R[0, 0]))
        gamma = 0.0
    else:  # beta = pi, R = R_z(alpha - gamma) R_y(pi)
        alpha = float(np.arctan2(-R[1, 0], -R[0, 0]))
        gamma = 0.0
    return alpha, beta, gamma


def rotation_angle(Q) -> float:
    """Rotation angle arccos((trace(Q) - 1)/2) in [0, pi]."""
    Q = np.asarray(Q, dtype=float)
    return float(np.arccos(_clamp((np.trace(Q) - 1.0) / 2.0)))


def rotation_angle_arr(Q: np.ndarray) -> np.ndarray:
    """Vectorized rotation angle for stacked matrices (..., 3, 3)."""
    tr = np.trace(Q, axis1=-2, axis2=-1)
    return np.arccos(_clamp((tr - 1.0) / 2.0))


def rotation_axis(Q) -> np.ndarray:
    """Rotation axis of Q; uses the symmetric part when sin(angle) < 1e-6.

    For the identity any axis works; e^3 is returned.
    """
    Q = np.asarray(Q, dtype=float)
    w = rotation_angle(Q)
    s = np.sin(w)
    if s >= 1e-6:
        n = np.array([Q[2, 1] - Q[1, 2], Q[0, 2] - Q[2, 0], Q[1, 0] - Q[0, 1]]) / (2.0 * s)
        return n / np.linalg.norm(n)
    if w < 1e-6:
        return np.array([0.0, 0.0, 1.0])
    # angle ~ pi: n n^T = (Q + I)/2 up to O(pi - w); take the dominant column
    M = (Q + np.eye(3)) / 2.0
    k = int(np.argmax(np.diag(M)))
    n = M[:, k]
    return n / np.linalg.norm(n)


def quat_to_rotation(q: Quaternion) -> np.ndarray:
    """The double cover map: unit quaternion to rotation matrix.

    phi(q) = R_{q'/sqrt(1-q0^2)}(2 arccos q0); q0 = +-1 maps to the identity.
    Satisfies phi(-q) = phi(q) and phi(q*r) = phi(q) phi(r).
    """
    q0, qv = q.q0, q.qv
    # canonicalize the sign so that phi(q) and phi(-q) evaluate identically
    if q0 < 0.0 or (q0 == 0.0 and qv[np.argmax(np.abs(qv))] < 0.0):
        q0, qv = -q0, -qv
    s2 = qv @ qv
    if s2 < 1e-28:
        return np.eye(3)
    axis = qv / np.sqrt(s2)
    return rotation_axis_angle(axis, 2.0 * np.arccos(_clamp(q0)))


def rotation_to_quat(R) -> Quaternion:
    """One of the two unit quaternions mapping to R (Shepperd's method)."""
    R = np.asarray(R, dtype=float)
    t = np.trace(R)
    if t > 0.0:
        r = np.sqrt(1.0 + t)
        w = 0.5 * r
        x = (R[2, 1] - R[1, 2]) / (2.0 * r)
        y = (R[0, 2] - R[2, 0]) / (2.0 * r)
        z = (R[1, 0] - R[0, 1]) / (2.0 * r)
    else:
        k = int(np.argmax(np.diag(R)))
        i, j = (k + 1) % 3, (k + 2) % 3
        r = np.sqrt(1.0 + R[k, k] - R[i, i] - R[j, j])
        v = np.empty(3)
        v[k] = 0.5 * r
        v[i] = (R[i, k] + R[k, i]) / (2.0 * r)
        v[j] = (R[j, k] + R[k, j]) / (2.0 * r)
        w = (R[j, i] - R[i, j]) / (2.0 * r)
        x, y, z = v
    n = np.sqrt(w * w + x * x + y * y + z * z)
    return Quaternion(w / n, np.array([x, y, z]) / n)


def sample_uniform_so3(n: int, seed) -> np.ndarray:
    """Draw n Haar-uniform rotations; returns an (n, 3, 3) array.

    Euler angles alpha, gamma ~ U[0, 2pi] and beta = arccos t with
    t ~ U[-1, 1]; this is the normalized bi-invariant measure.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rg = np.random.default_rng(seed)
    u = rg.random((n, 3))
    alpha = 2.0 * np.pi * u[:, 0]
    beta = np.arccos(2.0 * u[:, 1] - 1.0)
    gamma = 2.0 * np.pi * u[:, 2]
    out = np.empty((n, 3, 3))
    for i in range(n):
        out[i] = rotation_euler_zyz(alpha[i], beta[i], gamma[i])
    return out


# ---------------------------------------------------------------------------
# SO(3) tangent structure


def proj_tangent_so3(R, A) -> np.ndarray:
    """Orthogonal projection of a 3x3 matrix onto the tangent space at R.

    proj(A) = (A - R A^T R) / 2; the result T satisfies R^T T skew-symmetric.
    """
    R = np.asarray(R, dtype=float)
    A = np.asarray(A, dtype=float)
    return 0.5 * (A - R @ A.T @ R)


def proj_tangent_so3_arr(R: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Vectorized tangent projection for stacked (..., 3, 3) inputs."""
    At = np.swapaxes(A, -1, -2)
    return 0.5 * (A - R @ At @ R)


def _expm_skew(S: np.ndarray) -> np.ndarray:
    """Matrix exponential of a skew-symmetric 3x3 matrix (Rodrigues form)."""
    w = np.array([S[2, 1], S[0, 2], S[1, 0]])
    th = np.linalg.norm(w)
    if th < 1e-14:
        return np.eye(3) + S
    return np.eye(3) + (np.sin(th) / th) * S + ((1.0 - np.cos(th)) / (th * th)) * (S @ S)


def exp_so3(R, V, retraction: bool = False) -> np.ndarray:
    """Exponential map at R in SO(3): R expm(R^T V) for tangent V.

    With ``retraction=True`` the matrix exponential is replaced by the
    first-order QR retraction qf(R + V).
    """
    R = np.asarray(R, dtype=float)
    V = np.asarray(V, dtype=float)
    if retraction:
        q, r = np.linalg.qr(R + V)
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 2] = -q[:, 2]
        return q
    S = R.T @ V
    S = 0.5 * (S - S.T)  # kill symmetric round-off before exponentiating
    return R @ _expm_skew(S)


def exp_so3_arr(R: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Vectorized SO(3) exponential map for stacked (n, 3, 3) inputs."""
    S = np.swapaxes(R, -1, -2) @ V
    S = 0.5 * (S - np.swapaxes(S, -1, -2))
    w = np.stack([S[..., 2, 1], S[..., 0, 2], S[..., 1, 0]], axis=-1)
    th = np.linalg.norm(w, axis=-1)
    small = th < 1e-14
    safe = np.where(small, 1.0, th)
    a = np.where(small, 1.0, np.sin(th) / safe)
    b = np.where(small, 0.5, (1.0 - np.cos(th)) / (safe * safe))
    eye = np.broadcast_to(np.eye(3), S.shape)
    E = eye + a[..., None, None] * S + b[..., None, None] * (S @ S)
    return R @ E


def polar_retract(R: np.ndarray) -> np.ndarray:
    """Re-orthonormalize stacked rotation matrices via polar decomposition."""
    U, _, Vt = np.linalg.svd(R)
    out = U @ Vt
    det = np.linalg.det(out)
    neg = det < 0
    if np.any(neg):
        U = U.copy()
        U[neg, :, 2] = -U[neg, :, 2]
        out = U @ Vt
    return out
