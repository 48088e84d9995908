"""Band-limited harmonic analysis on S^2, SO(3) and the interval.

Legendre and normalized Legendre polynomials (general dimension), spherical
harmonics on S^2, Wigner d/D functions, the grid transforms, and the
SVD-based forward evaluation and Moore-Penrose pseudoinverse of the parallel
slice transform and of the SO(3) Radon transform.

All recurrences run in the normalized bases, which keeps them stable far
beyond the degrees used here (factorial-based closed forms overflow around
degree 15).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .manifold import euler_zyz_angles

_TWO_PI = 2.0 * np.pi


def surface_area(d: int) -> float:
    """Surface area |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def n_harmonics(n: int, d: int) -> int:
    """Dimension N_{n,d} of the space of degree-n spherical harmonics."""
    if d == 2:
        return 1 if n == 0 else 2
    return (2 * n + d - 2) * math.factorial(n + d - 3) // (math.factorial(n) * math.factorial(d - 2))


def legendre_all(D: int, d: int, t) -> np.ndarray:
    """Legendre polynomials P_{n,d}(t), n = 0..D, normalized by P_{n,d}(1) = 1.

    Three-term recurrence (n+d-2) P_{n+1} = (2n+d-2) t P_n - n P_{n-1};
    for d = 2 these are the Chebyshev polynomials of the first kind.
    Returns an array of shape (D+1,) + t.shape.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty((D + 1,) + t.shape)
    out[0] = 1.0
    if D == 0:
        return out
    out[1] = t
    if d == 2:
        for n in range(1, D):
            out[n + 1] = 2.0 * t * out[n] - out[n - 1]
        return out
    for n in range(1, D):
        out[n + 1] = ((2 * n + d - 2) * t * out[n] - n * out[n - 1]) / (n + d - 2)
    return out


def legendre_normalized_all(D: int, d: int, t) -> np.ndarray:
    """Normalized Legendre polynomials, orthonormal w.r.t. (1-t^2)^{(d-3)/2} dt."""
    P = legendre_all(D, d, t)
    for n in range(D + 1):
        P[n] *= math.sqrt(n_harmonics(n, d) * surface_area(d - 1) / surface_area(d))
    return P


def legendre_normalized(n: int, d: int, t):
    """Normalized Legendre polynomial value(s) at degree n, dimension d."""
    vals = legendre_normalized_all(n, d, np.asarray(t, dtype=float))[n]
    return float(vals) if np.isscalar(t) else vals


# ---------------------------------------------------------------------------
# spherical harmonics on S^2


def _assoc_legendre_normalized(D: int, x: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre Q_n^k for 0 <= k <= n <= D.

    Q_n^k(x) = sqrt((2n+1)/(4 pi) (n-k)!/(n+k)!) P_n^k(x) with the
    Condon-Shortley phase, so that Y_n^k = Q_n^k(cos theta) e^{i k phi}.
    Returned as a dense array of shape (D+1, D+1) + x.shape indexed [n, k].
    """
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.maximum(1.0 - x * x, 0.0))
    Q = np.zeros((D + 1, D + 1) + x.shape)
    Q[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for k in range(1, D + 1):
        Q[k, k] = -math.sqrt((2 * k + 1) / (2.0 * k)) * s * Q[k - 1, k - 1]
    for k in range(D):
        Q[k + 1, k] = math.sqrt(2 * k + 3) * x * Q[k, k]
    for k in range(D + 1):
        for n in range(k + 2, D + 1):
            a = math.sqrt((4.0 * n * n - 1.0) / (n * n - k * k))
            b = math.sqrt(
                (2.0 * n + 1.0) * ((n - 1.0) ** 2 - k * k) / ((2.0 * n - 3.0) * (n * n - k * k))
            )
            Q[n, k] = a * x * Q[n - 1, k] - b * Q[n - 2, k]
    return Q


def sph_index(n: int, k: int) -> int:
    """Flat index of (n, k), |k| <= n, in the degree-major coefficient layout."""
    return n * n + n + k


def sph_harm_all(D: int, points: np.ndarray) -> np.ndarray:
    """All spherical harmonics Y_n^k, n <= D, at unit vectors (N, 3).

    Returns a complex array of shape ((D+1)^2, N) indexed by ``sph_index``.
    Negative orders use Y_n^{-k} = (-1)^k conj(Y_n^k).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x = np.clip(pts[:, 2], -1.0, 1.0)
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    Q = _assoc_legendre_normalized(D, x)
    out = np.zeros(((D + 1) ** 2, pts.shape[0]), dtype=complex)
    for k in range(D + 1):
        e = np.exp(1j * k * phi)
        for n in range(k, D + 1):
            ypos = Q[n, k] * e
            out[sph_index(n, k)] = ypos
            if k > 0:
                out[sph_index(n, -k)] = (-1.0) ** k * np.conj(ypos)
    return out


def sph_harmonic(n: int, k: int, xi) -> complex:
    """Single orthonormal complex spherical harmonic Y_n^k(xi) on S^2."""
    if abs(k) > n:
        raise ValueError("order must satisfy |k| <= n")
    pts = np.asarray(xi, dtype=float).reshape(1, 3)
    return complex(sph_harm_all(n, pts)[sph_index(n, k), 0])


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre x uniform-azimuth quadrature grid on S^2.

    Integrates spherical polynomials of degree <= exactness exactly; the
    quadrature weights sum to |S^2| = 4 pi.
    """

    thetas: np.ndarray
    phis: np.ndarray
    gl_weights: np.ndarray
    exactness: int
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @staticmethod
    def for_degree(D: int, n_theta: int | None = None, n_phi: int | None = None) -> "SphereGrid":
        """Grid exact for products of degree-D harmonics (exactness 2D)."""
        G = n_theta if n_theta is not None else D + 1
        n_az = n_phi if n_phi is not None else 2 * D + 2
        x, w = np.polynomial.legendre.leggauss(G)
        order = np.argsort(-x)  # theta increasing from the north pole
        grid = SphereGrid(
            thetas=np.arccos(x[order]),
            phis=_TWO_PI * np.arange(n_az) / n_az,
            gl_weights=w[order],
            exactness=min(2 * G - 1, n_az - 1),
        )
        grid._validate(min(D, 8))
        return grid

    @property
    def n_theta(self) -> int:
        return self.thetas.size

    @property
    def n_phi(self) -> int:
        return self.phis.size

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_theta, self.n_phi)

    @property
    def n_points(self) -> int:
        return self.thetas.size * self.phis.size

    @property
    def points(self) -> np.ndarray:
        """Flattened (n_points, 3) coordinates, theta-major."""
        cached = self._cache.get("points")
        if cached is None:
            st, ct = np.sin(self.thetas), np.cos(self.thetas)
            cp, sp = np.cos(self.phis), np.sin(self.phis)
            pts = np.empty((self.n_theta, self.n_phi, 3))
            pts[..., 0] = st[:, None] * cp[None, :]
            pts[..., 1] = st[:, None] * sp[None, :]
            pts[..., 2] = ct[:, None]
            cached = pts.reshape(-1, 3)
            self._cache["points"] = cached
        return cached

    @property
    def quad_weights(self) -> np.ndarray:
        """Flattened quadrature weights, summing to 4 pi."""
        cached = self._cache.get("weights")
        if cached is None:
            w = self.gl_weights[:, None] * (_TWO_PI / self.n_phi)
            cached = np.broadcast_to(w, self.shape).ravel().copy()
            self._cache["weights"] = cached
        return cached

    def harmonic_table(self, D: int) -> np.ndarray:
        """Cached table of Y_n^k at the grid points, shape ((D+1)^2, n_points)."""
        key = ("table", D)
        if key not in self._cache:
            self._cache[key] = sph_harm_all(D, self.points)
        return self._cache[key]

    def _validate(self, D: int):
        if D < 1:
            return
        T = self.harmonic_table(D)
        w = self.quad_weights
        rng = np.random.default_rng(0)
        for _ in range(6):
            n, m = rng.integers(0, D + 1, size=2)
            k = int(rng.integers(-n, n + 1))
            l = int(rng.integers(-m, m + 1))
            g = np.sum(T[sph_index(n, k)] * np.conj(T[sph_index(m, l)]) * w)
            expect = 1.0 if (n, k) == (m, l) else 0.0
            if abs(g - expect) > 1e-8:
                raise RuntimeError("sphere grid failed its orthonormality self-check")


@dataclass
class HarmonicCoeffs:
    """Band-limited coefficient table.

    ``sphere2``: flat complex array of length (D+1)^2 indexed by ``sph_index``.
    ``so3``: complex array of shape (D+1, 2D+1, 2D+1) indexed [n, D+j, D+k].
    """

    kind: str
    degree_max: int
    table: np.ndarray

    @staticmethod
    def zeros(kind: str, D: int) -> "HarmonicCoeffs":
        if kind == "sphere2":
            return HarmonicCoeffs(kind, D, np.zeros((D + 1) ** 2, dtype=complex))
        if kind == "so3":
            return HarmonicCoeffs(kind, D, np.zeros((D + 1, 2 * D + 1, 2 * D + 1), dtype=complex))
        raise ValueError("kind must be 'sphere2' or 'so3'")

    def get(self, n: int, *orders: int) -> complex:
        if self.kind == "sphere2":
            (k,) = orders
            return complex(self.table[sph_index(n, k)])
        j, k = orders
        return complex(self.table[n, self.degree_max + j, self.degree_max + k])

    def set(self, value: complex, n: int, *orders: int) -> None:
        if self.kind == "sphere2":
            (k,) = orders
            self.table[sph_index(n, k)] = value
        else:
            j, k = orders
            self.table[n, self.degree_max + j, self.degree_max + k] = value


def sht_forward(grid: SphereGrid, values: np.ndarray, D: int) -> HarmonicCoeffs:
    """Spherical harmonic analysis: coefficients <f, Y_n^k> by grid quadrature.

    Exact for band-limited f of degree <= D when the grid has exactness 2D.
    """
    v = np.asarray(values).ravel()
    if v.size != grid.n_points:
        raise ValueError("values do not match the grid")
    if 2 * D > grid.exactness:
        raise ValueError("grid exactness is insufficient for this degree")
    T = grid.harmonic_table(D)
    coef = T.conj() @ (v * grid.quad_weights)
    return HarmonicCoeffs("sphere2", D, coef)


def sht_inverse(coeffs: HarmonicCoeffs, grid: SphereGrid) -> np.ndarray:
    """Spherical harmonic synthesis on the grid points (flattened, complex part
    dropped for real-coefficient symmetric inputs)."""
    T = grid.harmonic_table(coeffs.degree_max)
    vals = coeffs.table @ T
    return np.real_if_close(vals, tol=1e6).real if np.allclose(vals.imag, 0, atol=1e-9) else vals


def sht_eval(coeffs: HarmonicCoeffs, points: np.ndarray) -> np.ndarray:
    """Evaluate a band-limited expansion at arbitrary unit vectors."""
    T = sph_harm_all(coeffs.degree_max, points)
    return coeffs.table @ T


# ---------------------------------------------------------------------------
# parallel slice transform: SVD forward and pseudoinverse


def slice_svd_singular_value(n: int, d: int) -> float:
    """Singular value of the parallel slice transform at degree n.

    Computed from sqrt(|S^{d-2}| / (|S^{d-1}| N_{n,d})); this identity is
    validated against the direct subcircle-quadrature oracle in the test
    suite.  Decreasing in n and tending to zero.
    """
    return math.sqrt(surface_area(d - 1) / (surface_area(d) * n_harmonics(n, d)))


def slice_svd_forward(coeffs: HarmonicCoeffs, psi, ts) -> np.ndarray:
    """Evaluate the slice transform of a band-limited f at one direction.

    Uf(psi, t_l) = sum_n lambda_n P~_n(t_l) sum_k c_{n,k} Y_n^k(psi); for
    d = 3 the weight (1-t^2)^{(d-3)/2} factor equals 1.
    """
    if coeffs.kind != "sphere2":
        raise ValueError("sphere2 coefficients required")
    D = coeffs.degree_max
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    Y = sph_harm_all(D, np.asarray(psi, dtype=float).reshape(1, 3))[:, 0]
    P = legendre_normalized_all(D, 3, ts)
    lam = np.array([slice_svd_singular_value(n, 3) for n in range(D + 1)])
    a = np.array([coeffs.table[n * n : (n + 1) ** 2] @ Y[n * n : (n + 1) ** 2] for n in range(D + 1)])
    vals = (lam * a) @ P
    return vals.real if np.allclose(vals.imag, 0, atol=1e-9) else vals


def slice_svd_forward_grid(coeffs: HarmonicCoeffs, grid: SphereGrid, ts) -> np.ndarray:
    """Slice transform values at all grid directions: shape (n_points, len(ts))."""
    D = coeffs.degree_max
    ts = np.asarray(ts, dtype=float)
    T = grid.harmonic_table(D)
    P = legendre_normalized_all(D, 3, ts)
    out = np.zeros((grid.n_points, ts.size), dtype=complex)
    for n in range(D + 1):
        lam = slice_svd_singular_value(n, 3)
        c_n = coeffs.table[n * n : (n + 1) ** 2] @ T[n * n : (n + 1) ** 2]
        out += lam * np.outer(c_n, P[n])
    return out.real if np.allclose(out.imag, 0, atol=1e-9) else out


def slice_svd_pinv(grid: SphereGrid, ts, t_weights, g: np.ndarray, D: int) -> HarmonicCoeffs:
    """Moore-Penrose pseudoinverse of the slice transform from sampled data.

    g has shape (grid.n_points, len(ts)); the coefficient of Y_n^k is the
    quadrature projection <g, Y_n^k P~_n> divided by the singular value.
    """
    if 2 * D > grid.exactness:
        raise ValueError("degree exceeds the exactness of the direction grid")
    ts = np.asarray(ts, dtype=float)
    tw = np.asarray(t_weights, dtype=float)
    g = np.asarray(g)
    if g.shape != (grid.n_points, ts.size):
        raise ValueError("data shape does not match (directions, t-grid)")
    T = grid.harmonic_table(D)
    P = legendre_normalized_all(D, 3, ts)
    h = g @ (P * tw).T  # (n_points, D+1)
    wp = grid.quad_weights
    coef = np.zeros((D + 1) ** 2, dtype=complex)
    for n in range(D + 1):
        lam = slice_svd_singular_value(n, 3)
        coef[n * n : (n + 1) ** 2] = (T[n * n : (n + 1) ** 2].conj() @ (h[:, n] * wp)) / lam
    return HarmonicCoeffs("sphere2", D, coef)


def gauss_t_grid(L: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1]; exact to polynomial degree 2L-1."""
    return np.polynomial.legendre.leggauss(L)


def uniform_t_grid(L: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform midpoint nodes on [-1, 1] with the riemann weight 2/L."""
    ts = -1.0 + (2.0 * np.arange(L) + 1.0) / L
    return ts, np.full(L, 2.0 / L)


# ---------------------------------------------------------------------------
# Wigner d and D functions


def _wigner_d_seed(k: int, j: int, x: np.ndarray, s_half: np.ndarray, c_half: np.ndarray) -> np.ndarray:
    """Closed form d_{n0}^{k,j} at the lowest admissible degree n0 = max(|k|,|j|)."""
    mu = abs(k - j)
    nu = abs(k + j)
    xi = 1.0 if j >= k else (-1.0) ** (k - j)
    binom = math.comb(mu + nu, mu)
    return xi * math.sqrt(binom) * s_half**mu * c_half**nu


def wigner_d_all(D: int, k: int, j: int, t) -> np.ndarray:
    """Wigner d-functions d_n^{k,j}(t) for n = 0..D at t = cos(beta).

    Degree recurrence seeded by the closed form at n0 = max(|k|, |j|); entries
    with n < n0 are zero.  Shape (D+1,) + t.shape.
    """
    x = np.asarray(t, dtype=float)
    out = np.zeros((D + 1,) + x.shape)
    n0 = max(abs(k), abs(j))
    if n0 > D:
        return out
    s_half = np.sqrt(np.maximum((1.0 - x) / 2.0, 0.0))
    c_half = np.sqrt(np.maximum((1.0 + x) / 2.0, 0.0))
    out[n0] = _wigner_d_seed(k, j, x, s_half, c_half)
    if n0 == 0 and D >= 1:
        out[1] = x
        start = 1
    else:
        start = n0
    for n in range(start, D):
        num = (2 * n + 1) * (n * (n + 1) * x - k * j) * out[n]
        if n > n0:
            num = num - (n + 1) * math.sqrt((n * n - k * k) * (n * n - j * j)) * out[n - 1]
        den = n * math.sqrt(((n + 1) ** 2 - k * k) * ((n + 1) ** 2 - j * j))
        out[n + 1] = num / den
    return out


def wigner_d(n: int, k: int, j: int, t):
    """Single Wigner d-function value(s) d_n^{k,j}(t)."""
    vals = wigner_d_all(n, k, j, np.asarray(t, dtype=float))[n]
    return float(vals) if np.isscalar(t) else vals


def wigner_D(n: int, k: int, j: int, Q) -> complex:
    """Wigner D-function D_n^{k,j}(Q) = e^{-ik alpha} d_n^{k,j}(cos beta) e^{-ij gamma}."""
    alpha, beta, gamma = euler_zyz_angles(np.asarray(Q, dtype=float))
    d = wigner_d(n, k, j, math.cos(beta))
    return complex(np.exp(-1j * k * alpha) * d * np.exp(-1j * j * gamma))


def wigner_D_matrix(n: int, Q) -> np.ndarray:
    """Full Wigner matrix of degree n, indexed [k+n, j+n]."""
    alpha, beta, gamma = euler_zyz_angles(np.asarray(Q, dtype=float))
    x = math.cos(beta)
    M = np.empty((2 * n + 1, 2 * n + 1), dtype=complex)
    ea = np.exp(-1j * alpha * np.arange(-n, n + 1))
    eg = np.exp(-1j * gamma * np.arange(-n, n + 1))
    for ki, k in enumerate(range(-n, n + 1)):
        for ji, j in enumerate(range(-n, n + 1)):
            M[ki, ji] = ea[ki] * wigner_d(n, k, j, x) * eg[ji]
    return M


def wigner_D_normalized(n: int, k: int, j: int, Q) -> complex:
    """Orthonormal rotational harmonic D~ = sqrt((2n+1)/(8 pi^2)) D."""
    return math.sqrt((2 * n + 1) / (8.0 * math.pi**2)) * wigner_D(n, k, j, Q)


# ---------------------------------------------------------------------------
# SO(3) Radon transform: SVD side


def so3_svd_singular_value(n: int) -> float:
    """Singular value of the SO(3) Radon transform at degree n."""
    if n == 0:
        return math.sqrt(1.5 / math.pi)
    return 1.0 / ((2 * n + 1) * math.sqrt(math.pi))


def so3_radon_eigenvalue(n: int, omega) -> np.ndarray | float:
    """Eigenvalue of the fixed-angle transform on degree-n harmonics.

    2/((2n+1) pi) sin((n+1/2) omega) sin(omega/2); vanishes exactly when
    (n+1/2) omega is a multiple of pi.
    """
    w = np.asarray(omega, dtype=float)
    val = 2.0 / ((2 * n + 1) * math.pi) * np.sin((n + 0.5) * w) * np.sin(w / 2.0)
    return float(val) if np.isscalar(omega) else val


def so3_radon_forward_svd(coeffs: HarmonicCoeffs, Q, omega: float) -> complex:
    """Band-limited evaluation of the SO(3) Radon transform at (Q, omega)."""
    if coeffs.kind != "so3":
        raise ValueError("so3 coefficients required")
    D = coeffs.degree_max
    alpha, beta, gamma = euler_zyz_angles(np.asarray(Q, dtype=float))
    x = math.cos(beta)
    total = 0.0 + 0.0j
    for n in range(D + 1):
        block = coeffs.table[n, D - n : D + n + 1, D - n : D + n + 1]
        if not np.any(block):
            continue
        scale = math.sqrt((2 * n + 1) / (8.0 * math.pi**2))
        ea = np.exp(-1j * alpha * np.arange(-n, n + 1))
        eg = np.exp(-1j * gamma * np.arange(-n, n + 1))
        dmat = np.array([[wigner_d(n, kk, jj, x) for jj in range(-n, n + 1)] for kk in range(-n, n + 1)])
        Dn = scale * (ea[:, None] * dmat * eg[None, :])
        total += so3_radon_eigenvalue(n, omega) * np.sum(block * Dn)
    return complex(total)


def so3_svd_image(n: int, j: int, k: int, Q, omega) -> np.ndarray | complex:
    """Orthonormal image function F_n^{j,k}(Q, omega) of the Radon SVD."""
    w = np.asarray(omega, dtype=float)
    Dval = wigner_D_normalized(n, j, k, Q)
    if n == 0:
        val = math.sqrt(8.0 / (3.0 * math.pi)) * Dval * np.sin(w / 2.0) ** 2
    else:
        val = (2.0 / math.sqrt(math.pi)) * Dval * np.sin((n + 0.5) * w) * np.sin(w / 2.0)
    return complex(val) if np.isscalar(omega) else val


def so3_sht_forward(rots: np.ndarray, weights: np.ndarray, values: np.ndarray,
                    D: int, validate: bool = True) -> HarmonicCoeffs:
    """Coefficients of a band-limited function on SO(3) from quadrature samples.

    c_{n,j,k} = sum_i values_i conj(D~_n^{j,k}(rots_i)) weights_i; the rule is
    exact when the quadrature integrates degree-2D harmonics, which is checked
    on a sampled orthonormality relation unless ``validate`` is disabled.
    """
    coeffs = HarmonicCoeffs.zeros("so3", D)
    tables = np.zeros((len(rots), D + 1, 2 * D + 1, 2 * D + 1), dtype=complex)
    for i, R in enumerate(rots):
        alpha, beta, gamma = euler_zyz_angles(np.asarray(R, dtype=float))
        x = math.cos(beta)
        for n in range(D + 1):
            scale = math.sqrt((2 * n + 1) / (8.0 * math.pi**2))
            ea = np.exp(-1j * alpha * np.arange(-n, n + 1))
            eg = np.exp(-1j * gamma * np.arange(-n, n + 1))
            dmat = np.array(
                [[wigner_d(n, kk, jj, x) for jj in range(-n, n + 1)] for kk in range(-n, n + 1)]
            )
            tables[i, n, D - n : D + n + 1, D - n : D + n + 1] = scale * (
                ea[:, None] * dmat * eg[None, :]
            )
    if validate:
        probe = tables[:, min(1, D), D, D]
        gram = np.sum(np.abs(probe) ** 2 * weights)
        if abs(gram - 1.0) > 1e-6:
            raise ValueError("quadrature rule is not exact for this degree")
    coeffs.table = np.einsum("i,injk->njk", values * weights, np.conj(tables))
    return coeffs


def so3_quadrature(n_ab: int, n_beta: int) -> tuple[np.ndarray, np.ndarray]:
    """Product quadrature on SO(3): uniform alpha/gamma, Gauss-Legendre in cos(beta).

    Returns (rotations (n, 3, 3), weights summing to 8 pi^2); exact for
    rotational harmonics of degree < n_ab/2 in the Euler orders.
    """
    from .manifold import rotation_euler_zyz

    x, w = np.polynomial.legendre.leggauss(n_beta)
    alphas = _TWO_PI * np.arange(n_ab) / n_ab
    gammas = _TWO_PI * np.arange(n_ab) / n_ab
    rots = []
    wts = []
    for bi in range(n_beta):
        beta = math.acos(float(np.clip(x[bi], -1, 1)))
        for a in alphas:
            for g in gammas:
                rots.append(rotation_euler_zyz(a, beta, g))
                wts.append(w[bi] * (_TWO_PI / n_ab) ** 2)
    return np.array(rots), np.array(wts)
