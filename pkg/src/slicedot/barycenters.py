"""Barycenter solvers for sliced Wasserstein distances.

Three approaches:

- free-support: Riemannian stochastic gradient descent over sample locations
  on S^{d-1} or SO(3);
- fixed-support: projected gradient descent over simplex weights on a fixed
  point set, driven by the exact 1D value/gradient of quantile matching;
- Radon: slice, average in CDT space per slice, and invert with the
  Moore-Penrose pseudoinverse of the slice transform.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .harmonics import (
    SphereGrid,
    gauss_t_grid,
    sht_eval,
    sht_forward,
    sht_inverse,
    slice_svd_forward_grid,
    slice_svd_pinv,
)
from .manifold import (
    exp_so3_arr,
    exp_sphere_arr,
    polar_retract,
    sample_uniform_so3,
    sample_uniform_sphere,
)
from .ot1d import Measure1D, barycenter_1d, uniform_reference
from .slicing import DiscreteMeasure

# ---------------------------------------------------------------------------
# configuration containers


@dataclass(frozen=True)
class SgdConfig:
    """Stochastic gradient descent budget for the barycenter solvers.

    By default the loss trace reuses the gradient's slice batch; setting
    ``eval_P`` evaluates it on an independent direction batch instead
    (unbiased trace at extra cost).
    """

    iterations: int
    P: int
    step_schedule: Callable[[int], float]
    seed: int = 0
    init: DiscreteMeasure | None = None
    eval_P: int | None = None
    reorthonormalize_every: int = 100

    @staticmethod
    def constant_step(iterations: int, P: int, tau: float, seed: int = 0,
                      init: DiscreteMeasure | None = None) -> "SgdConfig":
        if tau <= 0:
            raise ValueError("step size must be positive")
        return SgdConfig(iterations, P, lambda l: tau, seed=seed, init=init)


@dataclass(frozen=True)
class FixedSupportProblem:
    """Fixed-support barycenter problem on a shared point set."""

    support: DiscreteMeasure
    inputs: np.ndarray  # (M, N) simplex rows
    lam: np.ndarray  # (M,) simplex
    p: float = 2.0

    def __post_init__(self):
        v = np.asarray(self.inputs, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if v.ndim != 2 or v.shape[1] != self.support.n:
            raise ValueError("input weights must be (M, N) over the support")
        if np.max(np.abs(v.sum(axis=1) - 1.0)) > 1e-12 or np.any(v < -1e-15):
            raise ValueError("input weights must lie on the simplex")
        if abs(lam.sum() - 1.0) > 1e-12 or np.any(lam < 0):
            raise ValueError("lambda must lie on the simplex")
        object.__setattr__(self, "inputs", v)
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class RadonBarycenterConfig:
    """Discretization of the Radon barycenter pipeline on S^2.

    The slice measures entering the CDT stage live on a fine uniform t-grid
    (``L_slice`` nodes); the pseudoinverse projects on a Gauss-Legendre t-grid,
    which integrates the Legendre Gram matrix exactly.  A uniform-midpoint
    quadrature grid can be substituted through ``ts``/``t_weights``.
    """

    D: int = 32
    grid: SphereGrid | None = None
    ts: np.ndarray | None = None
    t_weights: np.ndarray | None = None
    L_slice: int = 513
    reference: Measure1D | None = None

    def resolved(self):
        grid = self.grid if self.grid is not None else SphereGrid.for_degree(self.D)
        if self.ts is None:
            ts, tw = gauss_t_grid(self.D + 1)
        else:
            ts, tw = np.asarray(self.ts, float), np.asarray(self.t_weights, float)
        ref = self.reference if self.reference is not None else uniform_reference(2049)
        return grid, ts, tw, np.linspace(-1.0, 1.0, self.L_slice), ref


# ---------------------------------------------------------------------------
# free-support gradients


def _slice_values(points: np.ndarray, directions: np.ndarray, kind: str) -> np.ndarray:
    """Slice all points by all directions: shape (P, N)."""
    if kind == "parallel":
        return directions @ points.T
    if kind == "so3-trace":
        return np.einsum("qab,nab->qn", directions, points)
    raise ValueError("free-support slicing must be 'parallel' or 'so3-trace'")


def _sorted_match_diff(sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    """Per slice: S(X_k) - S(Y_match(k)) with rank-based matching, original order."""
    P, N = sx.shape
    ax = np.argsort(sx, axis=1, kind="stable")
    ay = np.argsort(sy, axis=1, kind="stable")
    diff = np.empty_like(sx)
    rows = np.arange(P)[:, None]
    diff[rows, ax] = np.take_along_axis(sx, ax, axis=1) - np.take_along_axis(sy, ay, axis=1)
    return diff


def _plan_match_terms(sx: np.ndarray, sy: np.ndarray):
    """Unequal-size uniform matching via the merged-quantile sparse plan.

    Returns (diff (P, K), rows (K,), mass (K,)) so that the gradient w.r.t.
    X_r accumulates 2 * mass * diff over plan entries with row r, and the cost
    is sum(mass * diff^2).
    """
    from .distances import _uniform_plan

    n, m = sx.shape[1], sy.shape[1]
    rows, cols, mass = _uniform_plan(n, m)
    ax = np.argsort(sx, axis=1, kind="stable")
    ay = np.argsort(sy, axis=1, kind="stable")
    xs = np.take_along_axis(sx, ax, axis=1)
    ys = np.take_along_axis(sy, ay, axis=1)
    diff = xs[:, rows] - ys[:, cols]
    orig_rows = ax[:, rows]  # (P, K) original X indices
    return diff, orig_rows, mass


def sw_gradient_free(X: DiscreteMeasure, Y: DiscreteMeasure, directions: np.ndarray,
                     kind: str) -> tuple[np.ndarray, float]:
    """Riemannian gradient of SW_2^2(mu_X, mu_Y) w.r.t. the X locations.

    Returns (gradients stacked like X.points, per-direction mean cost).
    Points of X must be pairwise distinct; ties in the slice values are broken
    by index (stable sort), which matches the a.e. defined gradient.
    Unequal point counts are handled through the sparse uniform-weight plan.
    """
    if X.manifold != Y.manifold:
        raise ValueError("measures live on different manifolds")
    flat = X.points.reshape(X.n, -1)
    if np.unique(flat, axis=0).shape[0] < X.n:
        warnings.warn("duplicate points in X: gradient is defined a.e. only; "
                      "ties broken by index", RuntimeWarning, stacklevel=2)
    P = directions.shape[0]
    N, M = X.n, Y.n
    eucl = np.zeros_like(X.points)
    cost = 0.0
    # slice blocks keep the (block, N) working set cache-resident; the
    # block-ordered accumulation fixes the reduction order
    B = 32
    for lo in range(0, P, B):
        d = directions[lo : lo + B]
        sx = _slice_values(X.points, d, kind)
        sy = _slice_values(Y.points, d, kind)
        if N == M:
            diff = _sorted_match_diff(sx, sy)
            cost += float(np.sum(diff**2)) / N
            if kind == "parallel":
                eucl += diff.T @ d
            else:
                eucl += np.einsum("qn,qab->nab", diff, d)
        else:
            diff, orig_rows, mass = _plan_match_terms(sx, sy)
            cost += float(np.sum(mass * diff**2))
            for q in range(d.shape[0]):
                if kind == "parallel":
                    np.add.at(eucl, orig_rows[q], (mass * diff[q])[:, None] * d[q][None, :])
                else:
                    np.add.at(eucl, orig_rows[q], (mass * diff[q])[:, None, None] * d[q][None])
    cost /= P
    scale = 2.0 / (N * P) if N == M else 2.0 / P
    grads = _project_tangent(X.points, scale * eucl, X.manifold)
    return grads, cost


def _project_tangent(points: np.ndarray, eucl: np.ndarray, manifold: str) -> np.ndarray:
    if manifold == "sphere":
        return eucl - np.sum(points * eucl, axis=1, keepdims=True) * points
    At = np.swapaxes(eucl, -1, -2)
    return 0.5 * (eucl - points @ At @ points)


def _check_distinct(points: np.ndarray):
    flat = points.reshape(points.shape[0], -1)
    _, counts = np.unique(np.round(flat, 12), axis=0, return_counts=True)
    if np.any(counts > 1):
        raise ValueError("free-support gradient needs pairwise distinct points")


# ---------------------------------------------------------------------------
# free-support SGD solvers


@dataclass
class BarycenterResult:
    measure: DiscreteMeasure
    loss_trace: np.ndarray
    extra: dict = field(default_factory=dict)


def _free_support_sgd(inputs: Sequence[DiscreteMeasure], lam: np.ndarray, cfg: SgdConfig,
                      manifold: str, dim: int) -> BarycenterResult:
    if len(inputs) == 0:
        raise ValueError("no input measures")
    lam = np.asarray(lam, dtype=float)
    if abs(lam.sum() - 1.0) > 1e-12 or np.any(lam < 0) or lam.size != len(inputs):
        raise ValueError("lambda must lie on the probability simplex")
    if cfg.init is not None:
        X = cfg.init.points.copy()
    elif manifold == "sphere":
        X = sample_uniform_sphere(dim, inputs[0].n, cfg.seed)
    else:
        X = sample_uniform_so3(inputs[0].n, cfg.seed)
    _check_distinct(X)
    root = np.random.SeedSequence(cfg.seed).spawn(cfg.iterations)
    eval_root = np.random.SeedSequence((cfg.seed, 1)).spawn(cfg.iterations)
    kind = "parallel" if manifold == "sphere" else "so3-trace"

    def draw(n_dirs, seq):
        if manifold == "sphere":
            return sample_uniform_sphere(dim, n_dirs, seq)
        return sample_uniform_so3(n_dirs, seq)

    losses = np.empty(cfg.iterations)
    for l in range(cfg.iterations):
        dirs = draw(cfg.P, root[l])
        Xm = DiscreteMeasure(manifold, X, np.full(X.shape[0], 1.0 / X.shape[0]))
        total_grad = np.zeros_like(X)
        loss = 0.0
        for li, Y in zip(lam, inputs):
            g, cost = sw_gradient_free(Xm, Y, dirs, kind)
            total_grad += li * g
            loss += li * cost
        if cfg.eval_P is not None:
            eval_dirs = draw(cfg.eval_P, eval_root[l])
            loss = sum(
                li * sw_gradient_free(Xm, Y, eval_dirs, kind)[1]
                for li, Y in zip(lam, inputs)
            )
        losses[l] = loss
        tau = cfg.step_schedule(l)
        if manifold == "sphere":
            X = exp_sphere_arr(X, -tau * total_grad)
        else:
            X = exp_so3_arr(X, -tau * total_grad)
            if cfg.reorthonormalize_every and (l + 1) % cfg.reorthonormalize_every == 0:
                X = polar_retract(X)
    if manifold == "so3":
        X = polar_retract(X)
        out = DiscreteMeasure.so3(X)
    else:
        out = DiscreteMeasure.sphere(X)
    return BarycenterResult(out, losses)


def barycenter_free_sphere(inputs: Sequence[DiscreteMeasure], lam, cfg: SgdConfig) -> BarycenterResult:
    """Free-support sliced barycenter on S^{d-1} by Riemannian SGD.

    Iterates X^{l+1}_k = exp(X^l_k, -tau_l grad); the loss trace records the
    slice-batch estimate of the barycenter functional at each step.
    """
    for m in inputs:
        if m.manifold != "sphere":
            raise ValueError("inputs must be sphere measures")
    dims = {m.dim for m in inputs}
    if len(dims) != 1:
        raise ValueError("inputs must share a dimension")
    return _free_support_sgd(inputs, lam, cfg, "sphere", dims.pop())


def barycenter_free_so3(inputs: Sequence[DiscreteMeasure], lam, cfg: SgdConfig) -> BarycenterResult:
    """Free-support sliced barycenter on SO(3) with trace slicing."""
    for m in inputs:
        if m.manifold != "so3":
            raise ValueError("inputs must be SO(3) measures")
    return _free_support_sgd(inputs, lam, cfg, "so3", 3)


# ---------------------------------------------------------------------------
# fixed-support: exact 1D value/gradient and projected gradient descent


def fixed_support_1d_value_and_grad(t: np.ndarray, w: np.ndarray, v: np.ndarray,
                                    p: float = 2.0) -> tuple[float, np.ndarray]:
    """W_p^p between measures on a shared sorted support, and its gradient in w.

    Partial sums of w and v are merged (w entries first at ties) into the
    breakpoint vector z; the cost is sum a_j (z_{j+1} - z_j) and the gradient
    is assembled from right-to-left cumulative sums of a-differences, followed
    by the orthogonal projection onto the zero-mean hyperplane.
    """
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    N = t.size
    if np.any(np.diff(t) <= 0):
        raise ValueError("support must be strictly increasing")
    if N == 1:
        return 0.0, np.zeros(1)
    wt = np.cumsum(w)
    vt = np.cumsum(v)
    y = np.concatenate([wt[: N - 1], vt[: N - 1]])
    sigma = np.argsort(y, kind="stable")  # stable: w-entries precede v-entries at ties
    z = y[sigma]
    iw = np.minimum(np.searchsorted(wt, z[1:], side="left"), N - 1)
    iv = np.minimum(np.searchsorted(vt, z[1:], side="left"), N - 1)
    a = np.empty(2 * N - 1)  # a_0 .. a_{2N-2}
    a[0] = 0.0
    a[1 : 2 * N - 2] = np.abs(t[iw[: 2 * N - 3]] - t[iv[: 2 * N - 3]]) ** p
    a[2 * N - 2] = 0.0
    value = float(np.sum(a[1 : 2 * N - 2] * np.diff(z)))
    sigma_inv = np.empty_like(sigma)
    sigma_inv[sigma] = np.arange(2 * N - 2)
    pos_w = sigma_inv[: N - 1] + 1  # 1-based position of w~_k inside z
    dtilde = a[pos_w - 1] - a[pos_w]
    grad = np.zeros(N)
    grad[: N - 1] = np.cumsum(dtilde[::-1])[::-1]
    grad -= grad.mean()
    return value, grad


def project_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based, O(N log N))."""
    x = np.asarray(x, dtype=float)
    u = np.sort(x)[::-1]
    cssv = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, x.size + 1) > cssv)[0][-1]
    theta = cssv[rho] / (rho + 1.0)
    return np.maximum(x - theta, 0.0)


def barycenter_fixed(problem: FixedSupportProblem, cfg: SgdConfig) -> BarycenterResult:
    """Fixed-support sliced barycenter by projected stochastic gradient descent.

    Per iteration: draw P slicing directions, sort the sliced support once per
    direction, evaluate the exact 1D value/gradient against each input's
    permuted weights, average with lambda, project onto the zero-mean
    hyperplane, step, and project back onto the simplex.
    """
    sup = problem.support
    N = sup.n
    M = problem.inputs.shape[0]
    rng_root = np.random.SeedSequence(cfg.seed).spawn(cfg.iterations)
    if cfg.init is not None:
        w = np.asarray(cfg.init.weights, dtype=float).copy()
    else:
        w = np.full(N, 1.0 / N)
    losses = np.empty(cfg.iterations)
    kind = "parallel" if sup.manifold == "sphere" else "so3-trace"
    for l in range(cfg.iterations):
        if sup.manifold == "sphere":
            dirs = sample_uniform_sphere(sup.dim, cfg.P, rng_root[l])
        else:
            dirs = sample_uniform_so3(cfg.P, rng_root[l])
        s = _slice_values(sup.points, dirs, kind)  # (P, N)
        grad = np.zeros(N)
        loss = 0.0
        for q in range(cfg.P):
            rho = np.argsort(s[q], kind="stable")
            tq, uniq = np.unique(s[q][rho], return_index=True)
            if tq.size < 2:
                continue
            merge = tq.size < N  # duplicate slice values: merge weights onto unique levels
            seg = np.concatenate([uniq, [N]])
            for i in range(M):
                wq = w[rho]
                vq = problem.inputs[i][rho]
                if merge:
                    wq = np.add.reduceat(wq, seg[:-1])
                    vq = np.add.reduceat(vq, seg[:-1])
                val, g = fixed_support_1d_value_and_grad(tq, wq, vq, problem.p)
                loss += problem.lam[i] * val / cfg.P
                if merge:
                    # every member of a merged level carries the level's gradient
                    g = np.repeat(g, np.diff(seg))
                gq = np.zeros(N)
                gq[rho] = g
                grad += problem.lam[i] * gq / cfg.P
        losses[l] = loss
        grad -= grad.mean()
        if np.any(grad != 0.0):  # exact ties (w == v) are stationary points
            w = project_simplex(w - cfg.step_schedule(l) * grad)
    out = DiscreteMeasure(sup.manifold, sup.points, w)
    return BarycenterResult(out, losses)


# ---------------------------------------------------------------------------
# Radon barycenter on S^2


def barycenter_radon(input_values: Sequence[np.ndarray], lam,
                     cfg: RadonBarycenterConfig = RadonBarycenterConfig()) -> dict:
    """Radon barycenter of grid densities on S^2.

    Pipeline: harmonic analysis of every input, SVD-based slice transform to
    all (direction, t) pairs, per-direction 1D barycenter in CDT space, then
    the Moore-Penrose pseudoinverse and synthesis.  Negative output values
    (band-limit truncation artifacts) are floored at zero, the clipped mass is
    reported, and the density is renormalized to unit mass.
    """
    grid, ts, tw, ts_fine, ref = cfg.resolved()
    lam = np.asarray(lam, dtype=float)
    if abs(lam.sum() - 1.0) > 1e-12 or np.any(lam < 0):
        raise ValueError("lambda must lie on the probability simplex")
    if len(input_values) != lam.size:
        raise ValueError("inputs/lambda length mismatch")
    area = 4.0 * np.pi
    w = grid.quad_weights
    slices = []
    for vals in input_values:
        vals = np.asarray(vals, dtype=float).ravel()
        mass = float(np.sum(vals * w))
        if mass <= 0:
            raise ValueError("input density is not normalizable")
        coeffs = sht_forward(grid, vals / mass, cfg.D)
        slices.append(slice_svd_forward_grid(coeffs, grid, ts_fine))  # (n_points, L_slice)
    bary_slices = np.empty((grid.n_points, ts.size))
    clipped_slice_mass = 0.0
    for pdir in range(grid.n_points):
        measures = []
        for m in range(lam.size):
            dens = area * slices[m][pdir]
            meas = Measure1D.from_density(ts_fine, dens, lo=-1.0, hi=1.0, clip_negative=True)
            clipped_slice_mass += getattr(meas, "clipped_mass", 0.0)
            measures.append(meas)
        bary = barycenter_1d(measures, lam, ref)
        bary_slices[pdir] = np.interp(ts, bary.nodes, bary.density) / area
    coeffs = slice_svd_pinv(grid, ts, tw, bary_slices, cfg.D)
    out = np.real(sht_inverse(coeffs, grid))
    neg_mass = -float(np.sum(np.minimum(out, 0.0) * w))
    out = np.maximum(out, 0.0)
    total = float(np.sum(out * w))
    out = out / total
    return {
        "values": out,
        "coeffs": coeffs,
        "grid": grid,
        "clipped_mass": neg_mass,
        "clipped_slice_mass": clipped_slice_mass,
    }


def radon_eval(result: dict, points: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited barycenter expansion at arbitrary points."""
    return np.real(sht_eval(result["coeffs"], points))
