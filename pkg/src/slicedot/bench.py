"""Timing harness comparing the parallel and semicircular barycenter steps.

One "step" is a full stochastic gradient descent iteration of the
free-support solver: draw P directions, slice, solve the per-slice 1D
problems, assemble gradients and update the support.  The semicircular
baseline solves a circle OT per slice (optimal cyclic matching), which is the
source of its extra cost.

Wall times use the monotonic clock; a warm-up run is discarded and the median
of the repeated runs is reported.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .barycenters import sw_gradient_free
from .manifold import exp_sphere_arr, sample_uniform_sphere
from .slicing import DiscreteMeasure, frame_of_direction

_TWO_PI = 2.0 * np.pi


def _wrap_signed(x: np.ndarray) -> np.ndarray:
    return np.mod(x + np.pi, _TWO_PI) - np.pi


def step_psb(X: np.ndarray, inputs, lam, dirs: np.ndarray, tau: float) -> np.ndarray:
    """One parallel-sliced free-support SGD step on S^{d-1}."""
    Xm = DiscreteMeasure.sphere(X)
    grad = np.zeros_like(X)
    for li, Y in zip(lam, inputs):
        g, _ = sw_gradient_free(Xm, Y, dirs, "parallel")
        grad += li * g
    return exp_sphere_arr(X, -tau * grad)


def _ssb_gradient(X: np.ndarray, Y: np.ndarray, psis: np.ndarray) -> np.ndarray:
    """Euclidean gradient of the semicircular sliced cost (equal weights)."""
    N = X.shape[0]
    P = psis.shape[0]
    grad = np.zeros_like(X)
    idx = (np.arange(N)[None, :] + np.arange(N)[:, None]) % N
    for q in range(P):
        R = frame_of_direction(psis[q])
        px = X @ R
        py = Y @ R
        ax = np.mod(np.arctan2(px[:, 1], px[:, 0]), _TWO_PI)
        ay = np.mod(np.arctan2(py[:, 1], py[:, 0]), _TWO_PI)
        ox = np.argsort(ax, kind="stable")
        oy = np.argsort(ay, kind="stable")
        xs, ys = ax[ox], ay[oy]
        deltas = _wrap_signed(xs[None, :] - ys[idx])
        k = int(np.argmin(np.mean(deltas**2, axis=1)))
        delta = deltas[k]
        denom = px[ox, 0] ** 2 + px[ox, 1] ** 2
        dazi = np.zeros((N, 3))
        dazi[:, 0] = -px[ox, 1] / denom
        dazi[:, 1] = px[ox, 0] / denom
        grad[ox] += (2.0 / (N * P)) * delta[:, None] * (dazi @ R.T)
    return grad


def step_ssb(X: np.ndarray, inputs, lam, psis: np.ndarray, tau: float) -> np.ndarray:
    """One semicircular-sliced free-support SGD step on S^2."""
    grad = np.zeros_like(X)
    for li, Y in zip(lam, inputs):
        g = _ssb_gradient(X, Y.points, psis)
        grad += li * g
    grad -= np.sum(X * grad, axis=1, keepdims=True) * X
    return exp_sphere_arr(X, -tau * grad)


@dataclass
class BenchRow:
    kind: str
    n: int
    d: int
    slices: int
    iters: int
    seconds: float


def _time_runs(kind: str, n: int, slices: int, d: int = 3, iters: int = 1,
               repeats: int = 5, seed: int = 0, tau: float = 1.0) -> list[float]:
    """Wall times of ``repeats`` runs of ``iters`` SGD steps, warm-up discarded."""
    if kind == "ssw" and d != 3:
        raise ValueError("the semicircular baseline is defined on S^2 only")
    rg = np.random.SeedSequence(seed)
    s1, s2, s3 = rg.spawn(3)
    X0 = sample_uniform_sphere(d, n, s1)
    inputs = [DiscreteMeasure.sphere(sample_uniform_sphere(d, n, s2)),
              DiscreteMeasure.sphere(sample_uniform_sphere(d, n, s3))]
    lam = np.array([0.5, 0.5])
    step = step_psb if kind == "psw" else step_ssb
    times = []
    for rep in range(repeats + 1):
        X = X0.copy()
        dir_seeds = np.random.SeedSequence((seed, rep)).spawn(iters)
        t0 = time.perf_counter()
        for l in range(iters):
            dirs = sample_uniform_sphere(d, slices, dir_seeds[l])
            X = step(X, inputs, lam, dirs, tau)
        dt = time.perf_counter() - t0
        if rep > 0:  # discard the warm-up run
            times.append(dt)
    return times


def time_step(kind: str, n: int, slices: int, d: int = 3, iters: int = 1,
              repeats: int = 5, seed: int = 0, tau: float = 1.0,
              stat: str = "median") -> float:
    """Wall time of ``iters`` SGD steps: median (default) or min over repeats.

    The minimum is the low-noise estimator used for scaling fits; the median
    is reported for absolute comparisons.
    """
    times = _time_runs(kind, n, slices, d=d, iters=iters, repeats=repeats, seed=seed, tau=tau)
    return float(np.min(times) if stat == "min" else np.median(times))


def loglog_slope(sizes, times) -> float:
    """Least-squares slope of log(time) against log(N)."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(times, dtype=float))
    A = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])


def bench_speed(kinds, sizes, slices: int = 200, iters: int = 20, d: int = 3,
                seed: int = 0, repeats: int = 5, dims=None, stat: str = "median") -> dict:
    """Run the timing grid and derive speedup ratios and scaling slopes.

    Returns a dict with per-configuration rows, the log-log slope of each
    kind's time against N, the ssw/psw time ratio at shared sizes, and the
    growth across the requested dimensions at the largest size.  Slopes and
    growth ratios use the min-over-repeats estimator, which is robust to
    background load; absolute rows use ``stat``.
    """
    rows: list[BenchRow] = []
    mins: dict[tuple[str, int], float] = {}
    for kind in kinds:
        for n in sizes:
            times = _time_runs(kind, n, slices, d=d, iters=iters, repeats=repeats, seed=seed)
            pick = np.min(times) if stat == "min" else np.median(times)
            rows.append(BenchRow(kind, n, d, slices, iters, float(pick)))
            mins[kind, n] = float(np.min(times))
    result = {"rows": rows, "slopes": {}, "speedup": {}, "dim_growth": {}}
    for kind in kinds:
        if len(sizes) >= 2:
            result["slopes"][kind] = loglog_slope(sizes, [mins[kind, n] for n in sizes])
    if "psw" in kinds and "ssw" in kinds:
        for n in sizes:
            t_p = next(r.seconds for r in rows if r.kind == "psw" and r.n == n)
            t_s = next(r.seconds for r in rows if r.kind == "ssw" and r.n == n)
            result["speedup"][n] = t_s / t_p
    if dims:
        n_ref = max(sizes)
        base = None
        for dd in dims:
            times = _time_runs("psw", n_ref, slices, d=dd, iters=iters, repeats=repeats, seed=seed)
            sec = float(np.min(times))
            result["dim_growth"][dd] = sec
            if base is None:
                base = sec
        result["dim_growth_ratio"] = max(result["dim_growth"].values()) / base
    return result


def rows_to_csv(rows) -> str:
    lines = ["kind,n,d,slices,iters,seconds"]
    for r in rows:
        lines.append(f"{r.kind},{r.n},{r.d},{r.slices},{r.iters},{r.seconds:.6f}")
    return "\n".join(lines) + "\n"
