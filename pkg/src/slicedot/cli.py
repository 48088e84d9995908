"""Command line interface.

Subcommands:

- ``slicedot distance`` -- sliced distance between two measure files.
- ``slicedot bary free|fixed|radon`` -- the three barycenter solvers.
- ``slicedot bench speed`` -- wall-time benchmark of the barycenter steps.
- ``slicedot make`` -- generate dataset files (vMF, shapes, SO(3) clusters).

Exit codes: 0 on success, 2 on configuration errors (bad flags or files),
3 on numeric failure.  Worker parallelism is capped by ``--threads`` or the
``SLICEDOT_THREADS`` environment variable (the flag wins).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import io
from .barycenters import (
    FixedSupportProblem,
    RadonBarycenterConfig,
    SgdConfig,
    barycenter_fixed,
    barycenter_free_so3,
    barycenter_free_sphere,
    barycenter_radon,
)
from .bench import bench_speed, rows_to_csv
from .datasets import VmfParams, shape_measure, vmf_sample
from .distances import SliceBudget, psw, sosw, sosw_via_s3, ssw
from .harmonics import SphereGrid
from .manifold import rotation_axis_angle, sample_uniform_so3
from .slicing import DiscreteMeasure

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    pass


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("SLICEDOT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"bad SLICEDOT_THREADS value: {env!r}") from exc
    return 1


def _load_measure(path) -> DiscreteMeasure:
    try:
        return io.load_measure(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load measure {path}: {exc}") from exc


def _lambda_for(n_inputs: int, lam) -> np.ndarray:
    if lam is None:
        return np.full(n_inputs, 1.0 / n_inputs)
    lam = np.asarray(lam, dtype=float)
    if lam.size != n_inputs:
        raise ConfigError("--lambda length must match the number of inputs")
    if abs(lam.sum() - 1.0) > 1e-9 or np.any(lam < 0):
        raise ConfigError("--lambda must lie on the probability simplex")
    return lam / lam.sum()


def cmd_distance(args) -> int:
    mu = _load_measure(args.mu)
    nu = _load_measure(args.nu)
    budget = SliceBudget(P=args.slices, seed=args.seed, p=args.p)
    funcs = {"psw": psw, "ssw": ssw, "sosw": sosw, "sosw-s3": sosw_via_s3}
    if args.kind not in funcs:
        raise ConfigError(f"unknown distance kind {args.kind!r}")
    wants_so3 = args.kind in ("sosw", "sosw-s3")
    for name, m in (("--mu", mu), ("--nu", nu)):
        if (m.manifold == "so3") != wants_so3:
            raise ConfigError(f"{name} lives on {m.manifold}, incompatible with {args.kind}")
    if mu.manifold == "sphere" and mu.dim != nu.dim:
        raise ConfigError("--mu and --nu have different sphere dimensions")
    t0 = time.perf_counter()
    est = funcs[args.kind](mu, nu, budget, threads=_threads(args))
    wall = time.perf_counter() - t0
    report = io.make_run_report(
        {
            "command": "distance",
            "kind": args.kind,
            "mu": str(args.mu),
            "nu": str(args.nu),
            "slices": args.slices,
            "seed": args.seed,
            "p": args.p,
        },
        timings={"distance_s": wall},
        payload={"value": est.value, "raw_pth_power": est.raw_pth_power, "stderr": est.stderr},
    )
    _emit(report, args.output)
    return EXIT_OK


def _step_schedule(tau: float, decay: float | None):
    if decay is None:
        return lambda l: tau
    return lambda l: tau * (1.0 + l / decay) ** -0.5


def cmd_bary_free(args) -> int:
    inputs = [_load_measure(p) for p in args.inputs]
    manifolds = {m.manifold for m in inputs}
    if len(manifolds) != 1:
        raise ConfigError("free-support inputs must live on one manifold")
    lam = _lambda_for(len(inputs), args.lam)
    init = _load_measure(args.init) if args.init else None
    n = args.n or inputs[0].n
    if init is None and n != inputs[0].n:
        inputs_n = inputs[0].n
        raise ConfigError(f"--n {n} differs from the input size {inputs_n}; pass --init")
    cfg = SgdConfig(args.iters, args.slices, _step_schedule(args.tau, args.tau_decay),
                    seed=args.seed, init=init)
    t0 = time.perf_counter()
    if manifolds.pop() == "sphere":
        result = barycenter_free_sphere(inputs, lam, cfg)
    else:
        result = barycenter_free_so3(inputs, lam, cfg)
    wall = time.perf_counter() - t0
    report = io.make_run_report(
        {
            "command": "bary free",
            "inputs": [str(p) for p in args.inputs],
            "lambda": lam.tolist(),
            "iters": args.iters,
            "slices": args.slices,
            "tau": args.tau,
            "tau_decay": args.tau_decay,
            "seed": args.seed,
            "init": str(args.init) if args.init else None,
        },
        loss_trace=result.loss_trace,
        timings={"solve_s": wall},
        payload={"measure": io.measure_to_dict(result.measure)},
    )
    _emit(report, args.output)
    return EXIT_OK


def cmd_bary_fixed(args) -> int:
    inputs = [_load_measure(p) for p in args.inputs]
    sup = inputs[0]
    for m in inputs[1:]:
        if m.manifold != sup.manifold or m.n != sup.n or not np.allclose(m.points, sup.points):
            raise ConfigError("fixed-support inputs must share one support")
    lam = _lambda_for(len(inputs), args.lam)
    problem = FixedSupportProblem(sup, np.stack([m.weights for m in inputs]), lam, p=args.p)
    cfg = SgdConfig(args.iters, args.slices, _step_schedule(args.tau, args.tau_decay),
                    seed=args.seed)
    t0 = time.perf_counter()
    result = barycenter_fixed(problem, cfg)
    wall = time.perf_counter() - t0
    report = io.make_run_report(
        {
            "command": "bary fixed",
            "inputs": [str(p) for p in args.inputs],
            "lambda": lam.tolist(),
            "iters": args.iters,
            "slices": args.slices,
            "tau": args.tau,
            "tau_decay": args.tau_decay,
            "p": args.p,
            "seed": args.seed,
        },
        loss_trace=result.loss_trace,
        timings={"solve_s": wall},
        payload={"measure": io.measure_to_dict(result.measure)},
    )
    _emit(report, args.output)
    return EXIT_OK


def cmd_bary_radon(args) -> int:
    densities = []
    grid = SphereGrid.for_degree(args.degree)
    for path in args.inputs:
        try:
            d = io.load_density(path)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load density {path}: {exc}") from exc
        if d["thetas"].size != grid.n_theta or d["phis"].size != grid.n_phi:
            raise ConfigError(f"{path}: density grid does not match degree {args.degree}")
        densities.append(d["values"])
    lam = _lambda_for(len(densities), args.lam)
    cfg = RadonBarycenterConfig(D=args.degree, grid=grid)
    t0 = time.perf_counter()
    result = barycenter_radon(densities, lam, cfg)
    wall = time.perf_counter() - t0
    report = io.make_run_report(
        {
            "command": "bary radon",
            "inputs": [str(p) for p in args.inputs],
            "lambda": lam.tolist(),
            "degree": args.degree,
        },
        timings={"solve_s": wall},
        payload={
            "density": io.density_to_dict(grid, result["values"]),
            "clipped_mass": result["clipped_mass"],
        },
    )
    _emit(report, args.output)
    return EXIT_OK


def _parse_sizes(spec: str) -> list[int]:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        lo, hi = int(lo), int(hi)
        if lo < 1 or hi <= lo:
            raise ConfigError(f"bad size range {spec!r}")
        return sorted({int(round(x)) for x in np.geomspace(lo, hi, 6)})
    return [int(s) for s in spec.split(",")]


def cmd_bench_speed(args) -> int:
    kinds = args.kind.split(",")
    for k in kinds:
        if k not in ("psw", "ssw"):
            raise ConfigError(f"unknown bench kind {k!r}")
    sizes = _parse_sizes(args.n)
    dims = [int(s) for s in args.dims.split(",")] if args.dims else None
    result = bench_speed(kinds, sizes, slices=args.slices, iters=args.iters,
                         seed=args.seed, repeats=args.repeats, dims=dims)
    csv = rows_to_csv(result["rows"])
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    summary = {
        "slopes": result["slopes"],
        "speedup": result["speedup"],
        "dim_growth": result.get("dim_growth", {}),
    }
    sys.stderr.write(json.dumps(summary, indent=1, default=float) + "\n")
    return EXIT_OK


def cmd_make(args) -> int:
    if args.shape == "vmf":
        center = np.asarray([float(x) for x in args.center.split(",")])
        center /= np.linalg.norm(center)
        m = vmf_sample(VmfParams(center, args.kappa), args.n, args.seed)
    elif args.shape == "so3-cluster":
        base = sample_uniform_so3(1, args.seed)[0]
        rg = np.random.default_rng(args.seed + 1)
        pts = np.empty((args.n, 3, 3))
        for i in range(args.n):
            axis = rg.standard_normal(3)
            axis /= np.linalg.norm(axis)
            pts[i] = base @ rotation_axis_angle(axis, abs(rg.normal(0.0, args.spread)))
        m = DiscreteMeasure.so3(pts)
    else:
        m = shape_measure(args.shape, args.n, args.seed)
    if args.rotate:
        axis, ang = args.rotate.rsplit(":", 1)
        axisv = np.asarray([float(x) for x in axis.split(",")])
        m = m.rotated(rotation_axis_angle(axisv / np.linalg.norm(axisv), np.deg2rad(float(ang))))
    io.save_measure(m, args.output)
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        spec = io.ExperimentSpec.load(args.spec)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad experiment spec: {exc}") from exc
    out = args.output or spec.output
    if spec.mode == "distance":
        argv = ["distance", "--kind", spec.solver, "--mu", spec.inputs[0],
                "--nu", spec.inputs[1], "--slices", str(spec.slices),
                "--seed", str(spec.seed)]
    elif spec.mode == "free":
        argv = ["bary", "free", "--inputs", *spec.inputs, "--iters", str(spec.iterations),
                "--slices", str(spec.slices), "--seed", str(spec.seed)]
        if spec.tau is not None:
            argv += ["--tau", str(spec.tau)]
    elif spec.mode == "fixed":
        argv = ["bary", "fixed", "--inputs", *spec.inputs, "--iters", str(spec.iterations),
                "--slices", str(spec.slices), "--seed", str(spec.seed)]
        if spec.tau is not None:
            argv += ["--tau", str(spec.tau)]
    else:
        argv = ["bary", "radon", "--inputs", *spec.inputs, "--degree", str(spec.degree)]
    if spec.lam:
        argv += ["--lambda", *[str(x) for x in spec.lam]]
    if out:
        argv += ["-o", str(out)]
    return main(argv)


def _emit(report: dict, output) -> None:
    if output:
        io.save_report(report, output)
    else:
        json.dump(report, sys.stdout, indent=1)
        sys.stdout.write("\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slicedot",
                                 description="Sliced optimal transport on spheres and SO(3)")
    ap.add_argument("--threads", type=int, default=None,
                    help="cap worker threads (overrides SLICEDOT_THREADS)")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("distance", help="sliced distance between two measures")
    d.add_argument("--kind", required=True, choices=["psw", "ssw", "sosw", "sosw-s3"])
    d.add_argument("--mu", required=True)
    d.add_argument("--nu", required=True)
    d.add_argument("--slices", type=int, default=1000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--p", type=float, default=2.0)
    d.add_argument("-o", "--output", default=None)
    d.set_defaults(func=cmd_distance)

    b = sub.add_parser("bary", help="barycenter solvers")
    bsub = b.add_subparsers(dest="solver", required=True)

    bf = bsub.add_parser("free", help="free-support SGD barycenter")
    bf.add_argument("--inputs", nargs="+", required=True)
    bf.add_argument("--lambda", dest="lam", nargs="+", type=float, default=None)
    bf.add_argument("--iters", type=int, default=1000)
    bf.add_argument("--slices", type=int, default=500)
    bf.add_argument("--tau", type=float, default=40.0)
    bf.add_argument("--tau-decay", type=float, default=None)
    bf.add_argument("--seed", type=int, default=0)
    bf.add_argument("--n", type=int, default=None)
    bf.add_argument("--init", default=None)
    bf.add_argument("-o", "--output", default=None)
    bf.set_defaults(func=cmd_bary_free)

    bx = bsub.add_parser("fixed", help="fixed-support projected gradient barycenter")
    bx.add_argument("--inputs", nargs="+", required=True)
    bx.add_argument("--lambda", dest="lam", nargs="+", type=float, default=None)
    bx.add_argument("--iters", type=int, default=500)
    bx.add_argument("--slices", type=int, default=100)
    bx.add_argument("--tau", type=float, default=0.005)
    bx.add_argument("--tau-decay", type=float, default=20.0)
    bx.add_argument("--p", type=float, default=2.0)
    bx.add_argument("--seed", type=int, default=0)
    bx.add_argument("-o", "--output", default=None)
    bx.set_defaults(func=cmd_bary_fixed)

    br = bsub.add_parser("radon", help="Radon/SVD barycenter of grid densities")
    br.add_argument("--inputs", nargs="+", required=True)
    br.add_argument("--lambda", dest="lam", nargs="+", type=float, default=None)
    br.add_argument("--degree", type=int, default=32)
    br.add_argument("-o", "--output", default=None)
    br.set_defaults(func=cmd_bary_radon)

    be = sub.add_parser("bench", help="benchmarks")
    besub = be.add_subparsers(dest="bench_kind", required=True)
    bs = besub.add_parser("speed", help="wall times of barycenter steps")
    bs.add_argument("--kind", default="psw,ssw")
    bs.add_argument("--n", default="40..5000")
    bs.add_argument("--slices", type=int, default=200)
    bs.add_argument("--iters", type=int, default=20)
    bs.add_argument("--repeats", type=int, default=5)
    bs.add_argument("--dims", default=None, help="comma list for dimension growth, e.g. 3,10,50")
    bs.add_argument("--seed", type=int, default=0)
    bs.add_argument("-o", "--output", default=None)
    bs.set_defaults(func=cmd_bench_speed)

    rn = sub.add_parser("run", help="run an experiment described by a JSON spec")
    rn.add_argument("--spec", required=True)
    rn.add_argument("-o", "--output", default=None)
    rn.set_defaults(func=cmd_run)

    mk = sub.add_parser("make", help="generate dataset measure files")
    mk.add_argument("--shape", required=True,
                    choices=["vmf", "croissant", "smiley", "equator", "antipodal-diracs",
                             "so3-cluster"])
    mk.add_argument("--n", type=int, default=200)
    mk.add_argument("--seed", type=int, default=0)
    mk.add_argument("--kappa", type=float, default=100.0)
    mk.add_argument("--center", default="0,0,1")
    mk.add_argument("--spread", type=float, default=0.2, help="SO(3) cluster angle spread (rad)")
    mk.add_argument("--rotate", default=None, help="axis:deg, e.g. 0,0,1:120")
    mk.add_argument("-o", "--output", required=True)
    mk.set_defaults(func=cmd_make)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
