"""JSON file schemas shared by the CLI, the test suite and external tooling.

Measure files:
    {"manifold": "sphere" | "so3", "dim": d, "points": [[...], ...],
     "weights": [...]}            # weights optional; uniform when absent
    Rotations are stored as row-major 3x3 matrices (9 numbers per point).

Grid-density files:
    {"thetas": [...], "phis": [...], "values": [...]}   # values row-major,
    theta-major, matching SphereGrid layout.

Run reports echo their full configuration so a run can be reproduced
bit-identically from its own output.
"""

from __future__ import annotations

import json
import platform
import sys
from pathlib import Path

import numpy as np

from .harmonics import SphereGrid
from .slicing import DiscreteMeasure


def measure_to_dict(m: DiscreteMeasure) -> dict:
    if m.manifold == "sphere":
        pts = m.points.tolist()
        dim = m.dim
    else:
        pts = m.points.reshape(m.n, 9).tolist()
        dim = 3
    return {"manifold": m.manifold, "dim": dim, "points": pts, "weights": m.weights.tolist()}


def measure_from_dict(d: dict) -> DiscreteMeasure:
    manifold = d.get("manifold", "sphere")
    pts = np.asarray(d["points"], dtype=float)
    weights = d.get("weights")
    if manifold == "sphere":
        return DiscreteMeasure.sphere(pts, weights)
    if manifold == "so3":
        return DiscreteMeasure.so3(pts.reshape(-1, 3, 3), weights)
    raise ValueError(f"unknown manifold {manifold!r}")


def save_measure(m: DiscreteMeasure, path) -> None:
    Path(path).write_text(json.dumps(measure_to_dict(m)))


def load_measure(path) -> DiscreteMeasure:
    return measure_from_dict(json.loads(Path(path).read_text()))


def density_to_dict(grid: SphereGrid, values: np.ndarray) -> dict:
    return {
        "thetas": grid.thetas.tolist(),
        "phis": grid.phis.tolist(),
        "values": np.asarray(values, dtype=float).ravel().tolist(),
    }


def save_density(grid: SphereGrid, values, path) -> None:
    Path(path).write_text(json.dumps(density_to_dict(grid, values)))


def load_density(path) -> dict:
    d = json.loads(Path(path).read_text())
    for key in ("thetas", "phis", "values"):
        if key not in d:
            raise ValueError(f"density file missing field {key!r}")
        d[key] = np.asarray(d[key], dtype=float)
    if d["values"].size != d["thetas"].size * d["phis"].size:
        raise ValueError("density values do not match the grid shape")
    return d


_SOLVERS = {"psw", "ssw", "sosw", "sosw-s3"}
_MODES = {"distance", "free", "fixed", "radon"}


class ExperimentSpec:
    """Validated description of one experiment run.

    ``inputs`` are measure/density file paths; ``solver`` is a distance kind
    for mode "distance" and ignored for "radon"; budget fields mirror the CLI
    flags.  Invalid solver/mode combinations are rejected on construction.
    """

    def __init__(self, name: str, mode: str, inputs: list, *, solver: str | None = None,
                 slices: int = 500, iterations: int = 1000, seed: int = 0,
                 tau: float | None = None, degree: int = 32, lam: list | None = None,
                 output: str | None = None):
        if mode not in _MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "distance":
            if solver not in _SOLVERS:
                raise ValueError(f"distance mode needs a solver in {sorted(_SOLVERS)}")
        elif mode in ("free", "fixed"):
            if solver not in (None, "psw", "sosw"):
                raise ValueError(f"{mode}-support barycenters support psw/sosw slicing only")
        elif solver is not None:
            raise ValueError("radon mode takes no solver")
        if not inputs:
            raise ValueError("an experiment needs at least one input")
        if mode == "distance" and len(inputs) != 2:
            raise ValueError("distance mode needs exactly two inputs")
        self.name = name
        self.mode = mode
        self.inputs = [str(p) for p in inputs]
        self.solver = solver
        self.slices = int(slices)
        self.iterations = int(iterations)
        self.seed = int(seed)
        self.tau = tau
        self.degree = int(degree)
        self.lam = lam
        self.output = output

    @staticmethod
    def from_dict(d: dict) -> "ExperimentSpec":
        known = {"name", "mode", "inputs", "solver", "slices", "iterations", "seed",
                 "tau", "degree", "lam", "output"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown experiment fields: {sorted(extra)}")
        args = dict(d)
        name = args.pop("name", "experiment")
        mode = args.pop("mode")
        inputs = args.pop("inputs")
        return ExperimentSpec(name, mode, inputs, **args)

    @staticmethod
    def load(path) -> "ExperimentSpec":
        return ExperimentSpec.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "mode": self.mode,
            "inputs": self.inputs,
            "solver": self.solver,
            "slices": self.slices,
            "iterations": self.iterations,
            "seed": self.seed,
            "tau": self.tau,
            "degree": self.degree,
            "lam": self.lam,
            "output": self.output,
        }


def environment_fingerprint() -> dict:
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
    }


def make_run_report(config: dict, *, loss_trace=None, timings: dict | None = None,
                    payload: dict | None = None) -> dict:
    report = {
        "config": config,
        "environment": environment_fingerprint(),
    }
    if loss_trace is not None:
        report["loss_trace"] = np.asarray(loss_trace, dtype=float).tolist()
    if timings:
        report["timings"] = timings
    if payload:
        report.update(payload)
    return report


def save_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=1))
