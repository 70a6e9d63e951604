"""JSON file formats for penalties, instances and solutions.

All artifacts are JSON text so test runs can diff them.  Floats are printed
with 17 significant digits, which round-trips IEEE doubles exactly and makes
output byte-identical across runs for identical inputs.

Penalty file:   {"family": "mcp", "params": {"gamma": 1.0, "b": 1.0}}
3-partition:    {"m": 2, "b": [1, 2, 3, 1, 2, 3]}  (or wrapped under "tp")
Instance file:  {"rows": R, "cols": C, "A": [...row-major...], "target":
                [...], "lambda": ..., "q": ..., "meta": {...}, "tp": {...},
                "penalty": {...}, "layout": ...}
Solution file:  {"x": [...row-major...], "value": v, "gap": g, ...}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .penalties import PenaltySpec, spec_from_dict, spec_to_dict
from .reduction import ReductionInstance, ThreePartitionInstance, build, optimal_bound
from .solver import SolveResult

_LAYOUT = "row-major by item: column (i-1)*m + j holds x_ij (i, j 1-based)"


def dumps(obj) -> str:
    """Serialize to JSON with floats at 17 significant digits."""
    return _write(obj)


def _write(obj) -> str:
    if isinstance(obj, dict):
        inner = ", ".join(f"{json.dumps(str(k))}: {_write(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_write(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    return json.dumps(obj)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def load_penalty(path) -> PenaltySpec:
    return spec_from_dict(read_json(path))


def save_penalty(path, spec: PenaltySpec) -> None:
    write_json(path, spec_to_dict(spec))


def tp_from_dict(data: dict) -> ThreePartitionInstance:
    if "tp" in data:
        data = data["tp"]
    if not isinstance(data, dict) or "m" not in data or "b" not in data:
        raise ValueError("3-partition input must provide 'm' and 'b'")
    return ThreePartitionInstance(m=int(data["m"]), b=tuple(data["b"]))


def load_tp(path) -> ThreePartitionInstance:
    return tp_from_dict(read_json(path))


def instance_to_dict(red: ReductionInstance) -> dict:
    problem = red.problem
    return {
        "rows": problem.rows,
        "cols": problem.cols,
        "A": [float(v) for v in problem.a_matrix.reshape(-1)],
        "target": [float(v) for v in problem.target],
        "lambda": problem.lam,
        "q": problem.q,
        "meta": {
            "theta": red.gparams.theta,
            "mu": red.gparams.mu,
            "tau_hat": red.gparams.tau_hat,
            "t_star": red.ganalysis.t_star,
            "h": red.ganalysis.h,
            "delta": red.delta,
            "epsilon": red.epsilon,
            "bound": optimal_bound(red),
        },
        "tp": {"m": red.tp.m, "b": list(red.tp.b)},
        "penalty": spec_to_dict(red.problem.penalty),
        "grid_exp": red.grid_exp,
        "layout": _LAYOUT,
    }


def save_instance(path, red: ReductionInstance) -> None:
    write_json(path, instance_to_dict(red))


def instance_from_dict(data: dict) -> ReductionInstance:
    """Rebuild the instance from its description and check the stored matrix.

    The build is deterministic, so the materialization is reconstructed from
    (tp, penalty, q, lambda) and verified against the stored A and target;
    a mismatch means the file was edited or corrupted.
    """
    tp = tp_from_dict(data["tp"])
    spec = spec_from_dict(data["penalty"])
    grid_exp = data.get("grid_exp")
    red = build(
        tp, spec, q=float(data["q"]), lam=float(data["lambda"]),
        grid_exp=20 if grid_exp is None else int(grid_exp),
    )
    stored_a = np.asarray(data["A"], dtype=float)
    stored_t = np.asarray(data["target"], dtype=float)
    if stored_a.size != red.problem.a_matrix.size or not np.array_equal(
        stored_a.reshape(red.problem.a_matrix.shape), red.problem.a_matrix
    ):
        raise ValueError("stored matrix does not match the rebuilt instance")
    if not np.array_equal(stored_t, red.problem.target):
        raise ValueError("stored target does not match the rebuilt instance")
    return red


def load_instance(path) -> ReductionInstance:
    return instance_from_dict(read_json(path))


def solution_to_dict(result: SolveResult) -> dict:
    return {
        "x": [float(v) for v in result.x.reshape(-1)],
        "value": result.value,
        "gap": result.gap,
        "assignments_explored": result.assignments_explored,
        "seed": result.seed,
    }


def save_solution(path, result: SolveResult) -> None:
    write_json(path, solution_to_dict(result))


def load_solution_matrix(path, red: ReductionInstance) -> np.ndarray:
    data = read_json(path)
    x = np.asarray(data["x"], dtype=float)
    return x.reshape(red.n, red.m)
