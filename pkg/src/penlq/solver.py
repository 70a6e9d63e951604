"""Desk-scale solvers for reduction instances and generic problem instances.

:func:`minimize_structured` enumerates the certificate-shaped family
exhaustively: every assignment of items to subsets, with x_ij = t_star on
the chosen subset and 0 elsewhere.  For instances built from a 3-partition
with an equal-sum partition this family contains a global optimum, so the
enumerator is exact there; on other instances it upper-bounds the optimum
over the structured family only.  :func:`local_descent` is a generic
derivative-free polisher (the penalties have kinks and the l0 indicator is
discontinuous, so one-dimensional golden-section restrictions are used
instead of gradients).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SizeGuardError
from .reduction import ProblemInstance, ReductionInstance, objective, optimal_bound

_MAX_ASSIGNMENTS = 10**7
_CHUNK = 1 << 14
_PHI_INV = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolveResult:
    x: np.ndarray  # (n, m) solution matrix
    value: float  # objective(x), recomputed, never trusted from the search
    gap: float  # value - optimal_bound
    assignments_explored: int
    seed: int


def _thread_count() -> int:
    raw = os.environ.get("PENLQ_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:  # 0 = auto
        cap = min(4, os.cpu_count() or 1)
    return cap


def _assignment_digits(indices: np.ndarray, n: int, m: int) -> np.ndarray:
    """Decode assignment indices into per-item subset choices (little-endian:
    item i is digit i of the base-m index)."""
    powers = m ** np.arange(n, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % m


def _best_in_chunk(
    start: int, stop: int, b: np.ndarray, n: int, m: int, q: float
) -> tuple[float, int]:
    """Min of sum_{j>=2} |C_j - C_1|^q over assignments in [start, stop)."""
    indices = np.arange(start, stop, dtype=np.int64)
    digits = _assignment_digits(indices, n, m)
    sums = np.empty((indices.size, m))
    for j in range(m):
        sums[:, j] = ((digits == j) * b).sum(axis=1)
    imbalance = np.sum(np.abs(sums[:, 1:] - sums[:, :1]) ** q, axis=1)
    k = int(np.argmin(imbalance))
    return float(imbalance[k]), int(indices[k])


def minimize_structured(red: ReductionInstance) -> SolveResult:
    """Exhaustive search over all m**n certificate-shaped solutions.

    For each assignment, F = n*lam*h + t_star**q * sum_{j>=2} |C_j - C_1|^q
    where C_j is the integer sum of items assigned to subset j, so only the
    integer imbalance term varies.  Deterministic: ties break toward the
    smallest assignment index.  Raises SizeGuardError above 10**7
    assignments.
    """
    n, m = red.n, red.m
    total = m**n
    if total > _MAX_ASSIGNMENTS:
        raise SizeGuardError(
            f"m**n = {total} assignments exceed the desk-scale cap of {_MAX_ASSIGNMENTS}"
        )
    b = np.asarray(red.tp.b, dtype=np.int64)
    q = red.problem.q

    spans = [(s, min(s + _CHUNK, total)) for s in range(0, total, _CHUNK)]
    workers = _thread_count()
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(lambda sp: _best_in_chunk(*sp, b, n, m, q), spans))
    else:
        partial = [_best_in_chunk(s, e, b, n, m, q) for s, e in spans]
    _, best_index = min(partial, key=lambda pair: (pair[0], pair[1]))

    digits = _assignment_digits(np.array([best_index], dtype=np.int64), n, m)[0]
    x = np.zeros((n, m))
    x[np.arange(n), digits] = red.t_star
    value = objective(red, x)
    return SolveResult(
        x=x, value=value, gap=value - optimal_bound(red), assignments_explored=total, seed=0
    )


def _golden_min(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    c = hi - _PHI_INV * (hi - lo)
    d = lo + _PHI_INV * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _PHI_INV * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _PHI_INV * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def local_descent(
    problem: ProblemInstance,
    x0,
    step: float = 0.1,
    max_iters: int = 50,
    tol: float = 1e-10,
) -> np.ndarray:
    """Coordinate-wise descent with golden-section line searches.

    Each sweep minimizes the one-dimensional restriction of the objective
    over the trust interval [x_k - step, x_k + step], accepting a move only
    if it does not increase the objective, so the objective is
    non-increasing across iterations.  Stops once a full sweep improves by
    less than tol.
    """
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    if x.size != problem.cols:
        raise ValueError(f"x0 must have {problem.cols} entries, got {x.size}")
    current = problem.objective(x)
    for _ in range(max_iters):
        sweep_start = current
        for k in range(x.size):
            xk = x[k]

            def restricted(v: float) -> float:
                x[k] = v
                val = problem.objective(x)
                x[k] = xk
                return val

            candidate = _golden_min(restricted, xk - step, xk + step)
            cand_val = restricted(candidate)
            if cand_val < current:
                x[k] = candidate
                current = cand_val
        if sweep_start - current < tol:
            break
    return x


def solve(
    red: ReductionInstance,
    mode: str = "structured",
    restarts: int = 0,
    seed: int = 0,
) -> SolveResult:
    """Structured enumeration, optionally polished by local descent.

    mode "structured" returns :func:`minimize_structured` unchanged.  mode
    "hybrid" additionally runs ``restarts`` descent passes: the first from
    the best structured solution, the rest from seeded perturbations of it;
    the returned value is never worse than the structured one.  Reproducible
    for a fixed seed; structured mode is seed-independent.
    """
    if mode not in ("structured", "hybrid"):
        raise ValueError(f"unknown mode {mode!r}")
    if restarts < 0:
        raise ValueError("restarts must be non-negative")
    base = minimize_structured(red)
    if mode == "structured" or restarts == 0:
        return base

    rng = np.random.default_rng(seed)
    best_x, best_val = base.x, base.value
    step = max(red.delta, 1e-3)
    for attempt in range(restarts):
        if attempt == 0:
            start = base.x.reshape(-1)
        else:
            start = base.x.reshape(-1) + rng.uniform(-red.delta, red.delta, size=base.x.size)
        polished = local_descent(red.problem, start, step=step)
        val = red.problem.objective(polished)
        if val < best_val:
            best_x, best_val = polished.reshape(red.n, red.m), val
    return SolveResult(
        x=best_x,
        value=best_val,
        gap=best_val - optimal_bound(red),
        assignments_explored=base.assignments_explored,
        seed=seed,
    )
