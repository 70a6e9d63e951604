"""Build regularized L_q-minimization instances from 3-partition instances.

Given integers b_1..b_n (n = 3m) summing to m*B, :func:`build` materializes
the objective

    F(x) = sum_{j=2..m} |sum_i b_i x_ij - sum_i b_i x_i1|^q
         + sum_i |(lam*theta)^(1/q) * sum_j x_ij|^q
         + sum_i |(lam*mu)^(1/q) * (sum_j x_ij - tau_hat)|^q
         + lam * sum_ij p(|x_ij|)

as a concrete (A, target, lam, q, penalty) tuple over the n*m variables
x_ij.  F is bounded below by n*lam*h everywhere, the bound is attained
exactly by the certificates of equal-sum partitions, and any solution with
F < n*lam*h + epsilon decodes back into an equal-sum partition
(:mod:`penlq.decode`).  The matrix coefficients are 0, +-b_i, or the two
dyadic roots, so the instance size is polynomial in the 3-partition input.

Variable ordering: column (i-1)*m + (j-1) holds x_ij (0-based, row-major by
item).  Solution matrices are (n, m) arrays in the same layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gfun import GAnalysis, GParams, full_analysis
from .penalties import PenaltyAnalysis, PenaltySpec, p_eval


@dataclass(frozen=True)
class ThreePartitionInstance:
    """Multiset b_1..b_n of positive integers with n = 3m and sum(b) = m*B."""

    m: int
    b: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if len(self.b) != 3 * self.m:
            raise ValueError(f"expected n = 3m = {3 * self.m} items, got {len(self.b)}")
        if any(v <= 0 for v in self.b):
            raise ValueError("all items must be positive integers")
        if sum(self.b) % self.m != 0:
            raise ValueError(f"sum(b) = {sum(self.b)} is not divisible by m = {self.m}")

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def target_sum(self) -> int:
        """B, the per-subset sum of an equitable partition."""
        return sum(self.b) // self.m


@dataclass(frozen=True)
class ProblemInstance:
    """A concrete instance of min_x ||A x - target||_q^q + lam * sum_j p(|x_j|)."""

    a_matrix: np.ndarray
    target: np.ndarray
    lam: float
    q: float
    penalty: PenaltySpec

    def __post_init__(self):
        a = np.ascontiguousarray(np.asarray(self.a_matrix, dtype=float))
        t = np.ascontiguousarray(np.asarray(self.target, dtype=float))
        if a.ndim != 2 or t.ndim != 1 or a.shape[0] != t.shape[0]:
            raise ValueError("A must be 2-d with one target entry per row")
        if self.lam <= 0.0 or self.q < 1.0:
            raise ValueError("require lam > 0 and q >= 1")
        a.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "target", t)

    @property
    def rows(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.a_matrix.shape[1]

    def objective(self, x) -> float:
        """||A x - target||_q^q + lam * sum_j p(|x_j|) for a flat x."""
        x_arr = np.asarray(x, dtype=float).reshape(-1)
        if x_arr.size != self.cols:
            raise ValueError(f"x must have {self.cols} entries, got {x_arr.size}")
        residual = self.a_matrix @ x_arr - self.target
        fit = float(np.sum(np.abs(residual) ** self.q))
        return fit + self.lam * float(np.sum(p_eval(self.penalty, np.abs(x_arr))))


@dataclass(frozen=True)
class ReductionInstance:
    """A materialized problem plus everything needed to decode solutions."""

    problem: ProblemInstance
    tp: ThreePartitionInstance
    analysis: PenaltyAnalysis
    gparams: GParams
    ganalysis: GAnalysis
    delta: float
    epsilon: float
    grid_exp: int = 20

    @property
    def n(self) -> int:
        return self.tp.n

    @property
    def m(self) -> int:
        return self.tp.m

    @property
    def t_star(self) -> float:
        return self.ganalysis.t_star


def build(
    tp: ThreePartitionInstance,
    spec: PenaltySpec,
    q: float,
    lam: float,
    grid_exp: int = 20,
) -> ReductionInstance:
    """Materialize the reduction for (tp, penalty, q, lam).

    Runs the full coefficient pipeline, then emits three row blocks:
    m-1 balance rows (+b_i against column j, -b_i against column 1), n rows
    tying each item's row sum to zero with weight (lam*theta)^(1/q) (omitted
    when theta = 0, i.e. q = 1), and n rows pulling each row sum to tau_hat
    with weight (lam*mu)^(1/q).  Raises ConditionViolationError for
    inadmissible penalties.
    """
    analysis, gparams, ganalysis = full_analysis(spec, q, lam, grid_exp=grid_exp)
    n, m = tp.n, tp.m
    theta_root = gparams.theta_root
    mu_root = gparams.mu_root
    if theta_root is None or mu_root is None:
        raise ValueError("build requires rationalized coefficients with dyadic roots")

    n_rows = (m - 1) + (n if theta_root > 0.0 else 0) + n
    a = np.zeros((n_rows, n * m))
    target = np.zeros(n_rows)
    col = lambda i, j: i * m + j  # 0-based item i, subset j

    row = 0
    for j in range(1, m):
        for i in range(n):
            a[row, col(i, j)] = tp.b[i]
            a[row, col(i, 0)] = -tp.b[i]
        row += 1
    if theta_root > 0.0:
        for i in range(n):
            a[row, col(i, 0) : col(i, m - 1) + 1] = theta_root
            row += 1
    for i in range(n):
        a[row, col(i, 0) : col(i, m - 1) + 1] = mu_root
        target[row] = mu_root * gparams.tau_hat
        row += 1

    delta = min(analysis.tau0 / (8.0 * sum(tp.b)), ganalysis.delta_bar)
    epsilon = min(lam * delta * delta, (analysis.tau0 / 2.0) ** q)
    problem = ProblemInstance(a_matrix=a, target=target, lam=lam, q=q, penalty=spec)
    return ReductionInstance(
        problem=problem,
        tp=tp,
        analysis=analysis,
        gparams=gparams,
        ganalysis=ganalysis,
        delta=delta,
        epsilon=epsilon,
        grid_exp=grid_exp,
    )


def as_solution_matrix(red: ReductionInstance, x) -> np.ndarray:
    """Coerce x into the (n, m) row-major solution layout."""
    x_arr = np.asarray(x, dtype=float)
    if x_arr.size != red.n * red.m:
        raise ValueError(f"solution must have {red.n * red.m} entries, got {x_arr.size}")
    return x_arr.reshape(red.n, red.m)


def objective(red: ReductionInstance, x) -> float:
    """F(x) for an (n, m) solution matrix (or anything reshapable to it)."""
    return red.problem.objective(as_solution_matrix(red, x).reshape(-1))


def optimal_bound(red: ReductionInstance) -> float:
    """n * lam * h, the global lower bound on F; attained iff an
    equal-sum partition exists."""
    return red.n * red.problem.lam * red.ganalysis.h


def encode_certificate(red: ReductionInstance, partition) -> np.ndarray:
    """Certificate matrix: x_ij = t_star where item i sits in subset j, else 0.

    ``partition`` is either a :class:`penlq.decode.Partition` or a sequence
    of m index lists (1-based item indices).  For an equal-sum partition the
    certificate attains the optimal bound to within accumulation noise.
    """
    subsets = getattr(partition, "subsets", partition)
    if len(subsets) != red.m:
        raise ValueError(f"partition must have {red.m} subsets, got {len(subsets)}")
    x = np.zeros((red.n, red.m))
    seen: set[int] = set()
    for j, subset in enumerate(subsets):
        for item in subset:
            idx = int(item)
            if not 1 <= idx <= red.n or idx in seen:
                raise ValueError(f"partition must cover items 1..{red.n} exactly once")
            seen.add(idx)
            x[idx - 1, j] = red.t_star
    if len(seen) != red.n:
        raise ValueError(f"partition must cover items 1..{red.n} exactly once")
    return x
