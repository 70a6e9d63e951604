"""Round near-optimal solutions back into equal-sum partitions.

The construction guarantees that any solution with objective below
bound + epsilon has, in every item row, exactly one entry within 2*delta of
t_star and all other entries within delta of zero.  :func:`round_solution`
enforces exactly that pattern, :func:`to_partition` reads the partition off
the rounded matrix, and :func:`decide` chains the whole argument: a
sub-threshold objective must yield an equitable partition, and any failure
along the way is an implementation bug, reported as
:class:`ReductionInvariantError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ReductionInvariantError, RoundingFailureError
from .reduction import ReductionInstance, ThreePartitionInstance, as_solution_matrix, objective, optimal_bound


@dataclass(frozen=True)
class Partition:
    """m disjoint subsets of item indices (1-based) covering 1..n."""

    subsets: tuple[tuple[int, ...], ...]
    subset_sums: tuple[int, ...]


@dataclass(frozen=True)
class RoundedSolution:
    """Snapped solution: entries in {0, t_star}, one spike per item row."""

    y: np.ndarray
    chosen_column: tuple[int, ...]


def round_solution(red: ReductionInstance, x) -> RoundedSolution:
    """Snap each row to its unique near-t_star entry.

    Entries with |x_ij - t_star| < 2*delta become t_star, entries with
    |x_ij| < delta become 0.  A row with zero or several near-t_star
    entries, or with an entry in neither zone, raises
    RoundingFailureError naming the row: such an x cannot come from a
    sub-threshold objective.
    """
    x_mat = as_solution_matrix(red, x)
    t_star, delta = red.t_star, red.delta
    near_star = np.abs(x_mat - t_star) < 2.0 * delta
    near_zero = np.abs(x_mat) < delta
    y = np.zeros_like(x_mat)
    chosen = []
    for i in range(red.n):
        stars = np.nonzero(near_star[i])[0]
        if stars.size != 1:
            raise RoundingFailureError(
                f"row {i + 1}: expected exactly one entry within {2 * delta:g} of "
                f"t_star = {t_star:g}, found {stars.size}"
            )
        j = int(stars[0])
        stray = np.nonzero(~(near_zero[i] | near_star[i]))[0]
        if stray.size:
            k = int(stray[0])
            raise RoundingFailureError(
                f"row {i + 1}: entry x[{i + 1},{k + 1}] = {x_mat[i, k]:g} is neither "
                f"within {delta:g} of 0 nor within {2 * delta:g} of t_star"
            )
        y[i, j] = t_star
        chosen.append(j)
    return RoundedSolution(y=y, chosen_column=tuple(chosen))


def to_partition(red: ReductionInstance, rounded: RoundedSolution) -> Partition:
    """Assign item i to the subset holding its spike; sums from tp.b."""
    subsets: list[list[int]] = [[] for _ in range(red.m)]
    for i, j in enumerate(rounded.chosen_column):
        subsets[j].append(i + 1)
    sums = tuple(sum(red.tp.b[i - 1] for i in subset) for subset in subsets)
    return Partition(subsets=tuple(tuple(s) for s in subsets), subset_sums=sums)


def verify_equitable(tp: ThreePartitionInstance, partition: Partition) -> bool:
    """True iff every subset sums to B; sums are recomputed, not trusted."""
    counts = [0] * (tp.n + 1)
    for subset in partition.subsets:
        for item in subset:
            if not 1 <= item <= tp.n:
                raise ValueError(f"item index {item} outside 1..{tp.n}")
            counts[item] += 1
    if any(c != 1 for c in counts[1:]):
        raise ValueError("partition must cover every item exactly once")
    return all(
        sum(tp.b[i - 1] for i in subset) == tp.target_sum for subset in partition.subsets
    )


def decide(red: ReductionInstance, x) -> Partition | None:
    """Decode x: an equitable Partition when F(x) < bound + epsilon, else None.

    Below the threshold the rounding must succeed and the decoded subset
    sums must agree (their pairwise differences are integers strictly below
    1); if either step fails, the reduction's guarantee is broken and a
    ReductionInvariantError is raised.
    """
    value = objective(red, x)
    if not value < optimal_bound(red) + red.epsilon:
        return None
    try:
        partition = to_partition(red, round_solution(red, x))
    except RoundingFailureError as exc:
        raise ReductionInvariantError(
            f"near-optimal solution (F = {value:.17g} < bound + epsilon) failed to round: {exc}"
        ) from exc
    if not verify_equitable(red.tp, partition):
        raise ReductionInvariantError(
            "near-optimal solution decoded to unequal subset sums "
            f"{partition.subset_sums}; the construction guarantees equality"
        )
    return partition
