"""Independent oracles used by the test suite.

Nothing here calls into the solver or decoder paths it is used to check:
the 3-partition oracle is a plain bin-completion backtracker, the objective
oracle evaluates the four-block sum term by term, and the derivative
oracles are central finite differences.
"""

from __future__ import annotations

import numpy as np

from penlq import p_d1, p_eval


def three_partition_oracle(m: int, b) -> bool:
    """Exists a partition of b into m subsets (any sizes) each summing to B?"""
    total = sum(b)
    if total % m != 0:
        raise ValueError("sum(b) must be divisible by m")
    target = total // m
    items = sorted(b, reverse=True)
    bins = [0] * m

    def place(i: int) -> bool:
        if i == len(items):
            return all(s == target for s in bins)
        seen = set()
        for j in range(m):
            if bins[j] in seen:  # identical loads are interchangeable
                continue
            seen.add(bins[j])
            if bins[j] + items[i] <= target:
                bins[j] += items[i]
                if place(i + 1):
                    return True
                bins[j] -= items[i]
        return False

    return place(0)


def objective_by_blocks(red, x) -> float:
    """Evaluate F(x) directly from its four-block definition."""
    x = np.asarray(x, dtype=float).reshape(red.n, red.m)
    b = np.asarray(red.tp.b, dtype=float)
    q = red.problem.q
    lam = red.problem.lam
    gp = red.gparams
    weighted = b @ x  # length m: sum_i b_i x_ij per subset
    balance = float(np.sum(np.abs(weighted[1:] - weighted[0]) ** q))
    row_sums = x.sum(axis=1)
    pull_zero = float(np.sum(np.abs(gp.theta_root * row_sums) ** q))
    pull_anchor = float(np.sum(np.abs(gp.mu_root * (row_sums - gp.tau_hat)) ** q))
    penalty = lam * float(np.sum(p_eval(red.problem.penalty, np.abs(x))))
    return balance + pull_zero + pull_anchor + penalty


def central_d1(spec, t, h=1e-6):
    """First derivative of p by central differences of p_eval."""
    return (p_eval(spec, t + h) - p_eval(spec, t - h)) / (2.0 * h)


def central_d2(spec, t, h=1e-6):
    """Second derivative of p by central differences of p_d1."""
    return (p_d1(spec, t + h) - p_d1(spec, t - h)) / (2.0 * h)


# Curated desk-scale instances, labeled by three_partition_oracle (the
# labels are re-verified in the tests before use).
YES_INSTANCES = (
    (2, (1, 2, 3, 1, 2, 3)),
    (2, (1, 1, 1, 1, 1, 1)),
    (2, (2, 3, 5, 4, 4, 2)),
    (2, (10, 9, 1, 5, 7, 8)),
    (2, (1, 1, 1, 1, 1, 5)),  # equal sums need unequal subset sizes here
    (3, (1, 2, 3, 1, 2, 3, 1, 2, 3)),
    (3, (4, 5, 6, 5, 5, 5, 6, 4, 5)),
)

NO_INSTANCES = (
    (2, (3, 3, 3, 3, 3, 5)),
    (2, (1, 1, 1, 5, 6, 6)),
    (2, (4, 4, 4, 4, 4, 10)),
    (2, (6, 6, 6, 6, 6, 10)),
    (3, (1, 1, 1, 1, 1, 1, 1, 1, 10)),
    (3, (4, 4, 4, 4, 4, 4, 4, 4, 7)),
    (3, (2, 2, 2, 4, 4, 4, 6, 6, 15)),
)
