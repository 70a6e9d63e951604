"""Grid-based admissibility checks and randomized inequality fuzzers.

:func:`check_conditions` certifies, up to grid resolution, the two
properties the reduction needs from a penalty: monotonicity on [0, 2*tau]
and concavity-but-not-linearity on [0, tau], plus smoothness of the band
[tau0, tau].  Failures are reported with concrete numerical witnesses, never
raised.

The fuzzers exercise two consequences of those conditions that the rest of
the package leans on:

* subadditive bound: sum_i p(|t_i|) >= min(p(|sum_i t_i|), p(tau));
* concentration: any split of t_tilde in (tau0, tau) whose penalty sum stays
  below p(t_tilde) + c1*delta must put all mass near a single coordinate.

A sampled counterexample to either would falsify this implementation, so the
fuzz reports count them explicitly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .penalties import PenaltyAnalysis, PenaltySpec, _frame, analyze, c1_margin, p_eval


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of :func:`check_conditions`; witnesses are None on pass."""

    monotone_ok: bool
    monotone_witness: tuple[float, float, float, float] | None
    concave_ok: bool
    concave_witness: tuple[float, float, float] | None
    not_linear_ok: bool
    c1: float
    smooth_ok: bool
    max_second_diff_jump: float
    grid_n: int
    overall: bool


_TOL = 1e-12


def check_conditions(spec: PenaltySpec, grid_n: int = 1000) -> ConditionReport:
    """Verify the admissibility conditions on uniform grids.

    grid_n >= 100 points are used per check; the report records grid_n since
    the certificate is only as fine as the grid.  Deterministic: identical
    inputs produce identical reports.
    """
    if grid_n < 100:
        raise ValueError("grid_n must be at least 100")
    tau, tau0, _ = _frame(spec)

    # Monotone on [0, 2*tau].
    grid = np.linspace(0.0, 2.0 * tau, grid_n)
    vals = p_eval(spec, grid)
    drops = np.nonzero(np.diff(vals) < -_TOL)[0]
    monotone_ok = drops.size == 0
    monotone_witness = None
    if not monotone_ok:
        i = int(drops[0])
        monotone_witness = (float(grid[i]), float(grid[i + 1]), float(vals[i]), float(vals[i + 1]))

    # Midpoint concavity on [0, tau]: p((s+t)/2) >= (p(s)+p(t))/2 for all
    # grid pairs, evaluated in row chunks to keep memory linear in grid_n.
    # For l0 the inequality form is used directly (it holds even though the
    # indicator is discontinuous at 0).
    cgrid = np.linspace(0.0, tau, grid_n)
    cvals = p_eval(spec, cgrid)
    concave_ok = True
    concave_witness = None
    worst = 0.0
    chunk = max(1, (1 << 21) // grid_n)
    for lo in range(0, grid_n, chunk):
        s = cgrid[lo : lo + chunk, None]
        gap = p_eval(spec, 0.5 * (s + cgrid[None, :])) - 0.5 * (
            cvals[lo : lo + chunk, None] + cvals[None, :]
        )
        low = float(np.min(gap))
        if low < min(worst, -_TOL):
            concave_ok = False
            worst = low
            i, j = np.unravel_index(int(np.argmin(gap)), gap.shape)
            concave_witness = (float(cgrid[lo + i]), float(cgrid[j]), low)

    # Not linear: the c1 margin must be strictly positive.
    c1 = c1_margin(spec, tau0)
    not_linear_ok = c1 > _TOL

    # Smooth band: second finite differences along a grid of [tau0, tau] must
    # vary continuously, i.e. adjacent estimates may not jump.
    sgrid = np.linspace(tau0, tau, grid_n)
    svals = p_eval(spec, sgrid)
    eta = sgrid[1] - sgrid[0]
    fd2 = (svals[2:] - 2.0 * svals[1:-1] + svals[:-2]) / (eta * eta)
    k_ref = max(0.0, float(np.max(-fd2))) if fd2.size else 0.0
    max_jump = float(np.max(np.abs(np.diff(fd2)))) if fd2.size > 1 else 0.0
    smooth_ok = max_jump < 1e-3 * (1.0 + k_ref)

    return ConditionReport(
        monotone_ok=monotone_ok,
        monotone_witness=monotone_witness,
        concave_ok=concave_ok,
        concave_witness=concave_witness,
        not_linear_ok=not_linear_ok,
        c1=float(c1),
        smooth_ok=smooth_ok,
        max_second_diff_jump=max_jump,
        grid_n=grid_n,
        overall=monotone_ok and concave_ok and not_linear_ok and smooth_ok,
    )


def subadditive_bound_holds(spec: PenaltySpec, t_list: Sequence[float]) -> bool:
    """Check sum_i p(|t_i|) >= min(p(|sum_i t_i|), p(tau)) for len >= 2."""
    t_arr = np.asarray(t_list, dtype=float)
    if t_arr.ndim != 1 or t_arr.size < 2:
        raise ValueError("t_list must contain at least two entries")
    tau, _, _ = _frame(spec)
    lhs = float(np.sum(p_eval(spec, np.abs(t_arr))))
    rhs = min(p_eval(spec, abs(float(np.sum(t_arr)))), p_eval(spec, tau))
    return lhs >= rhs - _TOL


class SplitVerdict(enum.Enum):
    HYPOTHESIS_FAILS = "hypothesis_fails"
    CONCENTRATED_OK = "concentrated_ok"
    COUNTEREXAMPLE_FOUND = "counterexample_found"


def classify_split(
    spec: PenaltySpec,
    analysis: PenaltyAnalysis,
    t_tilde: float,
    delta: float,
    t_list: Sequence[float],
) -> SplitVerdict:
    """Classify one decomposition of t_tilde against the concentration bound.

    If the penalty sum already meets p(t_tilde) + c1*delta the implication is
    vacuous (HYPOTHESIS_FAILS).  Otherwise the entries must concentrate:
    exactly one within delta of t_tilde, all others within delta of zero.
    Boundary equality counts as concentrated (measure-zero convention).
    """
    tau0, tau = analysis.tau0, analysis.tau
    if not tau0 < t_tilde < tau:
        raise ValueError(f"t_tilde must lie in ({tau0:g}, {tau:g})")
    delta_max = min(tau0 / 3.0, t_tilde - tau0, tau - t_tilde)
    if not 0.0 < delta < delta_max:
        raise ValueError(f"delta must lie in (0, {delta_max:g})")
    t_arr = np.asarray(t_list, dtype=float)
    if t_arr.size < 2:
        raise ValueError("t_list must contain at least two entries")
    if abs(float(np.sum(t_arr)) - t_tilde) > 1e-12:
        raise ValueError("t_list must sum to t_tilde (abs tol 1e-12)")

    penalty_sum = float(np.sum(p_eval(spec, np.abs(t_arr))))
    if penalty_sum >= p_eval(spec, t_tilde) + analysis.c1 * delta:
        return SplitVerdict.HYPOTHESIS_FAILS
    near_big = np.abs(t_arr - t_tilde) <= delta
    near_zero = np.abs(t_arr) <= delta
    if np.count_nonzero(near_big) == 1 and bool(np.all(near_zero | near_big)):
        return SplitVerdict.CONCENTRATED_OK
    return SplitVerdict.COUNTEREXAMPLE_FOUND


@dataclass(frozen=True)
class FuzzReport:
    trials: int
    seed: int
    violations: int
    hypothesis_fails: int = 0
    concentrated: int = 0

    @property
    def ok(self) -> bool:
        return self.violations == 0


def fuzz_subadditivity(spec: PenaltySpec, trials: int = 10_000, seed: int = 0) -> FuzzReport:
    """Random lists (length 2..6, entries uniform in [-2*tau, 2*tau])."""
    tau, _, _ = _frame(spec)
    rng = np.random.default_rng(seed)
    violations = 0
    lengths = (2, 3, 4, 5, 6)
    counts = [trials // len(lengths)] * len(lengths)
    counts[0] += trials - sum(counts)
    for length, n_here in zip(lengths, counts):
        batch = rng.uniform(-2.0 * tau, 2.0 * tau, size=(n_here, length))
        lhs = np.sum(p_eval(spec, np.abs(batch)), axis=1)
        sums = np.abs(np.sum(batch, axis=1))
        rhs = np.minimum(p_eval(spec, sums), p_eval(spec, tau))
        violations += int(np.count_nonzero(lhs < rhs - _TOL))
    return FuzzReport(trials=trials, seed=seed, violations=violations)


def fuzz_concentration(
    spec: PenaltySpec,
    analysis: PenaltyAnalysis | None = None,
    trials: int = 10_000,
    seed: int = 0,
) -> FuzzReport:
    """Random decompositions of random t_tilde; counts verdicts.

    Each trial draws an admissible (t_tilde, delta) and splits t_tilde into
    l in 2..6 parts.  Most trials use normalized positive weights plus
    zero-sum noise, so dispersed and negative splits occur; a minority are
    exact spikes (one coordinate carries everything, the rest are zero)
    which is the only way the penalty sum can stay below the threshold for
    the l0 indicator.  Any COUNTEREXAMPLE_FOUND verdict is a bug and counts
    as a violation.
    """
    if analysis is None:
        analysis = analyze(spec)
    tau0, tau = analysis.tau0, analysis.tau
    rng = np.random.default_rng(seed)
    hypothesis_fails = concentrated = violations = 0
    for trial in range(trials):
        t_tilde = rng.uniform(tau0 + 0.05 * (tau - tau0), tau - 0.05 * (tau - tau0))
        delta = rng.uniform(0.05, 0.95) * min(tau0 / 3.0, t_tilde - tau0, tau - t_tilde)
        length = int(rng.integers(2, 7))
        if trial % 8 == 0:
            parts = np.zeros(length)
            parts[int(rng.integers(length))] = t_tilde
        else:
            weights = rng.exponential(1.0, size=length)
            parts = t_tilde * weights / weights.sum()
            noise = rng.normal(0.0, 0.3 * t_tilde, size=length)
            parts = parts + noise - noise.mean()
            parts -= (parts.sum() - t_tilde) / length  # re-center the float sum
        verdict = classify_split(spec, analysis, t_tilde, delta, parts)
        if verdict is SplitVerdict.HYPOTHESIS_FAILS:
            hypothesis_fails += 1
        elif verdict is SplitVerdict.CONCENTRATED_OK:
            concentrated += 1
        else:
            violations += 1
    return FuzzReport(
        trials=trials,
        seed=seed,
        violations=violations,
        hypothesis_fails=hypothesis_fails,
        concentrated=concentrated,
    )
