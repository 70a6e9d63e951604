import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

import penlq
from penlq import (
    ConditionViolationError,
    NondifferentiableError,
    PenaltySpec,
    analyze,
    kink_points,
    p_d1,
    p_d2,
    p_eval,
)
from penlq.penalties import sampled_k_bound, spec_from_dict, spec_to_dict

from conftest import all_admissible_specs
from oracles import central_d1, central_d2


def test_clipped_l1_saturates():
    assert p_eval(penlq.clipped_l1(1.0), 2.0) == pytest.approx(1.0, abs=0)


@pytest.mark.parametrize("name", sorted(all_admissible_specs()))
def test_p_at_zero_is_zero(name):
    assert p_eval(all_admissible_specs()[name], 0.0) == 0.0


def test_mcp_closed_form_value(mcp_spec):
    # t - t^2/2 on [0, 1]
    assert p_eval(mcp_spec, 0.6) == pytest.approx(0.42, abs=1e-15)


def test_mcp_value_matches_quadrature(mcp_spec):
    val, err = quad(lambda s: max(1.0 - s, 0.0), 0.0, 0.6)
    assert abs(p_eval(mcp_spec, 0.6) - val) < 1e-12 and err < 1e-12


def test_negative_t_rejected(mcp_spec):
    with pytest.raises(ValueError):
        p_eval(mcp_spec, -0.1)


def test_scad_derivative_plateau_and_taper():
    spec = penlq.scad(1.0, 3.0)
    assert p_d1(spec, 0.5) == pytest.approx(1.0, abs=0)
    assert p_d1(spec, 2.0) == pytest.approx(0.5, abs=0)


def test_mcp_second_derivative(mcp_spec):
    assert p_d2(mcp_spec, 0.5) == pytest.approx(-1.0, abs=0)
    fd = central_d2(mcp_spec, 0.5)
    assert abs(fd - (-1.0)) < 1e-6


@pytest.mark.parametrize(
    "spec, kinks",
    [
        (penlq.scad(1.0, 3.0), (1.0, 3.0)),
        (penlq.mcp(1.0, 2.0), (2.0,)),
        (penlq.piecewise_linear(2.0, 0.5, 1.5), (1.5,)),
        (penlq.hard_threshold(1.0), (1.0,)),
    ],
)
def test_kink_points_raise(spec, kinks):
    assert kink_points(spec) == kinks
    for kink in kinks:
        with pytest.raises(NondifferentiableError, match=str(kink)):
            p_d1(spec, kink)
        with pytest.raises(NondifferentiableError):
            p_d2(spec, kink)


def test_derivatives_require_positive_t(mcp_spec):
    with pytest.raises(ValueError):
        p_d1(mcp_spec, 0.0)


@pytest.mark.parametrize(
    "bad",
    [
        lambda: penlq.scad(1.0, 2.0),  # needs a > 2
        lambda: penlq.mcp(1.0, 0.5),  # needs b >= 1
        lambda: penlq.bridge(1.0),  # exponent in (0, 1)
        lambda: penlq.bridge(0.0),
        lambda: penlq.hard_threshold(0.0),
        lambda: penlq.piecewise_linear(1.0, 1.0, 1.0),  # needs k1 > k2
        lambda: penlq.piecewise_linear(1.0, 0.5, 0.0),  # breakpoint > 0
        lambda: PenaltySpec("mcp", {"gamma": 1.0}),  # missing b
        lambda: PenaltySpec("mcp", {"gamma": 1.0, "b": 1.0, "x": 2.0}),
        lambda: PenaltySpec("nope", {}),
    ],
)
def test_invalid_parameters_rejected(bad):
    with pytest.raises(ValueError):
        bad()


def test_analyze_mcp_constants(mcp_analysis):
    an = mcp_analysis
    assert an.tau == pytest.approx(0.8, abs=0)
    assert an.tau0 == pytest.approx(0.6, abs=1e-15)
    assert an.tau_hat == pytest.approx(0.7, abs=1e-15)
    assert an.c1 == pytest.approx(0.4, abs=1e-14)
    assert an.k_bound == 1.0


def test_analyze_l0_constants():
    an = analyze(penlq.l0())
    assert (an.tau, an.tau0, an.tau_hat) == (1.0, 0.6, 0.7)
    assert an.c1 == pytest.approx(5.0, abs=0)
    assert an.k_bound == 0.0


def test_analyze_clipped_l1_constants():
    an = analyze(penlq.clipped_l1(1.0))
    assert an.tau == pytest.approx(2.0, abs=0)
    assert an.tau0 == pytest.approx(1.5, abs=0)
    assert an.tau_hat == pytest.approx(1.75, abs=0)
    assert an.c1 == pytest.approx(1.0, abs=1e-14)
    assert an.k_bound == 0.0


def test_analyze_rejects_linear():
    with pytest.raises(ConditionViolationError):
        analyze(penlq.linear(1.0))


def test_tau_hat_inside_band(specs):
    for spec in specs.values():
        an = analyze(spec)
        assert an.tau0 < an.tau_hat < an.tau


def test_monotone_on_random_pairs(specs):
    rng = np.random.default_rng(7)
    for spec in specs.values():
        tau = analyze(spec).tau
        pairs = np.sort(rng.uniform(0.0, 2.0 * tau, size=(10_000, 2)), axis=1)
        lo = p_eval(spec, pairs[:, 0])
        hi = p_eval(spec, pairs[:, 1])
        assert np.all(lo <= hi + 1e-12)


def test_midpoint_concavity_on_random_pairs(specs):
    rng = np.random.default_rng(11)
    for spec in specs.values():
        tau0 = analyze(spec).tau0
        pairs = rng.uniform(0.0, tau0, size=(10_000, 2))
        mid = p_eval(spec, pairs.mean(axis=1))
        avg = 0.5 * (p_eval(spec, pairs[:, 0]) + p_eval(spec, pairs[:, 1]))
        assert np.all(mid >= avg - 1e-12)


def test_c1_positive_for_all_admissible(specs):
    for spec in specs.values():
        assert analyze(spec).c1 > 1e-12


def test_derivatives_match_finite_differences(specs):
    rng = np.random.default_rng(3)
    for spec in specs.values():
        an = analyze(spec)
        ts = rng.uniform(an.tau0 + 1e-4, an.tau - 1e-4, size=1000)
        d1 = p_d1(spec, ts)
        d2 = p_d2(spec, ts)
        assert np.all(np.abs(d1 - central_d1(spec, ts)) <= 1e-5 * np.maximum(1.0, np.abs(d1)))
        assert np.all(np.abs(d2 - central_d2(spec, ts)) <= 1e-5 * np.maximum(1.0, np.abs(d2)))


@pytest.mark.parametrize(
    "spec",
    [penlq.scad(1.0, 3.0), penlq.scad(0.5, 4.0), penlq.mcp(1.0, 1.0), penlq.mcp(2.0, 3.0)],
)
def test_scad_mcp_values_match_quadrature_of_derivative(spec):
    # integrate the defining derivative formula across both kink regions
    breaks = kink_points(spec)
    grid = np.linspace(0.01, 1.2 * max(breaks), 25)
    for t in grid:
        val, _ = quad(lambda s: p_d1(spec, s) if s not in breaks else 0.0,
                      0.0, t, points=[x for x in breaks if x < t], limit=200)
        assert abs(p_eval(spec, t) - val) < 1e-9


def test_k_bound_dominates_sampled_curvature(specs):
    for spec in specs.values():
        an = analyze(spec)
        sampled = sampled_k_bound(spec, an.tau0, an.tau)
        # exact bound sits between the raw sampled max and its padded value
        assert an.k_bound >= sampled / 1.01 - 1e-12
        assert an.k_bound <= sampled + 1e-12 or sampled == 0.0


@given(st.floats(min_value=0.0, max_value=1.6, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_mcp_between_zero_and_cap(t):
    spec = penlq.mcp(1.0, 1.0)
    assert 0.0 <= p_eval(spec, t) <= 0.5


def test_smooth_band_avoids_kinks():
    # random parametrizations: the analysis band [tau0, tau] must never
    # contain a kink, else the curvature constants would be meaningless
    rng = np.random.default_rng(19)
    for _ in range(200):
        gamma = float(rng.uniform(0.05, 5.0))
        for spec in (
            penlq.scad(gamma, float(rng.uniform(2.0, 6.0) + 1e-3)),
            penlq.mcp(gamma, float(rng.uniform(1.0, 5.0))),
            penlq.hard_threshold(gamma),
            penlq.piecewise_linear(gamma + 1.0, gamma * float(rng.uniform(0, 0.9)), gamma),
        ):
            an = analyze(spec)
            for kink in kink_points(spec):
                assert not an.tau0 <= kink <= an.tau, (spec, an, kink)


def test_spec_json_round_trip(specs):
    for spec in specs.values():
        again = spec_from_dict(spec_to_dict(spec))
        assert again == spec


def test_params_immutable(mcp_spec):
    with pytest.raises(TypeError):
        mcp_spec.params["gamma"] = 2.0
