import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from credible_promises.equilibrium import (
    SolveMethod,
    Variant,
    cost_of_reneging,
    d_star_closed,
    d_star_numeric,
    d_star_sensitivity,
    incentive_gap,
    threshold_delta,
)
from credible_promises.payoffs import Source
from credible_promises.stage_game import Status, VoterRegime

NAIVE, NON_NAIVE = VoterRegime.naive(), VoterRegime.non_naive()
LIMITED = [Variant.limited(k) for k in (1, 2, 3)]
ALL = [Variant.BENCHMARK, Variant.NON_NAIVE_G] + LIMITED


def test_cost_examples():
    assert cost_of_reneging(NAIVE, Status.GOOD, 0.5, 0.7) == pytest.approx(0.6805555555555556)
    assert cost_of_reneging(NON_NAIVE, Status.GOOD, 0.6546536707, 0.7, Source.AS_PRINTED) == \
        pytest.approx(0.6546536707, abs=1e-9)
    assert cost_of_reneging(VoterRegime.limited(1), Status.GOOD, 0.2, 0.7) == \
        pytest.approx(0.7 * 1.7 * (0.2 - 0.04 + 0.008 / 3))
    assert cost_of_reneging(NAIVE, Status.BAD, 0.0, 0.9) == 0.0


def test_gap_examples():
    assert incentive_gap(NAIVE, Status.GOOD, 0.5, 0.7) == pytest.approx(0.1805555555555556)
    assert incentive_gap(NAIVE, Status.GOOD, 0.9, 0.7) == pytest.approx(7 / 3 * 0.333 - 0.9, abs=1e-12)


def test_rejects_delta_one():
    with pytest.raises(ValueError):
        cost_of_reneging(NAIVE, Status.GOOD, 0.5, 1.0)
    with pytest.raises(ValueError):
        d_star_numeric(Variant.BENCHMARK, 1.0)


def test_nonnaive_b_needs_source():
    with pytest.raises(ValueError):
        d_star_numeric(Variant.NON_NAIVE_B, 0.7)


@pytest.mark.parametrize("variant, delta, source, expected, clamped", [
    (Variant.BENCHMARK, 0.5, None, 0.0, False),
    (Variant.BENCHMARK, 0.7, None, 0.7680749452886, False),
    (Variant.NON_NAIVE_G, 0.7, None, 0.6546536707, False),
    (Variant.NON_NAIVE_G, 0.8, None, 1.0, True),
    (Variant.NON_NAIVE_B, 0.7, Source.AS_PRINTED, 0.0, True),
    (Variant.NON_NAIVE_B, 0.7, Source.INTEGRAND_FAITHFUL, 0.0483998976, False),
    (Variant.limited(2), 0.7, None, 0.4013885298, False),
])
def test_numeric_examples(variant, delta, source, expected, clamped):
    p = d_star_numeric(variant, delta, source)
    assert p.d_star == pytest.approx(expected, abs=1e-9)
    assert p.clamped is clamped
    assert p.method is SolveMethod.NUMERIC_ROOT


@pytest.mark.parametrize("variant, delta, expected", [
    (Variant.BENCHMARK, 0.75, 1.0),
    (Variant.BENCHMARK, 0.6, 0.3819660112501051),
    (Variant.limited(1), 0.7, 0.1692076032),
    (Variant.limited(3), 0.7, 0.5294579099),
])
def test_closed_examples(variant, delta, expected):
    assert d_star_closed(variant, delta).d_star == pytest.approx(expected, abs=1e-9)


def test_closed_nonnaive_b_is_clamped_and_annotated():
    p = d_star_closed(Variant.NON_NAIVE_B, 0.7)
    assert p.raw == pytest.approx(-2.5714285714, abs=1e-9)
    assert p.d_star == 0.0
    assert p.clamped
    assert "outside [0, 1]" in p.note


def test_closed_notes_threshold_gap():
    assert "threshold" in d_star_closed(Variant.limited(3), 0.55).note
    assert d_star_closed(Variant.limited(3), 0.55, gated=False).d_star == \
        pytest.approx(d_star_numeric(Variant.limited(3), 0.55).d_star, abs=1e-8)


def test_no_printed_form_beyond_k3():
    with pytest.raises(ValueError):
        d_star_closed(Variant.limited(4), 0.7)


@pytest.mark.parametrize("variant, delta, expected", [
    (Variant.BENCHMARK, 0.6, 3.7267799624996494),
    (Variant.NON_NAIVE_G, 0.7, math.sqrt(21) / 0.49), (Variant.NON_NAIVE_B, 0.7, 2.0408163265306127),
])
def test_sensitivity_examples(variant, delta, expected):
    assert d_star_sensitivity(variant, delta) == pytest.approx(expected, rel=1e-4)


def test_sensitivity_rejects_branch_edges():
    with pytest.raises(ValueError):
        d_star_sensitivity(Variant.BENCHMARK, 0.75)
    with pytest.raises(ValueError):
        d_star_sensitivity(Variant.NON_NAIVE_G, 2 / 3)


@pytest.mark.parametrize("variant, expected", [
    (Variant.BENCHMARK, 0.5), (Variant.NON_NAIVE_G, 2 / 3),
    (Variant.limited(1), (math.sqrt(5) - 1) / 2), (Variant.limited(2), 0.5436890127),
    (Variant.limited(3), 0.5187900637),
])
def test_thresholds(variant, expected):
    assert threshold_delta(variant) == pytest.approx(expected, abs=1e-9)


def test_printed_nonnaive_b_has_no_threshold():
    assert threshold_delta(Variant.NON_NAIVE_B, Source.AS_PRINTED) is None
    assert threshold_delta(Variant.NON_NAIVE_B, Source.INTEGRAND_FAITHFUL) == pytest.approx(2 / 3, abs=1e-9)


@given(variant=st.sampled_from(ALL), delta=st.floats(0.0, 0.999))
@settings(max_examples=150, deadline=None)
def test_fixed_point(variant, delta):
    p = d_star_numeric(variant, delta)
    gap = lambda d: incentive_gap(variant.regime, variant.opponent, d, delta)  # noqa: E731
    if 0 < p.d_star < 1:
        assert abs(gap(p.d_star)) <= 1e-9
        assert gap(min(1.0, p.d_star + 1e-4)) < 0
    assert gap(max(0.0, p.d_star - 1e-6)) >= -1e-12


@pytest.mark.parametrize("variant", ALL)
def test_monotone_in_delta(variant):
    ds = [d_star_numeric(variant, t).d_star for t in np.linspace(0, 0.999, 400)]
    assert np.all(np.diff(ds) >= 0)


def test_long_punishment_approaches_benchmark():
    bench = d_star_numeric(Variant.BENCHMARK, 0.7).d_star
    assert abs(d_star_numeric(Variant.limited(50), 0.7).d_star - bench) <= 1e-6
    gaps = [bench - d_star_numeric(Variant.limited(k), 0.7).d_star for k in (1, 2, 4, 8, 16)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_variant_parse():
    assert Variant.parse("limited-k2") == Variant.limited(2)
    assert Variant.parse("k3") == Variant.limited(3)
    assert Variant.parse("NonNaive-G") == Variant.NON_NAIVE_G
    with pytest.raises(ValueError):
        Variant.parse("strategic")
