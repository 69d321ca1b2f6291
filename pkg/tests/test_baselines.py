import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gean.baselines import EzbConfig, ezb_estimate, invert_empty_mean
from gean.errors import Saturated
from gean.sim import Population, derive_seed


def test_empty_population_estimates_zero():
    assert ezb_estimate(Population(0), EzbConfig(100, 1.0, 4)) == 0.0


@given(t=st.integers(0, 10**5), f=st.integers(2, 10**4), p=st.floats(0.01, 1.0))
def test_inversion_identity(t, f, p):
    mean_empty = f * (1 - p / f) ** t
    if 0.5 <= mean_empty <= f - 0.5:
        assert invert_empty_mean(mean_empty, f, p) == pytest.approx(t, rel=1e-9, abs=1e-6)


@given(
    f=st.integers(2, 5000),
    p=st.floats(0.01, 1.0),
    a=st.floats(0, 1),
    b=st.floats(0, 1),
)
def test_monotone_nonincreasing_in_empty_mean(f, p, a, b):
    lo, hi = sorted((a * f, b * f))
    assert invert_empty_mean(lo, f, p) >= invert_empty_mean(hi, f, p)


def test_reliability_at_reference_point():
    cfg = EzbConfig(1000, 1.0, 20)
    hits = sum(
        abs(ezb_estimate(Population(1000, seed=i), cfg, seed=derive_seed(3, i)) - 1000) <= 100
        for i in range(200)
    )
    assert hits / 200 >= 0.9


def test_saturation_raises_with_diagnostics():
    with pytest.raises(Saturated) as info:
        ezb_estimate(Population(1000), EzbConfig(2, 1.0, 3))
    diag = info.value.diagnostics
    assert diag["mean_empty"] == 0.0
    assert math.isfinite(diag["clamped_estimate"])


def test_slot_cost_matches_gean_rule():
    assert EzbConfig(1000, 1.0, 6).slots == pytest.approx(6019.98)


def test_config_validation():
    for args in [(0, 1.0, 1), (10, 0.0, 1), (10, 1.0, 0)]:
        with pytest.raises(ValueError):
            EzbConfig(*args)
