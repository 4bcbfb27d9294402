import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from services.stochastic import (
    Distribution,
    DistributionKind,
    EmpiricalSample,
    EmptySampleError,
    RngStream,
    boxplot_summary,
    ecdf,
    exceedance,
    max_pp_deviation,
    pp_plot,
    quantile,
    sample
)
from utils.validators import ValidationError

def test_exponential_mean_over_many_draws():
    draws = Distribution.exponential(2.0).sample(RngStream(3, 0), 200000)
    assert abs(draws.mean() - 0.5) < 0.01

def test_deterministic_draw_is_exact():
    assert sample(Distribution.deterministic(10.0), RngStream(1)) == 10.0

def test_shifted_exponential_never_below_shift():
    draws = Distribution.shifted_exponential(2.6, 2.0).sample(RngStream(5), 10000)
    assert draws.min() >= 2.6
    assert abs(draws.mean() - 3.1) < 0.02

def test_erlang_mean_and_variance():
    dist = Distribution.erlang(3, 1.5)
    assert dist.mean() == pytest.approx(2.0)
    assert dist.variance() == pytest.approx(3 / 2.25)

def test_same_stream_key_reproduces_sequence():
    dist = Distribution.exponential(1.0)
    a = dist.sample(RngStream(42, 1), 100)
    b = dist.sample(RngStream(42, 1), 100)
    c = dist.sample(RngStream(42, 2), 100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

@pytest.mark.parametrize('text,kind', [
    ('exp:0.5', DistributionKind.EXPONENTIAL),
    ('erlang:3:2', DistributionKind.ERLANG),
    ('det:10', DistributionKind.DETERMINISTIC),
    ('sexp:2.6:2000', DistributionKind.SHIFTED_EXPONENTIAL)
])
def test_flag_grammar(text, kind):
    assert Distribution.from_flag(text).kind is kind

def test_flag_rate_scale_converts_per_second_to_per_ms():
    dist = Distribution.from_flag('exp:2000', rate_scale=1e-3)
    assert dist.rate == pytest.approx(2.0)
    assert float(dist.to_flag(rate_scale=1e-3).split(':')[1]) == pytest.approx(2000.0)

@pytest.mark.parametrize('text', ['exp', 'exp:-1', 'erlang:0:1', 'det:-3', 'gamma:1', 'exp:abc'])
def test_malformed_flags_rejected(text):
    with pytest.raises(ValidationError):
        Distribution.from_flag(text)

def test_unknown_kind_is_validation_error():
    with pytest.raises(ValidationError):
        Distribution('weibull', rate=1.0)

def test_with_mean_keeps_family_and_shift():
    dist = Distribution.shifted_exponential(1.0, 1.0).with_mean(3.0)
    assert dist.shift == 1.0
    assert dist.mean() == pytest.approx(3.0)
    assert Distribution.erlang(4, 1.0).with_mean(2.0).rate == pytest.approx(2.0)

def test_quantile_type_one():
    s = EmpiricalSample([3.0, 1.0, 2.0, 4.0])
    assert quantile(s, 0.5) == 2.0
    assert quantile(s, 0.51) == 3.0
    assert quantile(s, 1.0) == 4.0
    assert quantile(EmpiricalSample(np.arange(1, 101, dtype=float)), 0.99) == 99.0

def test_quantile_rejects_bad_probability_and_empty_sample():
    with pytest.raises(ValueError):
        quantile(EmpiricalSample([1.0]), 0.0)
    with pytest.raises(EmptySampleError):
        quantile(EmpiricalSample([]), 0.5)

@given(st.lists(st.floats(min_value=0, max_value=1e6, allow_nan=False), min_size=1, max_size=200),
       st.floats(min_value=0.01, max_value=1.0), st.floats(min_value=0.01, max_value=1.0))
@settings(max_examples=100, deadline=None)
def test_quantile_monotone_in_q(values, q1, q2):
    s = EmpiricalSample(values)
    low, high = sorted((q1, q2))
    assert quantile(s, low) <= quantile(s, high)

def test_ecdf_and_exceedance():
    s = EmpiricalSample([1.0, 2.0, 3.0, 4.0])
    assert ecdf(s, 2.0) == 0.5
    assert exceedance(s, 3.0) == 0.25
    assert exceedance(s, 10.0) == 0.0

@given(st.lists(st.floats(min_value=0, max_value=1e3, allow_nan=False), min_size=1, max_size=100))
@settings(max_examples=50, deadline=None)
def test_pp_plot_of_sample_with_itself_is_diagonal(values):
    s = EmpiricalSample(values)
    points = pp_plot(s, s, grid_size=32)
    assert all(x == y for x, y in points)
    assert max_pp_deviation(points) == 0.0

def test_pp_plot_points_nondecreasing():
    rng = RngStream(9)
    a = EmpiricalSample(Distribution.exponential(1.0).sample(rng, 500))
    b = EmpiricalSample(Distribution.exponential(2.0).sample(rng, 500))
    points = pp_plot(a, b, grid_size=64)
    xs, ys = zip(*points)
    assert list(xs) == sorted(xs)
    assert list(ys) == sorted(ys)
    # b is stochastically smaller, so its CDF lies above
    assert all(y >= x - 0.15 for x, y in points)

def test_pp_plot_empty_sample():
    with pytest.raises(EmptySampleError):
        pp_plot(EmpiricalSample([]), EmpiricalSample([1.0]))

def test_boxplot_summary():
    summary = boxplot_summary(EmpiricalSample([5.0, 1.0, 3.0, 2.0, 4.0]))
    assert summary == {'min': 1.0, 'q25': 2.0, 'median': 3.0, 'q75': 4.0, 'max': 5.0, 'mean': 3.0}

def test_empirical_sample_csv_round_trip(tmp_path):
    s = EmpiricalSample([0.1, 1 / 3, math.pi])
    path = str(tmp_path / 'sample.csv')
    s.to_csv(path)
    assert np.array_equal(EmpiricalSample.from_csv(path).values, s.values)

def test_degenerate_samples():
    assert quantile(EmpiricalSample([5.0]), 0.5) == 5.0
    assert set(boxplot_summary(EmpiricalSample([7.0])).values()) == {7.0}

def test_pp_plot_of_offset_supports_is_a_step():
    points = pp_plot(EmpiricalSample([0.0] * 10), EmpiricalSample([1.0] * 10), grid_size=8)
    assert all(y in (0.0, 1.0) for _, y in points)
    assert all(x == 1.0 for x, _ in points)

def test_exponential_quantile_and_erlang_moments():
    rng = RngStream(17, 1)
    draws = EmpiricalSample(Distribution.exponential(1.0).sample(rng, 1000000))
    assert quantile(draws, 0.99) == pytest.approx(math.log(100), abs=0.05)
    erlang = Distribution.erlang(4, 2.0).sample(rng, 1000000)
    assert erlang.mean() == pytest.approx(2.0, abs=0.004)
    assert erlang.var() == pytest.approx(1.0, abs=0.01)

def test_pp_gap_of_shifted_exponential():
    rng = RngStream(23)
    a = EmpiricalSample(Distribution.exponential(1.0).sample(rng, 100000))
    b = EmpiricalSample(Distribution.shifted_exponential(1.0, 1.0).sample(rng, 100000))
    assert max_pp_deviation(pp_plot(a, b)) == pytest.approx(1 - math.exp(-1), abs=0.01)
