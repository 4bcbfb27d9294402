import math
import pytest
from services.envelopes import DomainError, envelope_X
from services.erlang import (
    envelope_splitmerge_big,
    erlang_cdf,
    expected_max_erlang,
    mgf_max_erlang,
    stability_big
)
from utils.validators import ValidationError

def test_erlang_cdf():
    assert erlang_cdf(2, 2.0, 1.0) == pytest.approx(0.593994, abs=1e-6)
    assert erlang_cdf(1, 1.0, 1.0) == pytest.approx(1 - math.exp(-1))
    assert erlang_cdf(3, 1.0, 0.0) == 0.0

def test_erlang_cdf_rejects_negative_argument():
    with pytest.raises(DomainError):
        erlang_cdf(2, 1.0, -1.0)

@pytest.mark.parametrize('l,kappa,mu,expected', [
    (2, 2, 1.0, 2.75),
    (2, 1, 1.0, 1.5),
    (1, 5, 2.0, 2.5),
    (3, 1, 1.0, 1 + 1 / 2 + 1 / 3)
])
def test_expected_max_erlang(l, kappa, mu, expected):
    assert expected_max_erlang(l, kappa, mu) == pytest.approx(expected, rel=1e-7)

def test_expected_max_erlang_many_phases_stays_finite():
    value = expected_max_erlang(50, 200, 1.0)
    assert 200 < value < 260

EXPONENTIAL_GRID = [(l, fraction) for l in (1, 2, 5, 10, 50) for fraction in (0.1, 0.4, 0.7, 0.9)]

@pytest.mark.parametrize('l,fraction', EXPONENTIAL_GRID)
def test_mgf_max_erlang_matches_exponential_closed_form(l, fraction):
    mu = 2.0
    theta = fraction * mu
    expected = math.prod(i * mu / (i * mu - theta) for i in range(1, l + 1))
    assert mgf_max_erlang(l, 1, mu, theta) == pytest.approx(expected, rel=1e-6)

@pytest.mark.parametrize('l,kappa,mu', [(2, 2, 1.0), (10, 2, 1.0), (10, 4, 1.0), (50, 2, 2.0), (50, 20, 20.0)])
def test_mgf_max_erlang_next_to_pole_is_finite_or_inf(l, kappa, mu):
    value = mgf_max_erlang(l, kappa, mu, mu * (1 - 1e-9))
    assert value > 1.0
    assert not math.isnan(value)

def test_mgf_max_erlang_increasing_in_theta():
    values = [mgf_max_erlang(10, 4, 1.0, theta) for theta in (0.1, 0.5, 0.9, 0.99)]
    assert values == sorted(values)

def test_mgf_max_erlang_domain():
    with pytest.raises(DomainError):
        mgf_max_erlang(2, 2, 1.0, 1.0)

def test_fractional_kappa_rejected():
    with pytest.raises(ValidationError) as excinfo:
        expected_max_erlang(2, 1.5, 1.0)
    assert excinfo.value.field == 'kappa'

def test_big_tasks_envelope():
    exponential = envelope_splitmerge_big(3, 1, 1.0)
    assert exponential(0.5) == envelope_X(3, 1.0)(0.5)

    envelope = envelope_splitmerge_big(2, 2, 1.0)
    assert envelope.mean == pytest.approx(2.75, rel=1e-7)
    assert envelope(0.3) > envelope.mean
    assert envelope(0.3) < envelope(0.6)

def test_stability_big():
    assert stability_big(2, 1) == pytest.approx(2 / 3)
    assert stability_big(2, 2) == pytest.approx(2 / 2.75, rel=1e-7)
    assert stability_big(10, 4) > stability_big(10, 1)
    assert stability_big(4, 2, mu=3.0) == pytest.approx(stability_big(4, 2, mu=1.0), rel=1e-7)

def test_reference_values():
    assert expected_max_erlang(1, 3, 1.0) == pytest.approx(3.0, rel=1e-8)
    assert stability_big(10, 1) == pytest.approx(0.341417, abs=1e-6)
    assert stability_big(1, 3) == pytest.approx(1.0)
    assert mgf_max_erlang(1, 1, 1.0, 0.5) == pytest.approx(2.0, rel=1e-7)
    assert mgf_max_erlang(2, 2, 1.0, 1e-6) == pytest.approx(1.0, abs=1e-4)

def test_big_tasks_less_stable_than_tiny_tasks():
    from services.envelopes import stability_tiny
    assert stability_big(50, 20) < stability_tiny(50, 20)
