import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lawn_isac.aoi import UtilizationError, aaoi_value, md1_waiting_cdf
from lawn_isac.queue_sim import lindley_waits, simulate_aoi, waiting_time_cdf_empirical


def test_deterministic_queue_exact():
    # D/D/1: age ramps from 1/gamma to 1/gamma + 1/lam every 1/lam, so the mean is 1/(2 lam) + 1/gamma
    res = simulate_aoi("DD1", 0.5, 1.0, 10_000, 0)
    assert res.aaoi_est_s == pytest.approx(1 / (2 * 0.5) + 1.0, rel=1e-3)
    assert res.half_width_95 == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("model,expected", [("MM1", 3.5), ("DM1", 2.2550)])
def test_brackets_closed_form(model, expected):
    res = simulate_aoi(model, 0.5, 1.0, 1_000_000, 42)
    assert res.aaoi_est_s == pytest.approx(expected, rel=0.02)
    assert abs(res.aaoi_est_s - expected) < 4 * res.half_width_95


def test_same_seed_same_result():
    a = simulate_aoi("MD1", 0.3, 1.0, 20_000, 9)
    b = simulate_aoi("MD1", 0.3, 1.0, 20_000, 9)
    assert a == b
    assert a != simulate_aoi("MD1", 0.3, 1.0, 20_000, 10)


def test_half_width_shrinks_like_inverse_sqrt():
    widths = {n: np.mean([simulate_aoi("MM1", 0.5, 1.0, n, s).half_width_95 for s in range(5)])
              for n in (10_000, 1_000_000)}
    ratio = widths[10_000] / widths[1_000_000]
    assert 5.0 < ratio < 20.0   # ideal value 10


def test_lindley_hand_example():
    gaps = np.array([0.0, 1.0, 0.5, 3.0])
    service = np.array([2.0, 1.0, 1.0, 1.0])
    # U1 = 0, U2 = max(0, 0+2-1) = 1, U3 = max(0, 1+1-0.5) = 1.5, U4 = max(0, 1.5+1-3) = 0
    assert np.allclose(lindley_waits(gaps, service), [0.0, 1.0, 1.5, 0.0])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 5), min_size=2, max_size=40), st.integers(0, 1000))
def test_lindley_matches_loop(gaps, seed):
    gaps = np.array(gaps)
    service = np.random.default_rng(seed).exponential(1.0, gaps.size)
    u = np.zeros(gaps.size)
    for n in range(1, gaps.size):
        u[n] = max(0.0, u[n - 1] + service[n - 1] - gaps[n])
    assert np.allclose(lindley_waits(gaps, service), u)


def test_mm1_system_time_is_exponential():
    emp = waiting_time_cdf_empirical("MM1", 0.5, 1.0, 100_000, 1, quantity="system")
    ks = emp.ks_statistic(lambda x: 1 - np.exp(-1.0 * (1 - 0.5) * x))
    assert ks < 0.01


def test_md1_wait_follows_erlang_sum():
    emp = waiting_time_cdf_empirical("MD1", 0.5, 1.0, 100_000, 2)
    assert emp.ks_statistic(lambda x: md1_waiting_cdf(x, 0.5, 1.0)) < 0.01


def test_ks_detects_wrong_law():
    emp = waiting_time_cdf_empirical("MD1", 0.5, 1.0, 100_000, 2)
    # treating the M/D/1 wait as M/M/1-like (atom 1-rho, exponential tail) is rejected
    assert emp.ks_statistic(lambda x: 1 - 0.5 * np.exp(-0.5 * x)) > 0.05


def test_light_load_never_waits():
    emp = waiting_time_cdf_empirical("MM1", 1e-4, 1.0, 20_000, 3)
    assert emp.at(0.0) > 0.999


@pytest.mark.parametrize("model", ["MM1", "DM1", "MD1"])
def test_unstable_queue_rejected(model):
    with pytest.raises(UtilizationError):
        simulate_aoi(model, 1.0, 1.0, 10_000, 0)


def test_event_guard():
    with pytest.raises(OverflowError):
        simulate_aoi("MM1", 0.5, 1.0, 10**9, 0)


@pytest.mark.parametrize("model", ["MM1", "DM1", "MD1"])
def test_small_run_schema(model):
    res = simulate_aoi(model, 0.5, 1.0, 10_000, 5)
    assert res.deliveries > 0 and res.aaoi_est_s > 0 and res.half_width_95 > 0
    assert res.aaoi_est_s == pytest.approx(aaoi_value(0.5, 1.0, model), rel=0.1)
