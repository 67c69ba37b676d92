import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings, strategies as st

from lawn_isac.aoi import (QueueParams, UtilizationError, aaoi, aaoi_dm1, aaoi_md1, aaoi_mm1, aaoi_value,
                           dm1_delta, dm1_delta_fixed_point, lambert_w0, md1_decay_rate, md1_mean_wait,
                           md1_waiting_cdf)


def md1_reference(rho, service_time=1.0):
    """Independent closed form for FCFS M/D/1 average age from the queueing literature."""
    return service_time * (1 / (2 * (1 - rho)) + 0.5 + (1 - rho) * math.exp(rho) / rho)


def test_mm1_hand_value():
    assert aaoi_mm1(QueueParams(0.5, 1.0)).aaoi_s == pytest.approx(3.5, abs=1e-12)


def test_mm1_direct_formula():
    lam, mu = 0.3, 2.0
    rho = lam / mu
    expected = (1 + 1 / rho + rho**2 / (1 - rho)) / mu
    assert aaoi_value(lam, mu, "MM1") == pytest.approx(expected, rel=1e-14)


def test_dm1_spot_values():
    assert dm1_delta(0.5) == pytest.approx(0.203188, abs=1e-6)
    assert dm1_delta(0.5) == pytest.approx(dm1_delta_fixed_point(0.5), abs=1e-10)
    r = aaoi_dm1(QueueParams(0.5, 1.0, "DM1"))
    assert r.aaoi_s == pytest.approx(2.25500, abs=1e-5)
    assert r.delta == pytest.approx(0.2031878699799799, abs=1e-12)


@pytest.mark.parametrize("rho", [0.01, 0.1, 0.2, 0.5, 0.8, 0.9, 0.99])
def test_delta_solvers_agree(rho):
    d = dm1_delta(rho)
    assert d == pytest.approx(dm1_delta_fixed_point(rho), abs=1e-10)
    assert d == pytest.approx(math.exp(-(1 - d) / rho), abs=1e-12)
    assert 0.0 <= d < rho


@settings(max_examples=200)
@given(st.floats(-1 / math.e + 1e-12, 1e6))
def test_lambert_w0_matches_scipy(x):
    w = lambert_w0(x)
    ref = scipy.special.lambertw(x, 0).real
    assert w == pytest.approx(ref, rel=1e-9, abs=1e-6 if x < -0.3678 else 1e-12)


@settings(max_examples=200)
@given(st.floats(-0.36, 1e300))
def test_lambert_w0_defining_identity(x):
    w = lambert_w0(x)
    assert w * math.exp(w) == pytest.approx(x, rel=1e-12, abs=1e-15)


def test_lambert_w0_special_points():
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(-1 / math.e) == -1.0
    assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        lambert_w0(-0.5)


@pytest.mark.parametrize("rho", [0.001, 0.01, 0.2, 0.5, 0.8, 0.9, 0.97])
def test_md1_quadrature_matches_literature_closed_form(rho):
    assert aaoi_value(rho, 1.0, "MD1") == pytest.approx(md1_reference(rho), rel=1e-10)


def test_md1_scales_with_service_time():
    # time scaling: AAoI(lam, mu) = AAoI(lam/mu, 1) / mu
    assert aaoi_value(0.25, 0.5, "MD1") == pytest.approx(2.0 * aaoi_value(0.5, 1.0, "MD1"), rel=1e-12)


def test_md1_light_load_limit():
    # lam * E[UB] ~ lam^2 D^3 / 6 as rho -> 0, so AAoI - 1/lam - D -> 0
    for rho in (1e-2, 1e-3):
        excess = aaoi_value(rho, 1.0, "MD1") - 1 / rho - 1.0
        assert excess == pytest.approx(rho**2 / 6, rel=0.05)


def test_md1_cdf_basics():
    rho = 0.5
    assert md1_waiting_cdf(0.0, rho) == pytest.approx(1 - rho)
    assert md1_waiting_cdf(-1.0, rho) == 0.0
    u = np.linspace(0, 30, 200)
    F = md1_waiting_cdf(u, rho)
    assert np.all(np.diff(F) >= -1e-15)
    assert F[-1] == pytest.approx(1.0, abs=1e-9)


def test_md1_cdf_mean_matches_pollaczek_khinchine():
    rho, D = 0.6, 1.0
    u = np.linspace(0, 60, 6001)
    tail = 1.0 - md1_waiting_cdf(u, rho, D)
    mean = np.trapezoid(tail, u) if hasattr(np, "trapezoid") else np.trapz(tail, u)
    assert mean == pytest.approx(md1_mean_wait(rho, D), rel=1e-4)


def test_md1_tail_rate():
    x = md1_decay_rate(0.5)
    assert 0.5 * math.expm1(x) == pytest.approx(x, rel=1e-12)


@pytest.mark.parametrize("model", ["MM1", "DM1", "MD1"])
def test_utilization_errors(model):
    with pytest.raises(UtilizationError):
        QueueParams(1.0, 1.0, model)
    with pytest.raises(UtilizationError):
        QueueParams(2.0, 1.0, model)
    with pytest.raises(UtilizationError):
        QueueParams(0.0, 1.0, model)


def test_unknown_model():
    with pytest.raises(ValueError):
        QueueParams(0.5, 1.0, "GG1")


@pytest.mark.parametrize("rho", np.round(np.arange(0.1, 0.91, 0.1), 2))
def test_less_randomness_gives_fresher_data(rho):
    mm1 = aaoi_value(rho, 1.0, "MM1")
    assert mm1 >= aaoi_value(rho, 1.0, "DM1")
    assert mm1 >= aaoi_value(rho, 1.0, "MD1")


@pytest.mark.parametrize("model", ["MM1", "DM1", "MD1"])
def test_age_curve_has_interior_minimum(model):
    grid = np.linspace(0.03, 0.97, 200)
    if model == "MD1":
        grid = grid[::10]   # the quadrature is slower; 20 points still show the shape
    ages = np.array([aaoi_value(lam, 1.0, model) for lam in grid])
    k = int(np.argmin(ages))
    assert 0 < k < len(grid) - 1
    assert np.all(np.diff(ages[: k + 1]) < 0)
    assert np.all(np.diff(ages[k:]) > 0)


def test_delta_increasing():
    rhos = np.linspace(0.05, 0.95, 50)
    deltas = [dm1_delta(r) for r in rhos]
    assert np.all(np.diff(deltas) > 0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.02, 0.98), st.floats(1e-3, 1e6))
def test_age_scales_inversely_with_rate(rho, mu):
    for model in ("MM1", "DM1"):
        assert aaoi_value(rho * mu, mu, model) == pytest.approx(aaoi_value(rho, 1.0, model) / mu, rel=1e-9)


def test_dispatch():
    q = QueueParams(0.5, 1.0, "DM1")
    assert aaoi(q).model == "DM1"
    assert aaoi_md1(QueueParams(0.5, 1.0, "MD1")).rho == 0.5
