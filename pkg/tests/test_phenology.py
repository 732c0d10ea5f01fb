import math

import numpy as np
import pytest

from yieldcast.errors import DegenerateSeason, NoSeasonality
from yieldcast.phenology import (
    DoubleLogisticParams,
    average_season,
    eval_double_logistic,
    extract_sos_eos,
    fit_double_logistic,
)

P_REF = DoubleLogisticParams(0.2, 0.5, 10.0, 1.5, 25.0, 1.2)


def test_eval_limits():
    assert eval_double_logistic(P_REF, -200.0) == pytest.approx(0.2, abs=1e-9)
    assert eval_double_logistic(P_REF, 17.5) == pytest.approx(0.7, abs=1e-4)


def test_eval_hand_arithmetic():
    # independent evaluation point by point with math.exp
    t = 10.0
    up = 1.0 / (1.0 + math.exp(-1.5 * (t - 10.0)))
    down = 1.0 / (1.0 + math.exp(1.2 * (t - 25.0)))
    expected = 0.2 + 0.5 * (up + down - 1.0)
    assert eval_double_logistic(P_REF, t) == pytest.approx(expected, rel=1e-12)


def test_param_invariants():
    with pytest.raises(ValueError):
        DoubleLogisticParams(0.2, -0.1, 10, 1, 20, 1)
    with pytest.raises(ValueError):
        DoubleLogisticParams(0.2, 0.5, 25, 1, 10, 1)
    with pytest.raises(ValueError):
        DoubleLogisticParams(0.2, 0.5, 10, -1, 20, 1)


def test_fit_recovers_noiseless_params():
    t = np.arange(1.0, 37.0)
    p_true = DoubleLogisticParams(0.18, 0.45, 12.0, 0.8, 27.0, 0.6)
    ndvi = eval_double_logistic(p_true, t)
    p_hat, rmse = fit_double_logistic(ndvi, t)
    assert rmse < 1e-6
    for got, want in zip(p_hat.as_array(), p_true.as_array()):
        assert abs(got - want) / max(abs(want), 1e-9) < 1e-3


def test_fit_rejects_flat_series():
    t = np.arange(1.0, 37.0)
    with pytest.raises(NoSeasonality):
        fit_double_logistic(np.full(36, 0.3), t)


def test_fit_is_deterministic():
    rng = np.random.default_rng(3)
    t = np.arange(1.0, 37.0)
    p_true = DoubleLogisticParams(0.2, 0.4, 13.0, 0.7, 26.0, 0.9)
    ndvi = eval_double_logistic(p_true, t) + rng.normal(0, 0.01, 36)
    a = fit_double_logistic(ndvi, t)
    b = fit_double_logistic(ndvi, t)
    assert np.array_equal(a[0].as_array(), b[0].as_array())
    assert a[1] == b[1]


def test_fit_scale_equivariance():
    t = np.arange(1.0, 37.0)
    p_true = DoubleLogisticParams(0.15, 0.5, 12.0, 0.9, 28.0, 0.7)
    ndvi = eval_double_logistic(p_true, t)
    a, b = 1.4, 0.05
    p_scaled, _ = fit_double_logistic(a * ndvi + b, t)
    assert p_scaled.v_base == pytest.approx(a * p_true.v_base + b, rel=1e-3)
    assert p_scaled.v_amp == pytest.approx(a * p_true.v_amp, rel=1e-3)
    assert p_scaled.s1 == pytest.approx(p_true.s1, rel=1e-3)
    assert p_scaled.m1 == pytest.approx(p_true.m1, rel=1e-3)
    assert p_scaled.s2 == pytest.approx(p_true.s2, rel=1e-3)
    assert p_scaled.m2 == pytest.approx(p_true.m2, rel=1e-3)


def _bisect_crossing(f, lo, hi, tol=1e-10):
    flo = f(lo)
    assert flo < 0 < f(hi) or flo > 0 > f(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def test_sos_closed_form_examples():
    p = DoubleLogisticParams(0.2, 0.5, 10.0, 1.0, 25.0, 1.0)
    sos, _ = extract_sos_eos(p, threshold=0.2)
    assert sos == pytest.approx(10.0 + math.log(0.25), abs=1e-12)
    sos_half, eos_half = extract_sos_eos(p, threshold=0.499999)
    assert sos_half == pytest.approx(10.0, abs=1e-4)
    assert eos_half == pytest.approx(25.0, abs=1e-4)


def test_sos_eos_match_bisection_oracle():
    # "well separated" = each branch fully settled at the other's
    # crossing point: gap of 10 slope-widths per side
    rng = np.random.default_rng(42)
    checked = 0
    while checked < 100:
        v_base = rng.uniform(0.0, 0.3)
        v_amp = rng.uniform(0.1, 0.8)
        m1 = rng.uniform(0.3, 3.0)
        m2 = rng.uniform(0.3, 3.0)
        s1 = rng.uniform(5.0, 15.0)
        s2 = s1 + 10.0 / m1 + 10.0 / m2 + rng.uniform(2.0, 10.0)
        p = DoubleLogisticParams(v_base, v_amp, s1, m1, s2, m2)
        sos, eos = extract_sos_eos(p, 0.2)
        level = v_base + 0.2 * v_amp

        def g(t):
            return eval_double_logistic(p, t) - level

        sos_num = _bisect_crossing(g, s1 - 60.0, 0.5 * (s1 + s2))
        eos_num = _bisect_crossing(g, 0.5 * (s1 + s2), s2 + 60.0)
        assert abs(sos - sos_num) < 0.01
        assert abs(eos - eos_num) < 0.01
        checked += 1


def test_degenerate_season_detected():
    p = DoubleLogisticParams(0.2, 0.5, 10.0, 0.5, 11.0, 0.5)
    with pytest.raises(DegenerateSeason):
        extract_sos_eos(p)


def test_eval_monotone_on_branches():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m1 = rng.uniform(0.3, 2.0)
        m2 = rng.uniform(0.3, 2.0)
        s1 = rng.uniform(8.0, 14.0)
        s2 = s1 + 12.0 / m1 + 12.0 / m2 + rng.uniform(2.0, 8.0)
        p = DoubleLogisticParams(rng.uniform(0, 0.3), rng.uniform(0.1, 0.7),
                                 s1, m1, s2, m2)
        # the opposite branch's tail leaks a little through the sum, so
        # monotonicity holds to a sub-noise tolerance, not exactly
        t_up = np.linspace(s1 - 20, s1, 80)
        vals_up = eval_double_logistic(p, t_up)
        assert np.all(np.diff(vals_up) >= -1e-6)
        t_down = np.linspace(s2, s2 + 20, 80)
        vals_down = eval_double_logistic(p, t_down)
        assert np.all(np.diff(vals_down) <= 1e-6)


def test_noisy_sos_eos_within_one_dekad():
    t = np.arange(1.0, 37.0)
    p_true = DoubleLogisticParams(0.2, 0.45, 13.0, 0.8, 27.0, 0.7)
    sos_true, eos_true = extract_sos_eos(p_true, 0.2)
    hits = 0
    n_seeds = 30
    for seed in range(n_seeds):
        rng = np.random.default_rng(seed)
        ndvi = eval_double_logistic(p_true, t) + rng.normal(0.0, 0.02, t.size)
        p_hat, _ = fit_double_logistic(ndvi, t)
        sos, eos = extract_sos_eos(p_hat, 0.2)
        if abs(sos - sos_true) <= 1.0 and abs(eos - eos_true) <= 1.0:
            hits += 1
    assert hits >= int(0.9 * n_seeds)


def test_average_season_plain_and_wrapped():
    w = average_season([(32.0, 17.0)] * 4)
    assert (w.sos, w.eos) == (32, 17)
    assert w.sos_sd == pytest.approx(0.0, abs=1e-9)

    wrapped = average_season([(35.0, 16.0), (36.0, 17.0), (1.0, 18.0)])
    assert wrapped.sos == 36
    assert wrapped.eos == 17
