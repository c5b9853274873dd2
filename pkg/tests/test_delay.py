import math

import numpy as np
import pytest

from eponsim.delay import delay_bound, efficiency, mean_delay, mean_residual_delay
from eponsim.errors import RegionError
from eponsim.model import SystemParams, attempt_probability, solve_stationary
from eponsim.stability import Region, classify, critical_omegas


def _low(params):
    return solve_stationary(params)[0]


def test_residual(example):
    assert mean_residual_delay(example) == 0.25
    assert mean_residual_delay(example.replace(cycle=1e-12)) == pytest.approx(0.0, abs=1e-12)


def test_bound(example):
    assert delay_bound(example) == pytest.approx(3.4445, abs=1e-4)
    assert delay_bound(example.replace(cycle=1.0)) == pytest.approx(math.e**2 - 0.5, rel=1e-15)
    assert delay_bound(example.replace(cycle=1.0)) == pytest.approx(6.889, abs=1e-3)


@pytest.mark.parametrize("omega,expected", [(317.8e-6, 0.275), (800e-6, 0.260)])
def test_fig11_delays(example, omega, expected):
    p = example.with_wait(omega)
    est = mean_delay(p, _low(p))
    assert est.mean_total == pytest.approx(expected, rel=0.05)
    assert est.mean_total_approx == pytest.approx(expected, rel=0.05)


def test_decomposition(example):
    est = mean_delay(example, _low(example))
    assert est.mean_total == pytest.approx(est.mean_residual + est.mean_attempting, abs=1e-12)
    assert est.mean_attempting - est.mean_attempting_approx == pytest.approx(example.window, rel=1e-12)
    assert est.mean_attempts >= 1
    assert est.ideal == 0.25
    assert est.efficiency > 0
    assert not est.unbounded


def test_attempts_identity(example, h_example):
    for omega in (300e-6, 350e-6, 800e-6):
        p = example.with_wait(omega)
        for dist in solve_stationary(p):
            k = 1 / dist.p_suc
            assert k == pytest.approx(dist.pi_r / ((1 - dist.pi_r) * h_example), rel=1e-10)


def test_efficiency_identity(example, h_example):
    for omega in (320e-6, 350e-6, 800e-6):
        p = example.with_wait(omega)
        dist = _low(p)
        eta = efficiency(p, dist, h_example)
        assert dist.lambda_out / p.window == pytest.approx(eta, rel=1e-10)
        assert eta == pytest.approx(p.n_onus * h_example / p.window, rel=0.01)


def test_efficiency_ratio(example):
    lo, hi = example.with_wait(317.8e-6), example.with_wait(800e-6)
    ratio = efficiency(hi, _low(hi)) / efficiency(lo, _low(lo))
    assert ratio == pytest.approx(0.5, abs=0.05)


def test_stable_sweep_monotone_and_bounded(example, h_example):
    _, om1 = critical_omegas(example, h_example)
    omegas = np.linspace(om1 * 1.0001, 20 * om1, 300)
    totals, etas = [], []
    for omega in omegas:
        p = example.with_wait(float(omega))
        est = mean_delay(p, _low(p))
        assert est.mean_total <= est.bound
        assert est.mean_total - est.ideal >= 0
        totals.append(est.mean_total)
        etas.append(est.efficiency)
    # M grows with omega, so the exact total flattens out; the approximate one keeps falling
    assert np.all(np.diff(etas) < 0)
    approx = [mean_delay(example.with_wait(float(w)), _low(example.with_wait(float(w)))).mean_total_approx
              for w in omegas]
    assert np.all(np.diff(approx) <= 0)
    # the exact form decreases until M starts to dominate, near 8 omega_{-1}
    cut = int(np.searchsorted(omegas, 8 * om1))
    assert np.all(np.diff(totals[:cut]) < 0)


def test_bound_over_random_stable_configs():
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = SystemParams(int(rng.integers(64, 2048)), float(rng.uniform(10, 100)), float(rng.uniform(10, 100)),
                         float(rng.uniform(0.1, 1.0)), float(rng.uniform(1e-6, 3e-6)), 350e-6, 100e-6)
        h = attempt_probability(p)
        _, om1 = critical_omegas(p, h)
        q = p.with_wait(om1 * float(rng.uniform(1.0001, 5)))
        assert classify(q, h).region is Region.STABLE
        est = mean_delay(q, _low(q), h)
        assert est.mean_total_approx <= est.bound
        assert est.mean_total <= est.bound + q.window


def test_ideal_limit(example, h_example):
    _, om1 = critical_omegas(example, h_example)
    p = example.with_wait(100 * om1)
    est = mean_delay(p, _low(p))
    assert est.mean_total_approx == pytest.approx(est.ideal, rel=0.02)
    assert est.mean_total == pytest.approx(est.ideal, rel=0.2)


def test_middle_root_rejected(example):
    p = example.with_wait(300e-6)
    d, u, s = solve_stationary(p)
    with pytest.raises(RegionError):
        mean_delay(p, u)
    assert mean_delay(p, s).mean_total > mean_delay(p, d).mean_total


def test_saturated_unbounded(example):
    p = example.with_wait(30e-6)
    est = mean_delay(p, _low(p))
    assert est.unbounded
