import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_pair, make_path
from gt_market.functionals import compute_curves, compute_pair_curves
from gt_market.montecarlo import LilConfig, run_lil_experiment
from gt_market.partitions import build_pair, build_single
from gt_market.paths import GbmParams, InputError, generate_index, generate_pair
from gt_market.strategies import (
    ExponentMode,
    MixMode,
    exponent_values,
    lil_mixture,
    mix_with_cash,
    mix_with_stock,
    theoretical_exponent,
)


def single(path, n=5):
    return build_single(path, n, n, resolution="off")


def pair_ladder(pair, n=5):
    return build_pair(pair, n, n, resolution="off")


class TestCashMix:
    def test_zero_eps_is_buy_and_hold(self, gbm_index):
        cp = mix_with_cash(gbm_index, single(gbm_index), epsilon=0.0)
        np.testing.assert_allclose(cp.capital, gbm_index.values, rtol=1e-12)
        np.testing.assert_allclose(cp.relative, 1.0, rtol=1e-12)

    def test_all_cash(self, gbm_index):
        cp = mix_with_cash(gbm_index, single(gbm_index), epsilon=-1.0)
        np.testing.assert_array_equal(cp.capital, 1.0)
        np.testing.assert_allclose(cp.relative, 1.0 / gbm_index.values, rtol=1e-15)

    def test_hand_example(self):
        p = make_path([1.0, 1.3, 1.05, 1.5])
        cp = mix_with_cash(p, single(p, 2), 2, epsilon=0.5)
        m = np.array([0.3, -0.25 / 1.3, 0.45 / 1.05])
        expected = np.concatenate([[1.0], np.cumprod(1 + 1.5 * m)])
        np.testing.assert_allclose(cp.capital, expected, rtol=1e-14)

    def test_marked_between_crossings(self):
        p = make_path([1.0, 1.1, 1.3])
        cp = mix_with_cash(p, single(p, 2), 2, epsilon=1.0)
        np.testing.assert_allclose(cp.capital, [1.0, 1.2, 1.6], rtol=1e-14)

    def test_stopped_and_frozen(self):
        p = make_path([1.0, 0.7, 0.9, 1.2])
        cp = mix_with_cash(p, single(p, 2), 2, epsilon=3.0)
        # 1 + 4 * (-0.3) < 0 at the first step
        assert cp.stopped_at == 1.0
        np.testing.assert_array_equal(cp.capital[1:], 0.0)
        assert np.all(cp.relative[1:] == 0.0)
        assert cp.log_relative()[-1] == -np.inf

    def test_needs_index_ladder(self, gbm_pair):
        lad = build_single(gbm_pair, 3, 3, asset="stock", resolution="off")
        with pytest.raises(InputError):
            mix_with_cash(gbm_pair, lad, epsilon=0.5)


class TestStockMix:
    def test_zero_eps(self, gbm_pair):
        cp = mix_with_stock(gbm_pair, pair_ladder(gbm_pair), epsilon=0.0)
        np.testing.assert_allclose(cp.relative, 1.0, rtol=1e-12)

    def test_all_stock_telescopes(self, gbm_pair):
        cp = mix_with_stock(gbm_pair, pair_ladder(gbm_pair), epsilon=1.0)
        s = gbm_pair.stock_values / gbm_pair.stock_values[0]
        np.testing.assert_allclose(cp.capital, s, rtol=1e-12)
        np.testing.assert_allclose(cp.relative, s / gbm_pair.index_values, rtol=1e-12)

    def test_requires_pair_ladder(self, gbm_pair):
        with pytest.raises(InputError):
            mix_with_stock(gbm_pair, single(gbm_pair), epsilon=0.5)

    def test_requires_stock(self):
        from gt_market.paths import PathPair

        pr = PathPair(np.array([0.0, 1.0]), np.array([1.0, 1.1]))
        with pytest.raises(InputError):
            mix_with_stock(pr, None, epsilon=0.5)


class TestExponent:
    def test_zero_eps(self, gbm_pair):
        c = compute_pair_curves(gbm_pair, pair_ladder(gbm_pair))
        for mode in ExponentMode:
            assert np.all(exponent_values(c, mode, 0.0) == 0.0)

    @pytest.mark.parametrize("eps", [-1.0, 0.3, 2.0])
    def test_constant_path(self, eps):
        v = np.ones(40)
        pr = make_pair(v, v)
        c = compute_pair_curves(pr, pair_ladder(pr, 2))
        assert np.all(theoretical_exponent(c, "capm", eps).values == 0.0)
        assert np.all(theoretical_exponent(c, "equity_premium", eps).values == 0.0)

    def test_capm_needs_pair_curves(self, gbm_index):
        c = compute_curves(gbm_index, single(gbm_index))
        with pytest.raises(InputError):
            exponent_values(c, "capm", 0.5)

    def test_gap_shrinks_with_level(self, gbm_pair):
        lad = build_single(gbm_pair, 3, 7, resolution="off")
        c = compute_curves(gbm_pair, lad)
        ex = exponent_values(c, "equity_premium", 0.5)
        gaps = [np.max(np.abs(mix_with_cash(gbm_pair, lad, n, 0.5).log_relative() - ex)) for n in (3, 5)]
        assert gaps[1] < gaps[0]
        assert gaps[1] < 0.01


def _terminal_relative(mode, eps, drift_mode, seeds, n=4):
    out = []
    for s in seeds:
        pr = generate_pair(GbmParams(0.2, drift_mode, 1.0, 2.5e-4, seed=s), 0.3)
        if mode is MixMode.CASH:
            out.append(mix_with_cash(pr, single(pr, n), epsilon=eps).terminal_relative)
        else:
            out.append(mix_with_stock(pr, pair_ladder(pr, n), epsilon=eps).terminal_relative)
    return np.array(out)


@pytest.mark.parametrize("mode", list(MixMode))
@pytest.mark.parametrize("eps", [-0.5, 0.5, 1.0])
def test_relative_capital_martingale_under_index_numeraire(mode, eps):
    rel = _terminal_relative(mode, eps, "index_numeraire", range(2000))
    se = rel.std(ddof=1) / math.sqrt(rel.size)
    assert rel.mean() <= 1 + 3 * se


@pytest.mark.parametrize("eps", [-0.5, 0.5])
def test_cash_mix_under_index_martingale(eps):
    # with I a martingale, E[X/I] = exp(-eps sigma^2 t): above 1 for eps < 0
    rel = _terminal_relative(MixMode.CASH, eps, "martingale", range(4000))
    se = rel.std(ddof=1) / math.sqrt(rel.size)
    assert abs(rel.mean() - math.exp(-eps * 0.04)) <= 3 * se + 1e-3


class TestLilMixture:
    def test_initial_value(self, gbm_index):
        c = compute_curves(gbm_index, single(gbm_index))
        mix = lil_mixture(c, "equity_premium", kappa=0.1, weight_exponent=2.0, k_max=3)
        assert mix.initial == pytest.approx(1 + 1 / 4 + 1 / 9, rel=1e-15)
        assert mix.values[0] == pytest.approx(mix.initial, rel=1e-14)

    def test_constant_path(self):
        v = np.ones(30)
        pr = make_pair(v, v)
        c = compute_pair_curves(pr, pair_ladder(pr, 2))
        mix = lil_mixture(c, "capm")
        np.testing.assert_allclose(mix.values, mix.initial, rtol=1e-13)

    def test_tail_weight(self, gbm_index):
        c = compute_curves(gbm_index, single(gbm_index))
        mix = lil_mixture(c, "equity_premium", weight_exponent=1.1, k_max=60)
        assert mix.tail_weight == pytest.approx(float(mpmath.zeta(1.1, 61)), rel=1e-10)

    @pytest.mark.parametrize("direction", ["plus", "minus", "both"])
    def test_direction_matches_direct_sum(self, gbm_index, direction):
        c = compute_curves(gbm_index, single(gbm_index))
        mix = lil_mixture(c, "equity_premium", kappa=0.5, weight_exponent=1.5, k_max=5, direction=direction)
        k = np.arange(1, 6)
        eps = 1.5 ** -k.astype(float)
        w = k ** -1.5
        drift = c.mu_I - c.sigma_I
        plus = sum(wi * np.exp(e * drift - 0.5 * e**2 * c.sigma_I) for wi, e in zip(w, eps))
        minus = sum(wi * np.exp(-e * drift - 0.5 * e**2 * c.sigma_I) for wi, e in zip(w, eps))
        expected = {"plus": plus, "minus": minus, "both": 0.5 * (plus + minus)}[direction]
        np.testing.assert_allclose(mix.values, expected, rtol=1e-12)

    @pytest.mark.parametrize(
        "kwargs", [dict(kappa=0.0), dict(weight_exponent=1.0), dict(k_max=0), dict(direction="up")]
    )
    def test_rejects_bad_params(self, gbm_index, kwargs):
        c = compute_curves(gbm_index, single(gbm_index))
        with pytest.raises(InputError):
            lil_mixture(c, "equity_premium", **kwargs)

    def test_bounded_over_long_horizon(self):
        # sigma 0.2 for 100 time units: intrinsic budget 4
        cfg = LilConfig(index_vol=0.2, budget=4.0, dt=7.5e-3, n_paths=100, master_seed=3)
        res = run_lil_experiment(cfg, workers=1)
        assert res["mixture_bounded_paths"] >= 99


@given(st.floats(-0.9, 0.9), st.lists(st.floats(-0.04, 0.04), min_size=3, max_size=80))
@settings(max_examples=60, deadline=None)
def test_relative_equals_capital_over_index(eps, steps):
    v = np.exp(np.cumsum([0.0] + steps))
    p = make_path(v)
    cp = mix_with_cash(p, single(p, 4), 4, epsilon=eps)
    np.testing.assert_allclose(cp.relative, cp.capital / v, rtol=1e-12)
    assert np.all(cp.capital >= 0)
