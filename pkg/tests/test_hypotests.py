import datetime as dt

import numpy as np
import pytest

from restakelab.econometrics import (
    DesignMatrix,
    adf_test,
    chow_test,
    daily_dates,
    drop_degenerate_columns,
    granger_scan,
    granger_test,
)
from restakelab.econometrics.ols import ols_fit_arrays
from restakelab.errors import DesignError, InsufficientDataError


def ar1(rng, n, phi, sigma=1.0):
    x = np.zeros(n)
    eps = rng.standard_normal(n) * sigma
    for t in range(1, n):
        x[t] = phi * x[t - 1] + eps[t]
    return x


class TestAdf:
    def test_random_walk_keeps_unit_root(self):
        rng = np.random.default_rng(100)
        walk = np.cumsum(rng.standard_normal(500))
        result = adf_test(walk, spec="ConstantOnly")
        assert not result.reject_at[0.05]

    def test_stationary_ar_rejected_hard(self):
        rng = np.random.default_rng(101)
        series = ar1(rng, 500, phi=0.5)
        result = adf_test(series, spec="ConstantOnly")
        assert result.reject_at[0.01]
        assert result.statistic < -5

    def test_constant_series_degenerate(self):
        with pytest.raises(DesignError, match="constant"):
            adf_test(np.full(100, 2.0))

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            adf_test(np.arange(12.0), max_lag=5)

    def test_trend_spec_runs(self):
        rng = np.random.default_rng(102)
        trend = 0.05 * np.arange(400) + ar1(rng, 400, phi=0.4)
        result = adf_test(trend, spec="ConstantTrend")
        assert result.reject_at[0.05]

    def test_lag_selected_within_bounds(self):
        rng = np.random.default_rng(103)
        series = ar1(rng, 300, phi=0.6)
        result = adf_test(series, max_lag=6)
        assert 0 <= result.lag <= 6
        assert result.detail["max_lag"] == 6


class TestGranger:
    def test_lagged_dependence_detected(self):
        rng = np.random.default_rng(200)
        n = 400
        x = rng.standard_normal(n)
        noise = rng.standard_normal(n)
        y = np.zeros(n)
        y[1:] = 0.8 * x[:-1] + noise[1:]
        result = granger_test(x, y, lag=1)
        assert result.p_value < 0.01
        assert result.df_num == 1
        assert result.df_den == (n - 1) - 2 - 1

    def test_lag_zero_rejected(self):
        x = np.arange(50.0)
        with pytest.raises(DesignError, match="lag"):
            granger_test(x, x, lag=0)

    def test_constant_effect_rejected(self):
        x = np.random.default_rng(0).standard_normal(100)
        with pytest.raises(DesignError, match="constant"):
            granger_test(x, np.full(100, 1.0), lag=1)

    def test_length_mismatch(self):
        with pytest.raises(DesignError):
            granger_test(np.zeros(50), np.zeros(49), lag=1)

    def test_statistic_matches_two_fit_oracle(self):
        rng = np.random.default_rng(201)
        n, lag = 300, 3
        x = ar1(rng, n, 0.5)
        y = ar1(rng, n, 0.3) + 0.4 * np.roll(x, 1)
        y[0] = 0.0
        result = granger_test(x, y, lag=lag)

        # brute-force oracle: two explicit fits, RSS ratio
        resp = y[lag:]
        rows = len(resp)
        own = [y[lag - j : n - j] for j in range(1, lag + 1)]
        cross = [x[lag - j : n - j] for j in range(1, lag + 1)]
        Xr = np.column_stack([np.ones(rows)] + own)
        Xu = np.column_stack([np.ones(rows)] + own + cross)
        fit_r = ols_fit_arrays(Xr, resp, tuple(f"r{i}" for i in range(Xr.shape[1])))
        fit_u = ols_fit_arrays(Xu, resp, tuple(f"u{i}" for i in range(Xu.shape[1])))
        df_den = rows - 2 * lag - 1
        f_oracle = ((fit_r.rss - fit_u.rss) / lag) / (fit_u.rss / df_den)
        assert result.statistic == pytest.approx(f_oracle, abs=1e-9)

    def test_scan_finds_lag4_dependence(self):
        rng = np.random.default_rng(202)
        n = 500
        x = rng.standard_normal(n)
        y = np.zeros(n)
        y[4:] = 1.2 * x[:-4] + 0.3 * rng.standard_normal(n - 4)
        results = granger_scan(x, y, max_lag=5)
        selected = next(r for r in results if r.selected)
        assert selected.lag == 4

    def test_scan_single_lag(self):
        rng = np.random.default_rng(203)
        results = granger_scan(
            rng.standard_normal(100), rng.standard_normal(100), max_lag=1
        )
        assert len(results) == 1 and results[0].selected

    def test_white_noise_usually_insignificant(self):
        rng = np.random.default_rng(204)
        hits = 0
        for _ in range(40):
            x = rng.standard_normal(200)
            y = rng.standard_normal(200)
            if granger_test(x, y, lag=1).reject_at[0.05]:
                hits += 1
        assert hits <= 8  # ~5% nominal size, generous bound


class TestChow:
    @staticmethod
    def _design(rng, n=200, jump=0.0, break_at=100):
        x = rng.standard_normal(n)
        y = 1.0 + 0.5 * x + rng.standard_normal(n)
        y[break_at:] += jump
        return DesignMatrix(dates=daily_dates(n), y=y, columns={"x": x})

    def test_break_detected(self):
        rng = np.random.default_rng(300)
        X = self._design(rng, jump=10.0)
        result = chow_test(X, X.dates[100])
        assert result.p_value < 0.001

    def test_single_regime_usually_accepted(self):
        rng = np.random.default_rng(301)
        hits = 0
        for _ in range(40):
            X = self._design(rng, jump=0.0)
            if chow_test(X, X.dates[100]).reject_at[0.05]:
                hits += 1
        assert hits <= 8

    def test_break_before_sample_start(self):
        rng = np.random.default_rng(302)
        X = self._design(rng)
        with pytest.raises(InsufficientDataError):
            chow_test(X, X.dates[0] - dt.timedelta(days=5))

    def test_break_too_close_to_edge(self):
        rng = np.random.default_rng(303)
        X = self._design(rng)
        with pytest.raises(InsufficientDataError):
            chow_test(X, X.dates[1])

    def test_dfs(self):
        rng = np.random.default_rng(304)
        X = self._design(rng)
        result = chow_test(X, X.dates[100])
        assert result.df_num == 2  # intercept + slope
        assert result.df_den == 200 - 4


class TestDropDegenerate:
    def test_constant_column_dropped_with_warning(self):
        n = 30
        X = DesignMatrix(
            dates=daily_dates(n),
            y=np.arange(float(n)),
            columns={"x": np.arange(float(n)), "flat": np.zeros(n)},
        )
        with pytest.warns(UserWarning, match="flat"):
            reduced, dropped = drop_degenerate_columns(X)
        assert dropped == ["flat"]
        assert reduced.names == ("x",)

    def test_no_op_when_clean(self):
        n = 30
        X = DesignMatrix(
            dates=daily_dates(n),
            y=np.arange(float(n)),
            columns={"x": np.arange(float(n))},
        )
        reduced, dropped = drop_degenerate_columns(X)
        assert reduced is X and dropped == []
