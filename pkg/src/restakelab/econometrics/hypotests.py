"""Unit-root, predictive-precedence and structural-break tests."""

from __future__ import annotations

import dataclasses
import datetime as dt
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import DesignError, InsufficientDataError
from .design import DesignMatrix
from .distributions import f_sf, tau_pvalue
from .ols import ols_fit_arrays

ADF_CONSTANT_ONLY = "ConstantOnly"
ADF_CONSTANT_TREND = "ConstantTrend"

_LEVELS = (0.10, 0.05, 0.01)


@dataclass(frozen=True)
class TestResult:
    test_name: str
    statistic: float
    p_value: float
    df_num: float | None = None
    df_den: float | None = None
    lag: int | None = None
    reject_at: dict[float, bool] = field(default_factory=dict)
    selected: bool = False
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.reject_at:
            object.__setattr__(
                self, "reject_at", {level: self.p_value < level for level in _LEVELS}
            )

    def to_dict(self) -> dict:
        return {
            "test_name": self.test_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "df_num": self.df_num,
            "df_den": self.df_den,
            "lag": self.lag,
            "reject_at": {f"{level:.2f}": flag for level, flag in self.reject_at.items()},
            "selected": self.selected,
            "detail": self.detail,
        }


def default_adf_max_lag(n: int) -> int:
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def _adf_design(
    series: np.ndarray, lag: int, start: int, spec: str
) -> tuple[np.ndarray, np.ndarray, int]:
    """Rows t = start+1 .. n-1 of the differenced regression.

    Columns: deterministics, then the lagged level, then `lag` lagged
    differences.  Returns (X, dy, index of the lagged-level column).
    """
    dy = np.diff(series)
    y_t = dy[start:]
    cols = [np.ones_like(y_t)]
    if spec == ADF_CONSTANT_TREND:
        cols.append(np.arange(len(y_t), dtype=float))
    level_idx = len(cols)
    cols.append(series[start:-1])
    for j in range(1, lag + 1):
        cols.append(dy[start - j : len(dy) - j])
    return np.column_stack(cols), y_t, level_idx


def adf_test(
    series,
    max_lag: int | None = None,
    spec: str = ADF_CONSTANT_ONLY,
) -> TestResult:
    """Augmented unit-root test; rejecting means the series looks stationary.

    The statistic is the t-ratio on the lagged level in a regression of the
    first difference on deterministics, the lagged level and lagged
    differences.  The difference-lag order is picked by AIC over a common
    estimation sample, then the chosen order is refit on its maximal sample.
    p-values interpolate the embedded tau quantile tables.
    """
    if spec not in (ADF_CONSTANT_ONLY, ADF_CONSTANT_TREND):
        raise DesignError(f"unknown deterministic spec {spec!r}")
    y = np.asarray(series, dtype=float)
    n = y.size
    if max_lag is None:
        max_lag = default_adf_max_lag(n)
    if max_lag < 0:
        raise DesignError(f"max_lag must be >= 0, got {max_lag}")
    if n <= max_lag + 10:
        raise InsufficientDataError(
            f"series length {n} too short for max_lag {max_lag} (need > max_lag + 10)"
        )
    if not np.all(np.isfinite(y)):
        raise DesignError("series contains non-finite values")
    if np.ptp(y) == 0.0:
        raise DesignError("degenerate input: series is constant")

    # lag order by AIC on the common sample (all candidates drop max_lag rows)
    best_lag, best_aic = 0, math.inf
    for p in range(0, max_lag + 1):
        X, resp, _ = _adf_design(y, p, max_lag, spec)
        n_eff, k = X.shape
        if n_eff <= k:
            continue
        beta, rss, *_ = np.linalg.lstsq(X, resp, rcond=None)
        rss_val = float(rss[0]) if rss.size else float(np.sum((resp - X @ beta) ** 2))
        if rss_val <= 0:
            rss_val = np.finfo(float).tiny
        aic = n_eff * math.log(rss_val / n_eff) + 2.0 * k
        if aic < best_aic:
            best_aic, best_lag = aic, p

    X, resp, level_idx = _adf_design(y, best_lag, best_lag, spec)
    names = tuple(f"c{j}" for j in range(X.shape[1]))
    fit = ols_fit_arrays(X, resp, names)
    stat = float(fit.t_stats[level_idx])
    p_value = tau_pvalue(stat, spec)
    return TestResult(
        test_name="adf",
        statistic=stat,
        p_value=p_value,
        lag=best_lag,
        detail={"spec": spec, "n_used": int(fit.n), "max_lag": int(max_lag)},
    )


def _lagged(v: np.ndarray, lag: int, j: int) -> np.ndarray:
    # j-th lag aligned to rows t = lag .. n-1
    return v[lag - j : v.size - j]


def granger_test(cause, effect, lag: int) -> TestResult:
    """F-test of whether `cause` lags improve one-step prediction of `effect`.

    Restricted model: effect on its own lags 1..lag plus an intercept.
    Unrestricted: the cause's lags 1..lag added.  df = (lag, n - 2 lag - 1)
    with n the aligned sample length.
    """
    if lag < 1:
        raise DesignError(f"lag must be >= 1, got {lag}")
    x = np.asarray(cause, dtype=float)
    y = np.asarray(effect, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DesignError("cause and effect must be equal-length vectors")
    n = y.size
    if n <= 2 * lag + 10:
        raise InsufficientDataError(
            f"series length {n} too short for lag {lag} (need > 2*lag + 10)"
        )
    if np.ptp(y) == 0.0:
        raise DesignError("degenerate input: effect series is constant")

    resp = y[lag:]
    n_eff = resp.size
    own = [_lagged(y, lag, j) for j in range(1, lag + 1)]
    cross = [_lagged(x, lag, j) for j in range(1, lag + 1)]

    X_r = np.column_stack([np.ones(n_eff)] + own)
    X_u = np.column_stack([np.ones(n_eff)] + own + cross)
    names_r = ("(Intercept)",) + tuple(f"y_l{j}" for j in range(1, lag + 1))
    names_u = names_r + tuple(f"x_l{j}" for j in range(1, lag + 1))
    fit_r = ols_fit_arrays(X_r, resp, names_r)
    fit_u = ols_fit_arrays(X_u, resp, names_u)

    df_num = lag
    df_den = n_eff - 2 * lag - 1
    f_stat = ((fit_r.rss - fit_u.rss) / df_num) / (fit_u.rss / df_den)
    f_stat = max(f_stat, 0.0)
    return TestResult(
        test_name="granger",
        statistic=float(f_stat),
        p_value=f_sf(f_stat, df_num, df_den),
        df_num=float(df_num),
        df_den=float(df_den),
        lag=lag,
        detail={"n_used": int(n_eff)},
    )


def granger_scan(cause, effect, max_lag: int = 5) -> list[TestResult]:
    """Run the precedence test for every lag 1..max_lag, flagging min-p.

    The flagged entry mirrors per-variable single-lag reporting; with five
    lags tried per variable the flagged p-value is subject to multiple
    testing and should be read as exploratory.
    """
    if max_lag < 1:
        raise DesignError(f"max_lag must be >= 1, got {max_lag}")
    results = [granger_test(cause, effect, lag) for lag in range(1, max_lag + 1)]
    best = min(range(len(results)), key=lambda i: results[i].p_value)
    results[best] = dataclasses.replace(results[best], selected=True)
    return results


def chow_test(X: DesignMatrix, break_date: dt.date) -> TestResult:
    """Structural-break F-test at a known date.

    The sample splits into rows strictly before the break date and rows at or
    after it; the statistic compares the pooled residual sum of squares with
    the two regime fits:

        F = ((RSS_pooled - RSS1 - RSS2) / k) / ((RSS1 + RSS2) / (n - 2k))
    """
    k = len(X.names) + 1  # intercept included
    first = np.array([d < break_date for d in X.dates])
    n1 = int(first.sum())
    n2 = X.n - n1
    if n1 <= k or n2 <= k:
        raise InsufficientDataError(
            f"both regimes need more than k={k} rows, got ({n1}, {n2}) "
            f"around break {break_date}"
        )
    names = ("(Intercept)",) + X.names
    pooled = ols_fit_arrays(X.matrix(), X.y, names)
    sub1 = X.subset(first)
    sub2 = X.subset(~first)
    fit1 = ols_fit_arrays(sub1.matrix(), sub1.y, names)
    fit2 = ols_fit_arrays(sub2.matrix(), sub2.y, names)

    rss_split = fit1.rss + fit2.rss
    df_num = k
    df_den = X.n - 2 * k
    f_stat = ((pooled.rss - rss_split) / df_num) / (rss_split / df_den)
    f_stat = max(f_stat, 0.0)
    return TestResult(
        test_name="chow",
        statistic=float(f_stat),
        p_value=f_sf(f_stat, df_num, df_den),
        df_num=float(df_num),
        df_den=float(df_den),
        detail={"break_date": break_date.isoformat(), "n1": n1, "n2": n2},
    )


def drop_degenerate_columns(X: DesignMatrix) -> tuple[DesignMatrix, list[str]]:
    """Remove constant columns (collinear with the intercept), warning once.

    Dummy regressors can go all-zero on a subsample; dropping them keeps the
    fit well-posed without failing the whole model.
    """
    dropped = [name for name, col in X.columns.items() if np.ptp(col) == 0.0]
    if not dropped:
        return X, []
    warnings.warn(
        f"dropping degenerate column(s) {dropped} (constant within sample)",
        UserWarning,
        stacklevel=2,
    )
    kept = {name: col for name, col in X.columns.items() if name not in dropped}
    if not kept:
        raise DesignError("all regressors are degenerate")
    return (
        DesignMatrix(dates=X.dates, y=X.y, columns=kept, y_name=X.y_name),
        dropped,
    )
