"""Engine-driving helpers shared by the CLI and the HTTP service."""

from __future__ import annotations

import datetime as dt

import numpy as np

from ..econometrics import (
    DesignMatrix,
    OlsFit,
    TestResult,
    adf_test,
    chow_test,
    drop_degenerate_columns,
    granger_scan,
    lag_model,
    ols_fit,
    vif,
    winsorize,
)
from ..errors import DesignError
from ..forest import ForestConfig, ImportanceReport, fit_forest, importance_report
from ..pipeline import EVENT_DATES, FeatureFrame
from ..stress import ScenarioConfig, StressResult, run_scenario, sweep_depeg

BREAK_DATE = dt.date(2024, 4, 30)  # token generation day flagged by the break test

MODEL_LAGS = {1: 0, 2: 1, 3: 2}


def winsorized_design(
    X: DesignMatrix, lower: float = 0.01, upper: float = 0.99
) -> DesignMatrix:
    """Winsorize the response and every non-dummy regressor."""
    columns = {}
    for name, col in X.columns.items():
        columns[name] = col if name == "Events" else winsorize(col, lower, upper)
    return DesignMatrix(
        dates=X.dates,
        y=winsorize(X.y, lower, upper),
        columns=columns,
        y_name=X.y_name,
    )


def regress_models(
    frame: FeatureFrame,
    models: tuple[int, ...] = (1, 2, 3),
    cov: str = "Classical",
    robust: bool = False,
    lower: float = 0.01,
    upper: float = 0.99,
) -> dict[str, OlsFit]:
    """Fit the lag-0/1/2 model family; `robust` winsorizes and uses HC3."""
    X = frame.design
    if robust:
        X = winsorized_design(X, lower, upper)
        cov = "HC3"
    fits: dict[str, OlsFit] = {}
    for model in models:
        if model not in MODEL_LAGS:
            raise DesignError(f"unknown model {model}; choose from {sorted(MODEL_LAGS)}")
        lagged, _ = drop_degenerate_columns(lag_model(X, MODEL_LAGS[model]))
        label = f"Model {model}" if model == 1 else f"Model {model} (t-{MODEL_LAGS[model]})"
        fits[label] = ols_fit(lagged, cov=cov)
    return fits


def granger_all(
    frame: FeatureFrame, max_lag: int = 5
) -> list[tuple[str, TestResult]]:
    """Per-regressor precedence scan against the response, min-p lag each."""
    X = frame.design
    out: list[tuple[str, TestResult]] = []
    for name in X.names:
        if np.ptp(X.columns[name]) == 0.0:
            continue
        results = granger_scan(X.columns[name], X.y, max_lag=max_lag)
        selected = next(r for r in results if r.selected)
        out.append((name, selected))
    out.sort(key=lambda kv: kv[1].p_value)
    return out


def adf_all(frame: FeatureFrame, spec: str = "ConstantOnly") -> list[tuple[str, TestResult]]:
    X = frame.design
    out = [(X.y_name, adf_test(X.y, spec=spec))]
    for name in X.names:
        if np.ptp(X.columns[name]) == 0.0:
            continue
        out.append((name, adf_test(X.columns[name], spec=spec)))
    return out


def chow_break(frame: FeatureFrame, break_date: dt.date = BREAK_DATE) -> TestResult:
    """Structural-break test with degenerate columns dropped beforehand."""
    X = frame.design
    first = np.array([d < break_date for d in X.dates])
    degenerate = {
        name
        for name, col in X.columns.items()
        if np.ptp(col[first]) == 0.0 or np.ptp(col[~first]) == 0.0
    }
    if degenerate:
        X = DesignMatrix(
            dates=X.dates,
            y=X.y,
            columns={k: v for k, v in X.columns.items() if k not in degenerate},
            y_name=X.y_name,
        )
    result = chow_test(X, break_date)
    if degenerate:
        result.detail["dropped_columns"] = sorted(degenerate)
    return result


def forest_design(frame: FeatureFrame, include_events: bool = False) -> DesignMatrix:
    """Importance-run design; the event dummy is excluded unless asked for."""
    X = frame.design
    drop = set() if include_events else {"Events"}
    return DesignMatrix(
        dates=X.dates,
        y=X.y,
        columns={k: v for k, v in X.columns.items() if k not in drop},
        y_name=X.y_name,
    )


def forest_importance(
    frame: FeatureFrame,
    config: ForestConfig,
    repeats: int = 10,
    include_events: bool = False,
    holdout: float | None = None,
) -> ImportanceReport:
    """Fit the forest and compute both importances.

    With `holdout`, the chronological tail of that fraction is withheld from
    training and used to score permutation importance; by default scoring is
    in-sample.
    """
    X = forest_design(frame, include_events=include_events)
    if holdout is not None:
        if not (0.0 < holdout < 1.0):
            raise DesignError(f"holdout fraction must lie in (0,1), got {holdout}")
        cut = max(1, int(round(X.n * (1.0 - holdout))))
        if cut >= X.n:
            raise DesignError("holdout fraction leaves no scoring rows")
        train = X.subset(np.arange(X.n) < cut)
        score = X.subset(np.arange(X.n) >= cut)
        forest = fit_forest(train, config)
        return importance_report(forest, score, repeats=repeats, seed=config.seed)
    forest = fit_forest(X, config)
    return importance_report(forest, X, repeats=repeats, seed=config.seed)


def stress_pair(config: ScenarioConfig, graph=None) -> tuple[ScenarioConfig, StressResult]:
    return config, run_scenario(graph, config)


def depeg_grid(from_depeg: float, to_depeg: float, steps: int) -> list[float]:
    if steps < 2:
        raise DesignError(f"sweep needs at least 2 steps, got {steps}")
    if not (0.0 <= from_depeg < to_depeg < 1.0):
        raise DesignError(
            f"sweep bounds must satisfy 0 <= from < to < 1, got ({from_depeg}, {to_depeg})"
        )
    step = (to_depeg - from_depeg) / (steps - 1)
    return [from_depeg + i * step for i in range(steps)]


def sweep(config: ScenarioConfig, from_depeg: float, to_depeg: float, steps: int, graph=None):
    return sweep_depeg(config, depeg_grid(from_depeg, to_depeg, steps), graph=graph)


def model_tables_payload(fits: dict[str, OlsFit]) -> dict:
    return {label: fit.to_dict() for label, fit in fits.items()}


__all__ = [
    "BREAK_DATE",
    "EVENT_DATES",
    "MODEL_LAGS",
    "adf_all",
    "chow_break",
    "depeg_grid",
    "forest_design",
    "forest_importance",
    "granger_all",
    "model_tables_payload",
    "regress_models",
    "stress_pair",
    "sweep",
    "vif",
    "winsorized_design",
]
