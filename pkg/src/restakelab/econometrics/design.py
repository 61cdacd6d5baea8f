"""Aligned daily design matrix and column-level transforms."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DesignError, InsufficientDataError


def daily_dates(n: int, start: dt.date = dt.date(2024, 1, 22)) -> tuple[dt.date, ...]:
    """Consecutive calendar days, handy for synthetic designs in tests."""
    return tuple(start + dt.timedelta(days=i) for i in range(n))


@dataclass(frozen=True)
class DesignMatrix:
    """Daily response vector plus named regressor columns.

    The intercept is implicit: every fit prepends a constant column.  Dates
    must be strictly consecutive days and all values finite.
    """

    dates: tuple[dt.date, ...]
    y: np.ndarray
    columns: dict[str, np.ndarray]
    y_name: str = "Revenue"

    def __post_init__(self):
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        object.__setattr__(
            self, "columns", {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}
        )
        n = len(self.dates)
        if n == 0:
            raise DesignError("design matrix must not be empty")
        if self.y.shape != (n,):
            raise DesignError(f"y has shape {self.y.shape}, expected ({n},)")
        if not np.all(np.isfinite(self.y)):
            raise DesignError("y contains non-finite values")
        names = list(self.columns)
        if len(set(names)) != len(names):
            raise DesignError("duplicate column names")
        for name, col in self.columns.items():
            if col.shape != (n,):
                raise DesignError(f"column {name!r} has shape {col.shape}, expected ({n},)")
            if not np.all(np.isfinite(col)):
                raise DesignError(f"column {name!r} contains non-finite values")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if (cur - prev).days != 1:
                raise DesignError(f"dates must be consecutive days, gap at {cur}")

    @property
    def n(self) -> int:
        return len(self.dates)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.columns)

    def matrix(self) -> np.ndarray:
        """Regressor matrix with the leading constant column."""
        cols = [np.ones(self.n)]
        cols.extend(self.columns[name] for name in self.columns)
        return np.column_stack(cols)

    def subset(self, mask: np.ndarray) -> "DesignMatrix":
        idx = np.flatnonzero(mask)
        return DesignMatrix(
            dates=tuple(self.dates[i] for i in idx),
            y=self.y[idx],
            columns={k: v[idx] for k, v in self.columns.items()},
            y_name=self.y_name,
        )


def lag_model(X: DesignMatrix, lag: int) -> DesignMatrix:
    """Shift every regressor `lag` days behind the response.

    lag 0 returns the design unchanged; lag L regresses y_t on the
    regressors observed at t-L, dropping the first L rows.
    """
    if lag not in (0, 1, 2):
        raise DesignError(f"lag must be 0, 1 or 2, got {lag}")
    if lag >= X.n:
        raise InsufficientDataError(f"lag {lag} >= sample size {X.n}")
    if lag == 0:
        return X
    return DesignMatrix(
        dates=X.dates[lag:],
        y=X.y[lag:],
        columns={name: col[: X.n - lag] for name, col in X.columns.items()},
        y_name=X.y_name,
    )


def winsorize(series, lower_pct: float, upper_pct: float) -> np.ndarray:
    """Clamp a series at its empirical quantiles.

    Quantiles use the nearest-rank (inclusive) convention: the q-quantile is
    the smallest sorted value with at least ceil(q*n) observations at or
    below it, which keeps results identical across platforms.
    """
    if not (0.0 <= lower_pct < upper_pct <= 1.0):
        raise DesignError(
            f"require 0 <= lower < upper <= 1, got ({lower_pct}, {upper_pct})"
        )
    values = np.asarray(series, dtype=float)
    if values.size == 0:
        raise DesignError("cannot winsorize an empty series")
    ranked = np.sort(values)
    n = values.size

    def nearest_rank(q: float) -> float:
        if q <= 0.0:
            return ranked[0]
        idx = min(n - 1, max(0, math.ceil(q * n) - 1))
        return ranked[idx]

    lo = nearest_rank(lower_pct)
    hi = nearest_rank(upper_pct)
    return np.clip(values, lo, hi)
