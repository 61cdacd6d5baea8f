"""Linear-model and hypothesis-testing kernel.

The estimators and test statistics are implemented here directly on numpy
linear algebra; only scalar distribution functions (regularized incomplete
beta) come from scipy.special.
"""

from .design import DesignMatrix, daily_dates, lag_model, winsorize
from .ols import OlsFit, ols_fit, vif
from .hypotests import (
    TestResult,
    adf_test,
    chow_test,
    drop_degenerate_columns,
    granger_scan,
    granger_test,
)
from .distributions import f_sf, t_sf

__all__ = [
    "DesignMatrix",
    "OlsFit",
    "TestResult",
    "adf_test",
    "chow_test",
    "daily_dates",
    "drop_degenerate_columns",
    "f_sf",
    "granger_scan",
    "granger_test",
    "lag_model",
    "ols_fit",
    "t_sf",
    "vif",
    "winsorize",
]
