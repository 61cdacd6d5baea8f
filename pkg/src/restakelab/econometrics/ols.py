"""Least-squares fitting with classical and leverage-corrected covariance.

The coefficient path goes through a QR decomposition rather than the normal
equations; the test suite cross-checks it against an independent
normal-equations oracle.  Covariance estimators:

    classical:  s^2 (X'X)^{-1}
    hc3:        (X'X)^{-1} X' diag(e_i^2 / (1 - h_ii)^2) X (X'X)^{-1}

where h_ii is the hat-matrix diagonal.  The HC3 weighting inflates each
residual by its leverage, which keeps the estimator honest on small samples
with influential points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DesignError, InsufficientDataError, SingularDesignError
from .design import DesignMatrix
from .distributions import t_sf_twosided

COV_CLASSICAL = "Classical"
COV_HC3 = "HC3"

_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class OlsFit:
    names: tuple[str, ...]  # "(Intercept)" first, then regressors
    beta: np.ndarray
    se_classical: np.ndarray
    se_hc3: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    r2: float
    adj_r2: float
    residuals: np.ndarray
    leverage: np.ndarray
    n: int
    k: int
    cov_used: str = COV_CLASSICAL

    @property
    def df_resid(self) -> int:
        return self.n - self.k

    @property
    def rss(self) -> float:
        return float(self.residuals @ self.residuals)

    def coef(self, name: str) -> float:
        return float(self.beta[self.names.index(name)])

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "beta": self.beta.tolist(),
            "se_classical": self.se_classical.tolist(),
            "se_hc3": self.se_hc3.tolist(),
            "t_stats": self.t_stats.tolist(),
            "p_values": self.p_values.tolist(),
            "r2": self.r2,
            "adj_r2": self.adj_r2,
            "n": self.n,
            "k": self.k,
            "cov_used": self.cov_used,
        }


def _check_rank(R: np.ndarray, names: tuple[str, ...]):
    diag = np.abs(np.diag(R))
    scale = diag.max() if diag.size else 0.0
    if scale == 0.0:
        raise SingularDesignError(names, "design matrix is identically zero")
    bad = [names[j] for j in np.flatnonzero(diag <= _RANK_RTOL * scale)]
    if bad:
        raise SingularDesignError(bad)


def ols_fit_arrays(
    X: np.ndarray,
    y: np.ndarray,
    names: tuple[str, ...],
    cov: str = COV_CLASSICAL,
) -> OlsFit:
    """Fit y on an explicit regressor matrix (constant already included)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if n <= k:
        raise InsufficientDataError(f"need n > k, got n={n}, k={k}")
    if cov not in (COV_CLASSICAL, COV_HC3):
        raise DesignError(f"unknown covariance estimator {cov!r}")

    Q, R = np.linalg.qr(X)
    _check_rank(R, names)
    beta = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ beta
    leverage = np.einsum("ij,ij->i", Q, Q)

    rss = float(resid @ resid)
    s2 = rss / (n - k)
    Rinv = np.linalg.solve(R, np.eye(k))
    xtx_inv = Rinv @ Rinv.T
    cov_classical = s2 * xtx_inv

    w = (resid / (1.0 - leverage)) ** 2
    meat = (X * w[:, None]).T @ X
    cov_hc3 = xtx_inv @ meat @ xtx_inv

    se_classical = np.sqrt(np.diag(cov_classical))
    se_hc3 = np.sqrt(np.diag(cov_hc3))
    se = se_hc3 if cov == COV_HC3 else se_classical
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = np.where(se > 0, beta / se, np.inf * np.sign(beta))
    p_values = np.array([t_sf_twosided(t, n - k) for t in t_stats])

    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else (1.0 if rss == 0 else 0.0)
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - k)

    return OlsFit(
        names=names,
        beta=beta,
        se_classical=se_classical,
        se_hc3=se_hc3,
        t_stats=t_stats,
        p_values=p_values,
        r2=r2,
        adj_r2=adj_r2,
        residuals=resid,
        leverage=leverage,
        n=n,
        k=k,
        cov_used=cov,
    )


def ols_fit(X: DesignMatrix, cov: str = COV_CLASSICAL) -> OlsFit:
    """Fit the design's response on its regressors plus an intercept."""
    names = ("(Intercept)",) + X.names
    return ols_fit_arrays(X.matrix(), X.y, names, cov=cov)


def vif(X: DesignMatrix) -> dict[str, float]:
    """Variance inflation factor per regressor.

    Each column is regressed on the remaining regressors (intercept
    included); VIF_j = 1 / (1 - R^2_j).  Perfect collinearity raises a
    SingularDesignError naming the offending column.
    """
    names = X.names
    if len(names) < 2:
        raise DesignError("vif needs at least two regressors besides the intercept")
    out: dict[str, float] = {}
    for name in names:
        others = [n for n in names if n != name]
        aux = np.column_stack([np.ones(X.n)] + [X.columns[n] for n in others])
        target = X.columns[name]
        try:
            fit = ols_fit_arrays(aux, target, ("(Intercept)",) + tuple(others))
        except SingularDesignError:
            raise SingularDesignError(
                [name], f"column {name!r} is perfectly collinear with the others"
            ) from None
        if fit.r2 >= 1.0 - 1e-12:
            raise SingularDesignError(
                [name], f"column {name!r} is perfectly collinear with the others"
            )
        out[name] = 1.0 / (1.0 - fit.r2)
    return out
