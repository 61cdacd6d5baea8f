#!/usr/bin/env python3
"""Regenerate the unit-root t-statistic quantile tables.

Simulates the Dickey-Fuller tau distribution (constant-only and
constant+trend deterministics) on long driftless random walks and prints the
frozen quantile tables embedded in restakelab.econometrics.distributions.
Run only when changing the grid or the replication budget; the embedded
tables in the package are the canonical copy.
"""

from __future__ import annotations

import numpy as np

SEED = 903212
T = 1500
REPS = 200_000
BATCH = 10_000

PROBS = np.array(
    [
        0.0005, 0.001, 0.0025, 0.005, 0.01, 0.025, 0.05, 0.075, 0.10,
        0.15, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95,
        0.975, 0.99, 0.995, 0.999,
    ]
)


def _tau_constant(level: np.ndarray, diff: np.ndarray) -> np.ndarray:
    x = level - level.mean(axis=1, keepdims=True)
    d = diff - diff.mean(axis=1, keepdims=True)
    sxx = np.einsum("bt,bt->b", x, x)
    sxy = np.einsum("bt,bt->b", x, d)
    syy = np.einsum("bt,bt->b", d, d)
    slope = sxy / sxx
    rss = syy - sxy**2 / sxx
    s2 = rss / (diff.shape[1] - 2)
    return slope / np.sqrt(s2 / sxx)


def _tau_trend(level: np.ndarray, diff: np.ndarray) -> np.ndarray:
    n = diff.shape[1]
    t = np.arange(n, dtype=float)
    tc = t - t.mean()
    stt = float(tc @ tc)

    def detrend(v: np.ndarray) -> np.ndarray:
        vc = v - v.mean(axis=1, keepdims=True)
        beta = (vc @ tc) / stt
        return vc - beta[:, None] * tc[None, :]

    x = detrend(level)
    d = detrend(diff)
    sxx = np.einsum("bt,bt->b", x, x)
    sxy = np.einsum("bt,bt->b", x, d)
    syy = np.einsum("bt,bt->b", d, d)
    slope = sxy / sxx
    rss = syy - sxy**2 / sxx
    s2 = rss / (n - 3)
    return slope / np.sqrt(s2 / sxx)


def main():
    rng = np.random.default_rng(SEED)
    taus_c = []
    taus_ct = []
    done = 0
    while done < REPS:
        b = min(BATCH, REPS - done)
        eps = rng.standard_normal((b, T + 1))
        y = np.cumsum(eps, axis=1)
        level = y[:, :-1]
        diff = np.diff(y, axis=1)
        taus_c.append(_tau_constant(level, diff))
        taus_ct.append(_tau_trend(level, diff))
        done += b

    for label, taus in (("CONSTANT_ONLY", taus_c), ("CONSTANT_TREND", taus_ct)):
        q = np.quantile(np.concatenate(taus), PROBS)
        print(f"_TAU_QUANTILES_{label} = (")
        for p, v in zip(PROBS, q):
            print(f"    ({p}, {v:.4f}),")
        print(")")
        print()


if __name__ == "__main__":
    main()
