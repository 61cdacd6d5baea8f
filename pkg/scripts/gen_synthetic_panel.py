#!/usr/bin/env python3
"""Regenerate the bundled synthetic raw panel.

Writes fixtures/synthetic_panel.csv: 459 daily rows (2024-01-15 through
2025-04-17) of plausible protocol series.  The first 7 rows are warm-up for
the differencing and rolling-volatility transforms; the engineered frame
covers 2024-01-22 through 2025-04-17, i.e. 452 observations.

Revenue is generated from the previous day's infrastructure TVL, layer-2
TVL, token yield and market share, so lag-1 models fit best and the
layer-2 TVL column has a strong one-day predictive signal.  The committed
CSV is the canonical fixture; rerun this script only to change the data
generating process.
"""

from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

SEED = 20240122
START = dt.date(2024, 1, 15)
N_DAYS = 459

EVENT_DATES = {
    dt.date(2024, 4, 26),
    dt.date(2024, 4, 29),
    dt.date(2024, 4, 30),
    dt.date(2024, 10, 1),
}


def _ar1(rng, n, mean, phi, sigma, x0=None):
    x = np.empty(n)
    x[0] = mean if x0 is None else x0
    eps = rng.standard_normal(n) * sigma
    for t in range(1, n):
        x[t] = mean + phi * (x[t - 1] - mean) + eps[t]
    return x


def main():
    rng = np.random.default_rng(SEED)
    dates = [START + dt.timedelta(days=i) for i in range(N_DAYS)]
    t = np.arange(N_DAYS)

    # ETH price: geometric random walk with a mild upward drift
    eth_log = np.log(2400.0) + np.cumsum(rng.normal(0.0006, 0.025, N_DAYS))
    eth_price = np.exp(eth_log)

    # infrastructure TVL: strong growth, persistent shocks
    tvl0_log = np.log(1.1e9) + 0.004 * t + np.cumsum(rng.normal(0, 0.02, N_DAYS))
    tvl0 = np.exp(tvl0_log)

    # home-chain protocol TVL: growth then plateau, noisy
    tvl1_log = np.log(3.0e8) + 0.006 * t - 0.0000045 * t**2 + np.cumsum(
        rng.normal(0, 0.03, N_DAYS)
    )
    tvl1 = np.exp(tvl1_log)

    # layer-2 TVL: volatile growth; its innovations drive next-day revenue
    tvl2_log = np.log(2.5e7) + 0.005 * t + np.cumsum(rng.normal(0, 0.10, N_DAYS))
    tvl2 = np.exp(tvl2_log)

    token_yield = _ar1(rng, N_DAYS, mean=0.35, phi=0.97, sigma=0.015)
    premium_pct = _ar1(rng, N_DAYS, mean=0.05, phi=0.9, sigma=0.25)
    ezeth_price = eth_price * (1.0 + premium_pct / 100.0)

    ezeth_supply = 3.2e5 * np.exp(0.0012 * t + np.cumsum(rng.normal(0, 0.004, N_DAYS)))
    lrp_supply = 1.9e6 * np.exp(0.0018 * t + np.cumsum(rng.normal(0, 0.003, N_DAYS)))
    share_pct = 100.0 * ezeth_supply / lrp_supply

    steth_apy = np.clip(_ar1(rng, N_DAYS, mean=3.1, phi=0.95, sigma=0.12), 2.2, None)

    # tx fee in gwei: mean-reverting log level with volatility clustering
    fee_logvol = _ar1(rng, N_DAYS, mean=np.log(0.15), phi=0.98, sigma=0.08)
    fee_log = np.empty(N_DAYS)
    fee_log[0] = np.log(5.0)
    for i in range(1, N_DAYS):
        fee_log[i] = (
            np.log(5.0)
            + 0.92 * (fee_log[i - 1] - np.log(5.0))
            + rng.standard_normal() * np.exp(fee_logvol[i])
        )
    tx_fee = np.exp(fee_log)

    fgi = np.clip(np.round(_ar1(rng, N_DAYS, mean=58, phi=0.97, sigma=4.0)), 8, 96)

    # revenue responds to yesterday's drivers plus idiosyncratic noise;
    # event days dent it slightly
    events = np.array([1.0 if d in EVENT_DATES else 0.0 for d in dates])
    log_rev = np.empty(N_DAYS)
    noise = rng.normal(0, 0.40, N_DAYS)
    for i in range(N_DAYS):
        j = max(0, i - 1)
        log_rev[i] = (
            -16.0
            + 0.85 * np.log(tvl0[j])
            + 0.80 * np.log(tvl2[j])
            + 3.8 * token_yield[j]
            + 0.06 * share_pct[j]
            + 0.20 * steth_apy[i]
            - 0.25 * events[i]
            + noise[i]
        )
    revenue = np.exp(log_rev)

    out = Path(__file__).resolve().parents[1] / "fixtures" / "synthetic_panel.csv"
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "date", "revenue", "tvl0", "tvl1", "tvl2", "yield", "ezeth_price",
                "eth_price", "ezeth_supply", "lrp_supply", "steth_apy", "tx_fee", "fgi",
            ]
        )
        for i, day in enumerate(dates):
            writer.writerow(
                [
                    day.isoformat(),
                    f"{revenue[i]:.2f}",
                    f"{tvl0[i]:.0f}",
                    f"{tvl1[i]:.0f}",
                    f"{tvl2[i]:.0f}",
                    f"{token_yield[i]:.6f}",
                    f"{ezeth_price[i]:.2f}",
                    f"{eth_price[i]:.2f}",
                    f"{ezeth_supply[i]:.1f}",
                    f"{lrp_supply[i]:.1f}",
                    f"{steth_apy[i]:.4f}",
                    f"{tx_fee[i]:.4f}",
                    f"{fgi[i]:.0f}",
                ]
            )
    print(f"wrote {out} ({N_DAYS} rows)")


if __name__ == "__main__":
    main()
