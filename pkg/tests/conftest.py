import datetime as dt

import pytest

from restakelab.econometrics import DesignMatrix, daily_dates
from restakelab.flowgraph import load_graph
from restakelab.pipeline import engineer_features, synthetic_panel
from restakelab.stress import LendingParams, ScenarioConfig

LINEA_PARAMS = LendingParams(ltv=0.725, lt=0.75)


@pytest.fixture(scope="session")
def fig5_graph():
    return load_graph("fig5_2025-10-04")


@pytest.fixture(scope="session")
def linea_scenario():
    return ScenarioConfig(
        params=LINEA_PARAMS,
        collateral=64_890,
        depeg=0.04,
        local_dex_liquidity=149,
        mainnet_liquidity=5_251,
        lsp_stake=8_493_457,
        assume_max_ltv=True,
    )


@pytest.fixture(scope="session")
def fixture_panel():
    return synthetic_panel()


@pytest.fixture(scope="session")
def fixture_frame(fixture_panel):
    return engineer_features(fixture_panel)


def random_design(rng, n=None, k=None, start=dt.date(2024, 1, 22)) -> DesignMatrix:
    """Random full-rank design with a linear signal plus noise."""
    n = n or int(rng.integers(30, 201))
    k = k or int(rng.integers(1, 9))
    cols = {f"x{j}": rng.standard_normal(n) for j in range(1, k + 1)}
    beta = rng.standard_normal(k + 1)
    y = beta[0] + sum(b * cols[f"x{j + 1}"] for j, b in enumerate(beta[1:]))
    y = y + rng.standard_normal(n)
    return DesignMatrix(dates=daily_dates(n, start), y=y, columns=cols)


def toy_graph_doc(extra_nodes=(), extra_edges=()):
    """Three-node document: infrastructure plus a receipt token minted on it."""
    doc = {
        "snapshot_date": "2025-01-01",
        "nodes": [
            {"id": "base", "kind": "StakingPool", "chain": "ethereum", "balance": 50_000},
            {"id": "infra", "kind": "RestakingInfra", "chain": "ethereum", "balance": 10_000},
            {"id": "lrp", "kind": "LiquidRestakingProtocol", "chain": "ethereum", "balance": 1_000},
        ],
        "edges": [
            {"from": "base", "to": "infra", "kind": "Restake", "amount": 10_000,
             "derivative_of": "base"},
            {"from": "infra", "to": "lrp", "kind": "Mint", "amount": 1_000,
             "derivative_of": "infra"},
        ],
    }
    doc["nodes"].extend(extra_nodes)
    doc["edges"].extend(extra_edges)
    return doc
