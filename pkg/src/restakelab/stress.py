"""Depeg-liquidation stress test and staged contagion cascade.

The market under stress is an Aave-style lending pool on a rollup where a
liquid-restaking token serves as collateral.  Positions are assumed to be
opened at the maximum loan-to-value, so the oracle-price decline delta fully
controls the health factor:

    HF(delta) = (1 - delta) * LT / LTV

Debt value is unchanged by the depeg (debt is denominated in the reference
asset).  Liquidation triggers strictly below 1, so the critical depeg

    delta* = 1 - LTV / LT

is the last safe point.  Once the pool liquidates, the sell pressure walks a
fixed four-stage pipeline: local DEX absorption, bridge-back of the residual,
mainnet pool absorption, and finally redemption pressure on the liquid
staking pool that ultimately backs the token.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ScenarioError, UndefinedRatioError
from .flowgraph import FlowGraph

STAGE_LOCAL_DEX = "local_dex"
STAGE_BRIDGE_BACK = "bridge_back"
STAGE_MAINNET_POOLS = "mainnet_pools"
STAGE_LSP_REDEMPTION = "lsp_redemption"


@dataclass(frozen=True)
class LendingParams:
    """Loan-to-value and liquidation threshold of the lending market."""

    ltv: float
    lt: float

    def __post_init__(self):
        if not (0.0 < self.ltv < self.lt < 1.0):
            raise ScenarioError(
                f"require 0 < ltv < lt < 1, got ltv={self.ltv}, lt={self.lt}"
            )


@dataclass(frozen=True)
class ScenarioConfig:
    params: LendingParams
    collateral: float
    depeg: float
    local_dex_liquidity: float
    mainnet_liquidity: float
    lsp_stake: float
    assume_max_ltv: bool = True

    def __post_init__(self):
        if not (0.0 <= self.depeg < 1.0):
            raise ScenarioError(f"depeg must lie in [0, 1), got {self.depeg}")
        for name in ("collateral", "local_dex_liquidity", "mainnet_liquidity"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ScenarioError(f"{name} must be finite and >= 0, got {value}")
        if not math.isfinite(self.lsp_stake) or self.lsp_stake <= 0:
            raise ScenarioError(f"lsp_stake must be positive, got {self.lsp_stake}")

    def with_depeg(self, depeg: float) -> "ScenarioConfig":
        return ScenarioConfig(
            params=self.params,
            collateral=self.collateral,
            depeg=depeg,
            local_dex_liquidity=self.local_dex_liquidity,
            mainnet_liquidity=self.mainnet_liquidity,
            lsp_stake=self.lsp_stake,
            assume_max_ltv=self.assume_max_ltv,
        )

    def to_dict(self) -> dict:
        return {
            "ltv": self.params.ltv,
            "lt": self.params.lt,
            "collateral": self.collateral,
            "depeg": self.depeg,
            "local_dex_liquidity": self.local_dex_liquidity,
            "mainnet_liquidity": self.mainnet_liquidity,
            "lsp_stake": self.lsp_stake,
            "assume_max_ltv": self.assume_max_ltv,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        try:
            return cls(
                params=LendingParams(ltv=float(doc["ltv"]), lt=float(doc["lt"])),
                collateral=float(doc["collateral"]),
                depeg=float(doc["depeg"]),
                local_dex_liquidity=float(doc["local_dex_liquidity"]),
                mainnet_liquidity=float(doc["mainnet_liquidity"]),
                lsp_stake=float(doc["lsp_stake"]),
                assume_max_ltv=bool(doc.get("assume_max_ltv", True)),
            )
        except KeyError as exc:
            raise ScenarioError(f"scenario config missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"scenario config malformed: {exc}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioConfig":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ScenarioError(f"scenario config not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"malformed scenario config {path}: {exc}") from None
        return cls.from_dict(doc)


@dataclass(frozen=True)
class StageRecord:
    stage: str
    inflow: float
    absorbed: float
    residual: float


@dataclass(frozen=True)
class StressResult:
    debt: float
    health_factor: float
    critical_depeg: float
    liquidatable: bool
    liquidated_volume: float
    local_coverage: float
    mainnet_coverage: float
    lsp_unwind: float
    stages: tuple[StageRecord, ...] = field(default=())

    def to_dict(self) -> dict:
        # field order is the wire contract; do not sort keys when dumping
        return {
            "debt": self.debt,
            "health_factor": self.health_factor,
            "critical_depeg": self.critical_depeg,
            "liquidatable": self.liquidatable,
            "liquidated_volume": self.liquidated_volume,
            "local_coverage": self.local_coverage,
            "mainnet_coverage": self.mainnet_coverage,
            "lsp_unwind": self.lsp_unwind,
            "stages": [
                {
                    "stage": s.stage,
                    "inflow": s.inflow,
                    "absorbed": s.absorbed,
                    "residual": s.residual,
                }
                for s in self.stages
            ],
        }


def max_debt(collateral: float, ltv: float) -> float:
    """Largest debt a position can open: ltv * collateral."""
    if collateral < 0:
        raise ScenarioError(f"collateral must be >= 0, got {collateral}")
    if not (0.0 < ltv < 1.0):
        raise ScenarioError(f"ltv must lie in (0, 1), got {ltv}")
    return ltv * collateral


def health_factor(depeg: float, params: LendingParams) -> float:
    """Health factor of a max-leverage position after an oracle decline."""
    if not (0.0 <= depeg <= 1.0):
        raise ScenarioError(f"depeg must lie in [0, 1], got {depeg}")
    return (1.0 - depeg) * params.lt / params.ltv


def critical_depeg(params: LendingParams) -> float:
    """Oracle decline at which the health factor reaches exactly 1."""
    return 1.0 - params.ltv / params.lt


def coverage_ratio(liquidity: float, liquidated: float) -> float:
    """Available liquidity over forced-sale volume; > 1 means full cover."""
    if liquidated <= 0:
        raise UndefinedRatioError("coverage ratio undefined for liquidated <= 0")
    if liquidity < 0:
        raise ScenarioError(f"liquidity must be >= 0, got {liquidity}")
    return liquidity / liquidated


def run_scenario(graph: FlowGraph | None, config: ScenarioConfig) -> StressResult:
    """Evaluate one depeg shock and trace the absorption cascade.

    Worst case throughout: debt at maximum LTV and, once the health factor
    dips below 1, the entire posted collateral is treated as liquidated.
    The cascade stages only clip flows with min(); no price-impact model.
    Coverage ratios are taken against the full liquidated volume, while the
    stage trace shows what each venue actually absorbs.  Pure function of
    (graph, config); the graph is accepted as snapshot context only.
    """
    params = config.params
    debt = max_debt(config.collateral, params.ltv) if config.assume_max_ltv else 0.0
    hf = health_factor(config.depeg, params)
    delta_star = critical_depeg(params)
    liquidatable = config.assume_max_ltv and hf < 1.0
    liquidated = config.collateral if liquidatable else 0.0

    local_absorbed = min(liquidated, config.local_dex_liquidity)
    residual_local = liquidated - local_absorbed
    mainnet_absorbed = min(residual_local, config.mainnet_liquidity)
    residual_mainnet = residual_local - mainnet_absorbed
    lsp_absorbed = min(residual_mainnet, config.lsp_stake)
    residual_final = residual_mainnet - lsp_absorbed

    stages = (
        StageRecord(STAGE_LOCAL_DEX, liquidated, local_absorbed, residual_local),
        StageRecord(STAGE_BRIDGE_BACK, residual_local, 0.0, residual_local),
        StageRecord(STAGE_MAINNET_POOLS, residual_local, mainnet_absorbed, residual_mainnet),
        StageRecord(STAGE_LSP_REDEMPTION, residual_mainnet, lsp_absorbed, residual_final),
    )

    if liquidated > 0:
        local_cov = coverage_ratio(config.local_dex_liquidity, liquidated)
        mainnet_cov = coverage_ratio(config.mainnet_liquidity, liquidated)
    else:
        # nothing is forced onto the market; report zero pressure
        local_cov = 0.0
        mainnet_cov = 0.0
    lsp_unwind = liquidated / config.lsp_stake

    return StressResult(
        debt=debt,
        health_factor=hf,
        critical_depeg=delta_star,
        liquidatable=liquidatable,
        liquidated_volume=liquidated,
        local_coverage=local_cov,
        mainnet_coverage=mainnet_cov,
        lsp_unwind=lsp_unwind,
        stages=stages,
    )


def sweep_depeg(
    config: ScenarioConfig,
    grid: list[float],
    graph: FlowGraph | None = None,
) -> list[tuple[float, StressResult]]:
    """Run the scenario across an ascending depeg grid."""
    for value in grid:
        if not (0.0 <= value < 1.0):
            raise ScenarioError(f"grid values must lie in [0, 1), got {value}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ScenarioError("depeg grid must be strictly ascending")
    return [(delta, run_scenario(graph, config.with_depeg(delta))) for delta in grid]
