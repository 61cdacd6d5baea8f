// Wire types mirroring the JSON schemas published by the engine under /schemas.

export interface ScenarioConfig {
  ltv: number;
  lt: number;
  collateral: number;
  depeg: number;
  local_dex_liquidity: number;
  mainnet_liquidity: number;
  lsp_stake: number;
  assume_max_ltv: boolean;
}

export interface StageRecord {
  stage: string;
  inflow: number;
  absorbed: number;
  residual: number;
}

export interface StressResult {
  debt: number;
  health_factor: number;
  critical_depeg: number;
  liquidatable: boolean;
  liquidated_volume: number;
  local_coverage: number;
  mainnet_coverage: number;
  lsp_unwind: number;
  stages: StageRecord[];
}

export interface StressRunResponse {
  config: ScenarioConfig;
  result: StressResult;
}

export interface SweepPoint {
  depeg: number;
  result: StressResult;
}

export interface SweepResponse {
  config: ScenarioConfig;
  points: SweepPoint[];
}

export interface SecurityMargin {
  restaked_fraction: number;
  margin: number;
  at_risk: boolean;
  finality_threshold: number;
}

export interface GraphMetrics {
  snapshot_date: string;
  eth_usd_price: number | null;
  node_count: number;
  edge_count: number;
  uninflated_tvl_all: number;
  staked_total: number;
  restaked_total: number;
  security_margin: SecurityMargin;
  bridged: {
    token_node: string;
    home_balance: number;
    bridged_total: number;
    total_supply: number;
    bridged_share: number | null;
  } | null;
}

export interface GraphMetricsResponse {
  metrics: GraphMetrics;
  scenario_defaults: ScenarioConfig;
}

export interface ApiErrorBody {
  code: "BadRequest" | "NotFound" | "EngineError";
  message: string;
  detail?: string;
}
