// In-test stand-in for the engine API: implements the same lending-market
// arithmetic as the server so request-interception tests can exercise the
// UI's pass-through behavior against realistic responses.

import type { FetchLike, FetchResponseLike } from "../src/api.js";
import type {
  ScenarioConfig,
  StageRecord,
  StressResult,
  SweepPoint,
} from "../src/types.js";

export function engineStressResult(config: ScenarioConfig): StressResult {
  const hf = ((1 - config.depeg) * config.lt) / config.ltv;
  const critical = 1 - config.ltv / config.lt;
  const liquidatable = config.assume_max_ltv && hf < 1;
  const volume = liquidatable ? config.collateral : 0;
  const localAbsorbed = Math.min(volume, config.local_dex_liquidity);
  const afterLocal = volume - localAbsorbed;
  const mainnetAbsorbed = Math.min(afterLocal, config.mainnet_liquidity);
  const afterMainnet = afterLocal - mainnetAbsorbed;
  const lspAbsorbed = Math.min(afterMainnet, config.lsp_stake);
  const stages: StageRecord[] = [
    { stage: "local_dex", inflow: volume, absorbed: localAbsorbed, residual: afterLocal },
    { stage: "bridge_back", inflow: afterLocal, absorbed: 0, residual: afterLocal },
    { stage: "mainnet_pools", inflow: afterLocal, absorbed: mainnetAbsorbed, residual: afterMainnet },
    { stage: "lsp_redemption", inflow: afterMainnet, absorbed: lspAbsorbed, residual: afterMainnet - lspAbsorbed },
  ];
  return {
    debt: config.ltv * config.collateral,
    health_factor: hf,
    critical_depeg: critical,
    liquidatable,
    liquidated_volume: volume,
    local_coverage: volume > 0 ? config.local_dex_liquidity / volume : 0,
    mainnet_coverage: volume > 0 ? config.mainnet_liquidity / volume : 0,
    lsp_unwind: volume / config.lsp_stake,
    stages,
  };
}

export const PAPER_DEFAULTS: ScenarioConfig = {
  ltv: 0.725,
  lt: 0.75,
  collateral: 64890,
  depeg: 0.04,
  local_dex_liquidity: 149,
  mainnet_liquidity: 5251,
  lsp_stake: 8493457,
  assume_max_ltv: true,
};

export const METRICS_PAYLOAD = {
  metrics: {
    snapshot_date: "2025-10-04",
    eth_usd_price: 4143.3,
    node_count: 17,
    edge_count: 20,
    uninflated_tvl_all: 120000000,
    staked_total: 35701947,
    restaked_total: 4641253,
    security_margin: {
      restaked_fraction: 0.13,
      margin: 0.2033,
      at_risk: false,
      finality_threshold: 1 / 3,
    },
    bridged: {
      token_node: "renzo_ezeth",
      home_balance: 213797.96,
      bridged_total: 90862.04,
      total_supply: 304660,
      bridged_share: 0.2982,
    },
  },
  scenario_defaults: PAPER_DEFAULTS,
};

function jsonResponse(status: number, body: unknown): FetchResponseLike {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: () => Promise.resolve(body),
  };
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export interface FakeServer {
  fetch: FetchLike;
  requests: RecordedRequest[];
}

/** A fetch stub speaking the engine protocol; records every request. */
export function makeFakeServer(
  overrides: {
    metrics?: unknown;
    onRun?: (config: ScenarioConfig) => FetchResponseLike | null;
    failAll?: boolean;
  } = {},
): FakeServer {
  const requests: RecordedRequest[] = [];
  const fetch: FetchLike = (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body) : null;
    requests.push({ url, method, body });
    if (overrides.failAll) {
      return Promise.reject(new TypeError("network unreachable"));
    }
    if (url.endsWith("/api/graph/metrics")) {
      return Promise.resolve(jsonResponse(200, overrides.metrics ?? METRICS_PAYLOAD));
    }
    if (url.endsWith("/api/stress/run")) {
      const config = body as ScenarioConfig;
      const custom = overrides.onRun?.(config);
      if (custom) return Promise.resolve(custom);
      if (!(config.ltv > 0 && config.ltv < config.lt && config.lt < 1)) {
        return Promise.resolve(
          jsonResponse(400, {
            code: "BadRequest",
            message: "require 0 < ltv < lt < 1",
            detail: "",
          }),
        );
      }
      return Promise.resolve(
        jsonResponse(200, { config, result: engineStressResult(config) }),
      );
    }
    if (url.includes("/api/stress/sweep")) {
      const params = new URL(url, "http://localhost").searchParams;
      const from = Number(params.get("from") ?? 0);
      const to = Number(params.get("to") ?? 0.2);
      const steps = Number(params.get("steps") ?? 81);
      const base: ScenarioConfig = {
        ltv: Number(params.get("ltv")),
        lt: Number(params.get("lt")),
        collateral: Number(params.get("collateral")),
        depeg: 0,
        local_dex_liquidity: Number(params.get("local_dex_liquidity")),
        mainnet_liquidity: Number(params.get("mainnet_liquidity")),
        lsp_stake: Number(params.get("lsp_stake")),
        assume_max_ltv: true,
      };
      const points: SweepPoint[] = [];
      for (let i = 0; i < steps; i += 1) {
        const depeg = from + (i * (to - from)) / (steps - 1);
        points.push({ depeg, result: engineStressResult({ ...base, depeg }) });
      }
      return Promise.resolve(jsonResponse(200, { config: base, points }));
    }
    return Promise.resolve(
      jsonResponse(404, { code: "NotFound", message: `no route ${url}`, detail: "" }),
    );
  };
  return { fetch, requests };
}

export function flushMicrotasks(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
