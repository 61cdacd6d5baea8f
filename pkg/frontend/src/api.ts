// Thin typed client over the engine's JSON API. The fetch implementation is
// injected so component tests can intercept every request.

import type {
  ApiErrorBody,
  GraphMetricsResponse,
  ScenarioConfig,
  StressRunResponse,
  SweepResponse,
} from "./types.js";
import { parseMetricsPayload } from "./validate.js";

export interface FetchResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResponseLike>;

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody | null,
  ) {
    super(body?.message ?? `request failed with status ${status}`);
  }
}

async function errorFrom(resp: FetchResponseLike): Promise<ApiRequestError> {
  let body: ApiErrorBody | null = null;
  try {
    const doc = (await resp.json()) as Record<string, unknown>;
    if (typeof doc?.["code"] === "string" && typeof doc?.["message"] === "string") {
      body = doc as unknown as ApiErrorBody;
    }
  } catch {
    body = null;
  }
  return new ApiRequestError(resp.status, body);
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly base = "",
  ) {}

  async getMetrics(): Promise<GraphMetricsResponse> {
    const resp = await this.fetchFn(`${this.base}/api/graph/metrics`);
    if (!resp.ok) throw await errorFrom(resp);
    return parseMetricsPayload(await resp.json());
  }

  async runStress(config: ScenarioConfig): Promise<StressRunResponse> {
    const resp = await this.fetchFn(`${this.base}/api/stress/run`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(config),
    });
    if (!resp.ok) throw await errorFrom(resp);
    return (await resp.json()) as StressRunResponse;
  }

  async getSweep(
    config: ScenarioConfig,
    from: number,
    to: number,
    steps: number,
  ): Promise<SweepResponse> {
    const params = new URLSearchParams({
      from: String(from),
      to: String(to),
      steps: String(steps),
      ltv: String(config.ltv),
      lt: String(config.lt),
      collateral: String(config.collateral),
      local_dex_liquidity: String(config.local_dex_liquidity),
      mainnet_liquidity: String(config.mainnet_liquidity),
      lsp_stake: String(config.lsp_stake),
    });
    const resp = await this.fetchFn(`${this.base}/api/stress/sweep?${params}`);
    if (!resp.ok) throw await errorFrom(resp);
    return (await resp.json()) as SweepResponse;
  }
}
