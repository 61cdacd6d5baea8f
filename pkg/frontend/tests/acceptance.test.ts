// UI release gate: the three end-to-end behaviors the explorer must exhibit,
// exercised through intercepted requests against the engine protocol.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ExplorerController } from "../src/state.js";
import type { FetchResponseLike } from "../src/api.js";
import type { ScenarioConfig } from "../src/types.js";
import { makeFakeServer } from "./fakeServer.js";

describe("UI acceptance", () => {
  it("loading defaults shows collateral 64,890", async () => {
    const { controller } = setup();
    await controller.loadDefaults();
    expect(controller.snapshot().form.collateral).toBe(64890);
  });

  it("depeg slider flips the badge exactly at the strict HF < 1 boundary", async () => {
    const { controller } = setup();
    await controller.loadDefaults();

    controller.setField("depegPct", 3.33); // HF = 1.000115 -> strictly >= 1
    await controller.runWhatIf();
    expect(controller.snapshot().badge).toBe("SAFE");

    controller.setField("depegPct", 3.34); // HF = 0.999983 -> < 1
    await controller.runWhatIf();
    expect(controller.snapshot().badge).toBe("LIQUIDATABLE");
  });

  it("every displayed ratio equals the intercepted API response field", async () => {
    const canned = {
      debt: 1,
      health_factor: 0.9,
      critical_depeg: 0.0333,
      liquidatable: true,
      liquidated_volume: 64890,
      local_coverage: 0.0022962,
      mainnet_coverage: 0.0809215,
      lsp_unwind: 0.0076400,
      stages: [
        { stage: "local_dex", inflow: 64890, absorbed: 149, residual: 64741 },
        { stage: "bridge_back", inflow: 64741, absorbed: 0, residual: 64741 },
        { stage: "mainnet_pools", inflow: 64741, absorbed: 5251, residual: 59490 },
        { stage: "lsp_redemption", inflow: 59490, absorbed: 59490, residual: 0 },
      ],
    };
    const server = makeFakeServer({
      onRun: (config: ScenarioConfig): FetchResponseLike => ({
        ok: true,
        status: 200,
        json: () => Promise.resolve({ config, result: canned }),
      }),
    });
    const controller = new ExplorerController(new ApiClient(server.fetch));
    await controller.loadDefaults();

    const model = controller.snapshot();
    expect(model.gauges!.local).toBe(canned.local_coverage);
    expect(model.gauges!.mainnet).toBe(canned.mainnet_coverage);
    expect(model.gauges!.lsp).toBe(canned.lsp_unwind);
    expect(model.healthFactor).toBe(canned.health_factor);
    expect(model.criticalDepeg).toBe(canned.critical_depeg);
    expect(model.stages).toEqual(canned.stages);
    // every stress run the UI issued went to the engine endpoint
    const runs = server.requests.filter((r) => r.url.endsWith("/api/stress/run"));
    expect(runs.length).toBeGreaterThan(0);
  });
});

function setup() {
  const server = makeFakeServer();
  const controller = new ExplorerController(new ApiClient(server.fetch));
  return { controller, server };
}
