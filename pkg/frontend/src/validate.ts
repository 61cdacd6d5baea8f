// Client-side validation mirroring the server's ScenarioConfig invariants,
// so the form can never submit a payload the engine would reject.

import type { GraphMetricsResponse, ScenarioConfig } from "./types.js";

export interface FormFields {
  ltvPct: number; // percent, 0-100
  ltPct: number; // percent, 0-100
  depegPct: number; // percent, 0-20, slider step 0.01pp
  collateral: number;
  localLiquidity: number;
  mainnetLiquidity: number;
  lspStake: number;
}

export type FieldErrors = Partial<Record<keyof FormFields, string>>;

export const DEPEG_MAX_PCT = 20;

export interface ValidationOutcome {
  errors: FieldErrors;
  payload: ScenarioConfig | null;
}

function finiteNonNegative(value: number): boolean {
  return Number.isFinite(value) && value >= 0;
}

export function validateForm(fields: FormFields): ValidationOutcome {
  const errors: FieldErrors = {};
  const ltv = fields.ltvPct / 100;
  const lt = fields.ltPct / 100;
  if (!Number.isFinite(ltv) || ltv <= 0 || ltv >= 1) {
    errors.ltvPct = "LTV must lie strictly between 0% and 100%";
  }
  if (!Number.isFinite(lt) || lt <= 0 || lt >= 1) {
    errors.ltPct = "liquidation threshold must lie strictly between 0% and 100%";
  }
  if (!errors.ltvPct && !errors.ltPct && ltv >= lt) {
    errors.ltvPct = "LTV must stay below the liquidation threshold";
  }
  const depeg = fields.depegPct / 100;
  if (!Number.isFinite(depeg) || depeg < 0 || fields.depegPct > DEPEG_MAX_PCT) {
    errors.depegPct = `depeg must lie between 0% and ${DEPEG_MAX_PCT}%`;
  }
  if (!finiteNonNegative(fields.collateral)) {
    errors.collateral = "collateral must be a non-negative amount";
  }
  if (!finiteNonNegative(fields.localLiquidity)) {
    errors.localLiquidity = "local DEX liquidity must be a non-negative amount";
  }
  if (!finiteNonNegative(fields.mainnetLiquidity)) {
    errors.mainnetLiquidity = "mainnet liquidity must be a non-negative amount";
  }
  if (!Number.isFinite(fields.lspStake) || fields.lspStake <= 0) {
    errors.lspStake = "staking-pool size must be positive";
  }
  if (Object.keys(errors).length > 0) {
    return { errors, payload: null };
  }
  return {
    errors,
    payload: {
      ltv,
      lt,
      collateral: fields.collateral,
      depeg,
      local_dex_liquidity: fields.localLiquidity,
      mainnet_liquidity: fields.mainnetLiquidity,
      lsp_stake: fields.lspStake,
      assume_max_ltv: true,
    },
  };
}

export function fieldsFromConfig(config: ScenarioConfig): FormFields {
  return {
    ltvPct: config.ltv * 100,
    ltPct: config.lt * 100,
    depegPct: config.depeg * 100,
    collateral: config.collateral,
    localLiquidity: config.local_dex_liquidity,
    mainnetLiquidity: config.mainnet_liquidity,
    lspStake: config.lsp_stake,
  };
}

function isNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

// Structural check of the metrics payload before anything reaches the form;
// a malformed response surfaces as a load error instead of NaN widgets.
export function parseMetricsPayload(doc: unknown): GraphMetricsResponse {
  if (typeof doc !== "object" || doc === null) {
    throw new Error("metrics payload is not an object");
  }
  const root = doc as Record<string, unknown>;
  const defaults = root["scenario_defaults"] as Record<string, unknown> | undefined;
  if (typeof defaults !== "object" || defaults === null) {
    throw new Error("metrics payload is missing scenario_defaults");
  }
  for (const key of [
    "ltv",
    "lt",
    "collateral",
    "depeg",
    "local_dex_liquidity",
    "mainnet_liquidity",
    "lsp_stake",
  ]) {
    if (!isNumber(defaults[key])) {
      throw new Error(`scenario_defaults.${key} is missing or not a number`);
    }
  }
  const metrics = root["metrics"] as Record<string, unknown> | undefined;
  if (typeof metrics !== "object" || metrics === null) {
    throw new Error("metrics payload is missing metrics");
  }
  const margin = metrics["security_margin"] as Record<string, unknown> | undefined;
  if (
    typeof margin !== "object" ||
    margin === null ||
    !isNumber(margin["restaked_fraction"])
  ) {
    throw new Error("metrics payload is missing security_margin");
  }
  return doc as GraphMetricsResponse;
}
