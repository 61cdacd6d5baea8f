// DOM rendering of the render model. Numbers pass through format helpers
// only; nothing is computed here.

import { DEFAULT_GEOMETRY, layoutCurve } from "./curve.js";
import { amount, pct, ratio } from "./format.js";
import type { RenderModel } from "./state.js";
import type { FormFields } from "./validate.js";

export interface FieldSpec {
  name: keyof FormFields;
  label: string;
  min: number;
  max: number;
  step: number;
  slider: boolean;
}

export const FIELD_SPECS: FieldSpec[] = [
  { name: "depegPct", label: "depeg %", min: 0, max: 20, step: 0.01, slider: true },
  { name: "ltvPct", label: "LTV %", min: 0, max: 100, step: 0.1, slider: true },
  { name: "ltPct", label: "liq. threshold %", min: 0, max: 100, step: 0.1, slider: true },
  { name: "collateral", label: "collateral", min: 0, max: 1e9, step: 1, slider: false },
  { name: "localLiquidity", label: "local DEX liquidity", min: 0, max: 1e9, step: 1, slider: false },
  { name: "mainnetLiquidity", label: "mainnet liquidity", min: 0, max: 1e9, step: 1, slider: false },
  { name: "lspStake", label: "staking pool size", min: 1, max: 1e12, step: 1, slider: false },
];

const STAGE_LABELS: Record<string, string> = {
  local_dex: "local DEX absorption",
  bridge_back: "bridge back to mainnet",
  mainnet_pools: "mainnet pool absorption",
  lsp_redemption: "staking-pool redemptions",
};

function gaugeBlock(label: string, value: number): string {
  const width = Math.min(100, value * 100).toFixed(2);
  return `
    <div class="gauge">
      <div class="gauge-label"><span>${label}</span><span>${pct(value)}</span></div>
      <div class="gauge-track"><div class="gauge-fill" style="width:${width}%"></div></div>
    </div>`;
}

function curveSvg(model: RenderModel): string {
  const layout = layoutCurve(model.curve, model.criticalDepeg);
  if (layout === null) {
    return '<div class="placeholder">run a scenario to draw the curve</div>';
  }
  const geom = DEFAULT_GEOMETRY;
  const marker =
    layout.markerX === null
      ? ""
      : `<line id="critical-marker" x1="${layout.markerX}" y1="${geom.padTop}"
           x2="${layout.markerX}" y2="${geom.height - geom.padBottom}"
           stroke="#e0a020" stroke-dasharray="5,4"/>
         <text x="${layout.markerX}" y="${geom.padTop + 10}" fill="#e0a020"
           font-size="11" text-anchor="middle">&#948;*</text>`;
  return `
    <svg viewBox="0 0 ${geom.width} ${geom.height}" width="${geom.width}" height="${geom.height}">
      <rect x="${geom.padLeft}" y="${geom.padTop}"
        width="${geom.width - geom.padLeft - geom.padRight}"
        height="${geom.height - geom.padTop - geom.padBottom}"
        fill="none" stroke="#3a3f4a"/>
      <line x1="${geom.padLeft}" y1="${layout.liquidationY.toFixed(1)}"
        x2="${geom.width - geom.padRight}" y2="${layout.liquidationY.toFixed(1)}"
        stroke="#b04040" stroke-dasharray="2,3"/>
      <text x="${geom.width - geom.padRight - 4}" y="${(layout.liquidationY - 4).toFixed(1)}"
        fill="#b04040" font-size="11" text-anchor="end">HF = 1</text>
      <path d="${layout.path}" fill="none" stroke="#4da3ff" stroke-width="1.5"/>
      ${marker}
    </svg>`;
}

export function renderApp(root: HTMLElement, model: RenderModel): void {
  const banner = model.offlineBanner
    ? `<div class="banner warn" id="offline-banner">${model.offlineBanner}</div>`
    : "";
  const loadError = model.loadError
    ? `<div class="banner error" id="load-error">${model.loadError}</div>`
    : "";
  const retry = model.retryPrompt
    ? `<div class="banner error" id="retry-prompt">${model.retryPrompt}
         <button id="retry-button">retry</button></div>`
    : "";

  const fields = FIELD_SPECS.map((spec) => {
    const value = model.form[spec.name];
    const error = model.fieldErrors[spec.name];
    const slider = spec.slider
      ? `<input type="range" data-field="${spec.name}" min="${spec.min}"
           max="${spec.max}" step="${spec.step}" value="${value}">`
      : "";
    return `
      <label class="field ${error ? "invalid" : ""}" data-field-row="${spec.name}">
        <span class="field-label">${spec.label}</span>
        ${slider}
        <input type="number" data-field="${spec.name}" min="${spec.min}"
          max="${spec.max}" step="${spec.step}" value="${value}">
        ${error ? `<span class="field-error">${error}</span>` : ""}
      </label>`;
  }).join("");

  const badge =
    model.badge === null
      ? ""
      : `<span id="badge" class="badge ${model.badge === "LIQUIDATABLE" ? "liq" : "safe"}">
           ${model.badge}</span>`;

  const readouts =
    model.healthFactor === null
      ? '<div class="placeholder">no scenario yet</div>'
      : `<div class="readouts">
           <div>health factor <strong id="hf-value">${ratio(model.healthFactor)}</strong></div>
           <div>critical depeg <strong id="critical-depeg">${pct(model.criticalDepeg ?? 0)}</strong></div>
           <div>liquidated volume <strong id="liquidated-volume">${amount(model.liquidatedVolume ?? 0)}</strong></div>
         </div>`;

  const gauges =
    model.gauges === null
      ? ""
      : `<div id="gauges">
           ${gaugeBlock("local DEX coverage", model.gauges.local)}
           ${gaugeBlock("mainnet coverage", model.gauges.mainnet)}
           ${gaugeBlock("staking-pool unwind", model.gauges.lsp)}
         </div>`;

  const stages =
    model.stages.length === 0
      ? ""
      : `<table id="stage-trace">
           <thead><tr><th>stage</th><th>inflow</th><th>absorbed</th><th>residual</th></tr></thead>
           <tbody>
             ${model.stages
               .map(
                 (s) => `<tr>
                   <td>${STAGE_LABELS[s.stage] ?? s.stage}</td>
                   <td>${amount(s.inflow)}</td>
                   <td>${amount(s.absorbed)}</td>
                   <td>${amount(s.residual)}</td>
                 </tr>`,
               )
               .join("")}
           </tbody>
         </table>`;

  const metrics =
    model.metrics === null
      ? ""
      : `<div class="metrics" id="metrics-strip">
           snapshot ${model.metrics.snapshot_date} &middot;
           staked ${amount(model.metrics.staked_total)} &middot;
           restaked ${pct(model.metrics.security_margin.restaked_fraction, 1)} of stake
           (${model.metrics.security_margin.at_risk ? "AT RISK" : "below the finality threshold"})
         </div>`;

  root.innerHTML = `
    ${banner}${loadError}${retry}
    <header>
      <h1>depeg scenario explorer</h1>
      ${metrics}
    </header>
    <main>
      <section class="panel form-panel">
        <h2>scenario ${badge}</h2>
        <form id="scenario-form">${fields}</form>
        <button id="run-button" ${model.submitDisabled ? "disabled" : ""}>
          ${model.busy ? "running..." : "run scenario"}
        </button>
      </section>
      <section class="panel">
        <h2>health factor vs depeg</h2>
        <div id="curve">${curveSvg(model)}</div>
        ${readouts}
      </section>
      <section class="panel">
        <h2>absorption</h2>
        ${gauges}
        ${stages}
      </section>
    </main>`;
}

export function bindEvents(
  root: HTMLElement,
  handlers: {
    onField: (name: keyof FormFields, value: number) => void;
    onRun: () => void;
  },
): void {
  root.addEventListener("input", (event) => {
    const target = event.target as HTMLInputElement;
    const field = target.dataset["field"] as keyof FormFields | undefined;
    if (field) {
      const value = Number(target.value);
      if (Number.isFinite(value)) {
        handlers.onField(field, value);
        handlers.onRun();
      }
    }
  });
  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "run-button" || target.id === "retry-button") {
      event.preventDefault();
      handlers.onRun();
    }
  });
}
