// Form state and request orchestration for the what-if explorer.
//
// Thin-client rule: nothing here computes a financial quantity. Every number
// in the render model is copied verbatim from an API response field; the view
// only formats. Stress requests carry monotone sequence numbers so a newer
// slider move silently discards stale responses, and at most one request is
// in flight per form (the newest pending state fires when the current one
// settles).

import { ApiClient, ApiRequestError } from "./api.js";
import type {
  GraphMetrics,
  ScenarioConfig,
  StageRecord,
  SweepPoint,
} from "./types.js";
import {
  DEPEG_MAX_PCT,
  FieldErrors,
  FormFields,
  fieldsFromConfig,
  validateForm,
} from "./validate.js";

export interface RenderModel {
  offlineBanner: string | null;
  loadError: string | null;
  fieldErrors: FieldErrors;
  submitDisabled: boolean;
  busy: boolean;
  retryPrompt: string | null;
  form: FormFields;
  metrics: GraphMetrics | null;
  badge: "LIQUIDATABLE" | "SAFE" | null;
  healthFactor: number | null;
  criticalDepeg: number | null;
  gauges: { local: number; mainnet: number; lsp: number } | null;
  liquidatedVolume: number | null;
  stages: StageRecord[];
  curve: SweepPoint[];
}

const EMPTY_FORM: FormFields = {
  ltvPct: 0,
  ltPct: 0,
  depegPct: 0,
  collateral: 0,
  localLiquidity: 0,
  mainnetLiquidity: 0,
  lspStake: 0,
};

function sweepKey(config: ScenarioConfig): string {
  const { depeg: _ignored, ...rest } = config;
  return JSON.stringify(rest);
}

export class ExplorerController {
  private model: RenderModel = {
    offlineBanner: null,
    loadError: null,
    fieldErrors: {},
    submitDisabled: true,
    busy: false,
    retryPrompt: null,
    form: { ...EMPTY_FORM },
    metrics: null,
    badge: null,
    healthFactor: null,
    criticalDepeg: null,
    gauges: null,
    liquidatedVolume: null,
    stages: [],
    curve: [],
  };

  private stressSeq = 0;
  private inFlight = false;
  private pending = false;
  private lastSweepKey: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onRender: (model: RenderModel) => void = () => {},
  ) {}

  snapshot(): RenderModel {
    return this.model;
  }

  private render(patch: Partial<RenderModel>): void {
    this.model = { ...this.model, ...patch };
    this.onRender(this.model);
  }

  async loadDefaults(): Promise<void> {
    try {
      const doc = await this.api.getMetrics();
      const form = fieldsFromConfig(doc.scenario_defaults);
      const { errors } = validateForm(form);
      this.render({
        offlineBanner: null,
        loadError: null,
        metrics: doc.metrics,
        form,
        fieldErrors: errors,
        submitDisabled: Object.keys(errors).length > 0,
      });
      await this.runWhatIf();
    } catch (error) {
      if (error instanceof ApiRequestError) {
        this.render({
          loadError: `metrics payload rejected: ${error.message}`,
          submitDisabled: true,
        });
      } else if (error instanceof Error && /payload|scenario_defaults|metrics/.test(error.message)) {
        this.render({
          loadError: `metrics payload rejected: ${error.message}`,
          submitDisabled: true,
        });
      } else {
        // service unreachable: keep the form usable for manual entry
        this.render({
          offlineBanner:
            "service unreachable; enter scenario parameters manually and retry",
          submitDisabled: false,
        });
      }
    }
  }

  setField(name: keyof FormFields, value: number): void {
    const form = { ...this.model.form, [name]: value };
    if (name === "depegPct") {
      // slider quantization: hundredths of a percentage point
      form.depegPct = Math.round(value * 100) / 100;
      form.depegPct = Math.min(Math.max(form.depegPct, 0), DEPEG_MAX_PCT);
    }
    const { errors } = validateForm(form);
    this.render({
      form,
      fieldErrors: errors,
      submitDisabled: Object.keys(errors).length > 0,
    });
  }

  /** Validate, submit, and apply the response unless a newer request superseded it. */
  async runWhatIf(): Promise<void> {
    const { errors, payload } = validateForm(this.model.form);
    if (payload === null) {
      this.render({ fieldErrors: errors, submitDisabled: true });
      return;
    }
    if (this.inFlight) {
      this.pending = true;
      return;
    }
    this.inFlight = true;
    const seq = ++this.stressSeq;
    this.render({ busy: true, retryPrompt: null });
    try {
      const needSweep = sweepKey(payload) !== this.lastSweepKey;
      const runPromise = this.api.runStress(payload);
      const sweepPromise = needSweep
        ? this.api.getSweep(payload, 0, DEPEG_MAX_PCT / 100, 81)
        : null;
      const run = await runPromise;
      const sweep = sweepPromise === null ? null : await sweepPromise;
      if (seq === this.stressSeq && !this.pending) {
        const result = run.result;
        this.render({
          busy: false,
          fieldErrors: {},
          badge: result.liquidatable ? "LIQUIDATABLE" : "SAFE",
          healthFactor: result.health_factor,
          criticalDepeg: result.critical_depeg,
          gauges: {
            local: result.local_coverage,
            mainnet: result.mainnet_coverage,
            lsp: result.lsp_unwind,
          },
          liquidatedVolume: result.liquidated_volume,
          stages: result.stages,
          curve: sweep === null ? this.model.curve : sweep.points,
        });
        if (sweep !== null) {
          this.lastSweepKey = sweepKey(payload);
        }
      }
    } catch (error) {
      if (seq === this.stressSeq && !this.pending) {
        if (error instanceof ApiRequestError && error.status === 400) {
          this.render({
            busy: false,
            fieldErrors: { ltvPct: error.message },
            submitDisabled: true,
          });
        } else {
          this.render({
            busy: false,
            retryPrompt: "scenario request failed; retry?",
          });
        }
      }
    } finally {
      this.inFlight = false;
      if (this.pending) {
        this.pending = false;
        void this.runWhatIf();
      }
    }
  }
}
