import { ApiClient } from "./api.js";
import { ExplorerController } from "./state.js";
import { bindEvents, renderApp } from "./view.js";

const root = document.querySelector<HTMLElement>("#app");
if (root === null) {
  throw new Error("missing #app element");
}

const api = new ApiClient((url, init) => window.fetch(url, init));
const controller = new ExplorerController(api, (model) => {
  const active = document.activeElement as HTMLInputElement | null;
  const focusField = active?.dataset?.["field"];
  renderApp(root, model);
  // keep focus on the slider the analyst is dragging across re-renders
  if (focusField) {
    const again = root.querySelector<HTMLInputElement>(
      `input[type="range"][data-field="${focusField}"]`,
    );
    again?.focus();
  }
});

bindEvents(root, {
  onField: (name, value) => controller.setField(name, value),
  onRun: () => void controller.runWhatIf(),
});

void controller.loadDefaults();
