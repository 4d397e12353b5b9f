/**
 * Backtest view: launches a deterministic grid search over (alpha,
 * gamma), renders the utility heatmap, and loads a clicked cell's
 * parameters back into the live controls. Queued jobs (202) are polled
 * by the API client.
 */

import { ApiClient, ApiError } from "../api.js";
import { heatmapSVG } from "../charts.js";
import { cellToDetControls, toDetBacktestBody } from "../params.js";
import { SessionState, backtestViewModel } from "../state.js";

const ALPHA_GRID = [0, 0.25, 0.5, 0.75, 1];
const LAMBDA_GRID = [0, 0.5, 1];
const GAMMA_GRID = [0.5, 1, 2, 4, 8, 16, 32];

export function createBacktestView(
  root: HTMLElement,
  state: SessionState,
  api: ApiClient,
  onParamsLoaded?: () => void,
) {
  root.innerHTML = `
    <h2>Backtest</h2>
    <p class="hint">Needs a cohort with future outcomes (upload one or use the bundled fixture).</p>
    <button class="run">Run grid search</button>
    <div class="error" hidden></div>
    <div class="status"></div>
    <div class="chart-slot"></div>
    <div class="best"></div>
  `;
  const errorBox = root.querySelector<HTMLElement>(".error")!;
  const status = root.querySelector<HTMLElement>(".status")!;
  const chartSlot = root.querySelector<HTMLElement>(".chart-slot")!;
  const bestBox = root.querySelector<HTMLElement>(".best")!;

  async function run() {
    if (!state.cohort.cohortId) {
      errorBox.hidden = false;
      errorBox.textContent = "Upload a cohort with outcome data first; scores alone cannot be backtested.";
      return;
    }
    status.textContent = "running...";
    try {
      const body = toDetBacktestBody(
        { cohortId: state.cohort.cohortId },
        { alpha: ALPHA_GRID, lambda: LAMBDA_GRID, gamma: GAMMA_GRID },
        state.budget,
      );
      const resp = await api.backtestGrid(body);
      state.lastBacktest = resp;
      const vm = backtestViewModel(resp);
      chartSlot.innerHTML = heatmapSVG(vm.cells);
      bestBox.innerHTML =
        `<p>best: ${JSON.stringify(vm.best.params)} utility <strong>${vm.best.utility}</strong>` +
        (vm.seed !== null ? ` (seed ${vm.seed})` : "") +
        `</p>` +
        (vm.warning ? `<p class="warning">${vm.warning}</p>` : "");
      status.textContent = "";
      errorBox.hidden = true;
    } catch (err) {
      status.textContent = "";
      errorBox.hidden = false;
      errorBox.textContent = err instanceof ApiError ? `${err.body.code}: ${err.body.message}` : String(err);
    }
  }

  root.querySelector(".run")!.addEventListener("click", () => void run());
  chartSlot.addEventListener("click", (event) => {
    const cell = (event.target as HTMLElement).closest?.(".cell") as SVGRectElement | null;
    if (!cell) return;
    state.det = cellToDetControls(
      { alpha: Number(cell.dataset.alpha), gamma: Number(cell.dataset.gamma) },
      state.det,
    );
    onParamsLoaded?.();
  });

  return { run };
}
