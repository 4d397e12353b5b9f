/**
 * Allocation view: live deterministic shares as the sliders move.
 * Requests are debounced (150 ms) and stale responses are discarded by
 * sequence number, so the chart always reflects the latest controls.
 */

import { ApiClient, ApiError } from "../api.js";
import { allocationCurveSVG } from "../charts.js";
import { toAllocateBody } from "../params.js";
import { RequestSequencer, SessionState, allocationViewModel, debounce } from "../state.js";

export function createAllocationView(root: HTMLElement, state: SessionState, api: ApiClient) {
  root.innerHTML = `
    <h2>Deterministic allocation</h2>
    <div class="controls">
      <label>alpha <input type="range" name="alpha" min="0" max="1" step="0.01" value="${state.det.alpha}">
        <output>${state.det.alpha}</output></label>
      <label>lambda <input type="range" name="lambda" min="0" max="1" step="0.01" value="${state.det.lambda}">
        <output>${state.det.lambda}</output></label>
      <label>gamma <input type="range" name="gamma" min="0.1" max="32" step="0.1" value="${state.det.gamma}">
        <output>${state.det.gamma}</output></label>
      <button class="pin">Pin parameters</button>
    </div>
    <div class="error" hidden></div>
    <div class="chart-slot"></div>
    <div class="readouts">
      <span>Gini: <strong class="gini">-</strong></span>
      <span>Top-decile share: <strong class="topdecile">-</strong></span>
    </div>
    <table class="top-shares"><thead><tr><th>researcher</th><th>share</th></tr></thead><tbody></tbody></table>
  `;
  const errorBox = root.querySelector<HTMLElement>(".error")!;
  const chartSlot = root.querySelector<HTMLElement>(".chart-slot")!;
  const seq = new RequestSequencer();

  async function refresh() {
    const token = seq.next();
    const body = toAllocateBody(state.det, { scores: state.cohort.scores }, state.budget);
    try {
      const resp = await api.allocateDeterministic(body);
      if (!seq.isCurrent(token)) return; // superseded by a newer request
      const vm = allocationViewModel(resp, state.cohort);
      chartSlot.innerHTML = allocationCurveSVG(vm.curve);
      root.querySelector(".gini")!.textContent = vm.gini;
      root.querySelector(".topdecile")!.textContent = vm.topDecileShare;
      root.querySelector("tbody")!.innerHTML = vm.topRows
        .map((r) => `<tr><td>${r.id}</td><td>${r.share}</td></tr>`)
        .join("");
      errorBox.hidden = true;
    } catch (err) {
      if (!seq.isCurrent(token)) return;
      errorBox.hidden = false;
      errorBox.textContent = err instanceof ApiError ? `${err.body.code}: ${err.body.message}` : String(err);
    }
  }

  const debounced = debounce(refresh, 150);
  for (const input of root.querySelectorAll<HTMLInputElement>("input[type=range]")) {
    input.addEventListener("input", () => {
      state.setDet({ [input.name]: Number(input.value) } as never);
      input.nextElementSibling!.textContent = input.value;
      debounced();
    });
  }
  root.querySelector(".pin")!.addEventListener("click", () => state.pin(`pin ${state.pins.length + 1}`));

  void refresh();
  return { refresh };
}
