/**
 * Lottery view: live probability bars, a seeded draw button, and a
 * same-seed redraw. alpha = 0 switches the panel to deterministic top-K
 * mode with an explanatory note instead of probability bars.
 */

import { ApiClient, ApiError } from "../api.js";
import { probabilityBarsSVG } from "../charts.js";
import { formatSeed } from "../format.js";
import { toDrawBody, toProbabilitiesBody } from "../params.js";
import { RequestSequencer, SessionState, debounce, drawViewModel, lotteryViewModel } from "../state.js";

export function createLotteryView(root: HTMLElement, state: SessionState, api: ApiClient) {
  root.innerHTML = `
    <h2>Biased lottery</h2>
    <div class="controls">
      <label>alpha <input type="range" name="alpha" min="0" max="1" step="0.01" value="${state.stoch.alpha}">
        <output>${state.stoch.alpha}</output></label>
      <label>tau <input type="range" name="tau" min="0.001" max="10" step="0.001" value="${state.stoch.tau}">
        <output>${state.stoch.tau}</output></label>
      <label>K <input type="number" name="k" min="1" value="${state.stoch.k}"></label>
      <label>seed grant <input type="number" name="seedGrant" min="0" step="0.01" value="${state.stoch.seedGrant}"></label>
      <label>gamma_cond <input type="number" name="gammaCond" min="0.1" step="0.1" value="${state.stoch.gammaCond}"></label>
      <button class="draw">Draw</button>
      <button class="redraw" disabled>Re-draw with same seed</button>
    </div>
    <div class="note" hidden></div>
    <div class="error" hidden></div>
    <div class="chart-slot"></div>
    <div class="winners"></div>
  `;
  const note = root.querySelector<HTMLElement>(".note")!;
  const errorBox = root.querySelector<HTMLElement>(".error")!;
  const chartSlot = root.querySelector<HTMLElement>(".chart-slot")!;
  const winners = root.querySelector<HTMLElement>(".winners")!;
  const redraw = root.querySelector<HTMLButtonElement>(".redraw")!;
  const seq = new RequestSequencer();

  async function refreshProbabilities() {
    const token = seq.next();
    if (state.stoch.alpha === 0) {
      const vm = lotteryViewModel(null, state.cohort, 0);
      note.hidden = false;
      note.textContent = vm.note;
      chartSlot.innerHTML = "";
      return;
    }
    try {
      const resp = await api.lotteryProbabilities(toProbabilitiesBody(state.stoch, state.cohort.scores));
      if (!seq.isCurrent(token)) return;
      const vm = lotteryViewModel(resp, state.cohort, state.stoch.alpha);
      note.hidden = true;
      chartSlot.innerHTML = probabilityBarsSVG(vm.bars);
      errorBox.hidden = true;
    } catch (err) {
      if (!seq.isCurrent(token)) return;
      errorBox.hidden = false;
      errorBox.textContent = err instanceof ApiError ? `${err.body.code}: ${err.body.message}` : String(err);
    }
  }

  async function runDraw(rngSeed?: number) {
    try {
      const resp = await api.lotteryDraw(toDrawBody(state.stoch, state.cohort.scores, state.budget, rngSeed));
      state.lastDraw = resp;
      const vm = drawViewModel(resp);
      winners.innerHTML =
        `<p class="seed">${formatSeed(vm.seed)}</p>` +
        `<table><thead><tr><th>winner</th><th>amount</th></tr></thead><tbody>` +
        vm.winners.map((w) => `<tr><td>${w.id}</td><td>${w.amount}</td></tr>`).join("") +
        `</tbody></table>`;
      redraw.disabled = false;
      errorBox.hidden = true;
    } catch (err) {
      errorBox.hidden = false;
      errorBox.textContent = err instanceof ApiError ? `${err.body.code}: ${err.body.message}` : String(err);
    }
  }

  const debounced = debounce(refreshProbabilities, 150);
  for (const input of root.querySelectorAll<HTMLInputElement>("input")) {
    input.addEventListener("input", () => {
      state.setStoch({ [input.name]: Number(input.value) } as never);
      if (input.nextElementSibling?.tagName === "OUTPUT") input.nextElementSibling.textContent = input.value;
      debounced();
    });
  }
  root.querySelector(".draw")!.addEventListener("click", () => void runDraw());
  redraw.addEventListener("click", () => {
    if (state.lastDraw) void runDraw(state.lastDraw.rng_seed);
  });

  void refreshProbabilities();
  return { refreshProbabilities, runDraw };
}
