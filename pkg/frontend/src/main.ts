/**
 * Bootstrap: cohort input (paste scores or upload a CSV), the three
 * views, and shared session state. The service base URL defaults to the
 * local dev server and can be overridden with ?api=http://host:port.
 */

import { ApiClient } from "./api.js";
import { SessionState } from "./state.js";
import { createAllocationView } from "./views/allocation.js";
import { createBacktestView } from "./views/backtest.js";
import { createLotteryView } from "./views/lottery.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "http://127.0.0.1:8000");

const DEFAULT_SCORES = Array.from({ length: 40 }, (_, i) => (i + 1) / 40);

const state = new SessionState({
  scores: DEFAULT_SCORES,
  ids: DEFAULT_SCORES.map((_, i) => `r${i}`),
});

const cohortPanel = document.querySelector<HTMLElement>("#cohort-panel")!;
cohortPanel.innerHTML = `
  <h2>Cohort</h2>
  <label>scores (comma separated)
    <textarea class="scores" rows="2">${DEFAULT_SCORES.map((s) => s.toFixed(3)).join(",")}</textarea>
  </label>
  <button class="apply">Apply scores</button>
  <label class="upload">or upload cohort CSV <input type="file" accept=".csv"></label>
  <span class="cohort-info"></span>
`;

const info = cohortPanel.querySelector<HTMLElement>(".cohort-info")!;

function mountViews() {
  const allocation = createAllocationView(document.querySelector("#allocation-view")!, state, api);
  const lottery = createLotteryView(document.querySelector("#lottery-view")!, state, api);
  createBacktestView(document.querySelector("#backtest-view")!, state, api, () => {
    void allocation.refresh();
    void lottery.refreshProbabilities();
  });
}

cohortPanel.querySelector(".apply")!.addEventListener("click", () => {
  const text = cohortPanel.querySelector<HTMLTextAreaElement>(".scores")!.value;
  const scores = text
    .split(",")
    .map((v) => Number(v.trim()))
    .filter((v) => Number.isFinite(v) && v >= 0);
  if (scores.length === 0) return;
  state.cohort = { scores, ids: scores.map((_, i) => `r${i}`) };
  info.textContent = `${scores.length} inline scores`;
  mountViews();
});

cohortPanel.querySelector<HTMLInputElement>("input[type=file]")!.addEventListener("change", async (ev) => {
  const file = (ev.target as HTMLInputElement).files?.[0];
  if (!file) return;
  const csv = await file.text();
  const uploaded = await api.uploadCohort(csv, file.name);
  const rows = csv.trim().split("\n").slice(1).map((line) => line.split(","));
  state.cohort = {
    scores: rows.map((r) => Number(r[1])),
    ids: rows.map((r) => r[0] ?? ""),
    cohortId: uploaded.cohort_id,
  };
  info.textContent = `cohort ${uploaded.cohort_id} (${uploaded.size} members)`;
  mountViews();
});

mountViews();
