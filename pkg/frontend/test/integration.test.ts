/**
 * Integration acceptance tests against the real service (spawned by
 * test/setup.ts). These drive the same pipeline the views use:
 * control state -> request body -> service -> view model -> displayed
 * strings, asserting the displayed values are the service response.
 */

import { beforeAll, describe, expect, inject, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { toAllocateBody, toDetBacktestBody, toDrawBody, toProbabilitiesBody } from "../src/params.js";
import {
  SessionState,
  allocationViewModel,
  backtestViewModel,
  drawViewModel,
  lotteryViewModel,
} from "../src/state.js";

const N = 20;
const FIXTURE = {
  ids: Array.from({ length: N }, (_, i) => `r${String(i).padStart(2, "0")}`),
  scores: Array.from({ length: N }, (_, i) => (i + 1) / N),
  outcomes: Array.from({ length: N }, (_, i) => (i + 1) / N),
};

const fixtureCsv = () =>
  "researcher_id,s,o\n" +
  FIXTURE.ids.map((id, i) => `${id},${FIXTURE.scores[i]},${FIXTURE.outcomes[i]}`).join("\n") +
  "\n";

// three pinned parameter sets, per the UI-fidelity acceptance criterion
const PINNED_DET = [
  { alpha: 0.0, lambda: 0.0, gamma: 8.0, lower: null, upper: null },
  { alpha: 0.3, lambda: 0.5, gamma: 2.0, lower: 0.01, upper: 0.4 },
  { alpha: 1.0, lambda: 1.0, gamma: 1.0, lower: null, upper: null },
];
const PINNED_STOCH = [
  { alpha: 0.5, tau: 0.1, k: 5, seedGrant: 0.02, gammaCond: 1.0 },
  { alpha: 0.2, tau: 0.05, k: 3, seedGrant: 0.0, gammaCond: 0.5 },
  { alpha: 1.0, tau: 1.0, k: 10, seedGrant: 0.01, gammaCond: 2.0 },
];

let api: ApiClient;

beforeAll(() => {
  api = new ApiClient(inject("baseUrl"));
});

describe("UI fidelity against the live service", () => {
  it("displays every share exactly as the service sent it, for three pinned parameter sets", async () => {
    for (const det of PINNED_DET) {
      const body = toAllocateBody(det, { scores: FIXTURE.scores });
      const resp = await api.allocateDeterministic(body);
      const vm = allocationViewModel(resp, FIXTURE);
      // a second identical request must return identical strings
      const again = await api.allocateDeterministic(body);
      expect(again.shares).toEqual(resp.shares);
      expect(vm.rows).toHaveLength(N);
      vm.rows.forEach((row, i) => {
        expect(row.share).toBe(Number(resp.shares[i]).toFixed(6));
      });
    }
  });

  it("displays every probability exactly as the service sent it", async () => {
    for (const stoch of PINNED_STOCH) {
      const resp = await api.lotteryProbabilities(toProbabilitiesBody(stoch, FIXTURE.scores));
      const vm = lotteryViewModel(resp, FIXTURE, stoch.alpha);
      expect(vm.mode).toBe("lottery");
      vm.bars.forEach((bar, i) => {
        const v = Number(resp.p[i]);
        const expected = v > 0 && v < 1e-6 ? "<1e-6" : v.toFixed(6);
        expect(bar.p).toBe(expected);
      });
    }
  });

  it("reproduces the winner list on a same-seed redraw", async () => {
    const stoch = PINNED_STOCH[0]!;
    const first = await api.lotteryDraw(toDrawBody(stoch, FIXTURE.scores, 1.0));
    expect(typeof first.rng_seed).toBe("number");
    const redraw = await api.lotteryDraw(toDrawBody(stoch, FIXTURE.scores, 1.0, first.rng_seed));
    expect(drawViewModel(redraw)).toEqual(drawViewModel(first));
    expect(redraw.selected).toEqual(first.selected);
  });

  it("shows a non-decreasing Gini readout across a scripted gamma sweep", async () => {
    const state = new SessionState(FIXTURE);
    state.setDet({ alpha: 0, lambda: 0 });
    const ginis: number[] = [];
    for (const gamma of [0.5, 1, 2, 4, 8, 16, 32]) {
      state.setDet({ gamma });
      const resp = await api.allocateDeterministic(
        toAllocateBody(state.det, { scores: state.cohort.scores }, state.budget),
      );
      ginis.push(resp.diagnostics.gini);
    }
    for (let i = 1; i < ginis.length; i++) {
      expect(ginis[i]!).toBeGreaterThanOrEqual(ginis[i - 1]! - 1e-12);
    }
  });

  it("switches the lottery panel to top-K mode at alpha 0 (service answers 409)", async () => {
    const err = await api
      .lotteryProbabilities({ scores: FIXTURE.scores, alpha: 0, tau: 0.1 })
      .then(() => null)
      .catch((e) => e as ApiError);
    expect(err).toBeInstanceOf(ApiError);
    expect(err!.status).toBe(409);
    expect(err!.body.code).toBe("pure_exploit_limit");
    const vm = lotteryViewModel(null, FIXTURE, 0);
    expect(vm.mode).toBe("top-k");
  });

  it("uploads the fixture cohort and backtests it through the heatmap view model", async () => {
    const uploaded = await api.uploadCohort(fixtureCsv(), "fixture.csv");
    expect(uploaded.size).toBe(N);
    // re-upload is idempotent: the content hash is the identity
    const again = await api.uploadCohort(fixtureCsv(), "renamed.csv");
    expect(again.cohort_id).toBe(uploaded.cohort_id);

    const resp = await api.backtestGrid(
      toDetBacktestBody(
        { cohortId: uploaded.cohort_id },
        { alpha: [0, 0.5], lambda: [0, 1], gamma: [1, 4, 16] },
      ),
    );
    const vm = backtestViewModel(resp);
    expect(vm.best.params.alpha).toBe(0);
    expect(vm.cells.length).toBeGreaterThan(0);
    // perfectly persistent fixture: utility grows with gamma along alpha=0
    const alpha0 = vm.cells.filter((c) => c.alpha === 0).sort((a, b) => a.gamma - b.gamma);
    for (let i = 1; i < alpha0.length; i++) {
      expect(alpha0[i]!.utility).toBeGreaterThanOrEqual(alpha0[i - 1]!.utility);
    }
  });

  it("polls queued backtests to completion", async () => {
    const uploaded = await api.uploadCohort(fixtureCsv(), "fixture.csv");
    const resp = await api.backtestGrid({
      cohort_id: uploaded.cohort_id,
      mechanism: "stoch",
      grid: { alpha: [0.4, 0.8], tau: [0.1], k: [2], seed_grant: [0], gamma_cond: [1] },
      B: 1.0,
      n_draws: 30_000,
      root_seed: 11,
    });
    expect(resp.root_seed).toBe(11);
    expect(resp.table.length).toBe(2);
  });
});
