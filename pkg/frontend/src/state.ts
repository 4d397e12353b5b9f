/**
 * Session state, stale-response protection, debouncing, and the view
 * models that turn service responses into display strings.
 */

import type { AllocateResponse, BacktestResponse, DrawResponse, ProbabilitiesResponse } from "./api.js";
import { formatAmount, formatMetric, formatProbability, formatShare } from "./format.js";
import { clampDet, clampStoch, type DetControls, type StochControls } from "./params.js";

export interface CohortSource {
  scores: number[];
  ids: string[];
  cohortId?: string;
}

export interface PinnedSnapshot {
  label: string;
  det: DetControls;
  stoch: StochControls;
}

export class SessionState {
  cohort: CohortSource;
  det: DetControls = { alpha: 0, lambda: 0, gamma: 2, lower: null, upper: null };
  stoch: StochControls = { alpha: 0.5, tau: 0.1, k: 5, seedGrant: 0, gammaCond: 1 };
  lastDraw: DrawResponse | null = null;
  lastBacktest: BacktestResponse | null = null;
  pins: PinnedSnapshot[] = [];
  budget = 1.0;

  constructor(cohort: CohortSource) {
    this.cohort = cohort;
  }

  /** Update deterministic controls; values are clamped, never rejected. */
  setDet(partial: Partial<DetControls>) {
    this.det = clampDet({ ...this.det, ...partial }, this.cohort.scores.length, this.budget);
  }

  setStoch(partial: Partial<StochControls>) {
    this.stoch = clampStoch({ ...this.stoch, ...partial }, this.cohort.scores.length, this.budget);
  }

  pin(label: string) {
    this.pins.push({ label, det: { ...this.det }, stoch: { ...this.stoch } });
  }
}

/**
 * Monotonic request sequencing: each view holds one sequencer, stamps a
 * token before sending, and drops any response whose token is no longer
 * current. At most one response can ever win.
 */
export class RequestSequencer {
  private counter = 0;

  next(): number {
    return ++this.counter;
  }

  isCurrent(token: number): boolean {
    return token === this.counter;
  }
}

/** Trailing debounce used for slider-driven requests (150 ms default). */
export function debounce<A extends unknown[]>(fn: (...args: A) => void, waitMs = 150): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, waitMs);
  };
}

// -- view models ---------------------------------------------------------------

export interface AllocationRow {
  id: string;
  share: string; // six-digit display of the service share string
}

export interface AllocationViewModel {
  rows: AllocationRow[]; // all rows, ordered as the cohort
  topRows: AllocationRow[]; // ten largest shares
  gini: string;
  topDecileShare: string;
  curve: { score: number; share: number }[]; // chart geometry only
}

export function allocationViewModel(
  resp: AllocateResponse,
  cohort: CohortSource,
): AllocationViewModel {
  const rows = resp.shares.map((s, i) => ({ id: cohort.ids[i] ?? String(i), share: formatShare(s) }));
  const order = resp.shares
    .map((s, i) => ({ i, v: Number(s) }))
    .sort((a, b) => b.v - a.v)
    .slice(0, 10)
    .map(({ i }) => rows[i]!);
  const curve = resp.shares.map((s, i) => ({ score: cohort.scores[i]!, share: Number(s) }));
  return {
    rows,
    topRows: order,
    gini: formatMetric(resp.diagnostics.gini),
    topDecileShare: formatMetric(resp.diagnostics.top_decile_share),
    curve,
  };
}

export interface LotteryViewModel {
  mode: "lottery" | "top-k"; // top-k when alpha = 0 (no softmax defined)
  note: string;
  bars: { id: string; p: string; height: number }[];
}

export function lotteryViewModel(
  resp: ProbabilitiesResponse | null,
  cohort: CohortSource,
  alpha: number,
): LotteryViewModel {
  if (alpha === 0 || resp === null) {
    return {
      mode: "top-k",
      note: "alpha = 0 is the deterministic top-K limit: the K highest scores win, no lottery is run.",
      bars: [],
    };
  }
  const maxP = Math.max(...resp.p.map(Number));
  return {
    mode: "lottery",
    note: "",
    bars: resp.p.map((p, i) => ({
      id: cohort.ids[i] ?? String(i),
      p: formatProbability(p),
      height: maxP > 0 ? Number(p) / maxP : 0,
    })),
  };
}

export interface WinnerRow {
  id: string;
  amount: string;
}

export interface DrawViewModel {
  seed: number; // always displayed next to the result
  winners: WinnerRow[];
}

export function drawViewModel(resp: DrawResponse): DrawViewModel {
  return {
    seed: resp.rng_seed,
    winners: resp.allocation.map((a) => ({ id: a.researcher_id, amount: formatAmount(a.amount) })),
  };
}

export interface HeatmapCell {
  alpha: number;
  gamma: number;
  utility: number;
}

export interface BacktestViewModel {
  cells: HeatmapCell[]; // utility over the (gamma, alpha) plane, lambda at its best slice
  best: { params: Record<string, number>; utility: string };
  seed: number | null;
  warning: string;
}

export function backtestViewModel(resp: BacktestResponse): BacktestViewModel {
  const bestLam = resp.best.params.lam;
  const cells = resp.table
    .filter((row) => bestLam === undefined || row.params.lam === bestLam)
    .map((row) => ({
      alpha: row.params.alpha ?? 0,
      gamma: row.params.gamma ?? row.params.gamma_cond ?? 0,
      utility: row.utility,
    }));
  return {
    cells,
    best: { params: resp.best.params, utility: formatMetric(resp.best.utility) },
    seed: resp.root_seed,
    warning: resp.warning ?? "",
  };
}
