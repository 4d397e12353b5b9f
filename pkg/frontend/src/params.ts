/**
 * Control-state types, range clamping, and the pure mapping between
 * control state and service request bodies.
 *
 * Every slider/input goes through clamp* before it reaches the state, so
 * parameters are always within their legal ranges. The to*Body functions
 * are the only place where control state turns into wire format, and
 * controlsFrom*Body inverts them (covered by round-trip tests).
 */

export interface DetControls {
  alpha: number; // exploration fraction in [0, 1]
  lambda: number; // exploration uniformity in [0, 1]
  gamma: number; // concentration exponent > 0
  lower: number | null; // optional per-researcher bounds
  upper: number | null;
}

export interface StochControls {
  alpha: number; // 0 switches the lottery to the deterministic top-K limit
  tau: number; // temperature > 0
  k: number; // winners per round
  seedGrant: number;
  gammaCond: number;
}

export const GAMMA_MAX = 64;
export const TAU_MIN = 0.001;
export const TAU_MAX = 10;

const clip = (v: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, v));

export function clampDet(c: DetControls, n: number, budget = 1.0): DetControls {
  const out: DetControls = {
    alpha: clip(c.alpha, 0, 1),
    lambda: clip(c.lambda, 0, 1),
    gamma: clip(c.gamma, 1e-3, GAMMA_MAX),
    lower: c.lower,
    upper: c.upper,
  };
  // bounds must be absent together or form a feasible box for n shares
  if (out.lower === null || out.upper === null || n < 1) {
    out.lower = null;
    out.upper = null;
    return out;
  }
  out.lower = clip(out.lower, 0, budget / n);
  out.upper = clip(out.upper, budget / n, 1);
  if (!(out.lower < out.upper)) {
    out.lower = null;
    out.upper = null;
  }
  return out;
}

export function clampStoch(c: StochControls, n: number, budget = 1.0): StochControls {
  const k = Math.round(clip(c.k, 1, Math.max(1, n)));
  return {
    alpha: clip(c.alpha, 0, 1),
    tau: clip(c.tau, TAU_MIN, TAU_MAX),
    k,
    seedGrant: clip(c.seedGrant, 0, budget / k),
    gammaCond: clip(c.gammaCond, 1e-3, GAMMA_MAX),
  };
}

// -- wire format --------------------------------------------------------------

export interface AllocateBody {
  scores?: number[];
  cohort_id?: string;
  B: number;
  alpha: number;
  lambda: number;
  gamma: number;
  bounds?: { lower: number; upper: number };
}

export function toAllocateBody(
  c: DetControls,
  source: { scores?: number[]; cohortId?: string },
  budget = 1.0,
): AllocateBody {
  const body: AllocateBody = {
    B: budget,
    alpha: c.alpha,
    lambda: c.lambda,
    gamma: c.gamma,
  };
  if (source.scores) body.scores = source.scores;
  else if (source.cohortId) body.cohort_id = source.cohortId;
  if (c.lower !== null && c.upper !== null) {
    body.bounds = { lower: c.lower, upper: c.upper };
  }
  return body;
}

export function controlsFromAllocateBody(body: AllocateBody): DetControls {
  return {
    alpha: body.alpha,
    lambda: body.lambda,
    gamma: body.gamma,
    lower: body.bounds ? body.bounds.lower : null,
    upper: body.bounds ? body.bounds.upper : null,
  };
}

export interface ProbabilitiesBody {
  scores: number[];
  alpha: number;
  tau: number;
}

export function toProbabilitiesBody(c: StochControls, scores: number[]): ProbabilitiesBody {
  return { scores, alpha: c.alpha, tau: c.tau };
}

export interface DrawBody {
  scores: number[];
  params: { alpha: number; tau: number; k: number; seed_grant: number; gamma_cond: number };
  B: number;
  rng_seed?: number;
}

export function toDrawBody(
  c: StochControls,
  scores: number[],
  budget = 1.0,
  rngSeed?: number,
): DrawBody {
  const body: DrawBody = {
    scores,
    params: { alpha: c.alpha, tau: c.tau, k: c.k, seed_grant: c.seedGrant, gamma_cond: c.gammaCond },
    B: budget,
  };
  if (rngSeed !== undefined) body.rng_seed = rngSeed;
  return body;
}

export function controlsFromDrawBody(body: DrawBody): StochControls {
  return {
    alpha: body.params.alpha,
    tau: body.params.tau,
    k: body.params.k,
    seedGrant: body.params.seed_grant,
    gammaCond: body.params.gamma_cond,
  };
}

export interface BacktestBody {
  cohort_id?: string;
  cohort?: { ids?: string[]; s: number[]; o: number[] };
  mechanism: "det" | "stoch";
  grid: Record<string, number[]>;
  B: number;
  n_draws?: number;
  root_seed?: number;
}

export function toDetBacktestBody(
  source: { cohortId?: string; inline?: { s: number[]; o: number[] } },
  grid: { alpha: number[]; lambda: number[]; gamma: number[] },
  budget = 1.0,
): BacktestBody {
  const body: BacktestBody = {
    mechanism: "det",
    grid: { alpha: grid.alpha, lambda: grid.lambda, gamma: grid.gamma },
    B: budget,
  };
  if (source.cohortId) body.cohort_id = source.cohortId;
  else if (source.inline) body.cohort = source.inline;
  return body;
}

/** Parameters a clicked heatmap cell feeds back into the live controls. */
export function cellToDetControls(cell: { alpha: number; gamma: number }, current: DetControls): DetControls {
  return { ...current, alpha: cell.alpha, gamma: cell.gamma };
}
