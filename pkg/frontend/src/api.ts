/**
 * Typed client for the allocation service. Share/probability/amount
 * fields stay as the decimal strings the service sent; callers format
 * them for display without recomputation.
 */

import type { AllocateBody, BacktestBody, DrawBody, ProbabilitiesBody } from "./params.js";

export interface AllocateResponse {
  shares: string[];
  diagnostics: { gini: number; top_decile_share: number };
}

export interface ProbabilitiesResponse {
  p: string[];
}

export interface DrawResponse {
  rng_seed: number;
  params: { alpha: number; tau: number; k: number; seed_grant: number; gamma_cond: number };
  selected: number[];
  allocation: { researcher_id: string; amount: string }[];
}

export interface BacktestRow {
  params: Record<string, number>;
  utility: number;
  stderr: number | null;
}

export interface BacktestResponse {
  mechanism: string;
  table: BacktestRow[];
  best: { params: Record<string, number>; utility: number };
  n_draws: number | null;
  root_seed: number | null;
  warning?: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field?: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

export class ApiClient {
  constructor(public baseUrl: string) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new ApiError(resp.status, (await resp.json()) as ApiErrorBody);
    }
    return (await resp.json()) as T;
  }

  allocateDeterministic(body: AllocateBody): Promise<AllocateResponse> {
    return this.post("/v1/allocate/deterministic", body);
  }

  lotteryProbabilities(body: ProbabilitiesBody): Promise<ProbabilitiesResponse> {
    return this.post("/v1/lottery/probabilities", body);
  }

  lotteryDraw(body: DrawBody): Promise<DrawResponse> {
    return this.post("/v1/lottery/draw", body);
  }

  async uploadCohort(csv: string, filename = "cohort.csv"): Promise<{ cohort_id: string; size: number }> {
    const form = new FormData();
    form.append("file", new Blob([csv], { type: "text/csv" }), filename);
    const resp = await fetch(`${this.baseUrl}/v1/cohorts`, { method: "POST", body: form });
    if (!resp.ok) throw new ApiError(resp.status, (await resp.json()) as ApiErrorBody);
    return (await resp.json()) as { cohort_id: string; size: number };
  }

  /**
   * Run a backtest, transparently polling when the service queues the
   * job (202 + token) instead of answering synchronously.
   */
  async backtestGrid(body: BacktestBody, pollMs = 250): Promise<BacktestResponse> {
    const resp = await fetch(`${this.baseUrl}/v1/backtest/grid`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (resp.status === 200) return (await resp.json()) as BacktestResponse;
    if (resp.status !== 202) throw new ApiError(resp.status, (await resp.json()) as ApiErrorBody);
    const { job_id } = (await resp.json()) as { job_id: string };
    for (;;) {
      await new Promise((r) => setTimeout(r, pollMs));
      const poll = await fetch(`${this.baseUrl}/v1/backtest/jobs/${job_id}`);
      if (poll.status === 200) return (await poll.json()) as BacktestResponse;
      if (poll.status !== 202) throw new ApiError(poll.status, (await poll.json()) as ApiErrorBody);
    }
  }
}
