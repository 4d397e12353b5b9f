import { describe, expect, it } from "vitest";

import {
  cellToDetControls,
  clampDet,
  clampStoch,
  controlsFromAllocateBody,
  controlsFromDrawBody,
  toAllocateBody,
  toDrawBody,
  toProbabilitiesBody,
  type DetControls,
  type StochControls,
} from "../src/params.js";

const det: DetControls = { alpha: 0.3, lambda: 0.6, gamma: 4, lower: null, upper: null };
const stoch: StochControls = { alpha: 0.5, tau: 0.1, k: 5, seedGrant: 0.02, gammaCond: 1 };

describe("clamping", () => {
  it("keeps in-range values untouched", () => {
    expect(clampDet(det, 10)).toEqual(det);
    expect(clampStoch(stoch, 10)).toEqual(stoch);
  });

  it("clamps out-of-range values into the legal box", () => {
    const c = clampDet({ alpha: 1.7, lambda: -0.2, gamma: 1e9, lower: null, upper: null }, 10);
    expect(c.alpha).toBe(1);
    expect(c.lambda).toBe(0);
    expect(c.gamma).toBeLessThanOrEqual(64);
    const s = clampStoch({ alpha: -3, tau: 0, k: 999, seedGrant: 5, gammaCond: 0 }, 10);
    expect(s.alpha).toBe(0);
    expect(s.tau).toBeGreaterThan(0);
    expect(s.k).toBe(10);
    expect(s.k * s.seedGrant).toBeLessThanOrEqual(1.0);
    expect(s.gammaCond).toBeGreaterThan(0);
  });

  it("clamps an oversized lower bound into the feasible box", () => {
    const c = clampDet({ ...det, lower: 0.9, upper: 0.95 }, 10);
    expect(c.lower).toBe(0.1); // budget / n
    expect(c.upper).toBe(0.95);
  });

  it("drops bounds that collapse after clamping", () => {
    const c = clampDet({ ...det, lower: 0.5, upper: 0.05 }, 10);
    expect(c.lower).toBeNull();
    expect(c.upper).toBeNull();
  });

  it("keeps a feasible bounds box", () => {
    const c = clampDet({ ...det, lower: 0.01, upper: 0.5 }, 10);
    expect(c.lower).toBe(0.01);
    expect(c.upper).toBe(0.5);
  });
});

describe("request-body mapping", () => {
  it("allocate body round-trips through controls", () => {
    const withBounds: DetControls = { ...det, lower: 0.01, upper: 0.4 };
    const body = toAllocateBody(withBounds, { scores: [1, 2, 3] }, 1.0);
    expect(body).toEqual({
      scores: [1, 2, 3],
      B: 1.0,
      alpha: 0.3,
      lambda: 0.6,
      gamma: 4,
      bounds: { lower: 0.01, upper: 0.4 },
    });
    expect(controlsFromAllocateBody(body)).toEqual(withBounds);
  });

  it("uses cohort_id when no inline scores are given", () => {
    const body = toAllocateBody(det, { cohortId: "abc123" });
    expect(body.cohort_id).toBe("abc123");
    expect(body.scores).toBeUndefined();
    expect(body.bounds).toBeUndefined();
  });

  it("draw body round-trips and carries the seed only when set", () => {
    const body = toDrawBody(stoch, [0.1, 0.9], 1.0, 77);
    expect(body.params).toEqual({ alpha: 0.5, tau: 0.1, k: 5, seed_grant: 0.02, gamma_cond: 1 });
    expect(body.rng_seed).toBe(77);
    expect(controlsFromDrawBody(body)).toEqual(stoch);
    expect(toDrawBody(stoch, [1]).rng_seed).toBeUndefined();
  });

  it("probabilities body is minimal", () => {
    expect(toProbabilitiesBody(stoch, [1, 2])).toEqual({ scores: [1, 2], alpha: 0.5, tau: 0.1 });
  });

  it("heatmap cell click loads its parameters into the controls", () => {
    const next = cellToDetControls({ alpha: 0.75, gamma: 16 }, det);
    expect(next.alpha).toBe(0.75);
    expect(next.gamma).toBe(16);
    expect(next.lambda).toBe(det.lambda);
  });
});
