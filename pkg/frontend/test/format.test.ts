import { describe, expect, it } from "vitest";

import { formatAmount, formatMetric, formatProbability, formatShare } from "../src/format.js";

describe("display formatting", () => {
  it("shows six digits for shares", () => {
    expect(formatShare("0.3333333333333333")).toBe("0.333333");
    expect(formatShare("0.5")).toBe("0.500000");
    expect(formatShare("1")).toBe("1.000000");
  });

  it("renders sub-1e-6 probabilities as <1e-6 instead of zero", () => {
    expect(formatProbability("2.3e-9")).toBe("<1e-6");
    expect(formatProbability("9.999e-7")).toBe("<1e-6");
    expect(formatProbability("0.0000012")).toBe("0.000001");
    expect(formatProbability("0")).toBe("0.000000");
    expect(formatProbability("0.9503302116973793")).toBe("0.950330");
  });

  it("formats amounts and metrics", () => {
    expect(formatAmount("0.20341880341880347")).toBe("0.203419");
    expect(formatMetric(0.123456789)).toBe("0.1235");
  });
});
