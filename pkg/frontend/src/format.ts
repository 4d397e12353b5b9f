/**
 * Display formatting. The service sends shares/probabilities as decimal
 * strings; these helpers only reformat those strings for display and
 * never recompute values, so what the user sees is the service response
 * verbatim (to the displayed precision).
 */

/** Budget share with six displayed digits. */
export function formatShare(wire: string): string {
  return Number(wire).toFixed(6);
}

/**
 * Selection probability with six displayed digits. Positive values that
 * would round to 0.000000 are shown as "<1e-6" rather than a false zero.
 */
export function formatProbability(wire: string): string {
  const v = Number(wire);
  if (v > 0 && v < 1e-6) return "<1e-6";
  return v.toFixed(6);
}

/** Monetary amount from a draw response, six digits. */
export function formatAmount(wire: string): string {
  return Number(wire).toFixed(6);
}

/** Utilities and diagnostics arrive as JSON numbers. */
export function formatMetric(value: number, digits = 4): string {
  return value.toFixed(digits);
}

export function formatSeed(seed: number): string {
  return `seed ${seed}`;
}
