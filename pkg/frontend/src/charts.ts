/**
 * Dependency-free SVG chart builders. Pure string producers; the views
 * insert the markup and attach listeners by delegation.
 */

const W = 560;
const H = 300;
const PAD = 36;

function sx(v: number, max = 1): number {
  return PAD + (v / max) * (W - 2 * PAD);
}

function sy(v: number, max: number): number {
  return H - PAD - (v / max) * (H - 2 * PAD);
}

export function allocationCurveSVG(points: { score: number; share: number }[]): string {
  if (points.length === 0) return `<svg viewBox="0 0 ${W} ${H}"></svg>`;
  const sorted = [...points].sort((a, b) => a.score - b.score);
  const maxShare = Math.max(...sorted.map((p) => p.share), 1e-12);
  const path = sorted
    .map((p, i) => `${i === 0 ? "M" : "L"}${sx(p.score).toFixed(1)},${sy(p.share, maxShare).toFixed(1)}`)
    .join(" ");
  const dots = sorted
    .map((p) => `<circle cx="${sx(p.score).toFixed(1)}" cy="${sy(p.share, maxShare).toFixed(1)}" r="2.5" class="dot"/>`)
    .join("");
  return `<svg viewBox="0 0 ${W} ${H}" class="chart">
    <line x1="${PAD}" y1="${H - PAD}" x2="${W - PAD}" y2="${H - PAD}" class="axis"/>
    <line x1="${PAD}" y1="${PAD}" x2="${PAD}" y2="${H - PAD}" class="axis"/>
    <text x="${W / 2}" y="${H - 6}" class="label">score</text>
    <text x="10" y="${H / 2}" class="label" transform="rotate(-90 10 ${H / 2})">share</text>
    <text x="${PAD - 4}" y="${PAD}" class="tick" text-anchor="end">${maxShare.toPrecision(3)}</text>
    <path d="${path}" class="line"/>${dots}
  </svg>`;
}

export function probabilityBarsSVG(bars: { id: string; p: string; height: number }[]): string {
  if (bars.length === 0) return `<svg viewBox="0 0 ${W} ${H}"></svg>`;
  const bw = (W - 2 * PAD) / bars.length;
  const rects = bars
    .map((b, i) => {
      const h = b.height * (H - 2 * PAD);
      return `<rect x="${(PAD + i * bw).toFixed(1)}" y="${(H - PAD - h).toFixed(1)}" width="${Math.max(
        bw - 1,
        0.5,
      ).toFixed(1)}" height="${h.toFixed(1)}" class="bar"><title>${b.id}: ${b.p}</title></rect>`;
    })
    .join("");
  return `<svg viewBox="0 0 ${W} ${H}" class="chart">
    <line x1="${PAD}" y1="${H - PAD}" x2="${W - PAD}" y2="${H - PAD}" class="axis"/>
    <text x="${W / 2}" y="${H - 6}" class="label">researcher (cohort order)</text>
    ${rects}
  </svg>`;
}

export function heatmapSVG(cells: { alpha: number; gamma: number; utility: number }[]): string {
  if (cells.length === 0) return `<svg viewBox="0 0 ${W} ${H}"></svg>`;
  const alphas = [...new Set(cells.map((c) => c.alpha))].sort((a, b) => a - b);
  const gammas = [...new Set(cells.map((c) => c.gamma))].sort((a, b) => a - b);
  const us = cells.map((c) => c.utility);
  const lo = Math.min(...us);
  const hi = Math.max(...us);
  const cw = (W - 2 * PAD) / gammas.length;
  const ch = (H - 2 * PAD) / alphas.length;
  const rects = cells
    .map((c) => {
      const x = PAD + gammas.indexOf(c.gamma) * cw;
      const y = PAD + alphas.indexOf(c.alpha) * ch;
      const t = hi > lo ? (c.utility - lo) / (hi - lo) : 0.5;
      const shade = Math.round(235 - t * 180);
      return `<rect x="${x.toFixed(1)}" y="${y.toFixed(1)}" width="${cw.toFixed(1)}" height="${ch.toFixed(
        1,
      )}" fill="rgb(255,${shade},${Math.round(shade * 0.6)})" class="cell" data-alpha="${c.alpha}" data-gamma="${
        c.gamma
      }"><title>alpha=${c.alpha} gamma=${c.gamma}: ${c.utility.toFixed(4)}</title></rect>`;
    })
    .join("");
  const gLabels = gammas
    .map((g, i) => `<text x="${(PAD + (i + 0.5) * cw).toFixed(1)}" y="${H - PAD + 14}" class="tick">${g}</text>`)
    .join("");
  const aLabels = alphas
    .map((a, i) => `<text x="${PAD - 6}" y="${(PAD + (i + 0.6) * ch).toFixed(1)}" class="tick" text-anchor="end">${a}</text>`)
    .join("");
  return `<svg viewBox="0 0 ${W} ${H}" class="chart heatmap">
    ${rects}${gLabels}${aLabels}
    <text x="${W / 2}" y="${H - 4}" class="label">gamma</text>
    <text x="10" y="${H / 2}" class="label" transform="rotate(-90 10 ${H / 2})">alpha</text>
  </svg>`;
}
