/**
 * Summary View: three linked layers.
 *
 * Layer 1: ground-truth barcode plus prediction-error line for the dataset.
 * Layer 2: one bee swarm per modality over per-instance importances, with a
 *   total-influence bar and gray mean-importance guide lines at +/- mean.
 * Layer 3: one block per interaction group (error line, prediction barcode,
 *   three modality barcodes ordered by influence), connected to layer 2 by
 *   links whose stroke width is proportional to the group's share of that
 *   modality's total influence.
 *
 * Brushing a group's barcode extent is the interaction that issues
 * POST /groups/query; the renderer marks the brushable region with
 * data-brush-group so the app layer can wire it up.
 */

import { Histogram, Modality, SummaryPayload } from "../types.js";
import { sentimentColor, SENTIMENT_MAX, SENTIMENT_MIN } from "../colors.js";
import { beeSwarm, fmt, scale, seriesPoints } from "./util.js";

const W = 760;
const BAR_H = 22;
const SWARM_H = 64;
const LEFT = 120;

function barcode(hist: Histogram, x0: number, x1: number, y: number, h: number): string {
  const total = hist.counts.reduce((a, b) => a + b, 0) + hist.underflow + hist.overflow;
  if (total === 0) {
    return `<text x="${x0}" y="${y + h - 6}" class="empty-note">no values</text>`;
  }
  const maxCount = Math.max(...hist.counts, 1);
  const binW = (x1 - x0) / hist.counts.length;
  const cells: string[] = [];
  for (let i = 0; i < hist.counts.length; i++) {
    const center = hist.lo + ((i + 0.5) * (hist.hi - hist.lo)) / hist.counts.length;
    const opacity = hist.counts[i] / maxCount;
    cells.push(
      `<rect x="${fmt(x0 + i * binW, 2)}" y="${y}" width="${fmt(binW, 2)}" height="${h}" ` +
        `fill="${sentimentColor(center)}" fill-opacity="${fmt(opacity, 3)}" stroke="#ddd" stroke-width="0.5"/>`,
    );
  }
  return cells.join("\n");
}

function errorLine(series: number[], x0: number, x1: number, y: number, h: number): string {
  if (series.length === 0) {
    return "";
  }
  const hi = Math.max(...series, 1e-9);
  const pts = seriesPoints(series, x0, x1, y, y + h, 0, hi);
  return `<polyline class="error-line" points="${pts}" fill="none" stroke="#e6550d" stroke-width="1.2"/>`;
}

function layer1(payload: SummaryPayload, y: number): string {
  const l1 = payload.layer1;
  return `<g class="layer1">
<text x="0" y="${y + 14}" class="row-label">truth (n=${l1.n})</text>
${barcode(l1.truth_histogram, LEFT, W, y, BAR_H)}
${errorLine(l1.error_series, LEFT, W, y + BAR_H + 4, BAR_H)}
<text x="0" y="${y + BAR_H + 18}" class="row-label">error (mean ${fmt(l1.mean_error)})</text>
</g>`;
}

function layer2(payload: SummaryPayload, y: number): string {
  const maxInfluence = Math.max(...payload.layer2.map((m) => m.total_influence), 1e-9);
  const allValues = payload.layer2.flatMap((m) => m.values);
  const lo = Math.min(...allValues, 0);
  const hi = Math.max(...allValues, 1e-9);
  const rows = payload.layer2.map((mod, i) => {
    const top = y + i * (SWARM_H + 8);
    const centerY = top + SWARM_H / 2;
    const pts = beeSwarm(mod.values, lo, hi, LEFT + 8, W - 8, centerY, 2.2);
    const dots = pts
      .map(
        (p) =>
          `<circle class="swarm-dot" cx="${fmt(p.x, 2)}" cy="${fmt(p.y, 2)}" r="2.2" ` +
          `fill="${sentimentColor(scale(p.value, lo, hi, SENTIMENT_MIN, SENTIMENT_MAX))}"/>`,
      )
      .join("\n");
    const guard = mod.mean_abs_importance;
    const gxPlus = scale(guard, lo, hi, LEFT + 8, W - 8);
    const gxMinus = scale(-guard, lo, hi, LEFT + 8, W - 8);
    const barW = (mod.total_influence / maxInfluence) * (LEFT - 30);
    return `<g class="swarm" data-modality="${mod.modality}">
<text x="0" y="${centerY - 8}" class="row-label">${mod.modality}</text>
<rect class="influence-bar" x="0" y="${centerY - 4}" width="${fmt(barW, 2)}" height="8" fill="#888"/>
<line class="mean-guide" x1="${fmt(gxPlus, 2)}" y1="${top}" x2="${fmt(gxPlus, 2)}" y2="${top + SWARM_H}" stroke="#aaa" stroke-dasharray="3,2"/>
<line class="mean-guide" x1="${fmt(gxMinus, 2)}" y1="${top}" x2="${fmt(gxMinus, 2)}" y2="${top + SWARM_H}" stroke="#aaa" stroke-dasharray="3,2"/>
${dots}
</g>`;
  });
  return `<g class="layer2">\n${rows.join("\n")}\n</g>`;
}

function layer3(payload: SummaryPayload, y: number, linkSourceY: Record<Modality, number>): string {
  const groups = payload.layer3;
  const blockW = (W - LEFT) / Math.max(groups.length, 1);
  const links: string[] = [];
  const blocks = groups.map((g, i) => {
    const x0 = LEFT + i * blockW + 6;
    const x1 = LEFT + (i + 1) * blockW - 6;
    const rowH = 14;
    let rowY = y + 18;
    const parts: string[] = [
      `<text x="${x0}" y="${y + 12}" class="group-label">${g.label} (${g.member_ids.length})</text>`,
    ];
    parts.push(errorLine(g.error_series, x0, x1, rowY, rowH));
    rowY += rowH + 4;
    parts.push(barcode(g.prediction_histogram, x0, x1, rowY, rowH));
    const brushY = rowY;
    rowY += rowH + 4;
    for (const modality of g.modality_order) {
      const series = g.importance_series[modality];
      const hist = importanceHistogram(series);
      parts.push(`<g class="modality-barcode" data-modality="${modality}">`);
      parts.push(barcode(hist, x0, x1, rowY, rowH));
      parts.push(`</g>`);
      const width = 1 + 9 * (g.modality_totals[modality] / Math.max(g.total_influence, 1e-9));
      links.push(
        `<line class="group-link" data-group="${g.label}" data-modality="${modality}" ` +
          `x1="${fmt(LEFT, 2)}" y1="${fmt(linkSourceY[modality], 2)}" ` +
          `x2="${fmt((x0 + x1) / 2, 2)}" y2="${fmt(rowY, 2)}" ` +
          `stroke="#bbb" stroke-opacity="0.6" stroke-width="${fmt(width, 2)}"/>`,
      );
      rowY += rowH + 3;
    }
    return `<g class="group-block" data-brush-group="${g.label}" data-members="${g.member_ids.length}">
<rect class="brush-region" x="${x0}" y="${brushY}" width="${fmt(x1 - x0, 2)}" height="14" fill="transparent" stroke="none"/>
${parts.join("\n")}
</g>`;
  });
  return `<g class="layer3">\n${links.join("\n")}\n${blocks.join("\n")}\n</g>`;
}

function importanceHistogram(series: number[]): Histogram {
  const hist: Histogram = { lo: SENTIMENT_MIN, hi: SENTIMENT_MAX, counts: new Array(14).fill(0), underflow: 0, overflow: 0 };
  for (const v of series) {
    if (v < hist.lo) {
      hist.underflow += 1;
    } else if (v >= hist.hi) {
      hist.overflow += 1;
    } else {
      const bin = Math.min(13, Math.floor(((v - hist.lo) / (hist.hi - hist.lo)) * 14));
      hist.counts[bin] += 1;
    }
  }
  return hist;
}

export function renderSummary(payload: SummaryPayload | null): string {
  if (payload === null) {
    return `<div class="empty-state" data-view="summary">Analysis not ready: run the pipeline stages, then reload.</div>`;
  }
  if (payload.layer1.n === 0) {
    return `<div class="empty-state" data-view="summary">No instances in the store.</div>`;
  }
  const y1 = 10;
  const y2 = y1 + 2 * BAR_H + 30;
  const y3 = y2 + payload.layer2.length * (SWARM_H + 8) + 16;
  const linkSourceY = {} as Record<Modality, number>;
  payload.layer2.forEach((mod, i) => {
    linkSourceY[mod.modality] = y2 + i * (SWARM_H + 8) + SWARM_H / 2;
  });
  const height = y3 + 110;
  const th = payload.thresholds;
  return `<div class="summary-view" data-fingerprint="${payload.fingerprint}">
<div class="thresholds">th_sig=${fmt(Number(th.th_sig))} th_dom=${fmt(Number(th.th_dom))} th_confl=${fmt(Number(th.th_confl))}</div>
<svg viewBox="0 0 ${W} ${height}" width="${W}" height="${height}" xmlns="http://www.w3.org/2000/svg">
${layer1(payload, y1)}
${layer2(payload, y2)}
${layer3(payload, y3, linkSourceY)}
</svg>
</div>`;
}
