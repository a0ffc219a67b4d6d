/**
 * Instance View: the local explanation for a single instance.
 *
 * Top: a sentiment axis with the prediction and truth marks joined by a
 * thick error segment, and three signed modality-importance rectangles.
 * Middle: a sortable feature attribution table. Bottom: the token strip with
 * per-word importance backgrounds, top-k acoustic feature lines above the
 * strip and visual feature lines below, vertical offset encoding the value.
 */

import { InstancePayload, Modality } from "../types.js";
import { importanceColor, sentimentColor } from "../colors.js";
import { escapeHtml, fmt, scale } from "./util.js";

const W = 680;
const AXIS_Y = 26;
const LEFT = 90;

type SortKey = "phi" | "feature" | "modality";

function sentimentAxis(payload: InstancePayload): string {
  const x = (v: number) => scale(v, -3, 3, LEFT, W - 20);
  const pred = x(payload.prediction);
  const truth = x(payload.label);
  const ticks: string[] = [];
  for (let v = -3; v <= 3; v++) {
    ticks.push(`<line x1="${fmt(x(v), 2)}" y1="${AXIS_Y - 4}" x2="${fmt(x(v), 2)}" y2="${AXIS_Y + 4}" stroke="#999"/>`);
    ticks.push(`<text x="${fmt(x(v), 2)}" y="${AXIS_Y + 16}" text-anchor="middle" class="tick-label">${v}</text>`);
  }
  return `<g class="sentiment-axis">
<line x1="${LEFT}" y1="${AXIS_Y}" x2="${W - 20}" y2="${AXIS_Y}" stroke="#999"/>
${ticks.join("\n")}
<line class="error-segment" x1="${fmt(Math.min(pred, truth), 2)}" y1="${AXIS_Y}" x2="${fmt(Math.max(pred, truth), 2)}" y2="${AXIS_Y}" stroke="#e6550d" stroke-width="5" stroke-opacity="0.7"/>
<circle class="prediction-mark" cx="${fmt(pred, 2)}" cy="${AXIS_Y}" r="5" fill="${sentimentColor(payload.prediction)}" stroke="#333"/>
<rect class="truth-mark" x="${fmt(truth - 4, 2)}" y="${AXIS_Y - 4}" width="8" height="8" fill="none" stroke="#333" stroke-width="1.5"/>
<text x="0" y="${AXIS_Y + 4}" class="row-label">pred ${fmt(payload.prediction)} / truth ${fmt(payload.label)}</text>
</g>`;
}

function modalityRects(payload: InstancePayload): string {
  const modalities: Modality[] = ["language", "audio", "vision"];
  const maxAbs = Math.max(...modalities.map((m) => Math.abs(payload.modality_importance[m])), 1e-9);
  const zeroX = (LEFT + W - 20) / 2;
  const rows = modalities.map((m, i) => {
    const v = payload.modality_importance[m];
    const y = 52 + i * 20;
    const w = (Math.abs(v) / maxAbs) * (W - 20 - zeroX);
    const x = v >= 0 ? zeroX : zeroX - w;
    return `<g class="modality-rect" data-modality="${m}">
<text x="0" y="${y + 11}" class="row-label">${m} (${fmt(v)})</text>
<rect x="${fmt(x, 2)}" y="${y}" width="${fmt(w, 2)}" height="14" fill="${importanceColor(v, maxAbs)}" stroke="#888" stroke-width="0.5"/>
</g>`;
  });
  return `<g class="modality-importance">
<line x1="${fmt(zeroX, 2)}" y1="48" x2="${fmt(zeroX, 2)}" y2="114" stroke="#ccc"/>
${rows.join("\n")}
</g>`;
}

function featureTable(payload: InstancePayload, sort: SortKey): string {
  const rows = [...payload.feature_table];
  if (sort === "phi") {
    rows.sort((a, b) => Math.abs(b.phi) - Math.abs(a.phi));
  } else if (sort === "feature") {
    rows.sort((a, b) => (a.feature < b.feature ? -1 : a.feature > b.feature ? 1 : 0));
  } else {
    rows.sort((a, b) => (a.modality < b.modality ? -1 : a.modality > b.modality ? 1 : 0));
  }
  const maxAbs = Math.max(...rows.map((r) => Math.abs(r.phi)), 1e-9);
  const body = rows
    .map(
      (r) => `<tr class="feature-row" data-modality="${r.modality}">
<td>${r.modality}</td><td>${escapeHtml(r.feature)}</td>
<td class="phi-cell" style="background:${importanceColor(r.phi, maxAbs)}">${fmt(r.phi)}</td>
</tr>`,
    )
    .join("\n");
  const controls = (["phi", "feature", "modality"] as SortKey[])
    .map((key) => `<button class="sort-control${key === sort ? " active" : ""}" data-instance-sort="${key}">${key}</button>`)
    .join("");
  return `<div class="feature-table-wrap">
<div class="sort-controls">${controls}</div>
<table class="feature-table">
<thead><tr><th>modality</th><th>feature</th><th>phi</th></tr></thead>
<tbody>
${body}
</tbody>
</table>
</div>`;
}

function seriesLine(
  series: { feature: string; phi: number; values: number[] },
  tokenX: number[],
  baseY: number,
  amp: number,
  cls: string,
): string {
  if (series.values.length === 0) {
    return "";
  }
  const maxAbs = Math.max(...series.values.map(Math.abs), 1e-9);
  const pts = series.values
    .map((v, i) => `${fmt(tokenX[Math.min(i, tokenX.length - 1)], 2)},${fmt(baseY - (v / maxAbs) * amp, 2)}`)
    .join(" ");
  return `<g class="${cls}" data-feature="${escapeHtml(series.feature)}" data-phi="${fmt(series.phi, 4)}">
<polyline points="${pts}" fill="none" stroke="${cls === "acoustic-line" ? "#e6550d" : "#31a354"}" stroke-width="1.2"/>
<text x="${fmt(tokenX[tokenX.length - 1] + 6, 2)}" y="${fmt(baseY, 2)}" class="series-label">${escapeHtml(series.feature)}</text>
</g>`;
}

function tokenStrip(payload: InstancePayload): string {
  const tokens = payload.tokens;
  if (tokens.length === 0) {
    return `<text x="0" y="160" class="empty-note">no tokens</text>`;
  }
  const stripY = 190;
  const tokenW = Math.min(90, (W - LEFT - 40) / tokens.length);
  const maxAbs = Math.max(...payload.word_importance.language.map(Math.abs), 1e-9);
  const tokenX = tokens.map((_, i) => LEFT + i * tokenW + tokenW / 2);
  const cells = tokens
    .map((tok, i) => {
      const phi = payload.word_importance.language[i];
      return `<g class="token" data-pos="${escapeHtml(tok.pos ?? "")}">
<rect x="${fmt(LEFT + i * tokenW, 2)}" y="${stripY}" width="${fmt(tokenW, 2)}" height="22" fill="${importanceColor(phi, maxAbs)}" stroke="#ccc"/>
<text x="${fmt(tokenX[i], 2)}" y="${stripY + 15}" text-anchor="middle" class="token-text">${escapeHtml(tok.text)}</text>
</g>`;
    })
    .join("\n");
  const acoustic = payload.acoustic_series
    .map((s, i) => seriesLine(s, tokenX, stripY - 14 - i * 26, 10, "acoustic-line"))
    .join("\n");
  const visual = payload.visual_series
    .map((s, i) => seriesLine(s, tokenX, stripY + 40 + i * 26, 10, "visual-line"))
    .join("\n");
  return `<g class="token-strip">
${acoustic}
${cells}
${visual}
</g>`;
}

export function renderInstance(payload: InstancePayload | null, sort: SortKey = "phi"): string {
  if (payload === null) {
    return `<div class="empty-state" data-view="instance">Select instances with the lasso or a template row.</div>`;
  }
  const stripHeight = 210 + (payload.visual_series.length + 1) * 26;
  const label = payload.interaction.label ?? "unlabeled";
  const dominant = payload.interaction.dominant ? ` (${payload.interaction.dominant})` : "";
  return `<div class="instance-view" data-id="${escapeHtml(payload.id)}" data-fingerprint="${payload.fingerprint}">
<div class="instance-meta">
<span class="instance-id">${escapeHtml(payload.id)}</span>
<span class="interaction-tag">${label}${dominant}</span>
<span class="error-tag">error ${fmt(payload.error)}</span>
</div>
<svg viewBox="0 0 ${W} ${stripHeight}" width="${W}" height="${stripHeight}" xmlns="http://www.w3.org/2000/svg">
${sentimentAxis(payload)}
${modalityRects(payload)}
${tokenStrip(payload)}
</svg>
${featureTable(payload, sort)}
</div>`;
}
