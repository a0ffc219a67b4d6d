/**
 * Projection View: a t-SNE canvas of glyph-encoded instances over a density
 * heat background, plus the modality radio switch and range sliders.
 *
 * Glyphs: word (language) draws the strongest token inside a sentiment
 * circle; face (vision) is a Chernoff-style face whose part stroke widths
 * encode intensity (zero intensity still draws the minimum stroke); audio is
 * a sector wheel with per-set radii and an inner sentiment disc. Dimmed
 * points (out of scope) fade out; lassoed ids get a highlight ring.
 */

import { AudioGlyph, FaceGlyph, Glyph, ProjectionPayload, ProjectionPoint, WordGlyph } from "../types.js";
import { sentimentColor } from "../colors.js";
import { ProjectionFilters } from "../state.js";
import { escapeHtml, fmt, scale } from "./util.js";

const W = 640;
const H = 640;
const PAD = 30;
const GLYPH_R = 9;
export const MIN_STROKE = 0.6;
const MAX_STROKE = 3.2;

function strokeWidth(intensity: number): number {
  const t = Math.max(0, Math.min(1, intensity));
  return MIN_STROKE + t * (MAX_STROKE - MIN_STROKE);
}

function wordGlyph(g: WordGlyph): string {
  return `<g class="glyph glyph-word">
<circle r="${GLYPH_R}" fill="${sentimentColor(g.circle)}" stroke="#666" stroke-width="0.5"/>
<text y="3" text-anchor="middle" class="glyph-word-text">${escapeHtml(g.word)}</text>
</g>`;
}

function faceGlyph(g: FaceGlyph): string {
  const parts: string[] = [
    `<circle r="${GLYPH_R}" fill="${sentimentColor(g.background)}" stroke="#666" stroke-width="0.5"/>`,
  ];
  const brow = g.part_intensity["brow"];
  if (brow !== null && brow !== undefined) {
    const w = strokeWidth(brow);
    parts.push(`<line class="face-brow" x1="-5" y1="-4" x2="-2" y2="-4" stroke="#222" stroke-width="${fmt(w, 2)}"/>`);
    parts.push(`<line class="face-brow" x1="2" y1="-4" x2="5" y2="-4" stroke="#222" stroke-width="${fmt(w, 2)}"/>`);
  }
  const eye = g.part_intensity["eye"];
  if (eye !== null && eye !== undefined) {
    const r = 0.6 + 1.4 * Math.max(0, Math.min(1, eye));
    parts.push(`<circle class="face-eye" cx="-3.5" cy="-2" r="${fmt(r, 2)}" fill="#222"/>`);
    parts.push(`<circle class="face-eye" cx="3.5" cy="-2" r="${fmt(r, 2)}" fill="#222"/>`);
  }
  const nose = g.part_intensity["nose"];
  if (nose !== null && nose !== undefined) {
    parts.push(`<line class="face-nose" x1="0" y1="-1" x2="0" y2="2" stroke="#222" stroke-width="${fmt(strokeWidth(nose), 2)}"/>`);
  }
  const lip = g.part_intensity["lip"];
  if (lip !== null && lip !== undefined) {
    parts.push(`<path class="face-lip" d="M -4 4 Q 0 6 4 4" fill="none" stroke="#222" stroke-width="${fmt(strokeWidth(lip), 2)}"/>`);
  }
  const chin = g.part_intensity["chin"];
  if (chin !== null && chin !== undefined) {
    parts.push(`<path class="face-chin" d="M -3 7 Q 0 8.5 3 7" fill="none" stroke="#222" stroke-width="${fmt(strokeWidth(chin), 2)}"/>`);
  }
  if (g.ring !== null) {
    parts.push(`<circle class="face-ring" r="${fmt(GLYPH_R + 1.5, 1)}" fill="none" stroke="#444" stroke-width="${fmt(strokeWidth(g.ring), 2)}"/>`);
  }
  if (g.sticks !== null) {
    g.sticks.forEach((s, i) => {
      const angle = -Math.PI / 2 + (i - (g.sticks!.length - 1) / 2) * 0.5;
      const len = 3 + 4 * Math.max(0, Math.min(1, s));
      const x2 = Math.cos(angle) * (GLYPH_R + len);
      const y2 = Math.sin(angle) * (GLYPH_R + len);
      const x1 = Math.cos(angle) * GLYPH_R;
      const y1 = Math.sin(angle) * GLYPH_R;
      parts.push(`<line class="face-stick" x1="${fmt(x1, 2)}" y1="${fmt(y1, 2)}" x2="${fmt(x2, 2)}" y2="${fmt(y2, 2)}" stroke="#444" stroke-width="0.8"/>`);
    });
  }
  return `<g class="glyph glyph-face">\n${parts.join("\n")}\n</g>`;
}

function audioGlyph(g: AudioGlyph): string {
  const sets = Object.keys(g.sector_radius).sort();
  const parts: string[] = [];
  const n = Math.max(sets.length, 1);
  sets.forEach((set, i) => {
    const radius = g.sector_radius[set];
    if (radius === null) {
      return;
    }
    const a0 = -Math.PI / 2 + (i / n) * 2 * Math.PI;
    const a1 = -Math.PI / 2 + ((i + 1) / n) * 2 * Math.PI;
    const r = 3 + radius * (GLYPH_R - 3);
    const x0 = Math.cos(a0) * r;
    const y0 = Math.sin(a0) * r;
    const x1 = Math.cos(a1) * r;
    const y1 = Math.sin(a1) * r;
    parts.push(
      `<path class="audio-sector" data-set="${escapeHtml(set)}" d="M 0 0 L ${fmt(x0, 2)} ${fmt(y0, 2)} A ${fmt(r, 2)} ${fmt(r, 2)} 0 0 1 ${fmt(x1, 2)} ${fmt(y1, 2)} Z" ` +
        `fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>`,
    );
  });
  parts.push(`<circle class="audio-inner" r="3" fill="${sentimentColor(g.inner)}" stroke="#666" stroke-width="0.5"/>`);
  return `<g class="glyph glyph-audio">\n${parts.join("\n")}\n</g>`;
}

function glyphMarkup(glyph: Glyph): string {
  switch (glyph.kind) {
    case "word":
      return wordGlyph(glyph);
    case "face":
      return faceGlyph(glyph);
    case "audio":
      return audioGlyph(glyph);
  }
}

function heatBackground(payload: ProjectionPayload): string {
  const heat = payload.heat;
  const flat = heat.cells.flat();
  const maxCell = Math.max(...flat, 1e-12);
  const cellW = W / heat.resolution;
  const cellH = H / heat.resolution;
  const rects: string[] = [];
  for (let row = 0; row < heat.cells.length; row++) {
    for (let col = 0; col < heat.cells[row].length; col++) {
      const v = heat.cells[row][col];
      if (v <= 0) {
        continue;
      }
      const x = scale(col, 0, heat.resolution, 0, W);
      const y = scale(row, 0, heat.resolution, H, H - heat.resolution * cellH) - cellH;
      rects.push(
        `<rect x="${fmt(x, 2)}" y="${fmt(y, 2)}" width="${fmt(cellW, 2)}" height="${fmt(cellH, 2)}" ` +
          `fill="#fd8d3c" fill-opacity="${fmt(0.5 * (v / maxCell), 3)}"/>`,
      );
    }
  }
  return `<g class="heat" data-mode="${heat.mode}">\n${rects.join("\n")}\n</g>`;
}

function pointMarkup(point: ProjectionPoint, payload: ProjectionPayload, lasso: string[]): string {
  const [xLo, xHi, yLo, yHi] = payload.heat.bounds;
  const x = scale(point.x, xLo, xHi, PAD, W - PAD);
  const y = scale(point.y, yLo, yHi, H - PAD, PAD);
  const lassoed = lasso.includes(point.id);
  const classes = ["point"];
  if (point.dimmed) {
    classes.push("dimmed");
  }
  if (lassoed) {
    classes.push("lassoed");
  }
  const ring = lassoed ? `<circle class="lasso-ring" r="${GLYPH_R + 3}" fill="none" stroke="#238b45" stroke-width="1.5"/>` : "";
  return `<g class="${classes.join(" ")}" data-id="${escapeHtml(point.id)}" transform="translate(${fmt(x, 2)},${fmt(y, 2)})" opacity="${point.dimmed ? "0.15" : "1"}">
${ring}${glyphMarkup(point.glyph)}
</g>`;
}

function controls(payload: ProjectionPayload, filters: ProjectionFilters): string {
  const radios = (["language", "audio", "vision"] as const)
    .map(
      (m) =>
        `<label><input type="radio" name="modality" value="${m}"${m === payload.modality ? " checked" : ""}/>${m}</label>`,
    )
    .join("\n");
  return `<div class="projection-controls">
<div class="modality-radio">${radios}</div>
<label>min importance <input type="range" name="min-importance" min="0" max="3" step="0.05" value="${fmt(filters.minImportance, 2)}"/></label>
<label>prediction range <input type="range" name="min-prediction" min="-3" max="3" step="0.05" value="${fmt(filters.minPrediction, 2)}"/>
<input type="range" name="max-prediction" min="-3" max="3" step="0.05" value="${fmt(filters.maxPrediction, 2)}"/></label>
</div>`;
}

export function renderProjection(
  payload: ProjectionPayload | null,
  lasso: string[] = [],
  filters: ProjectionFilters = { minImportance: 0, minPrediction: -3, maxPrediction: 3 },
): string {
  if (payload === null) {
    return `<div class="empty-state" data-view="projection">Analysis not ready: projection unavailable.</div>`;
  }
  if (payload.points.length === 0) {
    return `<div class="empty-state" data-view="projection">No instances to project.</div>`;
  }
  const points = payload.points.map((p) => pointMarkup(p, payload, lasso)).join("\n");
  return `<div class="projection-view" data-fingerprint="${payload.fingerprint}" data-modality="${payload.modality}">
${controls(payload, filters)}
<svg class="projection-canvas" viewBox="0 0 ${W} ${H}" width="${W}" height="${H}" xmlns="http://www.w3.org/2000/svg">
${heatBackground(payload)}
${points}
<polygon class="lasso-path" points="" fill="none" stroke="#238b45" stroke-dasharray="4,3"/>
</svg>
</div>`;
}
