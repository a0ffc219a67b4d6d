/**
 * Template View: a four-column table of mined feature templates.
 *
 * Columns: template items, support, importance distribution, error
 * distribution. Rows with children carry a {+} affordance and render their
 * children indented one level; clicking a row (data-template-path) scopes
 * the projection and instance views to the row's members.
 */

import { Stats, TemplateItem, TemplateRow, TemplatesPayload } from "../types.js";
import { importanceColor } from "../colors.js";
import { escapeHtml, fmt } from "./util.js";

const SORTS = ["support", "importance", "error"] as const;

function itemLabel(item: TemplateItem): string {
  const set = item.set_name === null ? item.modality : item.set_name;
  if (item.level === "feature" && item.feature !== null) {
    return `${item.modality}/${set}/${item.feature}`;
  }
  return `${item.modality}/${set}`;
}

function itemChips(items: TemplateItem[]): string {
  return items
    .map((item) => `<span class="item-chip item-${item.level}" data-modality="${item.modality}">${escapeHtml(itemLabel(item))}</span>`)
    .join(" ");
}

function statsCell(stats: Stats, kind: "importance" | "error"): string {
  if (stats.values.length === 0 || stats.mean === null || stats.min === null || stats.max === null) {
    return `<td class="stats-cell empty">-</td>`;
  }
  const maxAbs = Math.max(Math.abs(stats.min), Math.abs(stats.max), 1e-9);
  const strip = stats.values
    .map((v, i) => {
      const x = (i / stats.values.length) * 100;
      const color = kind === "importance" ? importanceColor(v, maxAbs) : "#e6550d";
      const opacity = kind === "importance" ? 1 : Math.abs(v) / maxAbs;
      return `<rect x="${fmt(x, 2)}%" y="0" width="${fmt(100 / stats.values.length, 2)}%" height="12" fill="${color}" fill-opacity="${fmt(opacity, 3)}"/>`;
    })
    .join("");
  return `<td class="stats-cell">
<svg class="stats-strip" width="120" height="12" preserveAspectRatio="none">${strip}</svg>
<span class="stats-text">mean ${fmt(stats.mean)} [${fmt(stats.min)}, ${fmt(stats.max)}]</span>
</td>`;
}

function rowHtml(row: TemplateRow, path: number[], selected: number[] | null): string {
  const pathStr = path.join(".");
  const isSelected = selected !== null && selected.join(".") === pathStr;
  const depth = path.length - 1;
  const expander = row.children.length > 0 ? `<button class="expander" data-expand="${pathStr}">{+}</button>` : "";
  const self = `<tr class="template-row${isSelected ? " selected" : ""}" data-template-path="${pathStr}" data-depth="${depth}">
<td class="items-cell" style="padding-left:${depth * 18}px">${expander}${itemChips(row.items)}</td>
<td class="support-cell">${row.support_count} (${fmt(row.support_frac * 100, 1)}%)</td>
${statsCell(row.importance_stats, "importance")}
${statsCell(row.error_stats, "error")}
</tr>`;
  const children = row.children.map((child, i) => rowHtml(child, [...path, i], selected)).join("\n");
  return children.length > 0 ? `${self}\n${children}` : self;
}

export function renderTemplates(payload: TemplatesPayload | null, selected: number[] | null = null): string {
  if (payload === null) {
    return `<div class="empty-state" data-view="templates">Analysis not ready: templates unavailable.</div>`;
  }
  const sortControls = SORTS.map(
    (key) =>
      `<button class="sort-control${payload.sort === key ? " active" : ""}" data-sort="${key}">${key}</button>`,
  ).join("");
  if (payload.rows.length === 0) {
    return `<div class="templates-view" data-fingerprint="${payload.fingerprint}">
<div class="sort-controls">${sortControls}</div>
<div class="empty-state" data-view="templates">No templates pass min_support ${fmt(payload.params.min_support)} in this scope.</div>
</div>`;
  }
  const rows = payload.rows.map((row, i) => rowHtml(row, [i], selected)).join("\n");
  return `<div class="templates-view" data-fingerprint="${payload.fingerprint}" data-scope="${payload.scope_fingerprint}">
<div class="sort-controls">${sortControls}</div>
<table class="template-table">
<thead><tr><th>template</th><th>support</th><th>importance</th><th>error</th></tr></thead>
<tbody>
${rows}
</tbody>
</table>
</div>`;
}
