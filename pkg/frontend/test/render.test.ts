/** Rendering contracts beyond the golden snapshots. */
import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { beeSwarm } from "../src/render/util.js";
import { renderProjection, MIN_STROKE } from "../src/render/projection.js";
import { renderSummary } from "../src/render/summary.js";
import { sentimentColor } from "../src/colors.js";
import { FaceGlyph, ProjectionPayload, SummaryPayload } from "../src/types.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

describe("color ramp", () => {
  it("hits the documented endpoints", () => {
    expect(sentimentColor(-3)).toBe("rgb(8,48,107)");
    expect(sentimentColor(0)).toBe("rgb(255,255,255)");
    expect(sentimentColor(3)).toBe("rgb(103,0,13)");
  });

  it("clamps out-of-range values", () => {
    expect(sentimentColor(-99)).toBe(sentimentColor(-3));
    expect(sentimentColor(99)).toBe(sentimentColor(3));
  });
});

describe("bee swarm dodge", () => {
  it("never overlaps points", () => {
    const values = Array.from({ length: 120 }, (_, i) => Math.sin(i * 0.7) * 2);
    const radius = 3;
    const pts = beeSwarm(values, -2, 2, 0, 200, 50, radius);
    expect(pts.length).toBe(values.length);
    for (let i = 0; i < pts.length; i++) {
      for (let j = i + 1; j < pts.length; j++) {
        const d = Math.hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
        expect(d).toBeGreaterThanOrEqual(2 * radius - 1e-6);
      }
    }
  });

  it("is deterministic", () => {
    const values = [0.1, 0.1, 0.1, 0.5, 0.5, -0.3];
    const a = beeSwarm(values, -1, 1, 0, 100, 20, 2);
    const b = beeSwarm(values, -1, 1, 0, 100, 20, 2);
    expect(a).toEqual(b);
  });
});

describe("face glyph", () => {
  it("renders the minimum stroke width at zero intensity", () => {
    const payload = fixture<ProjectionPayload>("projection_vision.json");
    const glyph = payload.points[0].glyph as FaceGlyph;
    const zeroed: ProjectionPayload = {
      ...payload,
      points: [
        {
          ...payload.points[0],
          glyph: { ...glyph, part_intensity: { brow: 0, eye: 0, lip: 0, nose: 0, chin: 0 }, ring: null, sticks: null },
        },
      ],
    };
    const html = renderProjection(zeroed);
    const brow = html.match(/class="face-brow"[^/]*stroke-width="([\d.]+)"/);
    expect(brow).not.toBeNull();
    expect(Number(brow![1])).toBeCloseTo(MIN_STROKE, 6);
    expect(Number(brow![1])).toBeGreaterThan(0);
  });
});

describe("summary layer links", () => {
  it("orders link widths as the payload importance order", () => {
    const payload = fixture<SummaryPayload>("summary.json");
    const html = renderSummary(payload);
    for (const group of payload.layer3) {
      const widths: Record<string, number> = {};
      for (const modality of group.modality_order) {
        const re = new RegExp(
          `class="group-link" data-group="${group.label}" data-modality="${modality}"[^/]*stroke-width="([\\d.]+)"`,
        );
        const m = html.match(re);
        expect(m, `link ${group.label}/${modality}`).not.toBeNull();
        widths[modality] = Number(m![1]);
      }
      // modality_order is the payload's influence ordering, so the rendered
      // link widths must be non-increasing along it.
      const ordered = group.modality_order.map((m) => widths[m]);
      for (let i = 1; i < ordered.length; i++) {
        expect(ordered[i]).toBeLessThanOrEqual(ordered[i - 1] + 1e-9);
      }
    }
  });

  it("marks every group block as brushable", () => {
    const payload = fixture<SummaryPayload>("summary.json");
    const html = renderSummary(payload);
    for (const group of payload.layer3) {
      expect(html).toContain(`data-brush-group="${group.label}"`);
    }
  });
});

describe("projection scope", () => {
  it("fades dimmed points", () => {
    const payload = fixture<ProjectionPayload>("projection_language.json");
    const scoped: ProjectionPayload = {
      ...payload,
      points: payload.points.map((p, i) => ({ ...p, dimmed: i > 0 })),
    };
    const html = renderProjection(scoped);
    expect(html.match(/opacity="0\.15"/g)?.length).toBe(payload.points.length - 1);
  });

  it("rings lassoed points", () => {
    const payload = fixture<ProjectionPayload>("projection_language.json");
    const ids = payload.points.slice(0, 3).map((p) => p.id);
    const html = renderProjection(payload, ids);
    expect(html.match(/class="lasso-ring"/g)?.length).toBe(3);
  });
});
