/** Shared helpers for the string-based SVG/HTML renderers. */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Fixed-precision number formatting so rendered markup is deterministic. */
export function fmt(value: number, digits = 3): string {
  if (!Number.isFinite(value)) {
    return "n/a";
  }
  const s = value.toFixed(digits);
  return s === "-0." + "0".repeat(digits) ? "0." + "0".repeat(digits) : s;
}

/** Map value from [lo, hi] to [outLo, outHi]; degenerate domains map to the midpoint. */
export function scale(value: number, lo: number, hi: number, outLo: number, outHi: number): number {
  if (hi <= lo) {
    return (outLo + outHi) / 2;
  }
  const t = (value - lo) / (hi - lo);
  return outLo + t * (outHi - outLo);
}

/** Polyline "points" attribute for a series drawn left to right. */
export function seriesPoints(
  values: number[],
  x0: number,
  x1: number,
  y0: number,
  y1: number,
  lo: number,
  hi: number,
): string {
  if (values.length === 0) {
    return "";
  }
  const parts: string[] = [];
  for (let i = 0; i < values.length; i++) {
    const x = values.length === 1 ? (x0 + x1) / 2 : scale(i, 0, values.length - 1, x0, x1);
    const y = scale(values[i], lo, hi, y1, y0); // SVG y grows downward
    parts.push(`${fmt(x, 2)},${fmt(y, 2)}`);
  }
  return parts.join(" ");
}

export interface SwarmPoint {
  value: number;
  x: number;
  y: number;
}

/**
 * Deterministic greedy bee-swarm dodge. Points are placed in input order at
 * x = scaled value; each takes the vertical slot closest to the center line
 * that keeps it at least one diameter from every earlier point.
 */
export function beeSwarm(
  values: number[],
  lo: number,
  hi: number,
  x0: number,
  x1: number,
  centerY: number,
  radius: number,
): SwarmPoint[] {
  const placed: SwarmPoint[] = [];
  const step = radius * 2;
  for (const value of values) {
    const x = scale(value, lo, hi, x0, x1);
    let slot = 0;
    for (let k = 0; ; k++) {
      slot = k === 0 ? 0 : (k % 2 === 1 ? Math.ceil(k / 2) : -k / 2);
      const y = centerY + slot * step;
      const collides = placed.some((p) => (p.x - x) ** 2 + (p.y - y) ** 2 < step * step - 1e-9);
      if (!collides) {
        placed.push({ value, x, y });
        break;
      }
    }
  }
  return placed;
}
