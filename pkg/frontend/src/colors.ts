/**
 * Shared diverging sentiment color ramp used by every view.
 *
 * Sentiment values live on [-3, 3]: dark blue at -3, white at 0, dark red
 * at +3. Values outside the range clamp to the endpoints.
 */

const NEG: [number, number, number] = [8, 48, 107]; // dark blue, sentiment -3
const MID: [number, number, number] = [255, 255, 255]; // white, sentiment 0
const POS: [number, number, number] = [103, 0, 13]; // dark red, sentiment +3

export const SENTIMENT_MIN = -3;
export const SENTIMENT_MAX = 3;

function lerp(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

function mix(a: [number, number, number], b: [number, number, number], t: number): string {
  const r = lerp(a[0], b[0], t);
  const g = lerp(a[1], b[1], t);
  const bl = lerp(a[2], b[2], t);
  return `rgb(${r},${g},${bl})`;
}

/** Map a sentiment value in [-3, 3] to a CSS color on the diverging ramp. */
export function sentimentColor(value: number): string {
  const v = Math.max(SENTIMENT_MIN, Math.min(SENTIMENT_MAX, value));
  if (v < 0) {
    return mix(MID, NEG, -v / -SENTIMENT_MIN);
  }
  return mix(MID, POS, v / SENTIMENT_MAX);
}

/**
 * Map a non-negative magnitude in [0, maxAbs] to an opacity in [floor, 1].
 * Used for importance backgrounds where hue alone is not enough.
 */
export function magnitudeOpacity(value: number, maxAbs: number, floor = 0.08): number {
  if (maxAbs <= 0) {
    return floor;
  }
  const t = Math.min(1, Math.abs(value) / maxAbs);
  return floor + (1 - floor) * t;
}

/** Color for a signed importance value scaled against the largest magnitude. */
export function importanceColor(value: number, maxAbs: number): string {
  if (maxAbs <= 0) {
    return sentimentColor(0);
  }
  return sentimentColor((value / maxAbs) * SENTIMENT_MAX);
}
