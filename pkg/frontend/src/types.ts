/** Response payload shapes for the modallens query API (docs/api/). */

export type Modality = "language" | "audio" | "vision";
export type GroupLabel = "dominance" | "complement" | "conflict" | "others";

export interface Histogram {
  lo: number;
  hi: number;
  counts: number[];
  underflow: number;
  overflow: number;
}

export interface Stats {
  min: number | null;
  max: number | null;
  mean: number | null;
  values: number[];
}

export interface GroupSummary {
  label: GroupLabel;
  member_ids: string[];
  error_series: number[];
  prediction_histogram: Histogram;
  importance_series: Record<Modality, number[]>;
  modality_totals: Record<Modality, number>;
  modality_order: Modality[];
  mean_error: number;
  total_influence: number;
}

export interface SummaryPayload {
  fingerprint: string;
  thresholds: Record<string, number | null>;
  layer1: {
    truth_histogram: Histogram;
    error_series: number[];
    mean_error: number;
    n: number;
  };
  layer2: {
    modality: Modality;
    total_influence: number;
    mean_abs_importance: number;
    values: number[];
  }[];
  layer3: GroupSummary[];
}

export interface TemplateItem {
  modality: Modality;
  set_name: string | null;
  feature: string | null;
  level: "set" | "feature";
}

export interface TemplateRow {
  items: TemplateItem[];
  support_count: number;
  support_frac: number;
  member_ids: string[];
  importance_stats: Stats;
  error_stats: Stats;
  children: TemplateRow[];
}

export interface TemplatesPayload {
  fingerprint: string;
  scope_fingerprint: string;
  sort: "support" | "importance" | "error";
  params: { min_support: number; cutoff_percentile: number };
  rows: TemplateRow[];
}

export interface WordGlyph {
  kind: "word";
  word: string;
  circle: number;
}

export interface FaceGlyph {
  kind: "face";
  part_intensity: Record<string, number | null>;
  ring: number | null;
  sticks: number[] | null;
  background: number;
}

export interface AudioGlyph {
  kind: "audio";
  sector_radius: Record<string, number | null>;
  detail_radii: Record<string, Record<string, number> | null>;
  inner: number;
}

export type Glyph = WordGlyph | FaceGlyph | AudioGlyph;

export interface ProjectionPoint {
  id: string;
  x: number;
  y: number;
  dimmed: boolean;
  glyph: Glyph;
}

export interface ProjectionPayload {
  fingerprint: string;
  modality: Modality;
  points: ProjectionPoint[];
  heat: {
    resolution: number;
    bounds: [number, number, number, number];
    cells: number[][];
    mode: "error" | "importance";
  };
  diagnostics: Record<string, unknown>;
}

export interface InstancePayload {
  fingerprint: string;
  id: string;
  prediction: number;
  label: number;
  error: number;
  base_value: number;
  fx: number;
  modality_importance: Record<Modality, number>;
  interaction: { label: GroupLabel | null; dominant: Modality | null };
  tokens: { text: string; start_s: number; end_s: number; pos?: string; phi: number }[];
  word_importance: Record<Modality, number[]>;
  acoustic_series: { feature: string; phi: number; values: number[] }[];
  visual_series: { feature: string; phi: number; values: number[] }[];
  feature_table: { modality: Modality; feature: string; phi: number }[];
}

export interface GroupQueryResponse {
  fingerprint: string;
  group: GroupLabel;
  ids: string[];
}
