/**
 * Exploration state, round-trippable through the URL fragment so any view
 * of the data is shareable as a plain link.
 */

import { GroupLabel, Modality } from "./types.js";

export interface GroupBrush {
  group: GroupLabel;
  start: number; // inclusive index into the group's member list
  end: number; // exclusive
}

export interface ProjectionFilters {
  minImportance: number;
  minPrediction: number;
  maxPrediction: number;
}

export interface ViewState {
  brush: GroupBrush | null;
  selectedTemplate: number[] | null; // path of child indices into the template rows
  modality: Modality;
  lasso: string[]; // instance ids selected on the projection canvas
  filters: ProjectionFilters;
  instanceSort: "phi" | "feature" | "modality";
}

export const DEFAULT_FILTERS: ProjectionFilters = {
  minImportance: 0,
  minPrediction: -3,
  maxPrediction: 3,
};

export function initialState(): ViewState {
  return {
    brush: null,
    selectedTemplate: null,
    modality: "language",
    lasso: [],
    filters: { ...DEFAULT_FILTERS },
    instanceSort: "phi",
  };
}

/** Reset selections (header click) while keeping the modality choice. */
export function resetSelections(state: ViewState): ViewState {
  return { ...initialState(), modality: state.modality };
}

/** Serialize to a URL fragment (without the leading '#'). */
export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("m", state.modality);
  if (state.brush) {
    params.set("b", `${state.brush.group}:${state.brush.start}:${state.brush.end}`);
  }
  if (state.selectedTemplate) {
    params.set("t", state.selectedTemplate.join("."));
  }
  if (state.lasso.length > 0) {
    params.set("l", state.lasso.join(","));
  }
  const f = state.filters;
  if (
    f.minImportance !== DEFAULT_FILTERS.minImportance ||
    f.minPrediction !== DEFAULT_FILTERS.minPrediction ||
    f.maxPrediction !== DEFAULT_FILTERS.maxPrediction
  ) {
    params.set("f", `${f.minImportance}:${f.minPrediction}:${f.maxPrediction}`);
  }
  if (state.instanceSort !== "phi") {
    params.set("s", state.instanceSort);
  }
  return params.toString();
}

const MODALITIES: Modality[] = ["language", "audio", "vision"];
const GROUPS: GroupLabel[] = ["dominance", "complement", "conflict", "others"];
const SORTS = ["phi", "feature", "modality"] as const;

/** Parse a URL fragment back into a ViewState; bad fields fall back to defaults. */
export function decodeState(fragment: string): ViewState {
  const raw = fragment.startsWith("#") ? fragment.slice(1) : fragment;
  const params = new URLSearchParams(raw);
  const state = initialState();

  const m = params.get("m");
  if (m && MODALITIES.includes(m as Modality)) {
    state.modality = m as Modality;
  }

  const b = params.get("b");
  if (b) {
    const [group, start, end] = b.split(":");
    const startN = Number(start);
    const endN = Number(end);
    if (GROUPS.includes(group as GroupLabel) && Number.isInteger(startN) && Number.isInteger(endN) && startN >= 0 && endN >= startN) {
      state.brush = { group: group as GroupLabel, start: startN, end: endN };
    }
  }

  const t = params.get("t");
  if (t !== null && t !== "") {
    const path = t.split(".").map(Number);
    if (path.every((i) => Number.isInteger(i) && i >= 0)) {
      state.selectedTemplate = path;
    }
  }

  const l = params.get("l");
  if (l) {
    state.lasso = l.split(",").filter((id) => id.length > 0);
  }

  const f = params.get("f");
  if (f) {
    const [minImp, minPred, maxPred] = f.split(":").map(Number);
    if ([minImp, minPred, maxPred].every(Number.isFinite)) {
      state.filters = { minImportance: minImp, minPrediction: minPred, maxPrediction: maxPred };
    }
  }

  const s = params.get("s");
  if (s && (SORTS as readonly string[]).includes(s)) {
    state.instanceSort = s as ViewState["instanceSort"];
  }

  return state;
}
