/** ViewState must survive a round trip through the URL fragment. */
import { describe, expect, it } from "vitest";

import { decodeState, encodeState, initialState, resetSelections, ViewState } from "../src/state.js";

describe("view state fragment round trip", () => {
  it("round-trips the default state", () => {
    const state = initialState();
    expect(decodeState(encodeState(state))).toEqual(state);
  });

  it("round-trips a fully populated state", () => {
    const state: ViewState = {
      brush: { group: "conflict", start: 2, end: 9 },
      selectedTemplate: [3, 0, 1],
      modality: "vision",
      lasso: ["inst_0004", "inst_0010", "inst_0031"],
      filters: { minImportance: 0.25, minPrediction: -1.5, maxPrediction: 2 },
      instanceSort: "modality",
    };
    expect(decodeState(encodeState(state))).toEqual(state);
  });

  it("round-trips with a leading hash", () => {
    const state: ViewState = { ...initialState(), modality: "audio", lasso: ["a", "b"] };
    expect(decodeState("#" + encodeState(state))).toEqual(state);
  });

  it("falls back to defaults on garbage fields", () => {
    const state = decodeState("m=smell&b=dominance:x:y&t=1.-2&f=a:b:c&s=zzz");
    expect(state).toEqual(initialState());
  });

  it("header reset keeps only the modality", () => {
    const state: ViewState = {
      brush: { group: "dominance", start: 0, end: 4 },
      selectedTemplate: [1],
      modality: "audio",
      lasso: ["x"],
      filters: { minImportance: 1, minPrediction: 0, maxPrediction: 1 },
      instanceSort: "feature",
    };
    const reset = resetSelections(state);
    expect(reset.modality).toBe("audio");
    expect(reset.brush).toBeNull();
    expect(reset.selectedTemplate).toBeNull();
    expect(reset.lasso).toEqual([]);
  });
});
