export * from "./types.js";
export * from "./colors.js";
export * from "./state.js";
export * from "./api.js";
export * from "./app.js";
export { renderSummary } from "./render/summary.js";
export { renderTemplates } from "./render/templates.js";
export { renderProjection, MIN_STROKE } from "./render/projection.js";
export { renderInstance } from "./render/instance.js";
export { beeSwarm } from "./render/util.js";
