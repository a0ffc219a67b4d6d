/**
 * Application shell: owns the ViewState, the ApiClient, and the contract
 * that every user interaction issues exactly one API query.
 *
 * Interaction -> query mapping (this is the documented request log):
 *   brush a group barcode      -> POST /groups/query
 *   click a template row       -> GET /projection?modality=...&ids=...
 *   lasso glyphs, open first   -> GET /instances/{id}?top_k=3
 *   switch modality radio      -> GET /projection?modality=...
 *   change a sort control      -> GET /templates?sort=...
 *   header click (reset)       -> GET /summary
 */

import { ApiClient } from "./api.js";
import { decodeState, encodeState, initialState, resetSelections, ViewState } from "./state.js";
import { GroupLabel, InstancePayload, Modality, ProjectionPayload, SummaryPayload, TemplatesPayload } from "./types.js";
import { renderSummary } from "./render/summary.js";
import { renderTemplates } from "./render/templates.js";
import { renderProjection } from "./render/projection.js";
import { renderInstance } from "./render/instance.js";

export interface ViewHtml {
  summary: string;
  templates: string;
  projection: string;
  instance: string;
}

export class App {
  state: ViewState = initialState();
  summary: SummaryPayload | null = null;
  templates: TemplatesPayload | null = null;
  projection: ProjectionPayload | null = null;
  instance: InstancePayload | null = null;
  brushedIds: string[] = [];

  constructor(
    readonly api: ApiClient,
    private readonly onFragment: (fragment: string) => void = () => {},
  ) {}

  /** Rebuild exploration state from a shared URL fragment. */
  restore(fragment: string): void {
    this.state = decodeState(fragment);
  }

  private syncFragment(): void {
    this.onFragment(encodeState(this.state));
  }

  render(): ViewHtml {
    return {
      summary: renderSummary(this.summary),
      templates: renderTemplates(this.templates, this.state.selectedTemplate),
      projection: renderProjection(this.projection, this.state.lasso, this.state.filters),
      instance: renderInstance(this.instance, this.state.instanceSort),
    };
  }

  async loadSummary(): Promise<void> {
    this.summary = await this.api.getSummary();
  }

  /** Brushing a group's barcode extent resolves the covered members to ids. */
  async brushGroup(group: GroupLabel, start: number, end: number): Promise<string[]> {
    this.state.brush = { group, start, end };
    this.syncFragment();
    const resp = await this.api.queryGroup(group, start, end);
    this.brushedIds = resp.ids;
    return resp.ids;
  }

  /** Clicking a template row scopes the projection canvas to its members. */
  async clickTemplate(path: number[], memberIds: string[]): Promise<void> {
    this.state.selectedTemplate = path;
    this.syncFragment();
    this.projection = await this.api.getProjection(this.state.modality, { ids: memberIds });
  }

  /** Completing a lasso opens the first selected instance in the detail view. */
  async lassoSelect(ids: string[]): Promise<void> {
    this.state.lasso = ids;
    this.syncFragment();
    if (ids.length === 0) {
      this.instance = null;
      return;
    }
    this.instance = await this.api.getInstance(ids[0], 3);
  }

  async switchModality(modality: Modality): Promise<void> {
    this.state.modality = modality;
    this.syncFragment();
    const memberIds = this.scopedIds();
    this.projection = await this.api.getProjection(modality, memberIds ? { ids: memberIds } : {});
  }

  async sortTemplates(sort: "support" | "importance" | "error"): Promise<void> {
    this.templates = await this.api.getTemplates({ sort });
  }

  /** Header click: drop every selection and reload the dataset-level summary. */
  async resetFromHeader(): Promise<void> {
    this.state = resetSelections(this.state);
    this.brushedIds = [];
    this.instance = null;
    this.syncFragment();
    this.summary = await this.api.getSummary();
  }

  private scopedIds(): string[] | null {
    if (this.state.lasso.length > 0) {
      return this.state.lasso;
    }
    if (this.brushedIds.length > 0) {
      return this.brushedIds;
    }
    return null;
  }
}
