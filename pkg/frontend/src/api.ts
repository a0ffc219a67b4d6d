/**
 * Thin client for the modallens query API.
 *
 * Every user interaction maps to exactly one request, and every request is
 * appended to `log` in the canonical "METHOD path" form (POST entries also
 * record their JSON body). Each logical view owns at most one in-flight
 * request: issuing a new one aborts its predecessor (cancel-on-supersede).
 */

import {
  GroupLabel,
  GroupQueryResponse,
  InstancePayload,
  Modality,
  ProjectionPayload,
  SummaryPayload,
  TemplatesPayload,
} from "./types.js";

export interface RequestLogEntry {
  method: "GET" | "POST";
  path: string; // path + query string, relative to the base URL
  body?: unknown; // JSON body for POST requests
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

type ViewKey = "summary" | "groups" | "templates" | "projection" | "instance" | "metrics" | "meta";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`API error ${status}`);
  }
}

export class ApiClient {
  readonly log: RequestLogEntry[] = [];
  private readonly inflight = new Map<ViewKey, AbortController>();

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(view: ViewKey, entry: RequestLogEntry): Promise<T> {
    const previous = this.inflight.get(view);
    if (previous) {
      previous.abort();
    }
    const controller = new AbortController();
    this.inflight.set(view, controller);
    this.log.push(entry);

    const init: RequestInit = { method: entry.method, signal: controller.signal };
    if (entry.body !== undefined) {
      init.body = JSON.stringify(entry.body);
      init.headers = { "content-type": "application/json" };
    }
    try {
      const resp = await this.fetchImpl(this.baseUrl + entry.path, init);
      const data = await resp.json();
      if (!resp.ok) {
        throw new ApiError(resp.status, data);
      }
      return data as T;
    } finally {
      if (this.inflight.get(view) === controller) {
        this.inflight.delete(view);
      }
    }
  }

  getSummary(): Promise<SummaryPayload> {
    return this.request("summary", { method: "GET", path: "/summary" });
  }

  /** Brushing a group barcode resolves the covered member-index range to ids. */
  queryGroup(group: GroupLabel, start: number, end: number): Promise<GroupQueryResponse> {
    return this.request("groups", {
      method: "POST",
      path: "/groups/query",
      body: { group, start, end },
    });
  }

  getTemplates(opts: { sort?: string; group?: GroupLabel; ids?: string[] } = {}): Promise<TemplatesPayload> {
    const params = new URLSearchParams();
    if (opts.sort) {
      params.set("sort", opts.sort);
    }
    if (opts.group) {
      params.set("group", opts.group);
    }
    if (opts.ids && opts.ids.length > 0) {
      params.set("ids", opts.ids.join(","));
    }
    const qs = params.toString();
    return this.request("templates", { method: "GET", path: qs ? `/templates?${qs}` : "/templates" });
  }

  getProjection(modality: Modality, opts: { ids?: string[]; heatMode?: "error" | "importance" } = {}): Promise<ProjectionPayload> {
    const params = new URLSearchParams();
    params.set("modality", modality);
    if (opts.ids && opts.ids.length > 0) {
      params.set("ids", opts.ids.join(","));
    }
    if (opts.heatMode) {
      params.set("heat_mode", opts.heatMode);
    }
    return this.request("projection", { method: "GET", path: `/projection?${params.toString()}` });
  }

  getInstance(id: string, topK = 3): Promise<InstancePayload> {
    return this.request("instance", {
      method: "GET",
      path: `/instances/${encodeURIComponent(id)}?top_k=${topK}`,
    });
  }

  getMetrics(): Promise<Record<string, unknown>> {
    return this.request("metrics", { method: "GET", path: "/metrics" });
  }

  getMeta(): Promise<Record<string, unknown>> {
    return this.request("meta", { method: "GET", path: "/meta" });
  }
}
