/** HTTP client for the search service; the only integration surface. */

import { NdjsonDecoder } from "./wire.js";
import type { ClickEventBody, MatchEvent, WireEvent } from "./wire.js";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string; signal?: AbortSignal },
) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export interface SearchRequest {
  query: string;
  session: string;
  limit?: number;
  atqe?: boolean;
}

/** What the UI needs from the service; SearchClient is the real one. */
export interface SearchService {
  search(
    req: SearchRequest,
    onEvent: (ev: WireEvent) => void,
    signal?: AbortSignal,
  ): Promise<void>;
  postClick(body: ClickEventBody): Promise<void>;
  fetchFile(
    repo: string,
    path: string,
    session: string,
    signal?: AbortSignal,
  ): Promise<MatchEvent[]>;
}

/** Results budget used when fetching a whole file through the search API. */
const FILE_VIEW_LIMIT = 100_000;

/** Quote a value for a repo:/path: filter. */
export function quoteFilterValue(value: string): string {
  if (value.includes('"')) {
    throw new Error(`filter value cannot contain a quote: ${value}`);
  }
  return `"${value}"`;
}

/** Filters-only query matching every (non-empty) line of one file. */
export function fileViewQuery(repo: string, path: string): string {
  return `repo:${quoteFilterValue(repo)} path:${quoteFilterValue(path)}`;
}

export class SearchClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  searchUrl(req: SearchRequest): string {
    const params = new URLSearchParams({ q: req.query, session: req.session });
    if (req.limit !== undefined) {
      params.set("limit", String(req.limit));
    }
    if (req.atqe !== undefined) {
      params.set("atqe", req.atqe ? "1" : "0");
    }
    return `${this.baseUrl}/api/search?${params.toString()}`;
  }

  /**
   * Open a streaming search and deliver each wire event as it arrives.
   * Rejected requests (HTTP 4xx with an error body) are delivered as an
   * error event rather than thrown, so callers handle one shape.
   */
  async search(
    req: SearchRequest,
    onEvent: (ev: WireEvent) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const res = await this.fetchImpl(this.searchUrl(req), { signal });
    if (!res.ok) {
      const text = await res.text();
      try {
        const body = JSON.parse(text) as { event?: string };
        if (body && body.event === "error") {
          onEvent(body as WireEvent);
          return;
        }
      } catch {
        // fall through to ServiceError
      }
      throw new ServiceError(res.status, text || `HTTP ${res.status}`);
    }
    if (!res.body) {
      throw new ServiceError(res.status, "response has no body");
    }
    const reader = res.body.getReader();
    const decoder = new NdjsonDecoder();
    for (;;) {
      const { done, value } = await reader.read();
      if (done) {
        break;
      }
      for (const ev of decoder.push(value)) {
        onEvent(ev);
      }
    }
    for (const ev of decoder.flush()) {
      onEvent(ev);
    }
  }

  async postClick(body: ClickEventBody): Promise<void> {
    const res = await this.fetchImpl(`${this.baseUrl}/api/click`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) {
      throw new ServiceError(res.status, await res.text());
    }
  }

  async fetchMetrics(): Promise<Record<string, unknown>> {
    const res = await this.fetchImpl(`${this.baseUrl}/api/metrics`);
    if (!res.ok) {
      throw new ServiceError(res.status, await res.text());
    }
    return (await res.json()) as Record<string, unknown>;
  }

  /**
   * Fetch every line of one file as match events, via a path-scoped
   * filters-only search with alternatives disabled.
   */
  async fetchFile(
    repo: string,
    path: string,
    session: string,
    signal?: AbortSignal,
  ): Promise<MatchEvent[]> {
    const lines: MatchEvent[] = [];
    let failure: string | null = null;
    await this.search(
      { query: fileViewQuery(repo, path), session, limit: FILE_VIEW_LIMIT, atqe: false },
      (ev) => {
        if (ev.event === "match") {
          lines.push(ev);
        } else if (ev.event === "error") {
          failure = ev.message;
        }
      },
      signal,
    );
    if (failure !== null) {
      throw new ServiceError(200, failure);
    }
    return lines;
  }
}
