/**
 * Search orchestration, DOM-free. One in-flight search at a time: starting a
 * new one aborts the previous stream, and events from a superseded stream
 * never reach the state.
 */

import type { SearchService } from "./client.js";
import {
  clickEventFor,
  initialState,
  reduceEvent,
  startSearch,
  type UiSearchState,
} from "./state.js";
import type { MatchEvent, Proposal } from "./wire.js";

export interface FileViewLine {
  line: number;
  text: string;
}

export interface FileView {
  repo: string;
  path: string;
  /** 1-based line the view should scroll to and highlight. */
  anchorLine: number;
  lines: FileViewLine[];
}

export interface ControllerOptions {
  /** Display limit passed to every search (service default when omitted). */
  limit?: number;
  /** Explicit alternatives toggle (service default when omitted). */
  atqe?: boolean;
  /** Clock used for click timestamps; defaults to Date.now. */
  now?: () => number;
}

function isAbortError(err: unknown): boolean {
  return err instanceof Error && err.name === "AbortError";
}

export class SearchController {
  state: UiSearchState = initialState();

  private inflight: AbortController | null = null;
  private generation = 0;
  private readonly listeners: Array<(state: UiSearchState) => void> = [];

  constructor(
    private readonly client: SearchService,
    readonly sessionId: string,
    private readonly options: ControllerOptions = {},
  ) {}

  onChange(listener: (state: UiSearchState) => void): void {
    this.listeners.push(listener);
  }

  private setState(state: UiSearchState): void {
    this.state = state;
    for (const listener of this.listeners) {
      listener(state);
    }
  }

  /** Run a search, aborting any stream still in flight. */
  async runSearch(query: string): Promise<UiSearchState> {
    this.inflight?.abort();
    const aborter = new AbortController();
    this.inflight = aborter;
    const generation = ++this.generation;
    this.setState(startSearch(query));
    try {
      await this.client.search(
        {
          query,
          session: this.sessionId,
          limit: this.options.limit,
          atqe: this.options.atqe,
        },
        (ev) => {
          if (generation === this.generation) {
            this.setState(reduceEvent(this.state, ev));
          }
        },
        aborter.signal,
      );
    } catch (err) {
      if (generation === this.generation && !isAbortError(err)) {
        this.setState({
          ...this.state,
          status: "error",
          error: err instanceof Error ? err.message : String(err),
        });
      }
      // a superseded stream's abort (or anything else it throws) is expected
    } finally {
      if (this.inflight === aborter) {
        this.inflight = null;
      }
    }
    return this.state;
  }

  /** Replace the query with the proposal's rendered form and re-run. */
  async applyProposal(proposal: Proposal): Promise<UiSearchState> {
    return this.runSearch(proposal.query);
  }

  /** Post a click event carrying the result's exact provenance. */
  async reportClick(result: MatchEvent): Promise<void> {
    const now = this.options.now ?? Date.now;
    await this.client.postClick(clickEventFor(this.state, result, this.sessionId, now()));
  }

  /** Fetch the clicked file as a read-only view anchored at the match line. */
  async openFileView(result: MatchEvent): Promise<FileView> {
    const matches = await this.client.fetchFile(result.repo, result.path, this.sessionId);
    return {
      repo: result.repo,
      path: result.path,
      anchorLine: result.line,
      lines: fillLineGaps(matches),
    };
  }
}

/**
 * Lay streamed file lines out as 1..max, restoring blank lines (which a
 * filters-only search never emits) as empty text.
 */
export function fillLineGaps(matches: MatchEvent[]): FileViewLine[] {
  const byLine = new Map<number, string>();
  let max = 0;
  for (const m of matches) {
    byLine.set(m.line, m.text);
    if (m.line > max) {
      max = m.line;
    }
  }
  const lines: FileViewLine[] = [];
  for (let line = 1; line <= max; line++) {
    lines.push({ line, text: byLine.get(line) ?? "" });
  }
  return lines;
}
