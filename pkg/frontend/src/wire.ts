/** Wire protocol shared with the search service: NDJSON events over HTTP. */

export type Category = "not_triggered" | "no_results" | "some_results";

export interface OriginalProvenance {
  origin: "original";
}

export interface CandidateProvenance {
  origin: "candidate";
  rank: number;
  rules: string[];
}

export type Provenance = OriginalProvenance | CandidateProvenance;

export interface MatchEvent {
  event: "match";
  repo: string;
  path: string;
  line: number;
  start: number;
  end: number;
  text: string;
  source: Provenance;
}

export interface Proposal {
  description: string;
  query: string;
  count: number;
  limit_hit: boolean;
  rules: string[];
}

export interface AlertEvent {
  event: "alert";
  title: string;
  proposals: Proposal[];
}

export interface ErrorEvent {
  event: "error";
  code: string;
  message: string;
}

export interface CandidateOutcome {
  rank: number;
  rendered: string;
  description: string;
  applied_rules: string[];
  streamed_count: number;
  limit_hit: boolean;
}

export interface DoneOutcome {
  original_count: number;
  triggered: boolean;
  category: Category;
  candidates: CandidateOutcome[];
  total_streamed: number;
}

export interface DoneEvent {
  event: "done";
  outcome: DoneOutcome;
}

export type WireEvent = MatchEvent | AlertEvent | ErrorEvent | DoneEvent;

export interface ClickEventBody {
  session_id: string;
  timestamp: number;
  source: Provenance;
  category_at_search: Category;
}

const EVENT_KINDS = new Set(["match", "alert", "error", "done"]);

/** Parse one NDJSON line into a wire event; throws on anything else. */
export function parseWireEvent(line: string): WireEvent {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch {
    throw new Error(`not a JSON event: ${line.slice(0, 80)}`);
  }
  if (
    typeof obj !== "object" ||
    obj === null ||
    !EVENT_KINDS.has((obj as { event?: unknown }).event as string)
  ) {
    throw new Error(`unknown wire event: ${line.slice(0, 80)}`);
  }
  return obj as WireEvent;
}

/**
 * Incremental NDJSON decoder: feed raw body chunks, get complete events.
 * Lines (and multi-byte characters) may be split across chunks.
 */
export class NdjsonDecoder {
  private buffer = "";
  private readonly decoder = new TextDecoder("utf-8");

  push(chunk: Uint8Array): WireEvent[] {
    this.buffer += this.decoder.decode(chunk, { stream: true });
    return this.drain();
  }

  /** Call once at end of stream; decodes any buffered partial line. */
  flush(): WireEvent[] {
    this.buffer += this.decoder.decode();
    const events = this.drain();
    const rest = this.buffer.trim();
    this.buffer = "";
    if (rest !== "") {
      events.push(parseWireEvent(rest));
    }
    return events;
  }

  private drain(): WireEvent[] {
    const events: WireEvent[] = [];
    let nl: number;
    while ((nl = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, nl).trim();
      this.buffer = this.buffer.slice(nl + 1);
      if (line !== "") {
        events.push(parseWireEvent(line));
      }
    }
    return events;
  }
}

/** "1 result", "2 results", "9+ results" (limit_hit means at least N). */
export function countLabel(proposal: Pick<Proposal, "count" | "limit_hit">): string {
  const n = `${proposal.count}${proposal.limit_hit ? "+" : ""}`;
  const noun = proposal.count === 1 && !proposal.limit_hit ? "result" : "results";
  return `${n} ${noun}`;
}
