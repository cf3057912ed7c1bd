/**
 * Search screen state: a pure reducer over wire events.
 *
 * Invariants kept here:
 *  - proposals stay null until an alert event arrives (the dialog can never
 *    render without one);
 *  - the result list preserves event arrival order.
 */

import type {
  Category,
  ClickEventBody,
  DoneOutcome,
  MatchEvent,
  Proposal,
  WireEvent,
} from "./wire.js";

export type SearchStatus = "idle" | "streaming" | "done" | "error";

export interface UiSearchState {
  query: string;
  status: SearchStatus;
  /** Match events in arrival order. */
  results: MatchEvent[];
  /** null until the alert event arrives. */
  proposals: Proposal[] | null;
  alertTitle: string | null;
  error: string | null;
  /** Original-provenance matches seen so far. */
  originalCount: number;
  /** Provisional until the done event, then authoritative. */
  category: Category;
  outcome: DoneOutcome | null;
}

export function initialState(): UiSearchState {
  return {
    query: "",
    status: "idle",
    results: [],
    proposals: null,
    alertTitle: null,
    error: null,
    originalCount: 0,
    category: "not_triggered",
    outcome: null,
  };
}

/** Fresh state for a new search; discards everything from the previous one. */
export function startSearch(query: string): UiSearchState {
  return { ...initialState(), query, status: "streaming" };
}

export function reduceEvent(state: UiSearchState, ev: WireEvent): UiSearchState {
  switch (ev.event) {
    case "match": {
      const isOriginal = ev.source.origin === "original";
      return {
        ...state,
        results: [...state.results, ev],
        originalCount: state.originalCount + (isOriginal ? 1 : 0),
      };
    }
    case "alert":
      // An alert means alternatives ran, which only happens for triggered
      // searches; originals have all streamed by now.
      return {
        ...state,
        proposals: ev.proposals,
        alertTitle: ev.title,
        category: state.originalCount === 0 ? "no_results" : "some_results",
      };
    case "error":
      return { ...state, status: "error", error: ev.message };
    case "done":
      return {
        ...state,
        status: "done",
        outcome: ev.outcome,
        category: ev.outcome.category,
      };
  }
}

/** The alternatives dialog renders only when an alert has arrived. */
export function dialogVisible(state: UiSearchState): boolean {
  return state.proposals !== null && state.proposals.length > 0;
}

export function originalResults(state: UiSearchState): MatchEvent[] {
  return state.results.filter((m) => m.source.origin === "original");
}

export function candidateResults(state: UiSearchState): MatchEvent[] {
  return state.results.filter((m) => m.source.origin === "candidate");
}

/**
 * Build the click telemetry body for a rendered result. The provenance is
 * passed through verbatim so the posted fields are exactly what was rendered.
 */
export function clickEventFor(
  state: UiSearchState,
  result: MatchEvent,
  sessionId: string,
  timestamp: number,
): ClickEventBody {
  return {
    session_id: sessionId,
    timestamp,
    source: result.source,
    category_at_search: state.category,
  };
}
