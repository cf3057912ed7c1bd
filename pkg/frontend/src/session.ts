/** Client-side session identity: generated once, persisted locally. */

const STORAGE_KEY = "smartsearch.session";

export type SessionStore = Pick<Storage, "getItem" | "setItem">;

export function newSessionId(): string {
  if (typeof crypto !== "undefined" && typeof crypto.randomUUID === "function") {
    return crypto.randomUUID();
  }
  return `s-${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;
}

/**
 * Return the persisted session id, creating and storing one on first use.
 * Falls back to a per-call id when no storage is available.
 */
export function getSessionId(store?: SessionStore | null): string {
  const storage =
    store !== undefined ? store : typeof localStorage !== "undefined" ? localStorage : null;
  if (!storage) {
    return newSessionId();
  }
  const existing = storage.getItem(STORAGE_KEY);
  if (existing !== null && existing !== "") {
    return existing;
  }
  const id = newSessionId();
  storage.setItem(STORAGE_KEY, id);
  return id;
}
