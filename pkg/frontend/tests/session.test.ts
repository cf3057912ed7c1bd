import { describe, expect, test } from "vitest";

import { getSessionId, newSessionId, type SessionStore } from "../src/session.js";

class MemoryStore implements SessionStore {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }
}

describe("getSessionId", () => {
  test("creates an id once and persists it", () => {
    const store = new MemoryStore();
    const first = getSessionId(store);
    expect(first).not.toBe("");
    expect(getSessionId(store)).toBe(first);
    expect(store.getItem("smartsearch.session")).toBe(first);
  });

  test("respects an id that is already stored", () => {
    const store = new MemoryStore();
    store.setItem("smartsearch.session", "existing-user");
    expect(getSessionId(store)).toBe("existing-user");
  });

  test("treats an empty stored value as missing", () => {
    const store = new MemoryStore();
    store.setItem("smartsearch.session", "");
    expect(getSessionId(store)).not.toBe("");
  });

  test("without any storage, still returns usable ids", () => {
    const a = getSessionId(null);
    const b = getSessionId(null);
    expect(a).not.toBe("");
    expect(b).not.toBe("");
    expect(a).not.toBe(b);
  });
});

describe("newSessionId", () => {
  test("ids are non-empty and unique", () => {
    const ids = new Set(Array.from({ length: 100 }, () => newSessionId()));
    expect(ids.size).toBe(100);
    for (const id of ids) {
      expect(id.length).toBeGreaterThan(8);
    }
  });
});
