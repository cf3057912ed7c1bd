import { describe, expect, test } from "vitest";

import { countLabel, NdjsonDecoder, parseWireEvent } from "../src/wire.js";
import type { WireEvent } from "../src/wire.js";

const MATCH = {
  event: "match",
  repo: "webapp",
  path: "src/app.ts",
  line: 3,
  start: 0,
  end: 4,
  text: "naïve text",
  source: { origin: "original" },
};

const DONE = {
  event: "done",
  outcome: {
    original_count: 1,
    triggered: false,
    category: "not_triggered",
    candidates: [],
    total_streamed: 1,
  },
};

function encode(s: string): Uint8Array {
  return new TextEncoder().encode(s);
}

describe("parseWireEvent", () => {
  test("parses each event kind", () => {
    expect(parseWireEvent(JSON.stringify(MATCH)).event).toBe("match");
    expect(parseWireEvent('{"event":"alert","title":"t","proposals":[]}').event).toBe("alert");
    expect(parseWireEvent('{"event":"error","code":"parse","message":"m"}').event).toBe("error");
    expect(parseWireEvent(JSON.stringify(DONE)).event).toBe("done");
  });

  test("rejects non-JSON and unknown events", () => {
    expect(() => parseWireEvent("not json")).toThrow(/not a JSON event/);
    expect(() => parseWireEvent('{"event":"surprise"}')).toThrow(/unknown wire event/);
    expect(() => parseWireEvent('"just a string"')).toThrow(/unknown wire event/);
    expect(() => parseWireEvent("null")).toThrow(/unknown wire event/);
  });
});

describe("NdjsonDecoder", () => {
  test("one event per line, several lines per chunk", () => {
    const decoder = new NdjsonDecoder();
    const events = decoder.push(encode(`${JSON.stringify(MATCH)}\n${JSON.stringify(DONE)}\n`));
    expect(events.map((e) => e.event)).toEqual(["match", "done"]);
    expect(decoder.flush()).toEqual([]);
  });

  test("reassembles a line split across chunks", () => {
    const decoder = new NdjsonDecoder();
    const line = JSON.stringify(MATCH) + "\n";
    const all: WireEvent[] = [];
    // feed one byte at a time: worst-case fragmentation
    for (const byte of encode(line)) {
      all.push(...decoder.push(new Uint8Array([byte])));
    }
    all.push(...decoder.flush());
    expect(all).toHaveLength(1);
    expect(all[0]).toEqual(MATCH);
  });

  test("reassembles a multi-byte character split across chunks", () => {
    const decoder = new NdjsonDecoder();
    const bytes = encode(JSON.stringify(MATCH) + "\n");
    // split inside the two-byte "ï" of "naïve"
    const splitAt = bytes.findIndex((b) => b === 0xc3) + 1;
    expect(splitAt).toBeGreaterThan(0);
    const events = [
      ...decoder.push(bytes.slice(0, splitAt)),
      ...decoder.push(bytes.slice(splitAt)),
      ...decoder.flush(),
    ];
    expect(events).toHaveLength(1);
    expect((events[0] as typeof MATCH).text).toBe("naïve text");
  });

  test("flush parses a final line without a trailing newline", () => {
    const decoder = new NdjsonDecoder();
    expect(decoder.push(encode(JSON.stringify(DONE)))).toEqual([]);
    const events = decoder.flush();
    expect(events).toHaveLength(1);
    expect(events[0]).toEqual(DONE);
  });

  test("ignores blank lines", () => {
    const decoder = new NdjsonDecoder();
    const events = decoder.push(encode(`\n\n${JSON.stringify(DONE)}\n\n`));
    expect(events).toHaveLength(1);
    expect(decoder.flush()).toEqual([]);
  });
});

describe("countLabel", () => {
  test.each([
    [{ count: 1, limit_hit: false }, "1 result"],
    [{ count: 2, limit_hit: false }, "2 results"],
    [{ count: 0, limit_hit: false }, "0 results"],
    [{ count: 9, limit_hit: true }, "9+ results"],
    [{ count: 1, limit_hit: true }, "1+ results"],
  ])("%o renders %s", (proposal, label) => {
    expect(countLabel(proposal)).toBe(label);
  });
});
