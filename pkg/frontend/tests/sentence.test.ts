import { describe, expect, it } from "vitest";

import { segmentSentence, SpanError } from "../src/sentence.js";

const TEXT = "It is Black's move, and we will suppose he wishes to play e5.";

describe("segmentSentence", () => {
  it("isolates the verb at its exact offsets", () => {
    const start = TEXT.indexOf("play");
    const segments = segmentSentence(TEXT, [start, start + 4]);
    expect(segments.verb).toBe("play");
    expect(segments.before + segments.verb + segments.after).toBe(TEXT);
    expect(segments.verb).toBe(TEXT.slice(start, start + 4));
  });

  it("handles a span at the start of the text", () => {
    const segments = segmentSentence("Play e4 now.", [0, 4]);
    expect(segments.before).toBe("");
    expect(segments.verb).toBe("Play");
    expect(segments.after).toBe(" e4 now.");
  });

  it("handles a span at the end of the text", () => {
    const segments = segmentSentence("He wishes to play", [13, 17]);
    expect(segments.verb).toBe("play");
    expect(segments.after).toBe("");
  });

  it("rejects a zero-length span", () => {
    expect(() => segmentSentence(TEXT, [5, 5])).toThrow(SpanError);
  });

  it("rejects out-of-bounds spans", () => {
    expect(() => segmentSentence(TEXT, [-1, 4])).toThrow(SpanError);
    expect(() => segmentSentence(TEXT, [0, TEXT.length + 1])).toThrow(SpanError);
    expect(() => segmentSentence(TEXT, [10, 5])).toThrow(SpanError);
  });
});
