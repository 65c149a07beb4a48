/** Sentence segmentation around the highlighted predicate span. */

export interface SentenceSegments {
  before: string;
  verb: string;
  after: string;
}

export class SpanError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "SpanError";
  }
}

/**
 * Split the sentence at the predicate span so the verb can be bolded and
 * tagged. Offset fidelity: before + verb + after always reassembles the
 * original text, and verb === text.slice(start, end).
 */
export function segmentSentence(text: string, span: [number, number]): SentenceSegments {
  const [start, end] = span;
  if (start < 0 || end > text.length || start > end) {
    throw new SpanError(`span [${start}, ${end}) outside text of length ${text.length}`);
  }
  if (start === end) {
    throw new SpanError("zero-length predicate span");
  }
  return {
    before: text.slice(0, start),
    verb: text.slice(start, end),
    after: text.slice(end),
  };
}
