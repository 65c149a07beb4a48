/** FEN parsing and board cell model, mirroring the server's validation. */

export type Color = "white" | "black";

export interface Piece {
  glyph: string;
  color: Color;
}

export interface Board {
  /** ranks[0] is rank 8 (top row), each with 8 cells, null = empty. */
  ranks: (Piece | null)[][];
  sideToMove: Color;
}

export class FenError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "FenError";
  }
}

const GLYPHS: Record<string, string> = {
  K: "♔", Q: "♕", R: "♖", B: "♗", N: "♘", P: "♙",
  k: "♚", q: "♛", r: "♜", b: "♝", n: "♞", p: "♟",
};

export function parseFen(fen: string): Board {
  const fields = fen.trim().split(/\s+/);
  if (fields.length !== 6) {
    throw new FenError(`expected 6 FEN fields, got ${fields.length}`);
  }
  const [placement, side] = [fields[0]!, fields[1]!];
  const rows = placement.split("/");
  if (rows.length !== 8) {
    throw new FenError(`expected 8 ranks, got ${rows.length}`);
  }
  if (side !== "w" && side !== "b") {
    throw new FenError(`bad side to move ${JSON.stringify(side)}`);
  }

  const counts: Record<string, number> = {};
  const ranks: (Piece | null)[][] = [];
  for (let r = 0; r < 8; r += 1) {
    const cells: (Piece | null)[] = [];
    for (const ch of rows[r]!) {
      if (/[1-8]/.test(ch)) {
        for (let i = 0; i < Number(ch); i += 1) cells.push(null);
      } else if (ch in GLYPHS) {
        if ((ch === "P" || ch === "p") && (r === 0 || r === 7)) {
          throw new FenError("pawn on a back rank");
        }
        counts[ch] = (counts[ch] ?? 0) + 1;
        cells.push({ glyph: GLYPHS[ch]!, color: ch === ch.toUpperCase() ? "white" : "black" });
      } else {
        throw new FenError(`bad placement character ${JSON.stringify(ch)}`);
      }
    }
    if (cells.length !== 8) {
      throw new FenError(`rank ${8 - r} has ${cells.length} squares`);
    }
    ranks.push(cells);
  }
  if ((counts["K"] ?? 0) !== 1 || (counts["k"] ?? 0) !== 1) {
    throw new FenError("each side needs exactly one king");
  }
  if ((counts["P"] ?? 0) > 8 || (counts["p"] ?? 0) > 8) {
    throw new FenError("more than 8 pawns for one side");
  }
  return { ranks, sideToMove: side === "w" ? "white" : "black" };
}

export function pieceCount(board: Board): number {
  return board.ranks.flat().filter((cell) => cell !== null).length;
}

/**
 * Cell model for rendering: `null` FEN (or an unparsable one) yields null,
 * which the caller renders as the "no board available" placeholder.
 */
export function boardOrPlaceholder(fen: string | null): Board | null {
  if (!fen) return null;
  try {
    return parseFen(fen);
  } catch {
    return null;
  }
}
