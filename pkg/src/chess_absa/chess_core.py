"""SAN move and FEN board parsing, serialization, and move application.

Validation is pseudo-legal only: piece movement rules, blocking, and
castling/en-passant rights.  Check and pin legality are left to the
engine, which rejects illegal input anyway.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional


class ChessError(Exception):
    pass


class MalformedSan(ChessError):
    """Token does not parse as a SAN move."""


class MalformedFen(ChessError):
    """Text does not parse as a FEN board state."""


class IllegalMove(ChessError):
    """Move cannot be applied to the given board."""


class Color(str, Enum):
    WHITE = "White"
    BLACK = "Black"

    @property
    def opponent(self) -> "Color":
        return Color.BLACK if self is Color.WHITE else Color.WHITE


class Piece(str, Enum):
    PAWN = "P"
    KNIGHT = "N"
    BISHOP = "B"
    ROOK = "R"
    QUEEN = "Q"
    KING = "K"


FILES = "abcdefgh"
RANKS = "12345678"

PIECE_NAMES = {
    Piece.PAWN: "Pawn",
    Piece.KNIGHT: "Knight",
    Piece.BISHOP: "Bishop",
    Piece.ROOK: "Rook",
    Piece.QUEEN: "Queen",
    Piece.KING: "King",
}


@dataclass(frozen=True)
class Square:
    file: str  # a-h
    rank: int  # 1-8

    def __post_init__(self):
        if self.file not in FILES or not 1 <= self.rank <= 8:
            raise ValueError(f"bad square {self.file}{self.rank}")

    @classmethod
    def parse(cls, text: str) -> "Square":
        if len(text) != 2:
            raise ValueError(f"bad square {text!r}")
        return cls(text[0], int(text[1]))

    def __str__(self) -> str:
        return f"{self.file}{self.rank}"


@dataclass(frozen=True)
class Move:
    piece: Piece = Piece.PAWN
    destination: Optional[Square] = None
    origin_file: Optional[str] = None
    origin_rank: Optional[int] = None
    capture: bool = False
    promotion: Optional[Piece] = None
    castle: Optional[str] = None  # "kingside" | "queenside"
    check_marker: Optional[str] = None  # "check" | "mate"
    move_number: Optional[int] = None
    side_hint: Optional[Color] = None  # from "5." vs "5..." prefixes
    en_passant_hint: bool = False  # "e.p." suffix seen in the source text

    def san(self) -> str:
        """Canonical SAN string; round-trips through parse_san."""
        parts = []
        if self.move_number is not None:
            dots = "..." if self.side_hint is Color.BLACK else "."
            parts.append(f"{self.move_number}{dots}")
        if self.castle:
            parts.append("O-O" if self.castle == "kingside" else "O-O-O")
        else:
            if self.piece is not Piece.PAWN:
                parts.append(self.piece.value)
            if self.origin_file:
                parts.append(self.origin_file)
            if self.origin_rank:
                parts.append(str(self.origin_rank))
            if self.capture:
                parts.append("x")
            parts.append(str(self.destination))
            if self.promotion:
                parts.append(f"={self.promotion.value}")
        if self.en_passant_hint:
            parts.append(" e.p.")
        if self.check_marker:
            parts.append("+" if self.check_marker == "check" else "#")
        return "".join(parts)


@dataclass(frozen=True)
class MoveSequence:
    moves: tuple[Move, ...]

    def __post_init__(self):
        if not self.moves:
            raise ValueError("move sequence must be non-empty")

    def san(self) -> str:
        return " ".join(m.san() for m in self.moves)


_SAN_RE = re.compile(
    r"^(?:(?P<num>\d+)(?P<dots>\.{1,3})\s*)?"
    r"(?:(?P<castle>[O0]-[O0](?:-[O0])?)"
    r"|(?P<piece>[KQRBN])?(?P<ofile>[a-h])?(?P<orank>[1-8])?(?P<cap>x)?"
    r"(?P<dest>[a-h][1-8])(?:=(?P<promo>[QRBN]))?)"
    r"(?P<ep>\s*e\.p\.?)?"
    r"(?P<chk>[+#])?$"
)


def parse_san(text: str) -> Move:
    """Parse one SAN token, optionally prefixed by a move number.

    Accepts check/mate suffixes, capture markers, "e.p." and ignores
    annotation glyphs (!, ?).  Raises MalformedSan otherwise.
    """
    token = text.strip().rstrip("!?")
    if not token:
        raise MalformedSan(f"empty move token: {text!r}")
    m = _SAN_RE.match(token)
    if m is None:
        raise MalformedSan(f"not a SAN move: {text!r}")

    move_number = int(m.group("num")) if m.group("num") else None
    side_hint = None
    if m.group("num"):
        side_hint = Color.BLACK if len(m.group("dots")) == 3 else Color.WHITE

    check_marker = None
    if m.group("chk"):
        check_marker = "check" if m.group("chk") == "+" else "mate"

    if m.group("castle"):
        castle = "queenside" if m.group("castle").count("-") == 2 else "kingside"
        return Move(
            piece=Piece.KING,
            castle=castle,
            check_marker=check_marker,
            move_number=move_number,
            side_hint=side_hint,
        )

    piece = Piece(m.group("piece")) if m.group("piece") else Piece.PAWN
    dest = Square.parse(m.group("dest"))
    promo = Piece(m.group("promo")) if m.group("promo") else None
    capture = bool(m.group("cap"))
    origin_file = m.group("ofile")
    origin_rank = int(m.group("orank")) if m.group("orank") else None

    if promo is not None:
        if piece is not Piece.PAWN:
            raise MalformedSan(f"promotion on non-pawn move: {text!r}")
        if dest.rank not in (1, 8):
            raise MalformedSan(f"promotion not on back rank: {text!r}")
    if piece is Piece.PAWN and promo is None and dest.rank in (1, 8):
        raise MalformedSan(f"pawn move to back rank without promotion: {text!r}")
    # "cxd4" style is fine; a pawn push with a stray rank hint ("1e4") is not.
    if piece is Piece.PAWN and origin_rank is not None:
        raise MalformedSan(f"pawn move with rank disambiguator: {text!r}")
    if piece is Piece.PAWN and origin_file is not None and not capture:
        raise MalformedSan(f"pawn origin file without capture: {text!r}")

    return Move(
        piece=piece,
        destination=dest,
        origin_file=origin_file,
        origin_rank=origin_rank,
        capture=capture,
        promotion=promo,
        check_marker=check_marker,
        move_number=move_number,
        side_hint=side_hint,
        en_passant_hint=bool(m.group("ep")),
    )


# Board representation: tuple of 64 entries indexed (rank-1)*8 + file,
# each None or (Piece, Color).

def _idx(file: str, rank: int) -> int:
    return (rank - 1) * 8 + FILES.index(file)


def _sq(index: int) -> Square:
    return Square(FILES[index % 8], index // 8 + 1)


@dataclass(frozen=True)
class BoardState:
    placement: tuple  # 64 x Optional[(Piece, Color)]
    turn: Color = Color.WHITE
    castling_wk: bool = False
    castling_wq: bool = False
    castling_bk: bool = False
    castling_bq: bool = False
    en_passant: Optional[Square] = None
    halfmove_clock: int = 0
    fullmove_number: int = 1

    def piece_at(self, sq: Square):
        return self.placement[_idx(sq.file, sq.rank)]

    def fen(self) -> str:
        rows = []
        for rank in range(8, 0, -1):
            row = ""
            empty = 0
            for f in FILES:
                cell = self.placement[_idx(f, rank)]
                if cell is None:
                    empty += 1
                else:
                    if empty:
                        row += str(empty)
                        empty = 0
                    piece, color = cell
                    row += piece.value if color is Color.WHITE else piece.value.lower()
            if empty:
                row += str(empty)
            rows.append(row)
        castling = "".join(
            c
            for c, ok in zip(
                "KQkq",
                (self.castling_wk, self.castling_wq, self.castling_bk, self.castling_bq),
            )
            if ok
        ) or "-"
        ep = str(self.en_passant) if self.en_passant else "-"
        turn = "w" if self.turn is Color.WHITE else "b"
        return (
            f"{'/'.join(rows)} {turn} {castling} {ep} "
            f"{self.halfmove_clock} {self.fullmove_number}"
        )


INITIAL_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"


def parse_fen(text: str) -> BoardState:
    fields = text.split()
    if len(fields) != 6:
        raise MalformedFen(f"expected 6 FEN fields, got {len(fields)}")
    placement_f, turn_f, castling_f, ep_f, half_f, full_f = fields

    ranks = placement_f.split("/")
    if len(ranks) != 8:
        raise MalformedFen(f"expected 8 ranks, got {len(ranks)}")
    cells: list = [None] * 64
    for i, row in enumerate(ranks):
        rank = 8 - i
        file_i = 0
        for ch in row:
            if ch.isdigit():
                if ch == "0" or ch == "9":
                    raise MalformedFen(f"bad run length {ch!r} in rank {rank}")
                file_i += int(ch)
            else:
                if ch.upper() not in "PNBRQK":
                    raise MalformedFen(f"invalid piece letter {ch!r}")
                if file_i >= 8:
                    raise MalformedFen(f"rank {rank} overflows 8 files")
                color = Color.WHITE if ch.isupper() else Color.BLACK
                cells[(rank - 1) * 8 + file_i] = (Piece(ch.upper()), color)
                file_i += 1
        if file_i != 8:
            raise MalformedFen(f"rank {rank} sums to {file_i}, expected 8")

    if turn_f not in ("w", "b"):
        raise MalformedFen(f"bad turn field {turn_f!r}")
    if castling_f != "-" and not re.fullmatch(r"K?Q?k?q?", castling_f):
        raise MalformedFen(f"bad castling field {castling_f!r}")
    if ep_f != "-":
        try:
            ep = Square.parse(ep_f)
        except ValueError as e:
            raise MalformedFen(str(e)) from None
    else:
        ep = None
    if not half_f.isdigit():
        raise MalformedFen(f"bad halfmove clock {half_f!r}")
    if not full_f.isdigit() or int(full_f) < 1:
        raise MalformedFen(f"bad fullmove number {full_f!r}")

    board = BoardState(
        placement=tuple(cells),
        turn=Color.WHITE if turn_f == "w" else Color.BLACK,
        castling_wk="K" in castling_f,
        castling_wq="Q" in castling_f,
        castling_bk="k" in castling_f,
        castling_bq="q" in castling_f,
        en_passant=ep,
        halfmove_clock=int(half_f),
        fullmove_number=int(full_f),
    )
    _check_position(board)
    return board


def _check_position(board: BoardState) -> None:
    for color in (Color.WHITE, Color.BLACK):
        kings = sum(1 for c in board.placement if c == (Piece.KING, color))
        if kings != 1:
            raise MalformedFen(f"{color.value} has {kings} kings")
        pawns = sum(1 for c in board.placement if c == (Piece.PAWN, color))
        if pawns > 8:
            raise MalformedFen(f"{color.value} has {pawns} pawns")
    for i, cell in enumerate(board.placement):
        if cell and cell[0] is Piece.PAWN and i // 8 in (0, 7):
            raise MalformedFen("pawn on back rank")


_KNIGHT_DELTAS = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]


def _path_clear(board: BoardState, src: int, dst: int, df: int, dr: int) -> bool:
    f, r = src % 8, src // 8
    tf, tr = dst % 8, dst // 8
    f, r = f + df, r + dr
    while (f, r) != (tf, tr):
        if board.placement[r * 8 + f] is not None:
            return False
        f, r = f + df, r + dr
    return True


def _can_reach(board: BoardState, src: int, dst: int, piece: Piece, color: Color,
               capture: bool) -> bool:
    """Pseudo-legal reachability from src to dst, including pawn semantics."""
    sf, sr = src % 8, src // 8
    tf, tr = dst % 8, dst // 8
    df, dr = tf - sf, tr - sr
    if (df, dr) == (0, 0):
        return False
    if piece is Piece.KNIGHT:
        return (df, dr) in _KNIGHT_DELTAS
    if piece is Piece.KING:
        return max(abs(df), abs(dr)) == 1
    if piece is Piece.PAWN:
        forward = 1 if color is Color.WHITE else -1
        start_rank = 1 if color is Color.WHITE else 6
        if capture:
            return abs(df) == 1 and dr == forward
        if df != 0:
            return False
        if dr == forward:
            return True
        if dr == 2 * forward and sr == start_rank:
            middle = (sr + forward) * 8 + sf
            return board.placement[middle] is None
        return False
    diagonal = abs(df) == abs(dr)
    straight = df == 0 or dr == 0
    if piece is Piece.BISHOP and not diagonal:
        return False
    if piece is Piece.ROOK and not straight:
        return False
    if piece is Piece.QUEEN and not (diagonal or straight):
        return False
    step = ((df > 0) - (df < 0), (dr > 0) - (dr < 0))
    return _path_clear(board, src, dst, *step)


def _resolve_origin(board: BoardState, move: Move) -> int:
    """Find the unique origin square index for a SAN move on this board."""
    if move.castle:
        rank = 1 if board.turn is Color.WHITE else 8
        return _idx("e", rank)
    dest = _idx(move.destination.file, move.destination.rank)
    target = board.placement[dest]
    is_ep_capture = (
        move.piece is Piece.PAWN
        and board.en_passant is not None
        and move.destination == board.en_passant
        and move.capture
    )
    if move.capture and target is None and not is_ep_capture:
        raise IllegalMove(f"{move.san()}: nothing to capture on {move.destination}")
    if target is not None and target[1] is board.turn:
        raise IllegalMove(f"{move.san()}: destination occupied by own piece")
    if not move.capture and target is not None:
        raise IllegalMove(f"{move.san()}: destination occupied (missing capture marker)")

    candidates = []
    for src, cell in enumerate(board.placement):
        if cell != (move.piece, board.turn):
            continue
        if move.origin_file and src % 8 != FILES.index(move.origin_file):
            continue
        if move.origin_rank and src // 8 != move.origin_rank - 1:
            continue
        if _can_reach(board, src, dest, move.piece, board.turn, move.capture):
            candidates.append(src)
    if not candidates:
        raise IllegalMove(f"{move.san()}: no piece can reach {move.destination}")
    if len(candidates) > 1:
        raise IllegalMove(f"{move.san()}: ambiguous without a disambiguator")
    return candidates[0]


def apply_move(board: BoardState, move: Move) -> BoardState:
    """Apply a pseudo-legal SAN move, returning the successor board."""
    cells = list(board.placement)
    color = board.turn
    back = 0 if color is Color.WHITE else 7

    if move.castle:
        if color is Color.WHITE:
            right = board.castling_wk if move.castle == "kingside" else board.castling_wq
        else:
            right = board.castling_bk if move.castle == "kingside" else board.castling_bq
        if not right:
            raise IllegalMove(f"{move.san()}: castling right revoked")
        king_src = back * 8 + 4
        if cells[king_src] != (Piece.KING, color):
            raise IllegalMove(f"{move.san()}: king not on its home square")
        if move.castle == "kingside":
            rook_src, king_dst, rook_dst, between = back * 8 + 7, back * 8 + 6, back * 8 + 5, [5, 6]
        else:
            rook_src, king_dst, rook_dst, between = back * 8 + 0, back * 8 + 2, back * 8 + 3, [1, 2, 3]
        if cells[rook_src] != (Piece.ROOK, color):
            raise IllegalMove(f"{move.san()}: rook missing for castling")
        if any(cells[back * 8 + f] is not None for f in between):
            raise IllegalMove(f"{move.san()}: castling path blocked")
        cells[king_src] = None
        cells[rook_src] = None
        cells[king_dst] = (Piece.KING, color)
        cells[rook_dst] = (Piece.ROOK, color)
        capture = False
        pawn_move = False
        src, dst = king_src, king_dst
    else:
        src = _resolve_origin(board, move)
        dst = _idx(move.destination.file, move.destination.rank)
        is_ep = (
            move.piece is Piece.PAWN
            and board.en_passant is not None
            and move.destination == board.en_passant
            and move.capture
            and cells[dst] is None
        )
        capture = cells[dst] is not None or is_ep
        pawn_move = move.piece is Piece.PAWN
        cells[src] = None
        cells[dst] = ((move.promotion or move.piece), color)
        if is_ep:
            taken_rank = move.destination.rank - (1 if color is Color.WHITE else -1)
            cells[_idx(move.destination.file, taken_rank)] = None

    # castling rights follow king and rook home squares
    wk, wq, bk, bq = (board.castling_wk, board.castling_wq,
                      board.castling_bk, board.castling_bq)
    for sqi in (src, dst):
        if sqi == 4:
            wk = wq = False
        elif sqi == 60:
            bk = bq = False
        elif sqi == 0:
            wq = False
        elif sqi == 7:
            wk = False
        elif sqi == 56:
            bq = False
        elif sqi == 63:
            bk = False
    if move.castle:
        if color is Color.WHITE:
            wk = wq = False
        else:
            bk = bq = False

    ep = None
    if pawn_move and abs(dst // 8 - src // 8) == 2:
        ep = _sq((src + dst) // 2)

    return BoardState(
        placement=tuple(cells),
        turn=color.opponent,
        castling_wk=wk,
        castling_wq=wq,
        castling_bk=bk,
        castling_bq=bq,
        en_passant=ep,
        halfmove_clock=0 if (pawn_move or capture) else board.halfmove_clock + 1,
        fullmove_number=board.fullmove_number + (1 if color is Color.BLACK else 0),
    )


def san_to_engine_coords(board: BoardState, move: Move) -> str:
    """Long-algebraic coordinate form ("e2e4", "e7e8q") for a UCI engine."""
    if move.castle:
        back = 1 if board.turn is Color.WHITE else 8
        king_src = _idx("e", back)
        if board.placement[king_src] != (Piece.KING, board.turn):
            raise IllegalMove(f"{move.san()}: king not on its home square")
        dst_file = "g" if move.castle == "kingside" else "c"
        return f"e{back}{dst_file}{back}"
    src = _resolve_origin(board, move)
    coords = f"{_sq(src)}{move.destination}"
    if move.promotion:
        coords += move.promotion.value.lower()
    return coords
