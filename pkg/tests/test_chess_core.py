import pytest
from hypothesis import given, strategies as st

from chess_absa.chess_core import (
    INITIAL_FEN, BoardState, Color, IllegalMove, MalformedFen, MalformedSan,
    Move, Piece, Square, apply_move, parse_fen, parse_san,
    san_to_engine_coords,
)


class TestParseSan:
    def test_pawn_move(self):
        m = parse_san("e5")
        assert m.piece is Piece.PAWN
        assert m.destination == Square("e", 5)
        assert not m.capture

    def test_knight_move(self):
        m = parse_san("Nf3")
        assert m.piece is Piece.KNIGHT
        assert m.destination == Square("f", 3)

    def test_move_number_white(self):
        m = parse_san("5.b3")
        assert m.move_number == 5
        assert m.side_hint is Color.WHITE
        assert m.destination == Square("b", 3)

    def test_move_number_black(self):
        m = parse_san("5...e5")
        assert m.side_hint is Color.BLACK

    def test_castles(self):
        assert parse_san("O-O").castle == "kingside"
        assert parse_san("O-O-O").castle == "queenside"
        assert parse_san("0-0").castle == "kingside"

    def test_capture_and_check(self):
        m = parse_san("Bxe5+")
        assert m.capture and m.check_marker == "check"
        assert parse_san("Qxf7#").check_marker == "mate"

    def test_promotion(self):
        m = parse_san("e8=Q")
        assert m.promotion is Piece.QUEEN

    def test_annotation_glyphs_ignored(self):
        assert parse_san("e4!?") == parse_san("e4")

    def test_disambiguators(self):
        m = parse_san("Rad1")
        assert m.origin_file == "a"
        m = parse_san("N1f3")
        assert m.origin_rank == 1

    @pytest.mark.parametrize("bad", ["Zz9", "", "e9", "i4", "Nf", "e", "5.",
                                     "Kxe9", "e1", "Qe8=Q", "Pe4x"])
    def test_malformed(self, bad):
        with pytest.raises(MalformedSan):
            parse_san(bad)


squares = st.builds(Square, st.sampled_from("abcdefgh"), st.integers(1, 8))


@st.composite
def moves(draw):
    if draw(st.booleans()) and draw(st.integers(0, 9)) == 0:
        return Move(piece=Piece.KING,
                    castle=draw(st.sampled_from(["kingside", "queenside"])),
                    check_marker=draw(st.sampled_from([None, "check", "mate"])))
    piece = draw(st.sampled_from(list(Piece)))
    dest = draw(squares)
    capture = draw(st.booleans())
    promotion = None
    origin_file = draw(st.sampled_from([None] + list("abcdefgh")))
    origin_rank = draw(st.sampled_from([None, 1, 4, 8]))
    if piece is Piece.PAWN:
        origin_rank = None
        if not capture:
            origin_file = None
        if dest.rank in (1, 8):
            promotion = draw(st.sampled_from([Piece.QUEEN, Piece.ROOK,
                                              Piece.KNIGHT, Piece.BISHOP]))
    num = draw(st.sampled_from([None, 1, 12]))
    side = None
    if num is not None:
        side = draw(st.sampled_from([Color.WHITE, Color.BLACK]))
    return Move(piece=piece, destination=dest, origin_file=origin_file,
                origin_rank=origin_rank, capture=capture, promotion=promotion,
                check_marker=draw(st.sampled_from([None, "check", "mate"])),
                move_number=num, side_hint=side)


@given(moves())
def test_san_round_trip(move):
    assert parse_san(move.san()) == move


class TestFen:
    def test_initial_position(self):
        board = parse_fen(INITIAL_FEN)
        assert sum(1 for c in board.placement if c) == 32
        assert board.turn is Color.WHITE
        assert board.castling_wk and board.castling_bq

    @pytest.mark.parametrize("fen", [
        INITIAL_FEN,
        "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1",
        "8/8/8/4k3/8/8/4K3/8 w - - 12 40",
        "r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1",
    ])
    def test_round_trip(self, fen):
        assert parse_fen(fen).fen() == fen

    @pytest.mark.parametrize("bad", [
        "8/8/8/8 w - - 0 1",
        "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0",
        "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNZ w KQkq - 0 1",
        "rnbqkbnr/ppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1",
        "8/8/8/8/8/8/8/8 w - - 0 1",  # no kings
        "P7/8/8/4k3/8/8/4K3/8 w - - 0 1",  # pawn on rank 8
    ])
    def test_malformed(self, bad):
        with pytest.raises(MalformedFen):
            parse_fen(bad)


class TestApplyMove:
    # expected FENs are the standard published positions for these lines
    def test_e4_from_initial(self):
        board = apply_move(parse_fen(INITIAL_FEN), parse_san("e4"))
        assert board.fen() == (
            "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1")

    def test_open_game_sequence(self):
        board = parse_fen(INITIAL_FEN)
        for san in ["e4", "e5", "Nf3", "Nc6", "Bb5"]:
            board = apply_move(board, parse_san(san))
        assert board.fen() == (
            "r1bqkbnr/pppp1ppp/2n5/1B2p3/4P3/5N2/PPPP1PPP/RNBQK2R b KQkq - 3 3")

    def test_blocked_king(self):
        with pytest.raises(IllegalMove):
            apply_move(parse_fen(INITIAL_FEN), parse_san("Ke2"))

    def test_castle_without_right(self):
        board = parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w - - 0 1")
        with pytest.raises(IllegalMove):
            apply_move(board, parse_san("O-O"))

    def test_castle_updates_rook(self):
        board = parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1")
        after = apply_move(board, parse_san("O-O"))
        assert after.piece_at(Square("g", 1)) == (Piece.KING, Color.WHITE)
        assert after.piece_at(Square("f", 1)) == (Piece.ROOK, Color.WHITE)
        assert not after.castling_wk and not after.castling_wq
        assert after.castling_bk and after.castling_bq

    def test_en_passant_capture(self):
        board = parse_fen(
            "rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 3")
        after = apply_move(board, parse_san("dxe3"))
        assert after.piece_at(Square("e", 3)) == (Piece.PAWN, Color.BLACK)
        assert after.piece_at(Square("e", 4)) is None

    def test_promotion(self):
        board = parse_fen("4k3/P7/8/8/8/8/8/4K3 w - - 0 1")
        after = apply_move(board, parse_san("a8=Q"))
        assert after.piece_at(Square("a", 8)) == (Piece.QUEEN, Color.WHITE)

    def test_ambiguous_without_disambiguator(self):
        board = parse_fen("4k3/8/8/8/8/8/4K3/R4R2 w - - 0 1")
        with pytest.raises(IllegalMove):
            apply_move(board, parse_san("Rd1"))

    def test_turn_always_flips(self):
        board = parse_fen(INITIAL_FEN)
        for san in ["e4", "e5", "Nf3"]:
            after = apply_move(board, parse_san(san))
            assert after.turn is not board.turn
            board = after

    def test_piece_count_never_increases(self):
        board = parse_fen(INITIAL_FEN)
        for san in ["e4", "d5", "exd5", "Qxd5", "Nc3", "Qa5"]:
            after = apply_move(board, parse_san(san))
            count = lambda b: sum(1 for c in b.placement if c)
            assert count(after) <= count(board)
            for color in Color:
                assert sum(1 for c in after.placement
                           if c == (Piece.KING, color)) == 1
            board = after


class TestEngineCoords:
    def test_unique_knight(self):
        assert san_to_engine_coords(parse_fen(INITIAL_FEN), parse_san("Nf3")) == "g1f3"

    def test_unique_pawn(self):
        assert san_to_engine_coords(parse_fen(INITIAL_FEN), parse_san("e4")) == "e2e4"

    def test_rook_disambiguated_by_file(self):
        board = parse_fen("4k3/8/8/8/8/8/4K3/R4R2 w - - 0 1")
        assert san_to_engine_coords(board, parse_san("Rad1")) == "a1d1"
        assert san_to_engine_coords(board, parse_san("Rfd1")) == "f1d1"

    def test_promotion_suffix(self):
        board = parse_fen("4k3/P7/8/8/8/8/8/4K3 w - - 0 1")
        assert san_to_engine_coords(board, parse_san("a8=Q")) == "a7a8q"

    def test_castle_coords(self):
        board = parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1")
        assert san_to_engine_coords(board, parse_san("O-O")) == "e1g1"
        assert san_to_engine_coords(board, parse_san("O-O-O")) == "e1c1"
