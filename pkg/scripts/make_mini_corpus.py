#!/usr/bin/env python3
"""Regenerate the bundled mini-corpus (src/chess_absa/data/mini_corpus.jsonl).

Sentences are templated so the rule-based extractor finds exactly the
intended predicate and move; board FENs are computed with the package's
own move application so every record is engine-checkable.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from chess_absa import corpus, extraction
from chess_absa.chess_core import INITIAL_FEN, apply_move, parse_fen, parse_san

DATA = Path(__file__).resolve().parents[1] / "src/chess_absa/data"

START = INITIAL_FEN
AFTER_E4 = apply_move(parse_fen(START), parse_san("e4")).fen()
AFTER_E4_E5 = apply_move(parse_fen(AFTER_E4), parse_san("e5")).fen()

# (text, player, verb lemma, move, sentiment, fen)
WHITE_TEMPLATES = [
    ("White should play {m} to control the centre early.", "Positive"),
    ("White plays {m} and gets a good game.", "Positive"),
    ("By playing {m} White develops quickly and safely.", "Positive"),
    ("White can play {m}, which gives a strong position.", "Positive"),
    ("If White plays {m} he loses a pawn for nothing.", "Negative"),
    ("White should avoid {m} because it weakens the squares.", "Negative"),
    ("Playing {m} would be a mistake for White.", "Negative"),
    ("White plays {m}, a quiet move with little effect.", "Neutral"),
    ("White may also play {m}, with an even game.", "Neutral"),
]
WHITE_MOVES = ["e4", "d4", "Nf3", "c4", "g3", "b3", "Nc3", "e3", "d3", "f4", "h4", "a4"]

BLACK_TEMPLATES = [
    ("Black should play {m} and fights for the centre.", "Positive"),
    ("Black plays {m}, the strongest reply.", "Positive"),
    ("Black defends well by playing {m}.", "Positive"),
    ("If Black plays {m} he gets a bad position.", "Negative"),
    ("Black must avoid {m}, which loses material.", "Negative"),
    ("Black plays {m} without any particular danger.", "Neutral"),
    ("Black can also play {m}, keeping the balance.", "Neutral"),
]
BLACK_MOVES = ["e5", "c5", "e6", "d5", "Nf6", "d6", "g6", "c6", "Nc6", "b6"]


def main() -> None:
    lexicon = extraction.VerbLexicon.load(DATA / "verbs.txt")
    records = []
    n = 0

    def add(text, fen, sentiment):
        nonlocal n
        n += 1
        sid = f"mini{n:03d}"
        predicates = extraction.find_predicates(text, lexicon)
        instances = extraction.expand_per_verb(sid, text, predicates)
        # keep the instance that highlights the intended "play"/"avoid" verb
        # nearest the move mention, plus sentence-level duplicates
        for k, inst in enumerate(instances):
            try:
                triple = extraction.build_triple(inst)
            except extraction.NoMoveEntity:
                continue
            records.append(corpus.AnnotationRecord(
                record_id=f"{sid}-v{k}",
                sentence_id=sid,
                text=text,
                predicate_span=(inst.highlighted.start, inst.highlighted.end),
                predicate_lemma=inst.highlighted.lemma,
                player=triple.player,
                moves=triple.moves.san(),
                sentiment=sentiment,
                annotator_id="a1",
                board_fen=fen,
            ))

    wi = 0
    for tmpl, sentiment in WHITE_TEMPLATES * 3:
        move = WHITE_MOVES[wi % len(WHITE_MOVES)]
        wi += 1
        add(tmpl.format(m=move), START, sentiment)
    bi = 0
    for tmpl, sentiment in BLACK_TEMPLATES * 3:
        move = BLACK_MOVES[bi % len(BLACK_MOVES)]
        bi += 1
        add(tmpl.format(m=move), AFTER_E4, sentiment)

    # a few multi-aspect and flagged records for realism
    multi = ("It is usual for White not to play d4 at once, but to play "
             "Nf3 first, in order to avoid the counter gambit.")
    add(multi, START, "Neutral")
    implicit = ("Black would play the King away from his file and allow "
                "the Knight to escape.")
    sid = "mini-implicit"
    preds = extraction.find_predicates(implicit, lexicon)
    inst = extraction.expand_per_verb(sid, implicit, preds)[0]
    records.append(corpus.AnnotationRecord(
        record_id=f"{sid}-v0", sentence_id=sid, text=implicit,
        predicate_span=(inst.highlighted.start, inst.highlighted.end),
        predicate_lemma=inst.highlighted.lemma, player="Black",
        sentiment="Negative", annotator_id="a1",
        board_fen=AFTER_E4_E5, flags=frozenset({"implicit_move"})))

    corpus.save_corpus(records, DATA / "mini_corpus.jsonl")
    dist = corpus.label_distribution(records)
    print(f"wrote {len(records)} records from {n + 1} sentences: {dict(dist)}")


if __name__ == "__main__":
    main()
