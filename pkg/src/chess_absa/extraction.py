"""Rule-based extraction of chess entities, verb predicates, and
player-predicate-move triples from teaching-text sentences."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .chess_core import MalformedSan, Move, MoveSequence, parse_san

PIECE_WORDS = ("Pawn", "Knight", "Bishop", "Rook", "Queen", "King")
PLAYER_WORDS = ("White", "Black")


class ExtractionError(Exception):
    pass


class LexiconUnavailable(ExtractionError):
    """Verb lexicon file missing or unreadable."""


class NoMoveEntity(ExtractionError):
    """Sentence instance has no SAN move to anchor an aspect on."""


class VerbLexicon:
    """Verb lemma list with inflected forms and optional synonym sets.

    File format, one lemma per line:
        lemma<TAB>form1,form2,...[<TAB>synonym1,synonym2,...]
    """

    def __init__(self, lemmas: dict[str, list[str]],
                 synonyms: Optional[dict[str, set[str]]] = None):
        self.lemmas = lemmas
        self.synonyms = synonyms or {}
        self._form_to_lemma: dict[str, str] = {}
        for lemma, forms in lemmas.items():
            self._form_to_lemma.setdefault(lemma.lower(), lemma)
            for form in forms:
                self._form_to_lemma.setdefault(form.lower(), lemma)

    @classmethod
    def load(cls, path) -> "VerbLexicon":
        lemmas: dict[str, list[str]] = {}
        synonyms: dict[str, set[str]] = {}
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as e:
            raise LexiconUnavailable(f"cannot read verb lexicon {path}: {e}") from e
        for line in lines:
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            lemma = parts[0].strip().lower()
            forms = [f.strip().lower() for f in parts[1].split(",")] if len(parts) > 1 else []
            lemmas[lemma] = [f for f in forms if f]
            if len(parts) > 2:
                syns = {s.strip().lower() for s in parts[2].split(",") if s.strip()}
                if syns:
                    synonyms[lemma] = syns
        if not lemmas:
            raise LexiconUnavailable(f"verb lexicon {path} is empty")
        return cls(lemmas, synonyms)

    def lemma_of(self, token: str) -> Optional[str]:
        return self._form_to_lemma.get(token.lower())

    def are_synonyms(self, a: str, b: str) -> bool:
        return b in self.synonyms.get(a, ()) or a in self.synonyms.get(b, ())

    def __contains__(self, lemma: str) -> bool:
        return lemma.lower() in self.lemmas

    def __iter__(self):
        return iter(self.lemmas)


@dataclass(frozen=True)
class EntityMention:
    kind: str  # MoveSan | MoveSequence | Piece | Player
    start: int
    end: int
    surface: str
    parsed: Optional[Union[Move, MoveSequence]] = None

    def is_move(self) -> bool:
        return self.kind in ("MoveSan", "MoveSequence")


@dataclass(frozen=True)
class PredicateMention:
    start: int
    end: int
    lemma: str
    surface: str


@dataclass(frozen=True)
class SentenceInstance:
    sentence_id: str
    text: str
    highlighted: PredicateMention
    entities: tuple[EntityMention, ...]


@dataclass(frozen=True)
class MoveActionPhrase:
    """The aspect under evaluation: who does what with which move(s)."""
    player: str  # White | Black | Unknown
    predicate: str
    moves: MoveSequence
    action_type: Optional[str] = None  # Attack | Capture | Defend | Protect | Move


# Candidate SAN tokens; each hit is confirmed by the real SAN parser, so
# this only needs to bound the token, not validate it.  Single letters
# can never match because a destination square is always two characters.
_SAN_TOKEN_RE = re.compile(
    r"(?<![A-Za-z0-9/=])"
    r"(?:\d+\.{1,3}\s?)?"
    r"(?:[KQRBN]?[a-h]?[1-8]?x?[a-h][1-8](?:=[QRBN])?|[O0]-[O0](?:-[O0])?)"
    r"[+#]?"
    r"(?![A-Za-z0-9=])"
)
# Separators over which adjacent SAN tokens fuse into one sequence:
# whitespace, commas, and bare move numbers.
_SEQ_GAP_RE = re.compile(r"(?:[\s,]|\d+\.{1,3})*")
_PIECE_RE = re.compile(r"\b(%s)s?\b" % "|".join(PIECE_WORDS))
_PLAYER_RE = re.compile(r"\b(%s)\b" % "|".join(PLAYER_WORDS))
_WORD_RE = re.compile(r"[A-Za-z]+(?:'[a-z]+)?")


def _san_mentions(text: str) -> list[EntityMention]:
    raw: list[tuple[int, int, Move]] = []
    for m in _SAN_TOKEN_RE.finditer(text):
        try:
            move = parse_san(m.group(0))
        except MalformedSan:
            continue
        raw.append((m.start(), m.end(), move))

    mentions: list[EntityMention] = []
    i = 0
    while i < len(raw):
        j = i
        while j + 1 < len(raw):
            gap = text[raw[j][1]:raw[j + 1][0]]
            if gap and _SEQ_GAP_RE.fullmatch(gap):
                j += 1
            else:
                break
        start, end = raw[i][0], raw[j][1]
        if j > i:
            seq = MoveSequence(tuple(mv for _, _, mv in raw[i:j + 1]))
            mentions.append(EntityMention("MoveSequence", start, end, text[start:end], seq))
        else:
            mentions.append(EntityMention("MoveSan", start, end, text[start:end], raw[i][2]))
        i = j + 1
    return mentions


def extract_entities(text: str) -> list[EntityMention]:
    """All piece/player/move mentions, non-overlapping, sorted by offset.

    SAN mentions win when spans collide with word matches.
    """
    mentions = _san_mentions(text)
    taken = [(m.start, m.end) for m in mentions]

    def free(start: int, end: int) -> bool:
        return all(end <= s or start >= e for s, e in taken)

    for regex, kind in ((_PLAYER_RE, "Player"), (_PIECE_RE, "Piece")):
        for m in regex.finditer(text):
            if free(m.start(1), m.end(1)):
                mentions.append(EntityMention(kind, m.start(1), m.end(1), m.group(1)))
                taken.append((m.start(1), m.end(1)))
    return sorted(mentions, key=lambda e: e.start)


def find_predicates(text: str, lexicon: VerbLexicon) -> list[PredicateMention]:
    """Verb-token occurrences with lexicon lemmas; SAN spans never count."""
    san_spans = [(m.start, m.end) for m in _san_mentions(text)]
    out = []
    for m in _WORD_RE.finditer(text):
        if any(m.start() < e and m.end() > s for s, e in san_spans):
            continue
        lemma = lexicon.lemma_of(m.group(0))
        if lemma is not None:
            out.append(PredicateMention(m.start(), m.end(), lemma, m.group(0)))
    return out


def expand_per_verb(sentence_id: str, text: str,
                    predicates: list[PredicateMention],
                    entities: Optional[list[EntityMention]] = None) -> list[SentenceInstance]:
    """One SentenceInstance per predicate, each highlighting one verb."""
    if entities is None:
        entities = extract_entities(text)
    ents = tuple(entities)
    return [SentenceInstance(sentence_id, text, pred, ents) for pred in predicates]


def _token_index(text: str, pos: int) -> int:
    return len(text[:pos].split())


def build_triple(instance: SentenceInstance) -> MoveActionPhrase:
    """Link the highlighted predicate to its move and player.

    Linking rule: nearest move entity by token distance, ties broken in
    favour of the move to the right of the verb (object position).
    Player: nearest preceding Player mention, falling back to pronoun
    resolution (he/his -> latest Player in the sentence), else Unknown.
    """
    moves = [e for e in instance.entities if e.is_move()]
    if not moves:
        raise NoMoveEntity(
            f"instance {instance.sentence_id}: no SAN move entity "
            f"(predicate {instance.highlighted.lemma!r})")

    pred = instance.highlighted
    pred_tok = _token_index(instance.text, pred.start)

    def key(ent: EntityMention):
        ent_tok = _token_index(instance.text, ent.start)
        dist = abs(ent_tok - pred_tok)
        rightward = 0 if ent_tok >= pred_tok else 1
        return (dist, rightward, ent.start)

    chosen = min(moves, key=key)
    if chosen.kind == "MoveSequence":
        seq = chosen.parsed
    else:
        seq = MoveSequence((chosen.parsed,))

    players = [e for e in instance.entities if e.kind == "Player"]
    preceding = [p for p in players if p.start < pred.start]
    if preceding:
        player = preceding[-1].surface
    elif players and re.search(r"\b(he|his|him)\b", instance.text, re.IGNORECASE):
        player = players[-1].surface
    else:
        player = "Unknown"

    return MoveActionPhrase(player=player, predicate=pred.lemma, moves=seq)
