"""Annotated-record persistence, splits, agreement, and oversampling."""

from __future__ import annotations

import json
import random
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional, Protocol

from .chess_core import parse_fen, parse_san, MalformedFen
from .extraction import MoveActionPhrase, _SAN_TOKEN_RE, _PLAYER_RE
from .chess_core import MoveSequence

SENTIMENTS = ("Positive", "Negative", "Neutral", "NotSure")
EXCLUSION_FLAGS = ("counterfactual", "ocr_error", "implicit_move")

RECORD_FIELDS = (
    "record_id", "sentence_id", "text", "predicate_span", "predicate_lemma",
    "player", "moves", "sentiment", "annotator_id", "board_fen", "flags",
    "source_record",
)


class CorpusError(Exception):
    pass


class SchemaViolation(CorpusError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class IoFailure(CorpusError):
    pass


class TooFewRecords(CorpusError):
    pass


class LengthMismatch(CorpusError):
    pass


class AugmenterFailure(CorpusError):
    pass


@dataclass(frozen=True)
class AnnotationRecord:
    record_id: str
    sentence_id: str
    text: str
    predicate_span: tuple[int, int]
    predicate_lemma: str
    player: str = "Unknown"
    moves: str = ""  # space-separated SAN
    sentiment: Optional[str] = None
    annotator_id: Optional[str] = None
    board_fen: Optional[str] = None
    flags: frozenset = frozenset()
    source_record: Optional[str] = None
    action_type: Optional[str] = None

    def aspect(self) -> MoveActionPhrase:
        seq = MoveSequence(tuple(parse_san(tok) for tok in self.moves.split()))
        return MoveActionPhrase(self.player, self.predicate_lemma, seq,
                                self.action_type)

    def excluded(self) -> bool:
        return bool(self.flags & set(EXCLUSION_FLAGS))


def _record_to_json(rec: AnnotationRecord) -> dict:
    d = {
        "record_id": rec.record_id,
        "sentence_id": rec.sentence_id,
        "text": rec.text,
        "predicate_span": list(rec.predicate_span),
        "predicate_lemma": rec.predicate_lemma,
        "player": rec.player,
        "moves": rec.moves,
        "sentiment": rec.sentiment,
        "annotator_id": rec.annotator_id,
        "board_fen": rec.board_fen,
        "flags": sorted(rec.flags),
        "source_record": rec.source_record,
    }
    if rec.action_type is not None:
        d["action_type"] = rec.action_type
    return d


def _record_from_json(obj: dict, line: Optional[int] = None) -> AnnotationRecord:
    missing = [k for k in RECORD_FIELDS if k not in obj]
    if missing:
        raise SchemaViolation(f"missing fields {missing}", line)
    span = obj["predicate_span"]
    if (not isinstance(span, list) or len(span) != 2
            or not all(isinstance(x, int) for x in span)
            or not 0 <= span[0] < span[1] <= len(obj["text"])):
        raise SchemaViolation(f"bad predicate_span {span!r}", line)
    sentiment = obj["sentiment"]
    if sentiment is not None and sentiment not in SENTIMENTS:
        raise SchemaViolation(f"bad sentiment {sentiment!r}", line)
    if obj["board_fen"]:
        try:
            parse_fen(obj["board_fen"])
        except MalformedFen as e:
            raise SchemaViolation(f"bad board_fen: {e}", line) from None
    return AnnotationRecord(
        record_id=str(obj["record_id"]),
        sentence_id=str(obj["sentence_id"]),
        text=obj["text"],
        predicate_span=(span[0], span[1]),
        predicate_lemma=obj["predicate_lemma"],
        player=obj["player"] or "Unknown",
        moves=obj["moves"] or "",
        sentiment=sentiment,
        annotator_id=obj["annotator_id"],
        board_fen=obj["board_fen"],
        flags=frozenset(obj["flags"] or ()),
        source_record=obj["source_record"],
        action_type=obj.get("action_type"),
    )


def load_corpus(path) -> list[AnnotationRecord]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise IoFailure(f"cannot read corpus {path}: {e}") from e
    records = []
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise SchemaViolation(f"invalid JSON: {e}", i) from None
        records.append(_record_from_json(obj, i))
    return records


def save_corpus(records, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(_record_to_json(rec), ensure_ascii=False) + "\n")
    except OSError as e:
        raise IoFailure(f"cannot write corpus {path}: {e}") from e


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[str, ...]
    validation: tuple[str, ...]
    test: tuple[str, ...]


def eligible_records(records) -> list[AnnotationRecord]:
    """Drop NotSure labels and exclusion-flagged records."""
    return [r for r in records
            if r.sentiment != "NotSure" and not r.excluded()]


def apply_exclusions(records) -> list[AnnotationRecord]:
    """Remove counterfactual / OCR-broken / implicit-move records."""
    return [r for r in records if not r.excluded()]


def _largest_remainder(group_sizes: dict, total_target: int, n: int) -> dict:
    """Per-group quota summing exactly to total_target, proportional to size."""
    quotas = {}
    fracs = []
    for name, size in sorted(group_sizes.items()):
        ideal = size * total_target / n if n else 0
        quotas[name] = int(ideal)
        fracs.append((-(ideal - int(ideal)), name))
    short = total_target - sum(quotas.values())
    for _, name in sorted(fracs)[:short]:
        quotas[name] += 1
    return quotas


def split_corpus(records, seed: int,
                 fractions=(0.7, 0.1, 0.2)) -> DatasetSplit:
    """Deterministic label-stratified 70/10/20 split."""
    if len(records) < 10:
        raise TooFewRecords(f"need at least 10 records, got {len(records)}")
    n = len(records)
    n_val = int(n * fractions[1])
    n_test = int(n * fractions[2])

    by_label: dict[str, list[AnnotationRecord]] = {}
    for r in records:
        by_label.setdefault(r.sentiment or "None", []).append(r)
    sizes = {lbl: len(rs) for lbl, rs in by_label.items()}
    val_quota = _largest_remainder(sizes, n_val, n)
    remaining = {lbl: sizes[lbl] - val_quota[lbl] for lbl in sizes}
    test_quota = _largest_remainder(remaining, n_test, n - n_val)

    rng = random.Random(seed)
    train, val, test = [], [], []
    for lbl in sorted(by_label):
        group = sorted(by_label[lbl], key=lambda r: r.record_id)
        rng.shuffle(group)
        v, t = val_quota[lbl], test_quota[lbl]
        val.extend(r.record_id for r in group[:v])
        test.extend(r.record_id for r in group[v:v + t])
        train.extend(r.record_id for r in group[v + t:])
    return DatasetSplit(tuple(train), tuple(val), tuple(test))


def cohen_kappa(a, b) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e)."""
    if len(a) != len(b):
        raise LengthMismatch(f"label lists differ in length: {len(a)} vs {len(b)}")
    if not a:
        raise LengthMismatch("empty label lists")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    ca, cb = Counter(a), Counter(b)
    p_e = sum(ca[l] * cb[l] for l in set(ca) | set(cb)) / (n * n)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1 - p_e)


def assign_iaa_subset(records, fraction: float, seed: int, annotators,
                      specific_fraction: float = 0.1):
    """Common doubly-annotated subset plus disjoint per-annotator subsets."""
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    ids = sorted(r.record_id for r in records)
    rng = random.Random(seed)
    rng.shuffle(ids)
    n_common = int(len(ids) * fraction)
    common = ids[:n_common]
    rest = ids[n_common:]
    per = int(len(records) * specific_fraction)
    specific = {}
    for i, ann in enumerate(annotators):
        specific[ann] = rest[i * per:(i + 1) * per]
    return sorted(common), {a: sorted(s) for a, s in specific.items()}


@dataclass
class AugmentResult:
    text: str
    span_map: dict  # original (start, end) -> new (start, end)


class Augmenter(Protocol):
    """Paraphrases text while keeping protected spans byte-identical."""

    def augment(self, text: str, protected_spans, rng: random.Random) -> Optional[AugmentResult]:
        ...


_AUG_WORD_RE = re.compile(r"[A-Za-z]+")


class SynonymAugmenter:
    """Deterministic rule-based paraphraser: synonym substitution from a
    bundled thesaurus, never touching protected spans.

    Thesaurus format: one line per word, `word<TAB>alt1,alt2,...`.
    """

    def __init__(self, thesaurus: dict[str, list[str]]):
        self.thesaurus = {k.lower(): v for k, v in thesaurus.items()}

    @classmethod
    def load(cls, path) -> "SynonymAugmenter":
        table: dict[str, list[str]] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip() or line.startswith("#"):
                    continue
                word, _, alts = line.rstrip("\n").partition("\t")
                table[word.strip().lower()] = [a.strip() for a in alts.split(",") if a.strip()]
        return cls(table)

    def augment(self, text: str, protected_spans, rng: random.Random) -> Optional[AugmentResult]:
        protected = sorted(protected_spans)
        protected_surfaces = {text[s:e].lower() for s, e in protected}
        replacements = []  # (start, end, replacement)
        for m in _AUG_WORD_RE.finditer(text):
            if any(m.start() < e and m.end() > s for s, e in protected):
                continue
            word = m.group(0)
            alts = self.thesaurus.get(word.lower())
            if not alts:
                continue
            choices = [a for a in alts if a.lower() not in protected_surfaces]
            if not choices:
                continue
            alt = rng.choice(choices)
            if word[0].isupper():
                alt = alt[0].upper() + alt[1:]
            replacements.append((m.start(), m.end(), alt))
        if not replacements:
            return None

        pieces = []
        cursor = 0
        for s, e, alt in replacements:
            pieces.append(text[cursor:s])
            pieces.append(alt)
            cursor = e
        pieces.append(text[cursor:])
        new_text = "".join(pieces)

        span_map = {}
        for s, e in protected:
            shift = sum(len(alt) - (re_ - rs)
                        for rs, re_, alt in replacements if re_ <= s)
            span_map[(s, e)] = (s + shift, e + shift)
        return AugmentResult(new_text, span_map)


def label_distribution(records) -> Counter:
    return Counter(r.sentiment for r in records)


def protected_spans(record: AnnotationRecord) -> list[tuple[int, int]]:
    """Spans an augmenter must keep byte-identical: SAN moves, player
    names, and the highlighted predicate surface."""
    spans = [record.predicate_span]
    for regex in (_SAN_TOKEN_RE, _PLAYER_RE):
        spans.extend(m.span() for m in regex.finditer(record.text))
    spans.sort()
    merged: list[tuple[int, int]] = []
    for s, e in spans:
        if merged and s < merged[-1][1]:
            merged[-1] = (merged[-1][0], max(e, merged[-1][1]))
        else:
            merged.append((s, e))
    return merged


def default_targets(counts: Counter) -> dict[str, int]:
    """Default oversampling targets: majority class untouched, every
    minority class doubled."""
    top = max(counts.values(), default=0)
    return {lbl: (c if c == top else 2 * c) for lbl, c in counts.items()}


def oversample(train, augmenter: Augmenter, targets: dict[str, int],
               seed: int = 42) -> list[AnnotationRecord]:
    """Augment minority labels up to the target counts.

    Added records are copies with paraphrased text, the augmented flag,
    and source_record set; the label never changes.
    """
    counts = label_distribution(train)
    for lbl, target in targets.items():
        if target < counts.get(lbl, 0):
            raise ValueError(
                f"target {target} for {lbl} below current count {counts.get(lbl, 0)}")
    rng = random.Random(seed)
    out = list(train)
    for lbl in sorted(targets):
        need = targets[lbl] - counts.get(lbl, 0)
        pool = [r for r in train if r.sentiment == lbl]
        if need and not pool:
            raise AugmenterFailure(f"no source records for label {lbl}")
        i = 0
        while need > 0:
            src = pool[i % len(pool)]
            result = augmenter.augment(src.text, protected_spans(src), rng)
            if result is None:
                raise AugmenterFailure(
                    f"augmenter produced no variant for record {src.record_id}")
            # the predicate span may have been merged into a wider
            # protected span; shift it by that span's displacement
            ps, pe = src.predicate_span
            new_span = (ps, pe)
            for (s, e), (ns, _) in result.span_map.items():
                if s <= ps and pe <= e:
                    new_span = (ps + ns - s, pe + ns - s)
                    break
            out.append(replace(
                src,
                record_id=f"{src.record_id}-aug{(i // len(pool)) + 1}",
                text=result.text,
                predicate_span=tuple(new_span),
                flags=src.flags | {"augmented"},
                source_record=src.record_id,
                annotator_id=None,
            ))
            i += 1
            need -= 1
    return out
