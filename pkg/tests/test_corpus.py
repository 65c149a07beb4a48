import json
import random
from collections import Counter
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from chess_absa import corpus
from chess_absa.corpus import (
    AnnotationRecord, AugmenterFailure, LengthMismatch, SchemaViolation,
    SynonymAugmenter, TooFewRecords, apply_exclusions, assign_iaa_subset,
    cohen_kappa, eligible_records, label_distribution, load_corpus,
    oversample, protected_spans, save_corpus, split_corpus,
)

DATA = Path(__file__).resolve().parents[1] / "src/chess_absa/data"


def make_record(i, sentiment="Positive", text=None, flags=(), player="White",
                moves="e4"):
    text = text or f"White plays e4 and gets a good game in line {i}."
    return AnnotationRecord(
        record_id=f"r{i:04d}", sentence_id=f"s{i:04d}", text=text,
        predicate_span=(6, 11), predicate_lemma="play", player=player,
        moves=moves, sentiment=sentiment, annotator_id="a1",
        flags=frozenset(flags))


def make_corpus(counts):
    records, i = [], 0
    for sentiment, n in counts.items():
        for _ in range(n):
            records.append(make_record(i, sentiment))
            i += 1
    return records


class TestPersistence:
    def test_round_trip(self, tmp_path):
        records = make_corpus({"Positive": 5, "Negative": 3, "NotSure": 1})
        path = tmp_path / "c.jsonl"
        save_corpus(records, path)
        assert load_corpus(path) == records

    def test_round_trip_726(self, tmp_path):
        records = make_corpus({"Positive": 437, "Negative": 153,
                               "Neutral": 133, "NotSure": 3})
        path = tmp_path / "c.jsonl"
        save_corpus(records, path)
        assert load_corpus(path) == records

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("")
        assert load_corpus(path) == []

    def test_missing_field(self, tmp_path):
        obj = json.loads(
            (lambda r: json.dumps(corpus._record_to_json(r)))(make_record(0)))
        del obj["sentiment"]
        path = tmp_path / "c.jsonl"
        path.write_text(json.dumps(obj) + "\n")
        with pytest.raises(SchemaViolation) as exc:
            load_corpus(path)
        assert exc.value.line == 1

    def test_bad_fen_rejected(self, tmp_path):
        rec = corpus._record_to_json(make_record(0))
        rec["board_fen"] = "8/8 w - - 0 1"
        path = tmp_path / "c.jsonl"
        path.write_text(json.dumps(rec) + "\n")
        with pytest.raises(SchemaViolation):
            load_corpus(path)

    def test_mini_corpus_loads(self):
        records = load_corpus(DATA / "mini_corpus.jsonl")
        assert len(records) >= 50
        assert all(r.sentiment for r in records)


class TestSplit:
    def test_720_records(self):
        records = make_corpus({"Positive": 437, "Negative": 153, "Neutral": 130})
        split = split_corpus(records, seed=42)
        assert (len(split.train), len(split.validation), len(split.test)) == (504, 72, 144)

    def test_disjoint_and_complete(self):
        records = make_corpus({"Positive": 40, "Negative": 30, "Neutral": 20})
        split = split_corpus(records, seed=1)
        parts = [set(split.train), set(split.validation), set(split.test)]
        assert not (parts[0] & parts[1] or parts[0] & parts[2] or parts[1] & parts[2])
        assert parts[0] | parts[1] | parts[2] == {r.record_id for r in records}

    def test_stratified(self):
        records = make_corpus({"Positive": 400, "Negative": 200, "Neutral": 100})
        split = split_corpus(records, seed=3)
        by_id = {r.record_id: r.sentiment for r in records}
        for part, frac in ((split.train, 0.7), (split.validation, 0.1),
                           (split.test, 0.2)):
            counts = Counter(by_id[i] for i in part)
            for lbl, total in (("Positive", 400), ("Negative", 200), ("Neutral", 100)):
                assert abs(counts[lbl] - total * frac) <= 1

    def test_deterministic(self):
        records = make_corpus({"Positive": 30, "Negative": 20})
        assert split_corpus(records, seed=9) == split_corpus(records, seed=9)

    def test_ten_records(self):
        split = split_corpus(make_corpus({"Positive": 6, "Negative": 4}), seed=0)
        assert (len(split.train), len(split.validation), len(split.test)) == (7, 1, 2)

    def test_too_few(self):
        with pytest.raises(TooFewRecords):
            split_corpus(make_corpus({"Positive": 5}), seed=0)


class TestKappa:
    def test_perfect_agreement(self):
        assert cohen_kappa(["P", "N", "P"], ["P", "N", "P"]) == 1.0

    def test_hand_derived_fixture(self):
        # p_o = 3/4; p_e = (2*1 + 2*3)/16 = 1/2; kappa = 0.5
        assert cohen_kappa(["P", "P", "N", "N"], ["P", "N", "N", "N"]) == pytest.approx(0.5, abs=1e-12)

    def test_chance_level(self):
        # identical marginals, agreement exactly at chance
        a = ["P", "P", "N", "N"]
        b = ["N", "N", "P", "P"]
        # p_o = 0, p_e = 0.5 -> kappa = -1; construct a p_o == p_e case:
        a = ["P", "N", "P", "N"]
        b = ["P", "P", "N", "N"]
        assert cohen_kappa(a, b) == pytest.approx(0.0)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            cohen_kappa(["P"], ["P", "N"])

    @given(st.lists(st.sampled_from(["Positive", "Negative", "Neutral"]),
                    min_size=2, max_size=50).filter(lambda xs: len(set(xs)) > 1))
    def test_self_kappa_is_one(self, labels):
        assert cohen_kappa(labels, labels) == pytest.approx(1.0)

    @given(st.lists(st.tuples(st.sampled_from("PNX"), st.sampled_from("PNX")),
                    min_size=1, max_size=60))
    def test_bounds(self, pairs):
        a = [p[0] for p in pairs]
        b = [p[1] for p in pairs]
        assert -1.0 - 1e-12 <= cohen_kappa(a, b) <= 1.0 + 1e-12


class TestIaaSubset:
    def test_726_gives_145_common(self):
        records = [make_record(i) for i in range(726)]
        common, specific = assign_iaa_subset(records, 0.2, seed=1,
                                             annotators=["a", "b"])
        assert len(common) == 145
        assert len(specific["a"]) == 72 and len(specific["b"]) == 72

    def test_small(self):
        records = [make_record(i) for i in range(10)]
        common, _ = assign_iaa_subset(records, 0.2, seed=1, annotators=["a"])
        assert len(common) == 2

    def test_disjoint_specific(self):
        records = [make_record(i) for i in range(100)]
        common, specific = assign_iaa_subset(records, 0.2, seed=5,
                                             annotators=["a", "b"])
        assert not set(specific["a"]) & set(specific["b"])
        assert not set(common) & (set(specific["a"]) | set(specific["b"]))


@pytest.fixture(scope="module")
def augmenter():
    return SynonymAugmenter.load(DATA / "thesaurus.txt")


class TestAugmenter:
    def test_protected_spans_kept(self, augmenter):
        rec = make_record(1)
        spans = protected_spans(rec)
        result = augmenter.augment(rec.text, spans, random.Random(0))
        assert result is not None
        for (s, e), (ns, ne) in result.span_map.items():
            assert result.text[ns:ne] == rec.text[s:e]

    def test_no_replaceable_words(self, augmenter):
        assert augmenter.augment("Qxf7", [(0, 4)], random.Random(0)) is None


class TestOversample:
    def test_table_one_counts(self, augmenter):
        train = make_corpus({"Positive": 288, "Negative": 117, "Neutral": 100})
        out = oversample(train, augmenter,
                         {"Positive": 288, "Negative": 234, "Neutral": 200})
        counts = label_distribution(out)
        assert counts == Counter({"Positive": 288, "Negative": 234, "Neutral": 200})
        added = [r for r in out if "augmented" in r.flags]
        assert len(added) == 117 + 100
        for rec in added:
            assert rec.source_record is not None
            src = next(r for r in train if r.record_id == rec.source_record)
            assert rec.sentiment == src.sentiment

    def test_noop(self, augmenter):
        train = make_corpus({"Positive": 5, "Negative": 5})
        out = oversample(train, augmenter, dict(label_distribution(train)))
        assert out == train

    def test_originals_preserved(self, augmenter):
        train = make_corpus({"Positive": 6, "Negative": 3})
        out = oversample(train, augmenter, {"Positive": 6, "Negative": 6})
        assert {r.record_id for r in train} <= {r.record_id for r in out}

    def test_augmenter_failure(self):
        class Nope:
            def augment(self, text, spans, rng):
                return None
        train = make_corpus({"Positive": 3, "Negative": 3})
        with pytest.raises(AugmenterFailure):
            oversample(train, Nope(), {"Positive": 3, "Negative": 6})

    def test_predicate_span_tracks_text(self, augmenter):
        train = make_corpus({"Positive": 2, "Negative": 2})
        out = oversample(train, augmenter, {"Positive": 2, "Negative": 4})
        for rec in out:
            s, e = rec.predicate_span
            assert rec.text[s:e] == "plays"


class TestExclusions:
    def test_flagged_removed(self):
        records = [make_record(0), make_record(1, flags={"implicit_move"}),
                   make_record(2, flags={"counterfactual"}),
                   make_record(3, flags={"ocr_error"}), make_record(4)]
        kept = apply_exclusions(records)
        assert [r.record_id for r in kept] == ["r0000", "r0004"]

    def test_all_flagged(self):
        records = [make_record(0, flags={"ocr_error"})]
        assert apply_exclusions(records) == []

    def test_eligible_drops_notsure(self):
        records = [make_record(0), make_record(1, sentiment="NotSure")]
        assert [r.record_id for r in eligible_records(records)] == ["r0000"]
