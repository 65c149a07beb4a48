"""Umbrella command-line interface for the whole pipeline."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import absa, clustering, corpus, engine, extraction, workbench

DATA_DIR = Path(__file__).parent / "data"
ENGINE_ENV = "CHESS_ABSA_ENGINE"

LABEL_KEYS = {"pos": "Positive", "neg": "Negative", "neu": "Neutral"}


def load_config(path) -> dict:
    """Plain key=value configuration file."""
    cfg = {}
    if not path:
        return cfg
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            cfg[key.strip()] = value.strip()
    return cfg


def _read_sentences(path):
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            if line.strip():
                obj = json.loads(line)
                yield obj.get("sentence_id", f"s{i}"), obj["text"], obj.get("board_fen")


def cmd_extract(args) -> int:
    lexicon = extraction.VerbLexicon.load(args.lexicon)
    records = []
    for sentence_id, text, fen in _read_sentences(args.infile):
        predicates = extraction.find_predicates(text, lexicon)
        for k, inst in enumerate(
                extraction.expand_per_verb(sentence_id, text, predicates)):
            flags = set()
            player, moves = "Unknown", ""
            try:
                triple = extraction.build_triple(inst)
                player, moves = triple.player, triple.moves.san()
            except extraction.NoMoveEntity:
                flags.add("implicit_move")
            records.append(corpus.AnnotationRecord(
                record_id=f"{sentence_id}-v{k}",
                sentence_id=sentence_id,
                text=text,
                predicate_span=(inst.highlighted.start, inst.highlighted.end),
                predicate_lemma=inst.highlighted.lemma,
                player=player,
                moves=moves,
                board_fen=fen,
                flags=frozenset(flags),
            ))
    corpus.save_corpus(records, args.out)
    print(f"extracted {len(records)} instances -> {args.out}")
    return 0


def cmd_split(args) -> int:
    records = corpus.eligible_records(corpus.load_corpus(args.infile))
    split = corpus.split_corpus(records, args.seed)
    payload = {"train": list(split.train), "validation": list(split.validation),
               "test": list(split.test), "seed": args.seed}
    Path(args.out).write_text(json.dumps(payload, indent=2))
    print(f"split {len(records)} records: {len(split.train)}/"
          f"{len(split.validation)}/{len(split.test)} -> {args.out}")
    return 0


def _parse_targets(text, counts):
    if not text:
        return corpus.default_targets(counts)
    targets = dict(counts)
    for part in text.split(","):
        key, _, value = part.partition("=")
        label = LABEL_KEYS.get(key.strip().lower(), key.strip())
        targets[label] = int(value)
    return targets


def cmd_augment(args) -> int:
    records = corpus.load_corpus(args.infile)
    if args.split:
        split = json.loads(Path(args.split).read_text())
        train_ids = set(split["train"])
        records = [r for r in records if r.record_id in train_ids]
    counts = corpus.label_distribution(records)
    targets = _parse_targets(args.targets, counts)
    augmenter = corpus.SynonymAugmenter.load(args.thesaurus)
    out = corpus.oversample(records, augmenter, targets, seed=args.seed)
    corpus.save_corpus(out, args.out)
    print(f"oversampled {dict(counts)} -> "
          f"{dict(corpus.label_distribution(out))} -> {args.out}")
    return 0


def cmd_iaa(args) -> int:
    records = corpus.load_corpus(args.infile)
    annotators = args.annotators.split(",")
    common, specific = corpus.assign_iaa_subset(
        records, args.common, args.seed, annotators)
    print(json.dumps({"common": common, "specific": specific}, indent=2))
    return 0


def cmd_cluster(args) -> int:
    lexicon = extraction.VerbLexicon.load(args.lexicon)
    embeddings = clustering.load_embeddings(args.embeddings)
    lemmas = [l for l in lexicon if l in embeddings]
    graph = clustering.build_verb_graph(lemmas, lexicon, embeddings,
                                        threshold=args.threshold)
    result = clustering.chinese_whispers(graph, seed=args.seed,
                                         iterations=args.iterations)
    type_map = clustering.assign_action_types(result)
    clustering.save_clustering(args.out, result, type_map)
    print(f"clustered {len(lemmas)} lemmas into "
          f"{len(set(result.assignment.values()))} clusters -> {args.out}")
    return 0


def _load_split(path):
    obj = json.loads(Path(path).read_text())
    return corpus.DatasetSplit(tuple(obj["train"]), tuple(obj["validation"]),
                               tuple(obj["test"]))


def _apply_action_types(records, clusters_path):
    if not clusters_path:
        return records
    lemma_type = {}
    with open(clusters_path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            if len(parts) == 3:
                lemma_type[parts[0]] = parts[2]
    from dataclasses import replace
    return [replace(r, action_type=lemma_type.get(r.predicate_lemma, "Move"))
            for r in records]


def cmd_train(args) -> int:
    records = _apply_action_types(corpus.load_corpus(args.infile), args.clusters)
    split = _load_split(args.split)
    by_id = {r.record_id: r for r in records}
    variant = absa.InfusionVariant(args.variant)
    cfg = absa.TrainConfig(seed=args.seed, epochs=args.epochs)
    tr = [absa.serialize_input(by_id[i], variant) for i in split.train if i in by_id]
    va = [absa.serialize_input(by_id[i], variant) for i in split.validation if i in by_id]
    model = absa.train(tr, cfg, validation=va)
    model.save(args.out)
    print(f"trained {variant.value} model, best epoch {model.best_epoch} "
          f"(val micro-F1 {model.epoch_scores[model.best_epoch]:.3f}) -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    records = _apply_action_types(corpus.load_corpus(args.infile), args.clusters)
    split = _load_split(args.split)
    by_id = {r.record_id: r for r in records}
    ids = getattr(split, args.split_name)
    model = absa.SentimentModel.load(args.model)
    variant = absa.InfusionVariant(args.variant)
    inputs = [absa.serialize_input(by_id[i], variant) for i in ids if i in by_id]
    preds = [absa.predict(model, ci)[0] for ci in inputs]
    score = absa.micro_f1(preds, [ci.label for ci in inputs])
    print(f"{args.split_name} micro-F1: {score:.4f} ({len(inputs)} records)")
    return 0


def cmd_experiment(args) -> int:
    records = _apply_action_types(corpus.load_corpus(args.infile), args.clusters)
    split = _load_split(args.split)
    seeds = [int(s) for s in args.seeds.split(",")]
    variants = ([v for v in absa.InfusionVariant] if args.variant == "all"
                else [absa.InfusionVariant(args.variant)])
    reports = []
    for variant in variants:
        report = absa.run_experiment(records, split, variant, seeds)
        reports.append(report)
        print(f"{variant.value}: mean micro-F1 {report.mean:.4f} "
              f"runs {['%.3f' % r for r in report.runs]}")
    if args.out:
        Path(args.out).write_text(json.dumps(
            [json.loads(r.to_json()) for r in reports], indent=2))
    return 0


def cmd_engine_compare(args) -> int:
    import random as _random
    from .chess_core import parse_fen, parse_san, MoveSequence

    engine_cmd = args.engine or os.environ.get(ENGINE_ENV)
    if not engine_cmd:
        print(f"no engine given (use --engine or ${ENGINE_ENV})", file=sys.stderr)
        return 2
    records = [r for r in corpus.eligible_records(corpus.load_corpus(args.infile))
               if r.board_fen and r.moves and r.sentiment]
    if args.sample < 1.0:
        rng = _random.Random(args.seed)
        records = sorted(records, key=lambda r: r.record_id)
        rng.shuffle(records)
        records = records[:max(1, int(len(records) * args.sample))]

    config = engine.EngineConfig(skill_level=args.skill, elo=args.elo,
                                 depth=args.depth)
    if engine_cmd == "mock":
        engine_cmd = f"{sys.executable} -m chess_absa.mock_engine"
    transport = engine.ProcessTransport(engine_cmd)
    sentiments, outcomes, rows = [], [], []
    with engine.EngineSession(transport, config) as session:
        for rec in records:
            board = parse_fen(rec.board_fen)
            seq = MoveSequence(tuple(parse_san(t) for t in rec.moves.split()))
            try:
                wdl = session.evaluate_move(board, seq)
            except engine.EngineError as e:
                print(f"skipping {rec.record_id}: {e}", file=sys.stderr)
                continue
            cat = engine.outcome_category(wdl)
            sentiments.append(rec.sentiment)
            outcomes.append(wdl)
            rows.append({
                "record_id": rec.record_id, "fen": rec.board_fen,
                "move": rec.moves.split()[0], "win": wdl.win, "draw": wdl.draw,
                "lose": wdl.lose, "category": cat,
                "approximate_flag": wdl.approximate,
            })
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
    table = engine.build_contingency(sentiments, outcomes)
    csv_text = engine.contingency_csv(table)
    if args.contingency:
        Path(args.contingency).write_text(csv_text)
    print(csv_text, end="")
    print(f"evaluated {len(rows)} records")
    return 0


def cmd_annotate_serve(args) -> int:
    import uvicorn

    records = corpus.load_corpus(args.corpus)
    annotators = args.annotators.split(",")
    tasks = workbench.create_tasks(records, args.iaa_fraction, annotators,
                                   args.seed)
    bench = workbench.Workbench(records, tasks, args.log)
    app = workbench.create_app(bench, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chess-absa")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--seed", dest="global_seed", type=int, default=None,
                        help="global RNG seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract per-verb annotation instances")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--lexicon", default=str(DATA_DIR / "verbs.txt"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("split", help="stratified 70/10/20 split")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("augment", help="oversample minority labels")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--split", help="restrict to the train ids of this split file")
    p.add_argument("--targets", help="e.g. pos=288,neg=234,neu=200")
    p.add_argument("--thesaurus", default=str(DATA_DIR / "thesaurus.txt"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("iaa", help="assign the common double-annotation subset")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--common", type=float, default=0.2)
    p.add_argument("--annotators", default="a1,a2")
    p.set_defaults(func=cmd_iaa)

    p = sub.add_parser("cluster", help="Chinese Whispers verb clustering")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--lexicon", default=str(DATA_DIR / "verbs.txt"))
    p.add_argument("--iterations", type=int, default=clustering.DEFAULT_ITERATIONS)
    p.add_argument("--threshold", type=float, default=clustering.DEFAULT_THRESHOLD)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("train", help="train the sentiment classifier")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--variant", default="move-action",
                   choices=[v.value for v in absa.InfusionVariant])
    p.add_argument("--clusters", help="lemma cluster file for action types")
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--split-name", default="test",
                   choices=["train", "validation", "test"])
    p.add_argument("--variant", default="move-action",
                   choices=[v.value for v in absa.InfusionVariant])
    p.add_argument("--clusters")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", help="5-run averaged micro-F1 protocol")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--variant", default="all",
                   choices=["all"] + [v.value for v in absa.InfusionVariant])
    p.add_argument("--seeds", default="1,2,3,4,5")
    p.add_argument("--clusters")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("engine-compare",
                       help="compare sentiment labels with engine outcomes")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--engine", help='engine command, or "mock"')
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--skill", type=int, default=8)
    p.add_argument("--elo", type=int, default=2400)
    p.add_argument("--sample", type=float, default=1.0)
    p.add_argument("--out", help="per-record results file (jsonl)")
    p.add_argument("--contingency", help="3x3 csv matrix output")
    p.set_defaults(func=cmd_engine_compare)

    p = sub.add_parser("annotate-serve", help="run the annotation HTTP service")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--corpus", required=True)
    p.add_argument("--log", default="submissions.log")
    p.add_argument("--annotators", default="a1,a2")
    p.add_argument("--iaa-fraction", type=float, default=0.2)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", help="built frontend assets directory")
    p.set_defaults(func=cmd_annotate_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is None:
        default = args.global_seed if args.global_seed is not None else int(cfg.get("seed", 42))
        args.seed = default
    if getattr(args, "engine", None) is None and "engine" in cfg:
        args.engine = cfg["engine"]
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
