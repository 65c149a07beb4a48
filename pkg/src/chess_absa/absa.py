"""Knowledge-infused input serialization and the sentiment classifier.

The classifier is a deterministic hashed-feature softmax regression
standing in for a transformer encoder; an external vectorizer can be
plugged in through the `featurizer` hook of TrainConfig.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .corpus import AnnotationRecord, LengthMismatch

SEP = "[SEP]"
CLASSES = ("Positive", "Negative", "Neutral")

MODEL_FORMAT = "chess-absa-model/1"


class AbsaError(Exception):
    pass


class MissingActionType(AbsaError):
    pass


class DegenerateData(AbsaError):
    pass


class DimensionMismatch(AbsaError):
    pass


class InfusionVariant(str, Enum):
    MOVE_ONLY = "move-only"
    MOVE_ACTION = "move-action"
    MOVE_ACTION_TYPE = "move-action-type"


@dataclass(frozen=True)
class ClassifierInput:
    serialized: str
    label: Optional[str] = None


def serialize_input(record: AnnotationRecord, variant: InfusionVariant) -> ClassifierInput:
    """Append the aspect (and optionally its action type) to the sentence,
    [SEP]-delimited."""
    aspect = record.aspect()
    moves = aspect.moves.san()
    if variant is InfusionVariant.MOVE_ONLY:
        tail = moves
    else:
        tail = f"{aspect.player} {aspect.predicate} {moves}"
        if variant is InfusionVariant.MOVE_ACTION_TYPE:
            if not aspect.action_type:
                raise MissingActionType(
                    f"record {record.record_id} has no action type")
            tail = f"{tail} {SEP} {aspect.action_type}"
    return ClassifierInput(f"{record.text} {SEP} {tail}", record.sentiment)


def _h(token: str, space: int, offset: int) -> int:
    return offset + zlib.crc32(token.encode("utf-8")) % space


def featurize(serialized: str, dimension: int = 4096) -> dict[int, float]:
    """Hashed bag of word uni/bigrams and char trigrams.

    Sentence-segment features hash into [0, dimension/2); everything
    after the first [SEP] (the infused aspect) into the upper half.
    """
    if dimension < 2 ** 10:
        raise ValueError(f"dimension must be >= 1024, got {dimension}")
    half = dimension // 2
    sentence, sep, aspect = serialized.partition(f" {SEP} ")
    vec: dict[int, float] = {}

    def add(segment: str, offset: int) -> None:
        words = segment.lower().split()
        for w in words:
            vec[_h("w:" + w, half, offset)] = vec.get(_h("w:" + w, half, offset), 0.0) + 1.0
        for a, b in zip(words, words[1:]):
            k = _h(f"b:{a}_{b}", half, offset)
            vec[k] = vec.get(k, 0.0) + 1.0
        text = " ".join(words)
        for i in range(len(text) - 2):
            k = _h("c:" + text[i:i + 3], half, offset)
            vec[k] = vec.get(k, 0.0) + 1.0

    add(sentence, 0)
    if sep:
        add(aspect, half)
    return vec


def _to_dense(vecs, dimension: int) -> np.ndarray:
    X = np.zeros((len(vecs), dimension), dtype=np.float64)
    for i, v in enumerate(vecs):
        for k, val in v.items():
            X[i, k] = val
    # l2 normalization keeps gradient scales comparable across lengths
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return X / norms


@dataclass
class TrainConfig:
    seed: int = 42
    learning_rate: float = 0.1
    epochs: int = 30
    batch_size: int = 4
    dimension: int = 4096
    weight_decay: float = 0.0
    featurizer: Callable[[str, int], dict] = featurize


@dataclass
class SentimentModel:
    weights: np.ndarray  # (3, dimension), rows in CLASSES order
    bias: np.ndarray  # (3,)
    config: TrainConfig
    epoch_scores: list = field(default_factory=list)
    best_epoch: int = 0

    @property
    def dimension(self) -> int:
        return self.weights.shape[1]

    def save(self, path) -> None:
        payload = {
            "format": MODEL_FORMAT,
            "classes": list(CLASSES),
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "config": {
                "seed": self.config.seed,
                "learning_rate": self.config.learning_rate,
                "epochs": self.config.epochs,
                "batch_size": self.config.batch_size,
                "dimension": self.config.dimension,
                "weight_decay": self.config.weight_decay,
            },
            "epoch_scores": self.epoch_scores,
            "best_epoch": self.best_epoch,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path) -> "SentimentModel":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != MODEL_FORMAT:
            raise AbsaError(f"unknown model format {payload.get('format')!r}")
        cfg = TrainConfig(**payload["config"])
        return cls(np.array(payload["weights"]), np.array(payload["bias"]),
                   cfg, payload["epoch_scores"], payload["best_epoch"])


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy_grad(W, b, X, y_onehot):
    """Loss and analytic gradients for softmax regression (mean-reduced)."""
    probs = softmax(X @ W.T + b)
    n = X.shape[0]
    loss = -np.log(np.clip((probs * y_onehot).sum(axis=1), 1e-12, None)).mean()
    delta = (probs - y_onehot) / n
    return loss, delta.T @ X, delta.sum(axis=0)


def train(inputs, config: Optional[TrainConfig] = None,
          validation=None) -> SentimentModel:
    """Seeded mini-batch gradient descent; returns the snapshot from the
    best validation-micro-F1 epoch (earliest on ties)."""
    config = config or TrainConfig()
    labeled = [ci for ci in inputs if ci.label is not None]
    if len({ci.label for ci in labeled}) < 2:
        raise DegenerateData("training data has fewer than 2 label classes")
    dim = config.dimension
    X = _to_dense([config.featurizer(ci.serialized, dim) for ci in labeled], dim)
    y = np.array([CLASSES.index(ci.label) for ci in labeled])
    Y = np.eye(len(CLASSES))[y]

    if validation:
        Xv = _to_dense([config.featurizer(ci.serialized, dim) for ci in validation], dim)
        yv = [ci.label for ci in validation]
    else:
        Xv, yv = X, [ci.label for ci in labeled]

    rng = np.random.default_rng(config.seed)
    W = np.zeros((len(CLASSES), dim))
    b = np.zeros(len(CLASSES))
    best = (-1.0, None, None, 0)
    epoch_scores = []
    n = len(labeled)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            _, gW, gb = cross_entropy_grad(W, b, X[idx], Y[idx])
            if config.weight_decay:
                gW = gW + config.weight_decay * W
            W -= config.learning_rate * gW
            b -= config.learning_rate * gb
        preds = [CLASSES[i] for i in softmax(Xv @ W.T + b).argmax(axis=1)]
        score = micro_f1(preds, yv)
        epoch_scores.append(score)
        if score > best[0]:
            best = (score, W.copy(), b.copy(), epoch)
    model = SentimentModel(best[1], best[2], config, epoch_scores, best[3])
    return model


def predict(model: SentimentModel, ci: ClassifierInput):
    """Label and class probabilities for one input."""
    vec = model.config.featurizer(ci.serialized, model.dimension)
    if vec and max(vec) >= model.dimension:
        raise DimensionMismatch(
            f"feature index {max(vec)} outside model dimension {model.dimension}")
    x = _to_dense([vec], model.dimension)[0]
    probs = softmax(x @ model.weights.T + model.bias)
    return CLASSES[int(probs.argmax())], probs


def micro_f1(predictions, golds) -> float:
    """Micro-averaged F1; equals accuracy for single-label multiclass."""
    if len(predictions) != len(golds):
        raise LengthMismatch(
            f"predictions and golds differ: {len(predictions)} vs {len(golds)}")
    if not golds:
        raise LengthMismatch("empty inputs")
    tp = sum(1 for p, g in zip(predictions, golds) if p == g)
    fp = len(predictions) - tp
    fn = len(golds) - tp
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


@dataclass
class ExperimentReport:
    variant: str
    runs: list  # per-seed best-epoch test micro-F1
    mean: float
    per_class: dict  # label -> {precision, recall, f1}
    confusion: dict  # gold label -> {predicted label: count}, first run

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def _per_class_metrics(preds, golds):
    per_class = {}
    confusion = {g: {p: 0 for p in CLASSES} for g in CLASSES}
    for p, g in zip(preds, golds):
        confusion[g][p] += 1
    for c in CLASSES:
        tp = confusion[c][c]
        fp = sum(confusion[g][c] for g in CLASSES if g != c)
        fn = sum(confusion[c][p] for p in CLASSES if p != c)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        per_class[c] = {"precision": prec, "recall": rec, "f1": f1}
    return per_class, confusion


def run_experiment(records, split, variant: InfusionVariant, seeds,
                   config: Optional[TrainConfig] = None) -> ExperimentReport:
    """Train/select/evaluate once per seed; report the per-run test
    micro-F1 and their mean.  Per-class metrics come from the first run."""
    config = config or TrainConfig()
    by_id = {r.record_id: r for r in records}
    tr = [serialize_input(by_id[i], variant) for i in split.train]
    va = [serialize_input(by_id[i], variant) for i in split.validation]
    te = [serialize_input(by_id[i], variant) for i in split.test]
    golds = [ci.label for ci in te]

    runs = []
    first_preds = None
    for seed in seeds:
        cfg = TrainConfig(seed=seed, learning_rate=config.learning_rate,
                          epochs=config.epochs, batch_size=config.batch_size,
                          dimension=config.dimension,
                          weight_decay=config.weight_decay,
                          featurizer=config.featurizer)
        model = train(tr, cfg, validation=va)
        preds = [predict(model, ci)[0] for ci in te]
        runs.append(micro_f1(preds, golds))
        if first_preds is None:
            first_preds = preds
    per_class, confusion = _per_class_metrics(first_preds, golds)
    return ExperimentReport(variant.value, runs, float(np.mean(runs)),
                            per_class, confusion)
