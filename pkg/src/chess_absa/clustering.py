"""Verb similarity graph and Chinese Whispers clustering, mapping verb
clusters onto the five move-action types."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .extraction import VerbLexicon

ACTION_TYPES = ("Attack", "Capture", "Defend", "Protect", "Move")

DEFAULT_ANCHORS = {
    "Attack": ("attack",),
    "Capture": ("capture", "take"),
    "Defend": ("defend",),
    "Protect": ("protect", "guard"),
    "Move": ("play", "move"),
}

DEFAULT_SEED = 50
DEFAULT_ITERATIONS = 50
DEFAULT_THRESHOLD = 40.0  # cosine similarity on a 0-100 scale


class ClusteringError(Exception):
    pass


class MissingEmbedding(ClusteringError):
    pass


class DimensionMismatch(ClusteringError):
    pass


class EmptyGraph(ClusteringError):
    pass


@dataclass(frozen=True)
class VerbGraph:
    nodes: tuple[str, ...]
    edges: dict  # frozenset({u, v}) -> weight in [0, 100]

    def neighbors(self, node: str):
        for pair, w in self.edges.items():
            if node in pair:
                (other,) = pair - {node}
                yield other, w


@dataclass(frozen=True)
class VerbClustering:
    assignment: dict  # lemma -> cluster id, contiguous from 0
    seed: int
    iterations: int

    def clusters(self) -> dict:
        out: dict[int, set] = {}
        for lemma, cid in self.assignment.items():
            out.setdefault(cid, set()).add(lemma)
        return out


def _cosine(u, v) -> float:
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0 or nv == 0:
        raise DimensionMismatch("zero-norm embedding vector")
    return dot / (nu * nv)


def load_embeddings(path) -> dict[str, tuple[float, ...]]:
    """`lemma v1 v2 ...` per line."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if len(parts) < 2:
                continue
            out[parts[0]] = tuple(float(x) for x in parts[1:])
    return out


def build_verb_graph(lemmas, lexicon: Optional[VerbLexicon], embeddings,
                     threshold: float = DEFAULT_THRESHOLD) -> VerbGraph:
    """Edges where scaled cosine similarity clears the threshold; lexicon
    synonym pairs are always connected with weight 100."""
    lemmas = sorted(set(lemmas))
    dim = None
    for lemma in lemmas:
        if lemma not in embeddings:
            raise MissingEmbedding(f"no embedding for {lemma!r}")
        if dim is None:
            dim = len(embeddings[lemma])
        elif len(embeddings[lemma]) != dim:
            raise DimensionMismatch(
                f"{lemma!r} has dimension {len(embeddings[lemma])}, expected {dim}")
    edges = {}
    for i, u in enumerate(lemmas):
        for v in lemmas[i + 1:]:
            if lexicon is not None and lexicon.are_synonyms(u, v):
                edges[frozenset((u, v))] = 100.0
                continue
            sim = 100.0 * _cosine(embeddings[u], embeddings[v])
            if sim >= threshold:
                edges[frozenset((u, v))] = sim
    return VerbGraph(tuple(lemmas), edges)


def chinese_whispers(graph: VerbGraph, seed: int = DEFAULT_SEED,
                     iterations: int = DEFAULT_ITERATIONS) -> VerbClustering:
    """Randomized label propagation: every node starts in its own class
    and repeatedly adopts the class with the largest incident edge-weight
    sum among its neighbors.  Deterministic for a fixed seed."""
    if not graph.nodes:
        raise EmptyGraph("cannot cluster an empty graph")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rng = random.Random(seed)
    labels = {node: i for i, node in enumerate(graph.nodes)}
    adjacency: dict[str, list] = {node: [] for node in graph.nodes}
    for pair, w in graph.edges.items():
        u, v = sorted(pair)
        adjacency[u].append((v, w))
        adjacency[v].append((u, w))

    order = list(graph.nodes)
    for _ in range(iterations):
        rng.shuffle(order)
        for node in order:
            if not adjacency[node]:
                continue
            weight_by_label: dict[int, float] = {}
            for other, w in adjacency[node]:
                weight_by_label[labels[other]] = weight_by_label.get(labels[other], 0.0) + w
            best = max(weight_by_label.values())
            winners = sorted(l for l, w in weight_by_label.items() if w == best)
            labels[node] = winners[rng.randrange(len(winners))]

    # renumber cluster ids contiguously, ordered by first node appearance
    remap: dict[int, int] = {}
    assignment = {}
    for node in graph.nodes:
        lbl = labels[node]
        if lbl not in remap:
            remap[lbl] = len(remap)
        assignment[node] = remap[lbl]
    return VerbClustering(assignment, seed, iterations)


def assign_action_types(clustering: VerbClustering,
                        anchors: Optional[dict] = None) -> dict[int, str]:
    """Label each cluster by the unique anchor verb it contains; clusters
    with no anchor or conflicting anchors fall back to Move."""
    anchors = anchors or DEFAULT_ANCHORS
    missing = [t for t in ACTION_TYPES if t not in anchors]
    if missing:
        raise ValueError(f"anchors missing for types {missing}")
    type_map = {}
    for cid, members in clustering.clusters().items():
        hit_types = {t for t, lemmas in anchors.items()
                     if members & set(lemmas)}
        type_map[cid] = hit_types.pop() if len(hit_types) == 1 else "Move"
    return type_map


def action_type_of(lemma: str, clustering: VerbClustering,
                   type_map: dict[int, str]) -> str:
    cid = clustering.assignment.get(lemma)
    return type_map.get(cid, "Move")


def save_clustering(path, clustering: VerbClustering, type_map: dict[int, str]) -> None:
    """`lemma<TAB>cluster_id<TAB>action_type` per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for lemma in sorted(clustering.assignment):
            cid = clustering.assignment[lemma]
            fh.write(f"{lemma}\t{cid}\t{type_map.get(cid, 'Move')}\n")
