import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from chess_absa.clustering import (
    DEFAULT_ITERATIONS, DEFAULT_SEED, DEFAULT_THRESHOLD, DimensionMismatch,
    EmptyGraph, MissingEmbedding, VerbGraph, action_type_of,
    assign_action_types, build_verb_graph, chinese_whispers, load_embeddings,
    save_clustering,
)
from chess_absa.extraction import VerbLexicon

DATA = Path(__file__).resolve().parents[1] / "src/chess_absa/data"


def two_clique_graph():
    """Two 3-cliques joined by a single weak edge."""
    a = ["attack", "assault", "threaten"]
    b = ["shield", "protect", "guard"]
    edges = {}
    for group in (a, b):
        for i, u in enumerate(group):
            for v in group[i + 1:]:
                edges[frozenset((u, v))] = 90.0
    edges[frozenset(("threaten", "shield"))] = 41.0
    return VerbGraph(tuple(sorted(a + b)), edges), set(a), set(b)


class TestDefaults:
    def test_values(self):
        assert DEFAULT_SEED == 50
        assert DEFAULT_ITERATIONS == 50
        assert DEFAULT_THRESHOLD == 40.0


class TestGraphConstruction:
    def test_threshold_filters_edges(self):
        embeddings = {"a": (1.0, 0.0), "b": (1.0, 0.1), "c": (0.0, 1.0)}
        graph = build_verb_graph(["a", "b", "c"], None, embeddings)
        assert frozenset(("a", "b")) in graph.edges
        assert frozenset(("a", "c")) not in graph.edges

    def test_synonym_edge_full_weight(self, tmp_path):
        lex_path = tmp_path / "v.txt"
        lex_path.write_text("attack\tattacks,attacked\tassault\n"
                            "assault\tassaults\tattack\n")
        lexicon = VerbLexicon.load(lex_path)
        embeddings = {"attack": (1.0, 0.0), "assault": (0.0, 1.0)}
        graph = build_verb_graph(["attack", "assault"], lexicon, embeddings)
        assert graph.edges[frozenset(("attack", "assault"))] == 100.0

    def test_missing_embedding(self):
        with pytest.raises(MissingEmbedding):
            build_verb_graph(["a", "b"], None, {"a": (1.0,)})

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            build_verb_graph(["a", "b"], None, {"a": (1.0,), "b": (1.0, 0.0)})


class TestChineseWhispers:
    def test_two_cliques_separate(self):
        graph, a, b = two_clique_graph()
        clusters = chinese_whispers(graph).clusters()
        groups = {frozenset(m) for m in clusters.values()}
        assert groups == {frozenset(a), frozenset(b)}

    def test_deterministic(self):
        graph, _, _ = two_clique_graph()
        first = chinese_whispers(graph, seed=50)
        second = chinese_whispers(graph, seed=50)
        assert first.assignment == second.assignment

    def test_empty_graph(self):
        with pytest.raises(EmptyGraph):
            chinese_whispers(VerbGraph((), {}))

    def test_isolated_nodes_stay_alone(self):
        graph = VerbGraph(("a", "b"), {})
        clusters = chinese_whispers(graph).clusters()
        assert len(clusters) == 2

    def test_contiguous_ids(self):
        graph, _, _ = two_clique_graph()
        assignment = chinese_whispers(graph).assignment
        assert set(assignment.values()) == set(range(len(set(assignment.values()))))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_random_graph_components_never_merge(self, seed):
        # nodes in different connected components can never share a cluster
        rng = random.Random(seed)
        n = rng.randint(2, 12)
        nodes = tuple(f"v{i}" for i in range(n))
        edges = {}
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.3:
                    edges[frozenset((nodes[i], nodes[j]))] = rng.uniform(41, 100)
        graph = VerbGraph(nodes, edges)
        assignment = chinese_whispers(graph, seed=seed).assignment

        parent = {v: v for v in nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for pair in edges:
            u, v = sorted(pair)
            parent[find(u)] = find(v)
        for u in nodes:
            for v in nodes:
                if assignment[u] == assignment[v]:
                    assert find(u) == find(v)


class TestActionTypes:
    def test_anchor_assignment(self):
        graph, a, b = two_clique_graph()
        clustering = chinese_whispers(graph)
        type_map = assign_action_types(clustering)
        assert action_type_of("attack", clustering, type_map) == "Attack"
        assert action_type_of("guard", clustering, type_map) == "Protect"

    def test_conflict_falls_back_to_move(self):
        graph = VerbGraph(("attack", "capture"),
                          {frozenset(("attack", "capture")): 100.0})
        clustering = chinese_whispers(graph)
        type_map = assign_action_types(clustering)
        assert set(type_map.values()) == {"Move"}

    def test_unknown_lemma_is_move(self):
        graph, _, _ = two_clique_graph()
        clustering = chinese_whispers(graph)
        type_map = assign_action_types(clustering)
        assert action_type_of("castle", clustering, type_map) == "Move"


class TestIo:
    def test_load_bundled_embeddings(self):
        embeddings = load_embeddings(DATA / "verb_vectors.txt")
        assert "attack" in embeddings and "play" in embeddings
        dims = {len(v) for v in embeddings.values()}
        assert len(dims) == 1

    def test_end_to_end_on_bundled_data(self, tmp_path):
        embeddings = load_embeddings(DATA / "verb_vectors.txt")
        lexicon = VerbLexicon.load(DATA / "verbs.txt")
        graph = build_verb_graph(sorted(embeddings), lexicon, embeddings)
        clustering = chinese_whispers(graph)
        type_map = assign_action_types(clustering)
        out = tmp_path / "clusters.tsv"
        save_clustering(out, clustering, type_map)
        lines = out.read_text().splitlines()
        assert len(lines) == len(embeddings)
        for line in lines:
            lemma, cid, action = line.split("\t")
            assert clustering.assignment[lemma] == int(cid)
            assert action in {"Attack", "Capture", "Defend", "Protect", "Move"}
        assert action_type_of("capture", clustering, type_map) == "Capture"
        assert action_type_of("play", clustering, type_map) == "Move"
