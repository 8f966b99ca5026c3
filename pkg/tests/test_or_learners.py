"""Edge-existence learners checked exhaustively on small graphs."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqlab.errors import RetryBudgetError, ViolationError
from gqlab.graphs import Graph
from gqlab.oracles import GraphOracle, QueryLedger
from gqlab.or_learners import (
    StarResult,
    find_nonisolated,
    greedy_coloring,
    learn_bipartite_bounded_degree,
    learn_bipartite_edges,
    learn_clique_or,
    learn_graph_or,
    learn_merge_tree,
    learn_star_or,
    peel_independent_sets,
)


def fresh(graph, seed):
    return GraphOracle(graph, np.random.default_rng(seed))


def all_pairs(vertices):
    return list(itertools.combinations(sorted(vertices), 2))


# -- find_nonisolated ------------------------------------------------------------

def test_find_nonisolated_exact():
    # A = {0,1,2}, B = {3,4}; only cross edges
    g = Graph(5, [(0, 3), (2, 4)])
    oracle = fresh(g, 1)
    assert find_nonisolated(oracle, [0, 1, 2], [3, 4]) == {0, 2}
    assert find_nonisolated(oracle, [1], [3, 4]) == frozenset()
    assert find_nonisolated(oracle, [], [3, 4]) == frozenset()


def test_find_nonisolated_catches_dependent_other_side():
    g = Graph(4, [(2, 3)])  # the "other" side holds an edge
    oracle = fresh(g, 2)
    with pytest.raises(ViolationError):
        find_nonisolated(oracle, [0, 1], [2, 3])


# -- bipartite learning -----------------------------------------------------------

def test_bipartite_edges_exhaustive_3x3():
    a_side, b_side = [0, 1, 2], [3, 4, 5]
    cross = [(a, b) for a in a_side for b in b_side]
    for mask in range(1 << 9):
        edges = [cross[i] for i in range(9) if (mask >> i) & 1]
        oracle = fresh(Graph(6, edges), mask)
        got = learn_bipartite_edges(oracle, a_side, b_side)
        assert sorted(got) == sorted(edges)


def test_bipartite_edges_empty_case_is_one_query():
    oracle = fresh(Graph(6, []), 3)
    assert learn_bipartite_edges(oracle, [0, 1, 2], [3, 4, 5]) == []
    assert oracle.ledger.counts["or_query"] == 1


def test_bipartite_edges_quantum_backend_charges():
    edges = [(0, 4), (1, 4), (2, 5)]
    oracle = fresh(Graph(6, edges), 4)
    got = learn_bipartite_edges(
        oracle, [0, 1, 2], [3, 4, 5], backend="quantum_ideal"
    )
    assert sorted(got) == sorted(edges)
    assert oracle.ledger.counts["charged_quantum"] > 0
    assert oracle.ledger.suppressed["or_query"] > 0
    # the nonempty check, plus the two-query recheck fired by every
    # a-side vertex coming back active
    assert oracle.ledger.counts["or_query"] == 3


def test_bounded_degree_bipartite_exact():
    rng = np.random.default_rng(5)
    a_side = list(range(6))
    b_side = list(range(6, 26))
    for trial in range(10):
        edges = []
        for a in a_side:
            deg = int(rng.integers(0, 3))
            for b in rng.choice(b_side, size=deg, replace=False):
                edges.append((a, int(b)))
        oracle = fresh(Graph(26, edges), 50 + trial)
        got = learn_bipartite_bounded_degree(oracle, a_side, b_side, d=2)
        assert sorted(got) == sorted(set(edges))


def test_bounded_degree_one_uses_binary_indexing_count():
    a_side = list(range(4))
    b_side = list(range(4, 24))
    edges = [(0, 9), (2, 23), (3, 4)]
    oracle = fresh(Graph(24, edges), 6)
    got = learn_bipartite_bounded_degree(oracle, a_side, b_side, d=1)
    assert sorted(got) == sorted(edges)
    # nonadaptive: |A| * bit_length(|B|) single queries, no more
    assert oracle.ledger.counts["or_query"] == 4 * (20).bit_length()


def test_bounded_degree_violation_detected():
    b_side = list(range(1, 21))
    edges = [(0, 1), (0, 2), (0, 3)]  # degree 3 against a d=2 design
    oracle = fresh(Graph(21, edges), 7)
    with pytest.raises(ViolationError):
        learn_bipartite_bounded_degree(oracle, [0], b_side, d=2)


def test_bounded_degree_small_other_side_direct():
    edges = [(0, 3), (1, 3)]
    oracle = fresh(Graph(4, edges), 8)
    got = learn_bipartite_bounded_degree(oracle, [0, 1, 2], [3], d=1)
    assert sorted(got) == sorted(edges)
    assert oracle.ledger.counts["or_query"] == 3  # one per pair


# -- coloring ----------------------------------------------------------------------

@given(st.integers(min_value=1, max_value=12), st.integers())
@settings(max_examples=60, deadline=None)
def test_greedy_coloring_proper_and_bounded(n, seed):
    rng = np.random.default_rng(seed % (2**32))
    pairs = all_pairs(range(n))
    m = int(rng.integers(0, len(pairs) + 1))
    edges = [pairs[i] for i in rng.choice(len(pairs), size=m, replace=False)] if pairs else []
    classes = greedy_coloring(range(n), edges)
    seen = sorted(v for cls in classes for v in cls)
    assert seen == list(range(n))
    eset = set(edges)
    for cls in classes:
        for u, v in all_pairs(cls):
            assert (u, v) not in eset
    assert len(classes) <= math.isqrt(2 * len(edges)) + 1


# -- peeling -----------------------------------------------------------------------

def test_peeling_partitions_into_independent_parts():
    g = Graph(10, [(0, 1), (1, 2), (3, 4), (5, 6), (7, 8), (8, 9), (0, 9)])
    oracle = fresh(g, 9)
    parts = peel_independent_sets(oracle, list(range(10)), p=0.25, fail_budget=200)
    seen = sorted(v for part in parts for v in part)
    assert seen == list(range(10))
    for part in parts:
        for u, v in all_pairs(part):
            assert not g.has_edge(u, v)


def test_peeling_budget_error_on_aggressive_p():
    g = Graph(8, all_pairs(range(8)))  # complete graph
    oracle = fresh(g, 10)
    with pytest.raises(RetryBudgetError):
        peel_independent_sets(oracle, list(range(8)), p=0.95, fail_budget=5)


# -- full learner -------------------------------------------------------------------

def test_learn_graph_or_exhaustive_n5():
    pairs = all_pairs(range(5))
    for mask in range(1 << 10):
        edges = [pairs[i] for i in range(10) if (mask >> i) & 1]
        g = Graph(5, edges)
        got = learn_graph_or(fresh(g, mask), m_hint=max(1, len(edges)))
        assert got == g


@given(st.integers(min_value=1, max_value=14), st.integers())
@settings(max_examples=40, deadline=None)
def test_learn_graph_or_random(n, seed):
    rng = np.random.default_rng(seed % (2**32))
    pairs = all_pairs(range(n))
    m = int(rng.integers(0, len(pairs) + 1)) if pairs else 0
    edges = [pairs[i] for i in rng.choice(len(pairs), size=m, replace=False)] if pairs else []
    g = Graph(n, edges)
    assert learn_graph_or(fresh(g, seed % 997), m_hint=None) == g


def test_learn_graph_or_quantum_matches_classical():
    pairs = all_pairs(range(12))
    rng = np.random.default_rng(11)
    edges = [pairs[i] for i in rng.choice(len(pairs), size=17, replace=False)]
    g = Graph(12, edges)
    classical = learn_graph_or(fresh(g, 12), m_hint=17)
    oracle_q = fresh(g, 12)
    quantum = learn_graph_or(oracle_q, m_hint=17, backend="quantum_ideal")
    assert classical == quantum == g
    assert oracle_q.ledger.counts["charged_quantum"] > 0


def test_learn_graph_or_bounded_degree_routing():
    g = Graph(14, [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (1, 12)])
    got = learn_graph_or(fresh(g, 13), m_hint=7, d=2)
    assert got == g


def test_learn_graph_or_deterministic_per_seed():
    g = Graph(10, [(0, 5), (1, 5), (2, 7), (3, 9), (8, 9)])
    runs = []
    for _ in range(2):
        oracle = fresh(g, 14)
        assert learn_graph_or(oracle, m_hint=5) == g
        runs.append(oracle.ledger.counts)
    assert runs[0] == runs[1]


# -- clique -------------------------------------------------------------------------

def test_learn_clique_exhaustive_k3_n8():
    for members in itertools.combinations(range(8), 3):
        g = Graph(8, all_pairs(members))
        got = learn_clique_or(fresh(g, sum(members)), k=3)
        assert got == frozenset(members)


def test_learn_clique_k2_single_edge():
    for (u, v) in itertools.combinations(range(6), 2):
        g = Graph(6, [(u, v)])
        assert learn_clique_or(fresh(g, u * 7 + v), k=2) == {u, v}


def test_learn_clique_quantum_charge_formula():
    members = (1, 4, 5, 9, 13)
    g = Graph(16, all_pairs(members))
    oracle = fresh(g, 15)
    assert learn_clique_or(oracle, k=5, backend="quantum_ideal") == frozenset(members)
    assert oracle.ledger.counts["charged_quantum"] == math.ceil(math.sqrt(4))


def test_learn_clique_detects_broken_promise():
    g = Graph(3, [(0, 1), (1, 2)])  # path, not a triangle
    with pytest.raises(ViolationError):
        learn_clique_or(fresh(g, 16), k=3)


def test_learn_clique_argument_validation():
    g = Graph(4, [(0, 1)])
    with pytest.raises(ValueError):
        learn_clique_or(fresh(g, 17), k=1)


# -- star ---------------------------------------------------------------------------

def test_learn_star_sweep_centers_and_sizes():
    rng = np.random.default_rng(18)
    for center in range(10):
        for m in (2, 3, 5, 7):
            leaves = [int(v) for v in rng.choice([u for u in range(10) if u != center], size=m, replace=False)]
            g = Graph(10, [(center, v) for v in leaves])
            res = learn_star_or(fresh(g, center * 31 + m))
            assert isinstance(res, StarResult)
            assert res.center == center
            assert res.leaves == set(leaves)
            assert res.center_determined
            assert sorted(res.edges()) == sorted(
                (min(center, v), max(center, v)) for v in leaves
            )


def test_learn_star_single_edge_flagged():
    g = Graph(8, [(2, 6)])
    res = learn_star_or(fresh(g, 19))
    assert not res.center_determined
    assert {res.center, *res.leaves} == {2, 6}
    assert res.edges() == [(2, 6)]


def test_learn_star_charges():
    center, leaves = 0, [1, 2, 3, 4]
    g = Graph(64, [(center, v) for v in leaves])
    oracle = fresh(g, 20)
    res = learn_star_or(oracle)
    assert res.center == center and res.leaves == set(leaves)
    # doubling search over 4 leaves bills 1 + 2 + 2 amplified rounds
    assert oracle.ledger.counts["charged_quantum"] == 5
    # four samples plus the one-query verification in the typical round
    assert oracle.ledger.counts["or_query"] == 5


def test_learn_star_empty_graph_budget_error():
    g = Graph(6, [])
    with pytest.raises(RetryBudgetError):
        learn_star_or(fresh(g, 21), rounds_cap=3)
