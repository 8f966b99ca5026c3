"""Oracle layer checked against direct counting and the dense simulators."""

import json
import math

import numpy as np
import pytest
from scipy import stats

from gqlab import quantum
from gqlab.errors import ScaleError
from gqlab.f2 import BitVector, matvec
from gqlab.fourier import maj_level_weights, maj_truth
from gqlab.graphs import Graph
from gqlab.oracles import QUERY_KINDS, GraphOracle, JuntaOracle, QueryLedger


def random_graph(n, m, rng):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    picks = rng.choice(len(pairs), size=m, replace=False)
    return Graph(n, [pairs[i] for i in picks])


def count_induced(graph, subset):
    s = set(subset)
    return sum(1 for (u, v) in graph.edges if u in s and v in s)


# -- ledger -------------------------------------------------------------------

def test_ledger_round_trip_and_monotonicity():
    ledger = QueryLedger()
    ledger.charge("or_query", 3)
    ledger.charge("graph_state_copy", 2)
    clone = QueryLedger.from_json(ledger.to_json())
    assert clone.counts == ledger.counts
    assert set(json.loads(ledger.to_json())) == set(QUERY_KINDS)
    with pytest.raises(ValueError):
        ledger.charge("or_query", -1)
    with pytest.raises(KeyError):
        ledger.charge("grover_call")


def test_ledger_pause_suppresses_but_audits():
    ledger = QueryLedger()
    with ledger.paused():
        ledger.charge("or_query", 5)
        ledger.charge("reveal_used")  # reveals pierce the pause
    ledger.charge("or_query")
    assert ledger.counts["or_query"] == 1
    assert ledger.suppressed["or_query"] == 5
    assert ledger.counts["reveal_used"] == 1


def test_ledger_delta():
    ledger = QueryLedger()
    ledger.charge("parity_query", 4)
    before = ledger.snapshot()
    ledger.charge("parity_query", 3)
    assert ledger.delta(before)["parity_query"] == 3
    assert ledger.delta(before)["or_query"] == 0


# -- classical graph queries ---------------------------------------------------

def test_or_and_parity_match_direct_counting():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = int(rng.integers(2, 10))
        m = int(rng.integers(0, n * (n - 1) // 2 + 1))
        g = random_graph(n, m, rng)
        oracle = GraphOracle(g, rng)
        for _ in range(20):
            mask = int(rng.integers(0, 1 << n))
            subset = [v for v in range(n) if (mask >> v) & 1]
            cnt = count_induced(g, subset)
            assert oracle.or_query(subset) == (1 if cnt else 0)
            assert oracle.parity_query(subset) == cnt % 2
    assert oracle.ledger.counts["or_query"] == oracle.calls["or_query"]


def test_queries_accept_bitvectors_and_reject_bad_vertices():
    g = Graph(4, [(0, 1)])
    oracle = GraphOracle(g, np.random.default_rng(0))
    assert oracle.or_query(BitVector.from_support([0, 1], 4)) == 1
    with pytest.raises(ValueError):
        oracle.or_query([4])
    with pytest.raises(ValueError):
        oracle.parity_vector_query(BitVector.from_support([0], 5))


def test_parity_vector_query_is_adjacency_action():
    rng = np.random.default_rng(5)
    g = random_graph(8, 11, rng)
    oracle = GraphOracle(g, rng)
    adj = g.adjacency()
    for _ in range(30):
        v = BitVector(8, int(rng.integers(0, 256)))
        assert oracle.parity_vector_query(v) == matvec(adj, v)
    assert oracle.ledger.counts["parity_query"] == 60


# -- Bell samples ---------------------------------------------------------------

def test_bell_sample_consistency_and_charges():
    rng = np.random.default_rng(9)
    g = random_graph(12, 20, rng)
    oracle = GraphOracle(g, rng)
    adj = g.adjacency()
    for _ in range(200):
        s, y = oracle.bell_sample()
        assert y == matvec(adj, s)
    assert oracle.ledger.counts["graph_state_copy"] == 400


def test_bell_sample_matches_dense_distribution():
    # joint (s, y) -> Pauli string frequencies vs the statevector route
    rng = np.random.default_rng(17)
    g = Graph(3, [(0, 1), (1, 2)])
    oracle = GraphOracle(g, rng)
    reference = {
        o.pauli: o.probability
        for o in quantum.bell_distribution(quantum.build_graph_state(g))
        if o.probability > 0
    }
    assert len(reference) == 8
    counts = {p: 0 for p in reference}
    draws = 100_000
    for _ in range(draws):
        s, y = oracle.bell_sample()
        label = quantum.pauli_string(s.bits, y.bits, 3)
        assert label in reference
        counts[label] += 1
    observed = np.array([counts[p] for p in reference])
    expected = np.array([reference[p] * draws for p in reference])
    assert stats.chisquare(observed, expected).pvalue > 1e-3


def test_bell_sample_s_marginal_uniform():
    rng = np.random.default_rng(23)
    g = Graph(4, [(0, 1), (2, 3), (1, 2)])
    oracle = GraphOracle(g, rng)
    counts = np.zeros(16)
    for _ in range(80_000):
        s, _ = oracle.bell_sample()
        counts[s.bits] += 1
    assert stats.chisquare(counts).pvalue > 1e-3


# -- Hadamard samples -------------------------------------------------------------

def hadamard_reference(g):
    state = quantum.build_graph_state(g)
    return np.abs(quantum._hadamard_all(state.amps, g.n)) ** 2


def test_hadamard_star_analytic_matches_dense():
    g = Graph(5, [(2, 0), (2, 1), (2, 4)])
    assert g.is_star() == 2
    ref = hadamard_reference(g)
    support = {i for i in range(32) if ref[i] > 1e-12}
    rng = np.random.default_rng(31)
    oracle = GraphOracle(g, rng)
    counts = {}
    draws = 40_000
    for _ in range(draws):
        z = oracle.hadamard_sample()
        counts[z.bits] = counts.get(z.bits, 0) + 1
    assert set(counts) <= support
    observed = np.array([counts.get(i, 0) for i in sorted(support)])
    expected = np.array([ref[i] * draws for i in sorted(support)])
    assert stats.chisquare(observed, expected).pvalue > 1e-3
    assert oracle.ledger.counts["graph_state_copy"] == draws


def test_hadamard_brute_path_matches_dense():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])  # cycle, not a star
    assert g.is_star() is None
    ref = hadamard_reference(g)
    rng = np.random.default_rng(37)
    oracle = GraphOracle(g, rng)
    counts = np.zeros(16)
    draws = 40_000
    for _ in range(draws):
        counts[oracle.hadamard_sample().bits] += 1
    keep = ref > 1e-12
    assert counts[~keep].sum() == 0
    assert stats.chisquare(counts[keep], ref[keep] * draws).pvalue > 1e-3


# -- Fourier sampling of the OR function -------------------------------------------

def or_truth_table(g, vertices):
    verts = list(vertices)
    t = len(verts)
    table = []
    for mask in range(1 << t):
        subset = [verts[j] for j in range(t) if (mask >> j) & 1]
        table.append(1 if count_induced(g, subset) else 0)
    return table


def test_fourier_star_matches_dense_distribution():
    g = Graph(5, [(1, 0), (1, 3), (1, 4)])
    ref = quantum.fourier_sampling_distribution(or_truth_table(g, range(5)), 5)
    rng = np.random.default_rng(41)
    oracle = GraphOracle(g, rng)
    counts = np.zeros(32)
    draws = 100_000
    for _ in range(draws):
        out = oracle.fourier_sample_or()
        counts[sum(1 << v for v in out)] += 1
    keep = ref > 1e-12
    assert counts[~keep].sum() == 0
    assert stats.chisquare(counts[keep], ref[keep] * draws).pvalue > 1e-3
    assert oracle.ledger.counts["or_query"] == draws


def test_fourier_star_center_rate_large_star():
    # center mass (1 - 2^-m)^2 survives at sizes far beyond dense simulation
    g = Graph(
        400, [(7, v) for v in range(400) if v != 7][:64]
    )
    rng = np.random.default_rng(43)
    oracle = GraphOracle(g, rng)
    hits = sum(1 for _ in range(2000) if oracle.fourier_sample_or() == {7})
    assert hits / 2000 == pytest.approx((1 - 2.0**-64) ** 2, abs=0.02)


def test_fourier_brute_restricted_matches_dense():
    g = Graph(7, [(0, 1), (1, 2), (4, 5), (5, 6), (4, 6)])
    window = [1, 2, 4, 5, 6]
    ref = quantum.fourier_sampling_distribution(or_truth_table(g, window), 5)
    rng = np.random.default_rng(47)
    oracle = GraphOracle(g, rng)
    counts = np.zeros(32)
    draws = 60_000
    for _ in range(draws):
        out = oracle.fourier_sample_or(restrict=window)
        mask = 0
        for v in out:
            mask |= 1 << window.index(v)
        counts[mask] += 1
    keep = ref > 1e-12
    assert counts[~keep].sum() == 0
    assert stats.chisquare(counts[keep], ref[keep] * draws).pvalue > 1e-3


def test_fourier_restricted_no_edge_gives_empty():
    g = Graph(6, [(0, 1), (2, 3)])
    oracle = GraphOracle(g, np.random.default_rng(53))
    for _ in range(10):
        assert oracle.fourier_sample_or(restrict=[0, 2, 4, 5]) == frozenset()
    assert oracle.ledger.counts["or_query"] == 10


def test_fourier_brute_scale_cap():
    n = 30
    g = Graph(n, [(i, i + 1) for i in range(n - 1)])
    oracle = GraphOracle(g, np.random.default_rng(59))
    with pytest.raises(ScaleError):
        oracle.fourier_sample_or()


# -- reveals ---------------------------------------------------------------------

def test_reveals_are_audited():
    g = Graph(3, [(0, 1)])
    oracle = GraphOracle(g, np.random.default_rng(61))
    assert oracle.peek_graph() is g
    assert oracle.peek_or_query([0, 1]) == 1
    assert oracle.ledger.counts["reveal_used"] == 2
    assert oracle.ledger.counts["or_query"] == 0


# -- junta oracle -----------------------------------------------------------------

def test_junta_query_evaluates_g_on_hidden_variables():
    rng = np.random.default_rng(67)
    table = maj_truth(3)
    oracle = JuntaOracle(10, (1, 4, 8), rng, g_table=table)
    for _ in range(50):
        bits = int(rng.integers(0, 1 << 10))
        x = BitVector(10, bits)
        local = (x.get(1) << 0) | (x.get(4) << 1) | (x.get(8) << 2)
        assert oracle.junta_query(x) == table[local]
    assert oracle.ledger.counts["junta_query"] == 50


def test_junta_fourier_sample_distribution():
    rng = np.random.default_rng(71)
    support = (2, 5, 6)
    oracle = JuntaOracle(8, support, rng, g_table=maj_truth(3))
    # MAJ_3: each singleton 1/4, full set 1/4
    expect = {
        frozenset({2}): 0.25,
        frozenset({5}): 0.25,
        frozenset({6}): 0.25,
        frozenset({2, 5, 6}): 0.25,
    }
    counts = {key: 0 for key in expect}
    draws = 40_000
    for _ in range(draws):
        out = oracle.fourier_sample()
        assert out in expect
        counts[out] += 1
    observed = np.array(list(counts.values()))
    assert stats.chisquare(observed).pvalue > 1e-3
    assert oracle.ledger.counts["junta_query"] == draws


def test_amplified_sampler_charges_and_conditions():
    rng = np.random.default_rng(73)
    support = tuple(range(3, 8))
    oracle = JuntaOracle(20, support, rng, g_table=maj_truth(5))
    weights = maj_level_weights(5)
    w_ge = weights[3:].sum()  # 0.296875
    per_success = math.ceil(1 / math.sqrt(w_ge))
    rounds = 30_000
    successes = 0
    level_counts = {3: 0, 5: 0}
    for _ in range(rounds):
        out = oracle.amplified_level_sample(3)
        if out is None:
            continue
        successes += 1
        assert out <= set(support)
        level_counts[len(out)] += 1
    assert successes / rounds == pytest.approx(max(w_ge, 1 - w_ge), abs=0.02)
    assert oracle.ledger.counts["charged_quantum"] == successes * per_success
    assert level_counts[3] / successes == pytest.approx(weights[3] / w_ge, abs=0.02)


def test_amplified_sampler_from_closed_form_weights():
    # arity too wide to tabulate; closed-form weights drive the sampler
    rng = np.random.default_rng(79)
    k = 33
    support = tuple(range(0, 66, 2))
    oracle = JuntaOracle(
        66,
        support,
        rng,
        level_weights=maj_level_weights(k),
        weight_eval=lambda w: int(w > k / 2),
    )
    l = (k + 1) // 2
    out = None
    while out is None:
        out = oracle.amplified_level_sample(l)
    assert out <= set(support)
    assert len(out) >= l
    assert oracle.junta_query(BitVector.from_support(support, 66)) == 1
    assert oracle.junta_query(BitVector(66, 0)) == 0


def test_amplified_sampler_rejects_asymmetric_table():
    table = [0, 1, 0, 0]  # depends on variable 0 only
    oracle = JuntaOracle(5, (0, 1), np.random.default_rng(83), g_table=table)
    with pytest.raises(ValueError):
        oracle.amplified_level_sample(1)


def test_junta_oracle_validation():
    rng = np.random.default_rng(89)
    with pytest.raises(ValueError):
        JuntaOracle(5, (0, 0, 1), rng, g_table=maj_truth(3))
    with pytest.raises(ValueError):
        JuntaOracle(5, (0, 1, 7), rng, g_table=maj_truth(3))
    with pytest.raises(ValueError):
        JuntaOracle(5, (0, 1, 2), rng)
    oracle = JuntaOracle(5, (0, 1, 2), rng, g_table=maj_truth(3))
    with pytest.raises(ValueError):
        oracle.amplified_level_sample(0)
    assert oracle.peek_support() == (0, 1, 2)
    assert oracle.ledger.counts["reveal_used"] == 1
