"""Audited oracle access to hidden graphs and hidden juntas.

Every learner touches the hidden object only through these classes, and every
access lands in a QueryLedger.  Reveal methods exist for harness plumbing and
tests; they bump a dedicated counter so an audit can prove no learner cheated.
"""

from __future__ import annotations

import json
import math
from contextlib import contextmanager
from typing import Iterable, Sequence

import numpy as np

from gqlab import f2
from gqlab.errors import ScaleError
from gqlab.f2 import BitVector
from gqlab.fourier import MAX_TABLE_VARS, fourier_table, influence_profile
from gqlab.graphs import Graph

__all__ = ["QUERY_KINDS", "MAX_WHT_VARS", "QueryLedger", "GraphOracle", "JuntaOracle"]

QUERY_KINDS = (
    "or_query",
    "parity_query",
    "graph_state_copy",
    "charged_quantum",
    "junta_query",
    "classical_bit_ops",
    "reveal_used",
)

# brute Walsh tables for OR restrictions stay below 2^22 entries
MAX_WHT_VARS = 22


class QueryLedger:
    """Monotone counters, one per query kind.

    ``paused()`` suspends charging inside quantum cost models whose classical
    simulation must not bill the simulated steps; suppressed charges are
    still tallied separately so tests can audit them.  Reveals are never
    suppressed.
    """

    def __init__(self) -> None:
        self.counts = {kind: 0 for kind in QUERY_KINDS}
        self.suppressed = {kind: 0 for kind in QUERY_KINDS}
        self._pause_depth = 0

    def charge(self, kind: str, amount: int = 1) -> None:
        if kind not in self.counts:
            raise KeyError(f"unknown query kind {kind!r}")
        if amount < 0:
            raise ValueError("charges are monotone")
        if self._pause_depth and kind != "reveal_used":
            self.suppressed[kind] += amount
        else:
            self.counts[kind] += amount

    @contextmanager
    def paused(self):
        self._pause_depth += 1
        try:
            yield self
        finally:
            self._pause_depth -= 1

    def snapshot(self) -> dict[str, int]:
        return dict(self.counts)

    def delta(self, before: dict[str, int]) -> dict[str, int]:
        return {kind: self.counts[kind] - before.get(kind, 0) for kind in QUERY_KINDS}

    def to_json(self) -> str:
        return json.dumps(self.counts, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "QueryLedger":
        data = json.loads(text)
        ledger = cls()
        for kind in QUERY_KINDS:
            value = int(data[kind])
            if value < 0:
                raise ValueError("negative count in ledger")
            ledger.counts[kind] = value
        return ledger

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.counts.items() if v)
        return f"QueryLedger({inner})"


def _as_mask(n: int, subset) -> int:
    if isinstance(subset, BitVector):
        if subset.n != n:
            raise ValueError("subset width mismatch")
        return subset.bits
    mask = 0
    for v in subset:
        if not 0 <= v < n:
            raise ValueError(f"vertex {v} out of range")
        mask |= 1 << v
    return mask


class GraphOracle:
    """Query access to one hidden graph."""

    def __init__(self, graph: Graph, rng: np.random.Generator, ledger: QueryLedger | None = None):
        self._graph = graph
        self.n = graph.n
        self.rng = rng
        self.ledger = ledger if ledger is not None else QueryLedger()
        self.calls = {
            "or_query": 0,
            "parity_query": 0,
            "parity_vector_query": 0,
            "bell_sample": 0,
            "hadamard_sample": 0,
            "fourier_sample_or": 0,
        }

    # -- classical queries ---------------------------------------------------

    def or_query(self, subset) -> int:
        """1 iff the subset induces at least one edge."""
        mask = _as_mask(self.n, subset)
        self.calls["or_query"] += 1
        self.ledger.charge("or_query")
        adj = self._graph.adj_bits
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            if adj[v] & mask:
                return 1
            m &= m - 1
        return 0

    def parity_query(self, subset) -> int:
        """Parity of the number of induced edges."""
        mask = _as_mask(self.n, subset)
        self.calls["parity_query"] += 1
        self.ledger.charge("parity_query")
        total = 0
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            total += (self._graph.adj_bits[v] & mask).bit_count()
            m &= m - 1
        return (total // 2) & 1

    def parity_vector_query(self, v: BitVector) -> BitVector:
        """Adjacency-matrix action on v, at the cost of two parity queries."""
        if v.n != self.n:
            raise ValueError("vector width mismatch")
        self.calls["parity_vector_query"] += 1
        self.ledger.charge("parity_query", 2)
        return BitVector(self.n, self._matvec_bits(v.bits))

    # -- copy-consuming samples ------------------------------------------------

    def bell_sample(self) -> tuple[BitVector, BitVector]:
        """Uniform s with y = A s; consumes two state copies."""
        self.calls["bell_sample"] += 1
        self.ledger.charge("graph_state_copy", 2)
        s_bits = f2.random_vector(self.n, self.rng).bits
        return BitVector(self.n, s_bits), BitVector(self.n, self._matvec_bits(s_bits))

    def hadamard_sample(self) -> BitVector:
        """All-qubits X-basis measurement outcome; consumes one state copy."""
        self.calls["hadamard_sample"] += 1
        self.ledger.charge("graph_state_copy")
        center = self._graph.is_star()
        if center is not None:
            return self._hadamard_star(center)
        return self._hadamard_brute()

    def _hadamard_star(self, center: int) -> BitVector:
        # four equiprobable outcomes: 0, e_c, 1_L, 1_L + e_c
        leaf_mask = self._graph.adj_bits[center]
        draw = int(self.rng.integers(4))
        bits = 0
        if draw & 1:
            bits ^= 1 << center
        if draw & 2:
            bits ^= leaf_mask
        return BitVector(self.n, bits)

    def _hadamard_brute(self) -> BitVector:
        from gqlab import quantum

        state = quantum.build_graph_state(self._graph)
        probs = np.abs(quantum._hadamard_all(state.amps, state.n)) ** 2
        outcome = int(self.rng.choice(len(probs), p=probs / probs.sum()))
        return BitVector(self.n, outcome)

    # -- Fourier sampling of the OR function -----------------------------------

    def fourier_sample_or(self, restrict: Iterable[int] | None = None) -> frozenset[int]:
        """One quantum query to [subset contains an edge], sampled in Fourier basis.

        With ``restrict`` the function is first restricted to those vertices
        (everything else pinned to 0), i.e. the OR function of the induced
        subgraph.
        """
        self.calls["fourier_sample_or"] += 1
        self.ledger.charge("or_query")
        if restrict is None:
            center = self._graph.is_star()
            if center is not None:
                return self._fourier_star(center)
            vertices = range(self.n)
        else:
            vertices = sorted(set(restrict))
        return self._fourier_brute(vertices)

    def _fourier_star(self, center: int) -> frozenset[int]:
        leaf_mask = self._graph.adj_bits[center]
        m = leaf_mask.bit_count()
        p_center = (1.0 - 2.0**-m) ** 2
        if self.rng.random() < p_center:
            return frozenset((center,))
        # remaining mass is uniform over the other 2^(m+1)-1 subsets of
        # {center} + leaves, the empty set included
        leaves = BitVector(self.n, leaf_mask).support()
        while True:
            bits = int.from_bytes(self.rng.bytes((m + 1 + 7) // 8), "little")
            bits &= (1 << (m + 1)) - 1
            if bits != 1:  # center alone is the already-handled outcome
                break
        out = set()
        if bits & 1:
            out.add(center)
        for j, leaf in enumerate(leaves):
            if (bits >> (j + 1)) & 1:
                out.add(leaf)
        return frozenset(out)

    def _fourier_brute(self, vertices: Sequence[int]) -> frozenset[int]:
        verts = list(vertices)
        inside = set(verts)
        edges = [
            (u, v)
            for (u, v) in self._graph.edges
            if u in inside and v in inside
        ]
        relevant = sorted({u for e in edges for u in e})
        if not relevant:
            return frozenset()
        t = len(relevant)
        if t > MAX_WHT_VARS:
            raise ScaleError(f"brute Fourier sampling limited to {MAX_WHT_VARS} touched vertices")
        pos = {v: j for j, v in enumerate(relevant)}
        idx = np.arange(1 << t, dtype=np.uint32)
        hit = np.zeros(1 << t, dtype=bool)
        for (u, v) in edges:
            hit |= ((idx >> pos[u]) & 1).astype(bool) & ((idx >> pos[v]) & 1).astype(bool)
        signs = np.where(hit, -1.0, 1.0)
        self.ledger.charge("classical_bit_ops", (1 << t) * max(1, len(edges)))
        coeffs = _fwht_inplace(signs) / (1 << t)
        probs = coeffs**2
        outcome = int(self.rng.choice(1 << t, p=probs / probs.sum()))
        return frozenset(relevant[j] for j in range(t) if (outcome >> j) & 1)

    # -- audited reveals ---------------------------------------------------------

    def peek_graph(self) -> Graph:
        self.ledger.charge("reveal_used")
        return self._graph

    def peek_or_query(self, subset) -> int:
        """Uncharged OR query for quantum cost models; audited as a reveal."""
        mask = _as_mask(self.n, subset)
        self.ledger.charge("reveal_used")
        adj = self._graph.adj_bits
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            if adj[v] & mask:
                return 1
            m &= m - 1
        return 0

    def _matvec_bits(self, s_bits: int) -> int:
        out = 0
        m = s_bits
        adj = self._graph.adj_bits
        while m:
            v = (m & -m).bit_length() - 1
            out ^= adj[v]
            m &= m - 1
        return out


def _fwht_inplace(vec: np.ndarray) -> np.ndarray:
    v = vec.astype(np.float64, copy=True)
    h = 1
    while h < len(v):
        v = v.reshape(-1, 2, h)
        a, b = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :] = a + b
        v[:, 1, :] = a - b
        v = v.reshape(-1)
        h *= 2
    return v


class JuntaOracle:
    """Query access to f(x) = g(x restricted to a hidden variable set).

    The inner function g is public; only the variable set is hidden.  Either
    pass the full truth table (arity capped by the Fourier-table limit) or,
    for symmetric g too wide to tabulate, its level weights plus an evaluator
    taking the number of set bits.
    """

    def __init__(
        self,
        n: int,
        support: Sequence[int],
        rng: np.random.Generator,
        g_table: Sequence[int] | None = None,
        level_weights: np.ndarray | None = None,
        weight_eval=None,
        ledger: QueryLedger | None = None,
    ):
        self.n = n
        self._support = tuple(sorted(support))
        self.k = len(self._support)
        if len(set(self._support)) != self.k:
            raise ValueError("duplicate junta variables")
        if self._support and not 0 <= self._support[0] <= self._support[-1] < n:
            raise ValueError("junta variables out of range")
        self.rng = rng
        self.ledger = ledger if ledger is not None else QueryLedger()
        self._table = None
        self._dist_cum = None
        self._weight_eval = weight_eval
        self._amplified_cache: dict[int, tuple[np.ndarray, np.ndarray, float]] = {}
        if g_table is not None:
            ft = fourier_table(g_table, self.k)
            self._table = np.asarray(g_table, dtype=np.int8)
            dist = ft.sampling_distribution()
            self._dist_cum = np.cumsum(dist)
            self.level_weights = ft.level_weights()
            self._symmetric = self._check_symmetric(self._table, self.k)
        elif level_weights is not None:
            self.level_weights = np.asarray(level_weights, dtype=np.float64)
            if len(self.level_weights) != self.k + 1:
                raise ValueError("need one weight per level 0..k")
            self._symmetric = True
        else:
            raise ValueError("pass g_table or level_weights")

    @staticmethod
    def _check_symmetric(table: np.ndarray, k: int) -> bool:
        masks = np.arange(1 << k, dtype=np.uint32)
        sizes = np.zeros(1 << k, dtype=np.int64)
        for b in range(k):
            sizes += (masks >> b) & 1
        for w in range(k + 1):
            vals = table[sizes == w]
            if len(vals) and not (vals == vals[0]).all():
                return False
        return True

    def _local_mask(self, x: BitVector) -> int:
        mask = 0
        for j, v in enumerate(self._support):
            if x.get(v):
                mask |= 1 << j
        return mask

    def junta_query(self, x: BitVector) -> int:
        if x.n != self.n:
            raise ValueError("input width mismatch")
        self.ledger.charge("junta_query")
        local = self._local_mask(x)
        if self._table is not None:
            return int(self._table[local])
        if self._weight_eval is None:
            raise ValueError("no evaluator for this oracle")
        return int(self._weight_eval(local.bit_count()))

    def fourier_sample(self) -> frozenset[int]:
        """Draw a subset with probability = squared coefficient of (-1)^f."""
        if self._dist_cum is None:
            raise ValueError("plain Fourier sampling needs the full table")
        self.ledger.charge("junta_query")
        u = self.rng.random()
        mask = int(np.searchsorted(self._dist_cum, u * self._dist_cum[-1], side="right"))
        mask = min(mask, (1 << self.k) - 1)
        return frozenset(self._support[j] for j in range(self.k) if (mask >> j) & 1)

    def amplified_level_sample(self, l: int) -> frozenset[int] | None:
        """Amplified draw of a Fourier sample at level >= l, or a miss.

        Success probability is max(W>=l, 1-W>=l); each success bills
        ceil(1/sqrt(W>=l)) amplified rounds to the quantum counter.  Misses
        cost nothing.  Only valid for symmetric g, whose same-level
        coefficients share one magnitude.
        """
        if not self._symmetric:
            raise ValueError("amplified level sampling needs symmetric g")
        if not 1 <= l <= self.k:
            raise ValueError("level out of range")
        if l not in self._amplified_cache:
            tail = self.level_weights[l:]
            total = float(tail.sum())
            if total <= 0:
                raise ValueError("no Fourier mass at or above this level")
            levels = np.arange(l, self.k + 1)
            keep = tail > 0
            self._amplified_cache[l] = (levels[keep], tail[keep] / total, total)
        levels, probs, total = self._amplified_cache[l]
        if self.rng.random() >= max(total, 1.0 - total):
            return None
        self.ledger.charge("charged_quantum", math.ceil(1.0 / math.sqrt(total)))
        size = int(self.rng.choice(levels, p=probs))
        picks = self.rng.choice(self.k, size=size, replace=False)
        return frozenset(self._support[int(j)] for j in picks)

    def influence_profile(self):
        """Influences of the public inner function; free of charge."""
        if self._table is None:
            raise ValueError("influence profile needs the full table")
        return influence_profile(self._table, self.k)

    def peek_support(self) -> tuple[int, ...]:
        self.ledger.charge("reveal_used")
        return self._support
