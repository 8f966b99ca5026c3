"""Learners built on Bell samples, parity-vector queries, and X-basis samples.

A Bell sample of a hidden graph's state is a pair (s, As) with s uniform, so
every learner here is linear algebra over GF(2) at heart: collect sample
columns, then pin down each adjacency row inside whatever candidate space
the promise allows.  Samples are shared across rows; all collected samples
constrain every row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from gqlab import f2
from gqlab.errors import AmbiguityError, RetryBudgetError, ScaleError, ViolationError
from gqlab.f2 import BitMatrix, BitVector
from gqlab.graphs import Graph
from gqlab.oracles import GraphOracle

__all__ = [
    "ENUMERATION_CAP",
    "SampleBatch",
    "collect_samples",
    "BoundedDegreeResult",
    "learn_from_family",
    "learn_bounded_degree",
    "learn_subgraph_of",
    "learn_bounded_edges_parity",
    "learn_arbitrary_parity",
    "learn_star_graphstate",
    "learn_clique_graphstate",
]

# exhaustive low-weight row search refuses beyond this many candidates
ENUMERATION_CAP = 10_000_000


@dataclass(frozen=True)
class SampleBatch:
    """Samples as columns: column i of B is s_i, column i of Y is A s_i.

    Rows are the useful view for learning: row v of Y lists v's observed
    parity bits, and row u of B is the coefficient of a_v[u] in each of
    them.
    """

    B: BitMatrix
    Y: BitMatrix

    @property
    def n(self) -> int:
        return self.B.nrows

    @property
    def k(self) -> int:
        return self.B.ncols

    def audit(self, graph: Graph) -> bool:
        adj = graph.adjacency()
        return all(
            f2.matvec(adj, self.B.column(i)) == self.Y.column(i)
            for i in range(self.k)
        )


def collect_samples(
    sampler: Callable[[], tuple[BitVector, BitVector]],
    count: int,
    extend: SampleBatch | None = None,
) -> SampleBatch:
    """Draw ``count`` samples, optionally appending to an existing batch."""
    if extend is not None:
        n = extend.n
        base_k = extend.k
        rows_b = list(extend.B.rows)
        rows_y = list(extend.Y.rows)
    else:
        n = None
        base_k = 0
        rows_b = rows_y = []
    for i in range(count):
        s, y = sampler()
        if n is None:
            n = s.n
            rows_b = [0] * n
            rows_y = [0] * n
        bit = 1 << (base_k + i)
        for v in s.support():
            rows_b[v] |= bit
        for v in y.support():
            rows_y[v] |= bit
    if n is None:
        raise ValueError("cannot infer width from zero samples")
    k = base_k + count
    return SampleBatch(
        BitMatrix(n, k, tuple(rows_b)), BitMatrix(n, k, tuple(rows_y))
    )


# -- finite family -----------------------------------------------------------------


def _consistent(graph: Graph, batch: SampleBatch) -> bool:
    adj = graph.adj_bits
    for i in range(batch.k):
        s_bits = batch.B.column(i).bits
        out = 0
        m = s_bits
        while m:
            v = (m & -m).bit_length() - 1
            out ^= adj[v]
            m &= m - 1
        if out != batch.Y.column(i).bits:
            return False
    return True


def learn_from_family(
    h: GraphOracle,
    family: Iterable[Graph],
    k: int | None = None,
) -> Graph:
    """Identify the hidden graph inside a known finite family.

    Takes k = ceil(2 log2 |S|) + 7 Bell samples by default; two distinct
    members both consistent with all of them has probability at most
    |S|^2 2^-k.  A singleton family needs no samples at all.
    """
    members = list(family)
    if not members:
        raise ValueError("empty family")
    if any(g.n != h.n for g in members):
        raise ValueError("family members must match the oracle width")
    if len(members) == 1:
        return members[0]
    if k is None:
        k = math.ceil(2 * math.log2(len(members))) + 7
    if k < 1:
        raise ValueError("need at least one sample for a non-singleton family")
    batch = collect_samples(h.bell_sample, k)
    survivors = [g for g in members if _consistent(g, batch)]
    if len(survivors) != 1:
        raise AmbiguityError(
            f"{len(survivors)} of {len(members)} members consistent after {k} samples"
        )
    return survivors[0]


# -- bounded degree ------------------------------------------------------------------


@dataclass(frozen=True)
class BoundedDegreeResult:
    """Per-vertex rows: resolved neighbor sets, plus the over-degree marks."""

    n: int
    d: int
    neighbors: dict[int, frozenset[int]]
    over_degree: frozenset[int]
    samples_used: int

    def graph(self) -> Graph:
        """Assemble the full graph; only valid when no row is over-degree."""
        if self.over_degree:
            raise ViolationError(
                f"{len(self.over_degree)} rows exceed degree {self.d}"
            )
        edges = []
        for v, nbrs in self.neighbors.items():
            for u in nbrs:
                if self.neighbors.get(u) is None or v not in self.neighbors[u]:
                    raise AmbiguityError("row assembly is not symmetric")
                if v < u:
                    edges.append((v, u))
        return Graph(self.n, edges)


def _enumeration_size(n_items: int, d: int) -> int:
    return sum(math.comb(n_items, l) for l in range(min(d, n_items) + 1))


def _combo_matrix(count: int, l: int) -> np.ndarray:
    """All strictly increasing index tuples of length l, one per row."""
    if l == 1:
        return np.arange(count, dtype=np.int32).reshape(-1, 1)
    if l == 2:
        upper = np.triu_indices(count, k=1)
        return np.column_stack(
            (upper[0].astype(np.int32), upper[1].astype(np.int32))
        )
    parts = []
    for first in range(count - l + 1):
        tail = _combo_matrix(count - first - 1, l - 1) + np.int32(first + 1)
        parts.append(
            np.column_stack((np.full(len(tail), first, dtype=np.int32), tail))
        )
    if not parts:
        return np.empty((0, l), dtype=np.int32)
    return np.vstack(parts)


def _level_tables(sigs: Sequence[int], d: int):
    """Sorted low-64-bit signature tables for every candidate weight 1..d.

    Returns per level (sorted_low, order, combo_rows) where combo_rows[j]
    lists member positions of candidate j.
    """
    count = len(sigs)
    low = np.array([s & 0xFFFFFFFFFFFFFFFF for s in sigs], dtype=np.uint64)
    tables = []
    for l in range(1, min(d, count) + 1):
        combos = _combo_matrix(count, l)
        vals = low[combos[:, 0]]
        for col in range(1, l):
            vals = vals ^ low[combos[:, col]]
        order = np.argsort(vals, kind="stable")
        tables.append((vals[order], order, combos))
    return tables


def _row_candidates(target: int, sigs: Sequence[int], tables, limit: int = 2):
    """All weight-<=d supports whose signature XOR equals the target."""
    matches = []
    if target == 0:
        matches.append(())
    t_low = np.uint64(target & 0xFFFFFFFFFFFFFFFF)
    for vals, order, combos in tables:
        lo = int(np.searchsorted(vals, t_low, side="left"))
        hi = int(np.searchsorted(vals, t_low, side="right"))
        for pos in range(lo, hi):
            members = combos[order[pos]]
            acc = 0
            for j in members:
                acc ^= sigs[int(j)]
            if acc == target:
                matches.append(tuple(int(j) for j in members))
                if len(matches) >= limit:
                    return matches
    return matches


def learn_bounded_degree(
    h: GraphOracle,
    d: int,
    n: int | None = None,
    m_hint: int | None = None,
    slack: int = 7,
    phase2_k: int | None = None,
    _sampler: Callable[[], tuple[BitVector, BitVector]] | None = None,
) -> BoundedDegreeResult:
    """Per-vertex neighbor recovery for rows of weight at most d.

    Phase 1 takes ceil(log2 m-guess) + slack samples; the nonzero rows of Y
    are the non-isolated vertices.  Phase 2 adds ceil(d log2(n'/d)) + slack
    samples and searches each non-isolated row for the unique weight-<=d
    combination of non-isolated columns matching the observed bits; rows
    with no match are reported over-degree.  The candidate search is an
    exhaustive enumeration and refuses above the candidate cap.

    With d above n/4 the sparse search loses its edge; the full row readout
    is used instead and rows wider than d are marked over-degree.
    """
    if n is None:
        n = h.n
    if n != h.n:
        raise ValueError("n does not match the oracle")
    if d < 1:
        raise ValueError("degree bound must be positive")
    sampler = _sampler if _sampler is not None else h.bell_sample
    if d > n / 4 and _sampler is None:
        full = learn_arbitrary_parity(h)
        neighbors = {}
        over = set()
        for v in range(n):
            row = frozenset(full.neighbors(v))
            if len(row) > d:
                over.add(v)
            else:
                neighbors[v] = row
        return BoundedDegreeResult(n, d, neighbors, frozenset(over), 0)

    m_guess = m_hint if m_hint is not None else n * (n - 1) // 2
    l = math.ceil(math.log2(max(m_guess, 2))) + slack
    batch = collect_samples(sampler, l)
    nonzero = [v for v in range(n) if batch.Y.rows[v] != 0]
    neighbors: dict[int, frozenset[int]] = {
        v: frozenset() for v in range(n) if batch.Y.rows[v] == 0
    }
    if not nonzero:
        return BoundedDegreeResult(n, d, neighbors, frozenset(), batch.k)

    nprime = len(nonzero)
    if phase2_k is None:
        phase2_k = max(1, math.ceil(d * math.log2(max(2.0, nprime / d)))) + slack
    batch = collect_samples(sampler, phase2_k, extend=batch)

    total = _enumeration_size(nprime, d)
    if total > ENUMERATION_CAP:
        raise ScaleError(
            f"{total} weight-<={d} candidates over {nprime} columns "
            f"exceed the enumeration cap {ENUMERATION_CAP}"
        )
    sigs = [batch.B.rows[u] for u in nonzero]
    tables = _level_tables(sigs, d)
    over = set()
    for v in nonzero:
        found = _row_candidates(batch.Y.rows[v], sigs, tables)
        if len(found) > 1:
            raise AmbiguityError(f"row {v} has multiple weight-<={d} explanations")
        if not found:
            over.add(v)
        else:
            neighbors[v] = frozenset(nonzero[j] for j in found[0])
    return BoundedDegreeResult(n, d, neighbors, frozenset(over), batch.k)


# -- subgraph of a known graph ---------------------------------------------------------


def learn_subgraph_of(
    h: GraphOracle,
    gprime: Graph,
    d: int,
    slack: int = 7,
    retry_rounds: int = 10,
) -> Graph:
    """Learn a hidden subgraph of a known graph of max degree d.

    Row v has unknowns only over v's neighbors in the supergraph, so
    d + ceil(log2 n) + slack samples make every per-vertex system uniquely
    solvable with large margin.  The rare underdetermined system pulls a
    top-up round of fresh samples rather than failing outright.
    """
    n = h.n
    if gprime.n != n:
        raise ValueError("supergraph width mismatch")
    if any(gprime.degree(v) > d for v in range(n)):
        raise ValueError("supergraph exceeds the claimed degree bound")
    candidates = {v: gprime.neighbors(v) for v in range(n)}
    if all(not c for c in candidates.values()):
        return Graph(n, [])

    k = d + math.ceil(math.log2(max(n, 2))) + slack
    batch = collect_samples(h.bell_sample, k)
    rows: dict[int, frozenset[int]] = {}
    pending = list(range(n))
    for round_idx in range(retry_rounds + 1):
        if round_idx:
            batch = collect_samples(h.bell_sample, 8, extend=batch)
        still = []
        for v in pending:
            cand = candidates[v]
            if not cand:
                rows[v] = frozenset()
                continue
            width = len(cand)
            mat_rows = []
            rhs_bits = 0
            for i in range(batch.k):
                row = 0
                for j, u in enumerate(cand):
                    if (batch.B.rows[u] >> i) & 1:
                        row |= 1 << j
                mat_rows.append(row)
                rhs_bits |= ((batch.Y.rows[v] >> i) & 1) << i
            solution = f2.solve(
                BitMatrix(batch.k, width, tuple(mat_rows)),
                BitVector(batch.k, rhs_bits),
            )
            if solution is None:
                raise AmbiguityError(f"row {v}: inconsistent system")
            particular, nullspace = solution
            if nullspace:
                still.append(v)
                continue
            rows[v] = frozenset(
                u for j, u in enumerate(cand) if particular.get(j)
            )
        if not still:
            break
        pending = still
    else:
        raise AmbiguityError(
            f"{len(pending)} rows stayed underdetermined after {retry_rounds} top-ups"
        )

    edges = []
    for v in range(n):
        for u in rows[v]:
            if v not in rows[u]:
                raise AmbiguityError("row assembly is not symmetric")
            if v < u:
                edges.append((v, u))
    return Graph(n, edges)


# -- bounded edge count ------------------------------------------------------------------


def learn_bounded_edges_parity(
    h: GraphOracle,
    m: int,
    slack: int = 15,
) -> Graph:
    """Learn a graph promised to have at most m edges from parity queries.

    Splits rows at d = ceil(sqrt(m / log2(m+2))): sparse rows come from the
    bounded-degree pipeline with Bell samples realized as two parity queries
    each, and every dense row is read exactly with one basis-vector query.
    """
    if m < 0:
        raise ValueError("edge bound must be nonnegative")
    n = h.n
    d = max(1, math.ceil(math.sqrt(m / math.log2(m + 2))))

    def sampler():
        s = f2.random_vector(n, h.rng)
        return s, h.parity_vector_query(s)

    result = learn_bounded_degree(
        h, d, m_hint=max(m, 1), slack=slack, _sampler=sampler
    )
    rows = dict(result.neighbors)
    exact = set()
    for v in sorted(result.over_degree):
        row = h.parity_vector_query(BitVector.basis(n, v))
        rows[v] = frozenset(row.support())
        exact.add(v)

    edges = set()
    for v in range(n):
        for u in rows[v]:
            # exact rows are complete, so a true claim is always reciprocated;
            # an unreciprocated one exposes a wrong sparse row
            if v not in rows[u]:
                raise AmbiguityError("row assembly is not symmetric")
            edges.add((min(v, u), max(v, u)))
    if len(edges) > m:
        raise ViolationError(f"{len(edges)} edges exceed the promise {m}")
    return Graph(n, sorted(edges))


# -- unrestricted parity -------------------------------------------------------------------


def learn_arbitrary_parity(h: GraphOracle, n: int | None = None) -> Graph:
    """Read the adjacency matrix column by column: 2n parity queries flat."""
    if n is None:
        n = h.n
    if n != h.n:
        raise ValueError("n does not match the oracle")
    rows = [h.parity_vector_query(BitVector.basis(n, i)).bits for i in range(n)]
    if list(f2.transpose_words(tuple(rows), n)) != rows:
        raise AmbiguityError("oracle returned an asymmetric matrix")
    edges = []
    for i in range(n):
        if (rows[i] >> i) & 1:
            raise AmbiguityError("oracle returned a nonzero diagonal")
        edges.extend((i, j) for j in BitVector(n, rows[i]).support() if j > i)
    return Graph(n, edges)


# -- promised shapes from state samples ----------------------------------------------------


def learn_star_graphstate(
    h: GraphOracle,
    cap: int = 200,
) -> tuple[int, frozenset[int]]:
    """Learn a star with at least two edges from X-basis measurements.

    Each sample lands on one of four equiprobable outcomes; weight one names
    the center, weight two or more is the leaf pattern with or without the
    center mixed in.  One of each suffices.
    """
    center = None
    pattern = None
    for _ in range(cap):
        z = h.hadamard_sample()
        w = z.weight()
        if w == 1:
            center = z.support()[0]
        elif w >= 2:
            pattern = frozenset(z.support())
        if center is not None and pattern is not None:
            return center, pattern - {center}
    raise RetryBudgetError(f"center or leaf pattern still unseen after {cap} samples")


def learn_clique_graphstate(
    h: GraphOracle,
    target_nonzero: int | None = None,
) -> frozenset[int]:
    """Learn a clique's vertex set from Bell samples.

    Every nonzero y is supported inside the clique and covers each member
    with probability 1/2, so unioning a logarithmic number of nonzero
    supports captures all members.
    """
    n = h.n
    if target_nonzero is None:
        target_nonzero = 7 + math.ceil(math.log2(max(n, 2)))
    cap = max(20, 4 * target_nonzero)
    members: set[int] = set()
    seen_nonzero = 0
    for _ in range(cap):
        _, y = h.bell_sample()
        if y.bits == 0:
            continue
        members |= set(y.support())
        seen_nonzero += 1
        if seen_nonzero == target_nonzero:
            return frozenset(members)
    raise RetryBudgetError(
        f"only {seen_nonzero}/{target_nonzero} informative samples in {cap}"
    )
