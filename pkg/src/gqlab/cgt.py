"""Group testing: adaptive search with classical and quantum cost models,
and nonadaptive designs with certified decoding.

The adaptive solver only needs a membership test on subsets of an arbitrary
universe.  Quantum backends compute the same answer by running the classical
search with ledger charging paused, then bill the amplified-search cost model
to the quantum counter; the suppressed charges stay visible for audits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from gqlab.errors import ConstructionError, DecodeError, ViolationError
from gqlab.oracles import QueryLedger

__all__ = [
    "BACKENDS",
    "cgt_solve",
    "adaptive_query_bound",
    "NonadaptiveDesign",
    "build_nonadaptive_design",
    "binary_indexing_design",
    "decode",
]

BACKENDS = ("classical_adaptive", "quantum_ideal", "quantum_time_efficient")


def _find_one(region: list, test: Callable[[Sequence], bool]) -> object:
    """Binary-search one positive inside a region known to contain one.

    Only left halves are queried; a negative left half puts the positive in
    the right half for free.
    """
    while len(region) > 1:
        mid = len(region) // 2
        left = region[:mid]
        if test(left):
            region = left
        else:
            region = region[mid:]
    return region[0]


def _adaptive_search(universe: Sequence, test, k: int | None) -> frozenset:
    found: list = []
    remaining = list(universe)
    while remaining:
        if not test(remaining):
            return frozenset(found)
        if k is not None and len(found) == k:
            raise ViolationError(f"more than {k} positives present")
        x = _find_one(remaining, test)
        found.append(x)
        remaining.remove(x)
    return frozenset(found)


def _quantum_rounds(count: int, c: float, time_efficient: bool) -> int:
    if count <= 0:
        return 0
    rounds = c * math.sqrt(count)
    if time_efficient:
        rounds *= math.log2(count + 1) * math.log2(math.log2(count + 3))
    return math.ceil(rounds)


def _doubling_charge(found: int, c: float, time_efficient: bool) -> int:
    # guess-and-double over the positive count; every stage bills in full
    stages = math.ceil(math.log2(found)) if found > 1 else 0
    return sum(
        _quantum_rounds(1 << i, c, time_efficient) for i in range(stages + 1)
    )


def cgt_solve(
    universe: Sequence,
    test: Callable[[Sequence], bool],
    k: int | None = None,
    backend: str = "classical_adaptive",
    c: float = 1.0,
    ledger: QueryLedger | None = None,
) -> frozenset:
    """Identify every positive item, spending queries per the chosen backend.

    ``test`` takes a list of items and reports whether it contains a
    positive; callers route it through their charged oracle.  ``k``, when
    given, is a promise on the positive count: the solver still verifies and
    raises if the promise undercounts.  Quantum backends require the ledger
    that ``test`` charges into.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if k is not None and k < 0:
        raise ValueError("k must be nonnegative")
    if backend == "classical_adaptive":
        return _adaptive_search(universe, test, k)
    if ledger is None:
        raise ValueError("quantum backends need the ledger used by the test")
    time_efficient = backend == "quantum_time_efficient"
    with ledger.paused():
        found = _adaptive_search(universe, test, k)
    if k is not None:
        if len(found) != k:
            raise ViolationError(f"promised {k} positives, found {len(found)}")
        ledger.charge("charged_quantum", _quantum_rounds(k, c, time_efficient))
    else:
        ledger.charge(
            "charged_quantum", _doubling_charge(len(found), c, time_efficient)
        )
    return found


def adaptive_query_bound(n: int, k: int) -> int:
    """Worst-case classical adaptive query count for k positives out of n."""
    if n == 0:
        return 0
    return k * (math.ceil(math.log2(n)) + 1) + 1


# -- nonadaptive designs -------------------------------------------------------


@dataclass(frozen=True)
class NonadaptiveDesign:
    """A fixed pool of subset tests decodable for up to d positives."""

    kind: str
    n: int
    d: int
    tests: tuple[frozenset[int], ...]

    def apply(self, positives) -> tuple[int, ...]:
        pos = set(positives)
        return tuple(1 if t & pos else 0 for t in self.tests)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "n": self.n,
                "d": self.d,
                "tests": [sorted(t) for t in self.tests],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "NonadaptiveDesign":
        data = json.loads(text)
        tests = tuple(frozenset(t) for t in data["tests"])
        design = cls(data["kind"], int(data["n"]), int(data["d"]), tests)
        for t in design.tests:
            if t and not 0 <= min(t) <= max(t) < design.n:
                raise ValueError("test touches items outside the universe")
        return design


def _is_disjunct(columns: list[frozenset[int]], d: int, rng, exhaustive_limit: int = 20) -> bool:
    """Check d-disjunctness: no column is covered by any d others."""
    n = len(columns)
    if n <= exhaustive_limit:
        from itertools import combinations

        for x in range(n):
            others = [i for i in range(n) if i != x]
            for group in combinations(others, min(d, len(others))):
                union = frozenset().union(*(columns[i] for i in group))
                if columns[x] <= union:
                    return False
        return True
    for _ in range(10_000):
        picks = rng.choice(n, size=d + 1, replace=False)
        x = int(picks[0])
        union = frozenset().union(*(columns[int(i)] for i in picks[1:]))
        if columns[x] <= union:
            return False
    return True


def build_nonadaptive_design(
    n: int,
    d: int,
    rng: np.random.Generator,
    c: float = 8.0,
    max_attempts: int = 40,
) -> NonadaptiveDesign:
    """Random design with ceil(c d^2 ln(n+1)) tests, verified d-disjunct.

    Items join each test independently with probability 1/(d+1).  The
    default constant is sized so verification passes reliably; failures
    trigger a fresh draw up to the attempt cap.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if d >= n:
        raise ValueError("d must be below the universe size")
    t_count = math.ceil(c * d * d * math.log(n + 1))
    for _ in range(max_attempts):
        member = rng.random((t_count, n)) < 1.0 / (d + 1)
        tests = tuple(
            frozenset(np.flatnonzero(member[t]).tolist()) for t in range(t_count)
        )
        columns = [
            frozenset(np.flatnonzero(member[:, x]).tolist()) for x in range(n)
        ]
        if any(not col for col in columns):
            continue  # an untested item can never be decoded
        if _is_disjunct(columns, d, rng):
            return NonadaptiveDesign("random_disjunct", n, d, tests)
    raise ConstructionError(
        f"no verified design in {max_attempts} attempts (n={n}, d={d}, c={c})"
    )


def binary_indexing_design(n: int) -> NonadaptiveDesign:
    """Compact exact decoder for at most one positive: test j holds the items
    whose 1-based index has bit j set."""
    if n < 1:
        raise ValueError("need n >= 1")
    width = max(1, (n).bit_length())
    tests = tuple(
        frozenset(i for i in range(n) if ((i + 1) >> j) & 1) for j in range(width)
    )
    return NonadaptiveDesign("binary_index", n, 1, tests)


def decode(design: NonadaptiveDesign, outcomes: Sequence[int]) -> frozenset[int]:
    """Recover the positive set from the test outcomes.

    Raises when the outcomes are not explainable by any set of at most d
    positives under this design.
    """
    if len(outcomes) != len(design.tests):
        raise DecodeError("outcome count does not match the design")
    outs = [1 if o else 0 for o in outcomes]
    if design.kind == "binary_index":
        value = sum(bit << j for j, bit in enumerate(outs))
        if value == 0:
            return frozenset()
        if value > design.n:
            raise DecodeError(f"outcome word {value} indexes no item")
        item = value - 1
        recheck = design.apply([item])
        if list(recheck) != outs:
            raise DecodeError("outcomes match no single item")
        return frozenset((item,))
    # cover rule: an item in any negative test is clean
    candidates = set(range(design.n))
    for t, out in zip(design.tests, outs):
        if not out:
            candidates -= t
    if len(candidates) > design.d:
        raise DecodeError(
            f"{len(candidates)} candidates exceed the design capacity {design.d}"
        )
    for t, out in zip(design.tests, outs):
        if out and not (t & candidates):
            raise DecodeError("a positive test contains no candidate")
    return frozenset(candidates)
