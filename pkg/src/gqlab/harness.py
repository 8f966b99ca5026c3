"""Seeded experiment sweeps: trial grids, ledger aggregation, CSV/JSON emission.

A sweep fixes one learner and one instance family, then runs a grid of size
points with a fixed number of trials per point.  Every trial derives its own
counter-based RNG stream from the master seed and the (point, trial) index
pair, so serial and thread-pool runs produce identical records.

Family names accepted per learner:

* graph families from :mod:`gqlab.graphs` (``matching``, ``star``, ...),
* ``all_small_graphs``: the full set of labelled graphs on ``r`` vertices
  embedded in ``n`` (finite-family identification),
* ``matching_union``: a known supergraph built as a union of ``d`` random
  perfect matchings with a hidden half-density subgraph,
* ``defect_set``: a hidden ``k``-subset of ``n`` items under membership
  tests (group testing),
* ``majority_junta``: majority of ``k`` hidden variables out of ``n``.
"""

from __future__ import annotations

import json
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from gqlab import cgt as cgt_mod
from gqlab import or_learners, parity_learners
from gqlab.errors import GqlabError
from gqlab.fourier import learn_symmetric_junta, maj_level_weights
from gqlab.graphs import FAMILY_KINDS, FamilySpec, Graph, enumerate_all_graphs, generate
from gqlab.oracles import QUERY_KINDS, GraphOracle, JuntaOracle, QueryLedger

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "LEARNERS",
    "CSV_COLUMNS",
    "run",
    "emit",
    "records_to_json",
    "records_from_json",
    "config_from_json",
]

CSV_COLUMNS = (
    "seed",
    "n",
    "m",
    "d",
    "k",
    "or_queries",
    "parity_queries",
    "copies",
    "charged_quantum",
    "success",
    "ms",
)

_CSV_COUNTERS = {
    "or_queries": "or_query",
    "parity_queries": "parity_query",
    "copies": "graph_state_copy",
    "charged_quantum": "charged_quantum",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a learner, a family, and a grid of size points.

    ``grid`` entries are plain dicts of point parameters (``n`` plus
    whatever the family and learner need: ``m``, ``k``, ``d``, ``r``,
    ``m_hint``, ``l``, ``known_k``...).  ``slack`` of None keeps each
    learner's own default.  ``sweep`` names the grid key driving the
    log-log slope fit; ``metric`` picks the ledger counter (terms may be
    summed with ``+``), defaulting per learner.
    """

    learner: str
    family: str
    grid: tuple[dict, ...]
    trials: int = 100
    seed: int = 0
    backend: str = "classical_adaptive"
    c: float = 1.0
    slack: int | None = None
    sweep: str | None = None
    metric: str | None = None
    min_success: float | None = None
    slope_range: tuple[float, float] | None = None
    record_wall_time: bool = False
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(dict(p) for p in self.grid))
        if self.slope_range is not None:
            object.__setattr__(self, "slope_range", tuple(self.slope_range))

    def validate(self) -> None:
        if self.learner not in LEARNERS:
            raise ValueError(f"unknown learner {self.learner!r}")
        families, _, _ = LEARNERS[self.learner]
        if self.family not in families:
            raise ValueError(
                f"family {self.family!r} is not runnable with {self.learner!r}"
            )
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if not self.grid:
            raise ValueError("grid must have at least one point")
        for point in self.grid:
            if "n" not in point:
                raise ValueError("every grid point needs n")
        if self.sweep is not None:
            for point in self.grid:
                if self.sweep not in point:
                    raise ValueError(f"sweep key {self.sweep!r} missing from a point")
        for term in self.resolved_metric().split("+"):
            if term not in QUERY_KINDS:
                raise ValueError(f"unknown ledger counter {term!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError("fmt must be csv or json")

    def resolved_metric(self) -> str:
        if self.metric is not None:
            return self.metric
        _, default_metric, _ = LEARNERS[self.learner]
        return default_metric

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def config_from_json(text: str) -> ExperimentConfig:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    extra = set(data) - known
    if extra:
        raise ValueError(f"unknown config fields: {sorted(extra)}")
    if "grid" in data:
        data["grid"] = tuple(data["grid"])
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ValueError(str(exc)) from exc


@dataclass(frozen=True)
class TrialRecord:
    """One trial: the derived seed, the size point, and the full ledger."""

    trial: int
    seed: int
    n: int
    m: int | None
    d: int | None
    k: int | None
    ledger: dict[str, int] = field(compare=True)
    success: bool = False
    ms: float = 0.0


# -- per-learner adapters --------------------------------------------------------


def _graph_instance(family: str, point: dict, rng) -> Graph:
    spec = FamilySpec(
        kind=family,
        n=point["n"],
        k=point.get("k"),
        m=point.get("m"),
        d=point.get("d"),
    )
    return generate(spec, rng)


def _matching_union(n: int, layers: int, rng) -> Graph:
    if n % 2:
        raise ValueError("matching_union needs even n")
    edges = set()
    for _ in range(layers):
        perm = rng.permutation(n)
        edges.update(
            (int(min(a, b)), int(max(a, b))) for a, b in zip(perm[::2], perm[1::2])
        )
    return Graph(n, sorted(edges))


def _adapt_or_full(cfg, point, rng, ledger):
    hidden = _graph_instance(cfg.family, point, rng)
    h = GraphOracle(hidden, rng, ledger=ledger)
    got = or_learners.learn_graph_or(
        h,
        m_hint=point.get("m_hint", hidden.m),
        backend=cfg.backend,
        c=cfg.c,
        d=point.get("design_d"),
    )
    return got == hidden, hidden.m, point.get("d"), point.get("k")


def _adapt_or_star(cfg, point, rng, ledger):
    hidden = _graph_instance(cfg.family, point, rng)
    h = GraphOracle(hidden, rng, ledger=ledger)
    res = or_learners.learn_star_or(h, backend=cfg.backend, c=cfg.c)
    return set(res.edges()) == hidden.edges, hidden.m, None, None


def _adapt_or_clique(cfg, point, rng, ledger):
    hidden = _graph_instance(cfg.family, point, rng)
    h = GraphOracle(hidden, rng, ledger=ledger)
    got = or_learners.learn_clique_or(h, point["k"], backend=cfg.backend, c=cfg.c)
    return got == frozenset(hidden.non_isolated()), hidden.m, None, point["k"]


def _adapt_parity_arbitrary(cfg, point, rng, ledger):
    hidden = _graph_instance(cfg.family, point, rng)
    h = GraphOracle(hidden, rng, ledger=ledger)
    got = parity_learners.learn_arbitrary_parity(h)
    return got == hidden, hidden.m, point.get("d"), point.get("k")


def _adapt_parity_bounded_edges(cfg, point, rng, ledger):
    hidden = _graph_instance(cfg.family, point, rng)
    h = GraphOracle(hidden, rng, ledger=ledger)
    kwargs = {} if cfg.slack is None else {"slack": cfg.slack}
    got = parity_learners.learn_bounded_edges_parity(h, m=point["m"], **kwargs)
    return got == hidden, hidden.m, None, None


def _adapt_gs_bounded_degree(cfg, point, rng, ledger):
    hidden = _graph_instance(cfg.family, point, rng)
    h = GraphOracle(hidden, rng, ledger=ledger)
    kwargs = {} if cfg.slack is None else {"slack": cfg.slack}
    res = parity_learners.learn_bounded_degree(
        h, point["d"], m_hint=point.get("m_hint", hidden.m), **kwargs
    )
    return (not res.over_degree and res.graph() == hidden), hidden.m, point["d"], None


def _adapt_gs_star(cfg, point, rng, ledger):
    hidden = _graph_instance(cfg.family, point, rng)
    h = GraphOracle(hidden, rng, ledger=ledger)
    center, leaves = parity_learners.learn_star_graphstate(h)
    want_center = hidden.is_star()
    ok = center == want_center and leaves == frozenset(hidden.neighbors(want_center))
    return ok, hidden.m, None, None


def _adapt_gs_clique(cfg, point, rng, ledger):
    hidden = _graph_instance(cfg.family, point, rng)
    h = GraphOracle(hidden, rng, ledger=ledger)
    got = parity_learners.learn_clique_graphstate(h)
    return got == frozenset(hidden.non_isolated()), hidden.m, None, point["k"]


def _adapt_bell_family(cfg, point, rng, ledger):
    family = enumerate_all_graphs(point["r"], point["n"])
    hidden = family[int(rng.integers(len(family)))]
    h = GraphOracle(hidden, rng, ledger=ledger)
    got = parity_learners.learn_from_family(h, family, k=point.get("k"))
    return got == hidden, hidden.m, None, point.get("k")


def _adapt_subgraph_known(cfg, point, rng, ledger):
    base = _matching_union(point["n"], point["d"], rng)
    hidden = Graph(
        point["n"], [e for e in sorted(base.edges) if rng.random() < 0.5]
    )
    h = GraphOracle(hidden, rng, ledger=ledger)
    kwargs = {} if cfg.slack is None else {"slack": cfg.slack}
    got = parity_learners.learn_subgraph_of(h, base, d=point["d"], **kwargs)
    return got == hidden, hidden.m, point["d"], None


def _adapt_cgt(cfg, point, rng, ledger):
    n, k = point["n"], point["k"]
    defects = frozenset(int(v) for v in rng.choice(n, size=k, replace=False))

    def test(items):
        ledger.charge("or_query")
        return any(i in defects for i in items)

    got = cgt_mod.cgt_solve(
        list(range(n)),
        test,
        k=k if point.get("known_k") else None,
        backend=cfg.backend,
        c=cfg.c,
        ledger=ledger,
    )
    return got == defects, None, None, k


def _adapt_junta_symmetric(cfg, point, rng, ledger):
    n, k = point["n"], point["k"]
    support = sorted(int(v) for v in rng.choice(n, size=k, replace=False))
    handle = JuntaOracle(
        n, support, rng, level_weights=maj_level_weights(k), ledger=ledger
    )
    got = learn_symmetric_junta(
        handle, l=point.get("l", (k + 1) // 2), delta=point.get("delta", 0.01)
    )
    return got == frozenset(support), None, None, k


_GRAPH_FAMILIES = FAMILY_KINDS

# learner id -> (runnable families, default slope metric, adapter)
LEARNERS = {
    "or_full": (_GRAPH_FAMILIES, "or_query", _adapt_or_full),
    "or_star": (("star",), "or_query+charged_quantum", _adapt_or_star),
    "or_clique": (("clique",), "or_query+charged_quantum", _adapt_or_clique),
    "parity_arbitrary": (_GRAPH_FAMILIES, "parity_query", _adapt_parity_arbitrary),
    "parity_bounded_edges": (
        ("fixed_edge_count", "matching", "star", "bounded_degree", "hamiltonian_cycle"),
        "parity_query",
        _adapt_parity_bounded_edges,
    ),
    "graphstate_bounded_degree": (
        ("bounded_degree", "matching", "hamiltonian_cycle", "star"),
        "graph_state_copy",
        _adapt_gs_bounded_degree,
    ),
    "graphstate_star": (("star",), "graph_state_copy", _adapt_gs_star),
    "graphstate_clique": (("clique",), "graph_state_copy", _adapt_gs_clique),
    "bell_family": (("all_small_graphs",), "graph_state_copy", _adapt_bell_family),
    "subgraph_known": (("matching_union",), "graph_state_copy", _adapt_subgraph_known),
    "cgt": (("defect_set",), "charged_quantum", _adapt_cgt),
    "junta_symmetric": (("majority_junta",), "charged_quantum", _adapt_junta_symmetric),
}


# -- the runner ----------------------------------------------------------------------


def _run_trial(cfg: ExperimentConfig, point_idx: int, trial_idx: int) -> TrialRecord:
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(point_idx, trial_idx))
    seed_val = int(ss.generate_state(1, np.uint64)[0])
    rng = np.random.Generator(np.random.Philox(ss))
    ledger = QueryLedger()
    point = cfg.grid[point_idx]
    _, _, adapter = LEARNERS[cfg.learner]
    t0 = time.perf_counter() if cfg.record_wall_time else 0.0
    try:
        success, m, d, k = adapter(cfg, point, rng, ledger)
    except GqlabError:
        success, m, d, k = False, point.get("m"), point.get("d"), point.get("k")
    ms = round((time.perf_counter() - t0) * 1000.0, 3) if cfg.record_wall_time else 0.0
    return TrialRecord(
        trial=point_idx * cfg.trials + trial_idx,
        seed=seed_val,
        n=point["n"],
        m=m,
        d=d,
        k=k,
        ledger=ledger.snapshot(),
        success=bool(success),
        ms=ms,
    )


def _metric_value(record: TrialRecord, metric: str) -> int:
    return sum(record.ledger.get(term, 0) for term in metric.split("+"))


def run(
    cfg: ExperimentConfig, threads: int = 1
) -> tuple[list[TrialRecord], dict]:
    """Run the sweep; returns records ordered by (point, trial) and a summary.

    The summary carries per-point success rates and query medians, the
    log-log slope of the mean metric against the sweep key when one is
    configured, and the verdict on any configured thresholds.
    """
    cfg.validate()
    if cfg.trials == 0:
        return [], {}
    jobs = [
        (pi, ti) for pi in range(len(cfg.grid)) for ti in range(cfg.trials)
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda j: _run_trial(cfg, *j), jobs))
    else:
        records = [_run_trial(cfg, *j) for j in jobs]

    metric = cfg.resolved_metric()
    points_summary = []
    failures: list[str] = []
    means = []
    for pi, point in enumerate(cfg.grid):
        chunk = records[pi * cfg.trials : (pi + 1) * cfg.trials]
        rate = sum(r.success for r in chunk) / len(chunk)
        mean_metric = sum(_metric_value(r, metric) for r in chunk) / len(chunk)
        means.append(mean_metric)
        entry = {
            "point": dict(point),
            "trials": len(chunk),
            "success_rate": rate,
            "mean_metric": mean_metric,
        }
        for column, counter in _CSV_COUNTERS.items():
            entry[f"median_{column}"] = float(
                statistics.median(r.ledger.get(counter, 0) for r in chunk)
            )
        points_summary.append(entry)
        if cfg.min_success is not None and rate < cfg.min_success:
            failures.append(
                f"point {pi} success rate {rate:.4f} below {cfg.min_success}"
            )

    slope = None
    if cfg.sweep is not None and len(cfg.grid) >= 2:
        xs = [float(point[cfg.sweep]) for point in cfg.grid]
        if len(set(xs)) >= 2 and all(v > 0 for v in xs) and all(v > 0 for v in means):
            slope = float(
                np.polyfit(np.log2(xs), np.log2(means), 1)[0]
            )
    if cfg.slope_range is not None:
        lo, hi = cfg.slope_range
        if slope is None:
            failures.append("slope requested but not computable")
        elif not lo <= slope <= hi:
            failures.append(f"slope {slope:.4f} outside [{lo}, {hi}]")

    summary = {
        "learner": cfg.learner,
        "family": cfg.family,
        "metric": metric,
        "sweep": cfg.sweep,
        "total_trials": len(records),
        "points": points_summary,
        "slope": slope,
        "thresholds_met": not failures,
        "threshold_failures": failures,
    }
    return records, summary


# -- emission --------------------------------------------------------------------------


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def emit(
    records: list[TrialRecord],
    path: str,
    fmt: str = "csv",
    allow_empty: bool = False,
) -> str:
    """Write records to ``path``; CSV keeps the pinned column order."""
    if not records and not allow_empty:
        raise ValueError("refusing to emit zero records without allow_empty")
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for r in records:
            row = [r.seed, r.n, r.m, r.d, r.k]
            row += [r.ledger.get(_CSV_COUNTERS[col], 0) for col in
                    ("or_queries", "parity_queries", "copies", "charged_quantum")]
            row += [r.success, r.ms]
            lines.append(",".join(_csv_cell(v) for v in row))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = records_to_json(records)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)
    return path


def records_to_json(records: list[TrialRecord]) -> str:
    return json.dumps({"records": [asdict(r) for r in records]}, indent=2) + "\n"


def records_from_json(text: str) -> list[TrialRecord]:
    data = json.loads(text)
    return [TrialRecord(**entry) for entry in data["records"]]
