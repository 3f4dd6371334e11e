"""HQS aggregation, sampled approximation, and the HAI baseline."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .corpus import Catalogue, CorpusError
from .hierarchy import Hierarchy
from .planner import run_simplified_rtbss
from .pomdp import PomdpConfig
from .scoring import FlatModel, check_items_match, make_scorer


@dataclass(frozen=True)
class ItemResult:
    id: str
    value: float
    stop_depth: int
    stop_node: str
    belief_at_stop: float
    path: tuple[str, ...]


@dataclass
class HqsReport:
    hqs: float
    n_items_total: int
    n_items_evaluated: int
    sample_fraction: float
    seed: int | None
    per_item: list[ItemResult] = field(default_factory=list)
    wall_time: float = 0.0  # seconds

    def to_dict(self, include_items: bool = True, include_time: bool = True) -> dict:
        out = {
            "hqs": self.hqs,
            "n_items_total": self.n_items_total,
            "n_items_evaluated": self.n_items_evaluated,
            "sample_fraction": self.sample_fraction,
            "seed": self.seed,
            "wall_time_ms": self.wall_time * 1000.0 if include_time else 0.0,
        }
        if include_items:
            out["per_item"] = [
                {
                    "id": r.id,
                    "value": r.value,
                    "stop_depth": r.stop_depth,
                    "stop_node": r.stop_node,
                    "belief_at_stop": r.belief_at_stop,
                    "path": list(r.path),
                }
                for r in self.per_item
            ]
        return out

    def to_json(self, include_items: bool = True, include_time: bool = True) -> str:
        return json.dumps(self.to_dict(include_items, include_time), indent=1, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "value", "stop_depth", "stop_node", "belief_at_stop"])
        for r in self.per_item:
            w.writerow([r.id, repr(r.value), r.stop_depth, r.stop_node, repr(r.belief_at_stop)])
        return buf.getvalue()


def sample_size(fraction: float, n: int) -> int:
    """Round-half-up of ``fraction * n``, at least one."""
    return max(1, math.floor(fraction * n + 0.5))


def sample_items(ids: Sequence[str], fraction: float, seed: int) -> list[str]:
    """Uniform sample without replacement, returned in ascending id order.

    Uses the standard library Mersenne Twister so a seed gives the same sample
    on every platform.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"sample fraction must lie in (0, 1], got {fraction}")
    pool = sorted(ids)
    k = sample_size(fraction, len(pool))
    if k == len(pool):
        return pool
    return sorted(random.Random(seed).sample(pool, k))


class Evaluator:
    """Per-item oracle values for one hierarchy, catalogue and configuration.

    Preprocessing happens once; :meth:`evaluate` may then be called for any
    subset of items, fanning out across ``workers`` threads.  Results land in
    a pre-sized array so the aggregate never depends on scheduling.
    """

    def __init__(self, h: Hierarchy, cat: Catalogue, cfg: PomdpConfig | None = None, backend: str | None = None):
        self.h = h
        self.cat = cat
        self.cfg = cfg or PomdpConfig()
        check_items_match(h, cat)
        self.scorer = make_scorer(h, cat, self.cfg.similarity)
        self.backend = backend

    def _values(self, rows: np.ndarray):
        if isinstance(self.scorer, FlatModel):
            s = self.cfg.schedule
            return kernels.evaluate_rows(self.scorer, s.delta, s.nu, rows, self.backend)
        n = len(rows)
        out = (np.empty(n), np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64), np.empty(n))
        for i, row in enumerate(rows.tolist()):
            tr = run_simplified_rtbss(self.h, self.cat, self.cfg, self.cat.ids[row], scorer=self.scorer)
            out[0][i], out[1][i], out[2][i], out[3][i] = tr.oracle_value, tr.stop_node, tr.stop_depth, tr.belief_at_stop
        return out

    def evaluate(self, items: Sequence[str], workers: int = 1) -> list[ItemResult]:
        rows = np.array([self.cat.row(x) for x in items], dtype=np.int64)
        n = len(rows)
        value = np.empty(n)
        node = np.empty(n, dtype=np.int64)
        depth = np.empty(n, dtype=np.int64)
        belief = np.empty(n)
        workers = max(1, min(workers, n))
        chunks = np.array_split(np.arange(n), workers)

        def run(idx):
            v, c, d, b = self._values(rows[idx])
            value[idx], node[idx], depth[idx], belief[idx] = v, c, d, b

        if workers == 1:
            run(chunks[0])
        else:
            with ThreadPoolExecutor(workers) as pool:
                list(pool.map(run, chunks))
        if not np.all(np.isfinite(value)):
            raise FloatingPointError("non-finite oracle value")
        out = []
        nodes = self.h.nodes
        for i, x in enumerate(items):
            path = self.h.path_to_item(x)[: int(depth[i]) + 1]
            out.append(ItemResult(x, float(value[i]), int(depth[i]), nodes[int(node[i])].id, float(belief[i]), tuple(nodes[c].id for c in path)))
        return out

    def report(self, items: Sequence[str], fraction: float, seed: int | None, workers: int = 1) -> HqsReport:
        t0 = time.perf_counter()
        results = self.evaluate(sorted(items), workers)
        total = math.fsum(r.value for r in results)
        hqs_value = total / len(results)
        return HqsReport(hqs_value, self.h.n_items, len(results), fraction, seed, results, time.perf_counter() - t0)

    def hqs(self, workers: int = 1) -> HqsReport:
        return self.report(self.cat.ids, 1.0, None, workers)

    def sampled(self, fraction: float, seed: int, workers: int = 1) -> HqsReport:
        return self.report(sample_items(self.cat.ids, fraction, seed), fraction, seed, workers)


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def hqs(h: Hierarchy, cat: Catalogue, cfg: PomdpConfig | None = None, workers: int = 1) -> HqsReport:
    """Mean oracle value over every catalogue item."""
    return Evaluator(h, cat, cfg).hqs(workers)


def sampled_hqs(h: Hierarchy, cat: Catalogue, cfg: PomdpConfig | None, fraction: float, seed: int, workers: int = 1) -> HqsReport:
    """Mean oracle value over a seeded uniform sample of the items."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"sample fraction must lie in (0, 1], got {fraction}")
    return Evaluator(h, cat, cfg).sampled(fraction, seed, workers)


@dataclass(frozen=True)
class HaiResult:
    hai: float
    n: int


def hai_distances(h: Hierarchy, order: Sequence[str]) -> np.ndarray:
    """Matrix of ``|c_xy| / N`` for the smallest common ancestor ``c_xy``, 0 when it is a leaf."""
    n = len(order)
    pos = {x: i for i, x in enumerate(order)}
    D = np.zeros((n, n))
    # pre-order: deeper nodes overwrite their ancestors' blocks
    for node in h.nodes:
        if node.is_leaf:
            continue
        idx = np.fromiter((pos[x] for x in h.cluster_items(node.index)), dtype=np.int64)
        D[np.ix_(idx, idx)] = h.sizes[node.index] / n
    for node in h.leaves():
        idx = np.fromiter((pos[x] for x in node.items), dtype=np.int64)
        D[np.ix_(idx, idx)] = 0.0
    return D


def hai(h: Hierarchy, gt: Hierarchy) -> HaiResult:
    """Agreement of pairwise common-ancestor sizes with a reference hierarchy."""
    if set(h.item_index) != set(gt.item_index):
        a = set(h.item_index) ^ set(gt.item_index)
        raise CorpusError(f"hierarchies cover different items, e.g. {sorted(a)[0]!r}")
    order = sorted(h.item_index)
    n = len(order)
    diff = np.abs(hai_distances(h, order) - hai_distances(gt, order))
    return HaiResult(1.0 - math.fsum(diff.ravel()) / (n * n), n)
