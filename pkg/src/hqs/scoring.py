"""Flattened hierarchy arrays and fast item-to-node similarity.

For the built-in similarities each node keeps one aggregate vector, so a
score is a single dot product:

* average cosine: the sum of the unit vectors in the cluster.  Excluding the
  target from its own cluster subtracts its self-product.
* inverse squared euclidean: the cluster centroid.

Custom similarity functions go through :class:`DirectScorer`, which
materialises clusters and calls the function as-is.
"""
from __future__ import annotations

import numpy as np

from .corpus import Catalogue, CorpusError
from .guidance import EUCLID_EPS, SimilarityKind, similarity
from .hierarchy import Hierarchy
from .pomdp import reward

KIND_CODES = {SimilarityKind.AVG_COSINE: 0, SimilarityKind.INV_SQ_EUCLID: 1}


def check_items_match(h: Hierarchy, cat: Catalogue) -> None:
    missing = [x for x in cat.ids if x not in h.item_index]
    if missing:
        raise CorpusError(f"item {missing[0]!r} is in the catalogue but not in the hierarchy")
    extra = [x for x in h.item_index if x not in cat]
    if extra:
        raise CorpusError(f"item {extra[0]!r} is in the hierarchy but not in the catalogue")


class _TreeArrays:
    def __init__(self, h: Hierarchy, cat: Catalogue):
        check_items_match(h, cat)
        self.h = h
        self.cat = cat
        m = h.node_count
        counts = np.array([len(n.children) for n in h.nodes], dtype=np.int64)
        self.child_ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(counts, out=self.child_ptr[1:])
        self.child_idx = np.fromiter((c for n in h.nodes for c in n.children), dtype=np.int64, count=int(counts.sum()))
        self.parent = np.array([-1 if n.parent is None else n.parent for n in h.nodes], dtype=np.int64)
        self.depth = np.array([n.depth for n in h.nodes], dtype=np.int64)
        self.size = np.array(h.sizes, dtype=np.int64)
        n_items = h.n_items
        self.reward = np.array([reward(s, n_items) for s in h.sizes])
        self.item_leaf = np.array([h.item_index[x] for x in cat.ids], dtype=np.int64)
        self.height = h.height
        self.max_children = int(counts.max())

    def path(self, row: int) -> list[int]:
        out = []
        c = int(self.item_leaf[row])
        while c >= 0:
            out.append(c)
            c = int(self.parent[c])
        out.reverse()
        return out


class FlatModel(_TreeArrays):
    """Arrays for the built-in similarities; shared read-only across threads."""

    def __init__(self, h: Hierarchy, cat: Catalogue, kind: SimilarityKind):
        super().__init__(h, cat)
        if kind not in KIND_CODES:
            raise TypeError(f"FlatModel needs a built-in similarity, got {kind!r}")
        self.kind = kind
        self.kind_code = KIND_CODES[kind]
        vecs = cat.vectors
        if kind is SimilarityKind.AVG_COSINE:
            norms = np.linalg.norm(vecs, axis=1)
            safe = np.where(norms > 0, norms, 1.0)
            self.vecs = np.ascontiguousarray(vecs / safe[:, None])
            self.selfdot = np.einsum("ij,ij->i", self.vecs, self.vecs)
        else:
            self.vecs = np.ascontiguousarray(vecs)
            self.selfdot = np.zeros(len(cat))
        agg = np.zeros((h.node_count, vecs.shape[1]))
        # overflow here surfaces later as a non-finite score
        with np.errstate(over="ignore", invalid="ignore"):
            np.add.at(agg, self.item_leaf, self.vecs)
            for n in reversed(h.nodes):
                if n.parent is not None:
                    agg[n.parent] += agg[n.index]
            if kind is SimilarityKind.INV_SQ_EUCLID:
                agg /= self.size[:, None]
        self.agg = agg
        for a in (self.vecs, self.selfdot, self.agg):
            a.setflags(write=False)

    def score_row(self, row: int, node: int, contains: bool) -> float:
        v = self.vecs[row]
        if self.kind_code == 0:
            size = int(self.size[node])
            if contains:
                if size == 1:
                    return 1.0
                return (float(v @ self.agg[node]) - float(self.selfdot[row])) / (size - 1)
            return float(v @ self.agg[node]) / size
        d = v - self.agg[node]
        return 1.0 / (float(d @ d) + EUCLID_EPS)

    def score(self, x: str, node: int, contains: bool) -> float:
        return self.score_row(self.cat.row(x), node, contains)


class DirectScorer(_TreeArrays):
    """Evaluates the similarity definition directly on materialised clusters."""

    def __init__(self, h: Hierarchy, cat: Catalogue, kind):
        super().__init__(h, cat)
        self.kind = kind

    def score(self, x: str, node: int, contains: bool) -> float:
        return similarity(self.kind, self.cat, x, self.h.cluster_items(node))


def make_scorer(h: Hierarchy, cat: Catalogue, kind, exact: bool = False):
    if exact or kind not in KIND_CODES:
        return DirectScorer(h, cat, kind)
    return FlatModel(h, cat, kind)
