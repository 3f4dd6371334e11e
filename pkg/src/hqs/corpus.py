"""Item ingestion, TF-IDF vectors, and an average-link agglomerative builder."""
from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .hierarchy import Hierarchy, hierarchy_from_dict


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class SparseVector:
    """A vector given by strictly increasing ``indices`` and matching ``values``."""

    dim: int
    indices: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise CorpusError(f"sparse dimension must be positive, got {self.dim}")
        if len(self.indices) != len(self.values):
            raise CorpusError("sparse indices and values differ in length")
        prev = -1
        for i in self.indices:
            if not isinstance(i, int) or i <= prev or i >= self.dim:
                raise CorpusError(f"sparse indices must be strictly increasing and < {self.dim}")
            prev = i
        if not all(math.isfinite(v) for v in self.values):
            raise CorpusError("sparse values must be finite")

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[list(self.indices)] = self.values
        return out


@dataclass(frozen=True)
class Catalogue:
    """Item vectors sharing one dimension, stored densely row by row."""

    ids: tuple[str, ...]
    vectors: np.ndarray
    texts: Mapping[str, str] | None = None
    vocabulary: tuple[str, ...] | None = None
    _rows: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vecs = np.ascontiguousarray(self.vectors, dtype=np.float64)
        if vecs.ndim != 2 or vecs.shape[0] != len(self.ids):
            raise CorpusError("vectors must be a 2-D array with one row per item")
        if not np.all(np.isfinite(vecs)):
            raise CorpusError("item vectors must be finite")
        rows = {}
        for i, x in enumerate(self.ids):
            if not x:
                raise CorpusError("item id must be non-empty")
            if x in rows:
                raise CorpusError(f"duplicate item id {x!r}")
            rows[x] = i
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "_rows", rows)

    @classmethod
    def from_mapping(cls, items: Mapping[str, Sequence[float] | SparseVector]) -> "Catalogue":
        ids = tuple(items)
        if not ids:
            return cls((), np.zeros((0, 0)))
        rows = [v.to_dense() if isinstance(v, SparseVector) else np.asarray(v, dtype=float) for v in items.values()]
        dims = {r.shape for r in rows}
        if len(dims) != 1 or len(next(iter(dims))) != 1:
            raise CorpusError(f"all item vectors must share one dimension, got {sorted(dims)}")
        return cls(ids, np.vstack(rows))

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, x: str) -> bool:
        return x in self._rows

    def row(self, x: str) -> int:
        try:
            return self._rows[x]
        except KeyError:
            raise CorpusError(f"item {x!r} is not in the catalogue") from None

    def vector(self, x: str) -> np.ndarray:
        return self.vectors[self.row(x)]


_TOKEN = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN.split(text.lower()) if t]


def build_tfidf(docs: Mapping[str, str]) -> Catalogue:
    """Raw-count tf times smoothed idf ``ln((1+D)/(1+df)) + 1``; rows are not normalised.

    Vocabulary columns are sorted alphabetically.
    """
    if not docs:
        raise CorpusError("cannot build TF-IDF vectors from an empty corpus")
    counts = {x: Counter(tokenize(t)) for x, t in docs.items()}
    df: Counter[str] = Counter()
    for c in counts.values():
        df.update(c.keys())
    vocab = sorted(df)
    col = {t: j for j, t in enumerate(vocab)}
    n_docs = len(docs)
    idf = np.array([math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in vocab])
    mat = np.zeros((n_docs, max(len(vocab), 1)))
    for i, c in enumerate(counts.values()):
        for t, k in c.items():
            mat[i, col[t]] = k * idf[col[t]]
    return Catalogue(tuple(docs), mat, texts=dict(docs), vocabulary=tuple(vocab))


def centroid(catalogue: Catalogue, items: Iterable[str]) -> np.ndarray:
    rows = [catalogue.row(x) for x in items]
    if not rows:
        raise CorpusError("centroid of an empty item set")
    return catalogue.vectors[rows].mean(axis=0)


def load_items(path) -> Catalogue:
    with open(path, encoding="utf-8") as fh:
        return parse_items(fh)


def parse_items(lines: Iterable[str]) -> Catalogue:
    """Read JSON Lines item records: all ``text`` or all vector records."""
    texts: dict[str, str] = {}
    vectors: dict[str, np.ndarray | SparseVector] = {}
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusError(f"line {lineno}: malformed JSON: {e}") from e
        if not isinstance(rec, dict) or not isinstance(rec.get("id"), str) or not rec["id"]:
            raise CorpusError(f"line {lineno}: record needs a non-empty string 'id'")
        x = rec["id"]
        if x in texts or x in vectors:
            raise CorpusError(f"line {lineno}: duplicate item id {x!r}")
        kinds = [k for k in ("text", "vector", "sparse") if k in rec]
        if len(kinds) != 1:
            raise CorpusError(f"line {lineno}: item {x!r} needs exactly one of text/vector/sparse")
        if kinds[0] == "text":
            if not isinstance(rec["text"], str):
                raise CorpusError(f"line {lineno}: 'text' of {x!r} must be a string")
            texts[x] = rec["text"]
        elif kinds[0] == "vector":
            vec = rec["vector"]
            if not isinstance(vec, list) or not vec or not all(_is_number(v) for v in vec):
                raise CorpusError(f"line {lineno}: 'vector' of {x!r} must be a non-empty list of numbers")
            vectors[x] = np.asarray(vec, dtype=float)
        else:
            sp = rec["sparse"]
            try:
                vectors[x] = SparseVector(int(sp["dim"]), tuple(sp["indices"]), tuple(float(v) for v in sp["values"]))
            except (KeyError, TypeError) as e:
                raise CorpusError(f"line {lineno}: bad 'sparse' record for {x!r}: {e}") from e
            except CorpusError as e:
                raise CorpusError(f"line {lineno}: {x!r}: {e}") from e
        if texts and vectors:
            raise CorpusError(f"line {lineno}: text and vector records cannot be mixed in one file")
    if texts:
        return build_tfidf(texts)
    if not vectors:
        raise CorpusError("items file contains no records")
    return Catalogue.from_mapping(vectors)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def average_link_merges(vectors: np.ndarray, precomputed: bool = False) -> list[tuple[int, int, float]]:
    """Average-link agglomeration over squared Euclidean distance.

    With ``precomputed`` the input is already a symmetric dissimilarity
    matrix.  Returns ``(a, b, distance)`` per merge, where ``a < b`` are creation
    indices: items are ``0..N-1`` and the k-th merge creates ``N + k``.
    Ties on distance go to the smallest ``a``, then the smallest ``b``.
    """
    X = np.asarray(vectors, dtype=np.float64)
    n = X.shape[0]
    if n == 0:
        raise CorpusError("cannot cluster an empty catalogue")
    if n == 1:
        return []
    if precomputed:
        if X.shape != (n, n):
            raise CorpusError("precomputed dissimilarities must form a square matrix")
        D = X.copy()
    else:
        sq = np.einsum("ij,ij->i", X, X)
        D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, np.inf)

    # slot i holds the cluster with creation index cid[i]; a merged cluster reuses slot a
    cid = np.arange(n, dtype=np.int64)
    size = np.ones(n)
    active = np.ones(n, dtype=bool)
    nn = np.empty(n, dtype=np.int64)
    nn_dist = np.empty(n)

    def refresh(i: int) -> None:
        row = D[i]
        m = row.min()
        nn_dist[i] = m
        if math.isinf(m):
            nn[i] = -1
            return
        ties = np.flatnonzero(row == m)
        nn[i] = ties[0] if len(ties) == 1 else ties[np.argmin(cid[ties])]

    for i in range(n):
        refresh(i)

    merges = []
    next_cid = n
    for _ in range(n - 1):
        act = np.flatnonzero(active)
        best = nn_dist[act].min()
        cand = act[nn_dist[act] == best]
        if len(cand) == 1:
            s, t = int(cand[0]), int(nn[cand[0]])
        else:
            lo = np.minimum(cid[cand], cid[nn[cand]])
            hi = np.maximum(cid[cand], cid[nn[cand]])
            k = np.lexsort((hi, lo))[0]
            s, t = int(cand[k]), int(nn[cand[k]])
        if cid[s] > cid[t]:
            s, t = t, s
        merges.append((int(cid[s]), int(cid[t]), float(best)))

        # Lance-Williams update for average linkage, stored in slot s
        ns, nt = size[s], size[t]
        new = (ns * D[s] + nt * D[t]) / (ns + nt)
        active[t] = False
        new[~active] = np.inf
        new[s] = np.inf
        D[s, :] = new
        D[:, s] = new
        D[t, :] = np.inf
        D[:, t] = np.inf
        size[s] = ns + nt
        cid[s] = next_cid
        next_cid += 1

        nn_dist[t] = np.inf
        stale = act[(nn[act] == s) | (nn[act] == t)]
        for i in stale:
            if active[i]:
                refresh(int(i))
        refresh(s)
        # other rows: distance to the new cluster can only tie their current
        # minimum, and the new cluster has the largest creation index
        closer = active & (new < nn_dist)
        closer[s] = False
        for i in np.flatnonzero(closer):
            refresh(int(i))
    return merges


def build_average_link_hierarchy(catalogue: Catalogue, prefix: str = "n") -> Hierarchy:
    """Binary merge tree with one singleton leaf per item.

    Node ids are ``<prefix><k>`` where ``k`` is the cluster creation index;
    leaves keep the catalogue order ``0..N-1``.
    """
    if len(catalogue) == 0:
        raise CorpusError("cannot cluster an empty catalogue")
    n = len(catalogue)
    merges = average_link_merges(catalogue.vectors)
    children = {n + k: (a, b) for k, (a, b, _) in enumerate(merges)}

    def node(k: int) -> dict:
        return {"id": f"{prefix}{k}"}

    docs: dict[int, dict] = {}
    for k in range(n):
        docs[k] = {**node(k), "items": [catalogue.ids[k]]}
    for k in range(n, 2 * n - 1):
        a, b = children[k]
        docs[k] = {**node(k), "children": [docs[a], docs[b]]}
    return hierarchy_from_dict(docs[2 * n - 2])
