"""Synthetic catalogues and reference hierarchies for checks and benchmarks."""
from __future__ import annotations

import numpy as np

from .corpus import Catalogue, average_link_merges
from .hierarchy import Hierarchy, hierarchy_from_dict


def gaussian_clusters(
    n_clusters: int,
    per_cluster: int,
    dim: int,
    seed: int,
    spread: float = 2.0,
    noise: float = 0.5,
) -> tuple[Catalogue, list[int]]:
    """Isotropic Gaussian blobs; returns the catalogue and each item's cluster label.

    Item ids are ``c<cluster>_<k>`` zero-padded so that sorting by id groups
    items by cluster.
    """
    rng = np.random.default_rng(seed)
    means = rng.normal(0.0, spread, (n_clusters, dim))
    vecs = np.vstack([rng.normal(m, noise, (per_cluster, dim)) for m in means])
    wc = len(str(n_clusters - 1))
    wk = len(str(per_cluster - 1))
    ids = tuple(f"c{c:0{wc}d}_{k:0{wk}d}" for c in range(n_clusters) for k in range(per_cluster))
    labels = [c for c in range(n_clusters) for _ in range(per_cluster)]
    return Catalogue(ids, vecs), labels


def merge_tree(merges, leaves: list[str], prefix: str = "n") -> Hierarchy:
    """Hierarchy from ``(a, b, _)`` merges over singleton ``leaves``."""
    n = len(leaves)
    docs: dict[int, dict] = {k: {"id": f"{prefix}{k}", "items": [leaves[k]]} for k in range(n)}
    for k, (a, b, *_) in enumerate(merges):
        docs[n + k] = {"id": f"{prefix}{n + k}", "children": [docs[a], docs[b]]}
    return hierarchy_from_dict(docs[2 * n - 2])


def matching_hierarchy(cat: Catalogue) -> Hierarchy:
    """Average-link tree: follows the data's own cluster structure."""
    return merge_tree(average_link_merges(cat.vectors), list(cat.ids))


def permuted_hierarchy(cat: Catalogue, seed: int) -> Hierarchy:
    """Same shape as the matching tree with item labels randomly shuffled."""
    merges = average_link_merges(cat.vectors)
    perm = np.random.default_rng(seed).permutation(len(cat))
    return merge_tree(merges, [cat.ids[i] for i in perm])


def farthest_first_hierarchy(cat: Catalogue) -> Hierarchy:
    """Adversarial tree: average-link agglomeration that merges the farthest clusters first.

    Merging on ``C - d`` (``C`` above every distance) makes each merge join
    the pair with the largest average distance, so leaves and subtrees mix
    the most dissimilar items.
    """
    X = cat.vectors
    sq = np.einsum("ij,ij->i", X, X)
    D = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (X @ X.T), 0.0)
    flipped = D.max() + 1.0 - D
    return merge_tree(average_link_merges(flipped, precomputed=True), list(cat.ids))
