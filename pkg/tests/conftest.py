from __future__ import annotations

import sys

import numpy as np
import pytest

from hqs.corpus import Catalogue
from hqs.hierarchy import from_nested


def random_nested(rng: np.random.Generator, items: list[str], max_depth: int, depth: int = 0, unary_p: float = 0.1):
    """Random partition tree over ``items``; lists of strings are leaves."""
    if len(items) == 1 or depth >= max_depth - 1 or rng.random() < 0.15:
        return list(items)
    if rng.random() < unary_p:
        return [random_nested(rng, items, max_depth, depth + 1, unary_p)]
    k = int(rng.integers(2, min(4, len(items)) + 1))
    perm = rng.permutation(len(items))
    cuts = np.sort(rng.choice(np.arange(1, len(items)), size=k - 1, replace=False))
    groups = np.split(perm, cuts)
    return [random_nested(rng, [items[i] for i in g], max_depth, depth + 1, unary_p) for g in groups]


def random_instance(seed: int, max_items: int = 50, max_depth: int = 6, dim: int = 6):
    """A random hierarchy (height < max_depth) with a matching random catalogue."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_items + 1))
    ids = [f"x{i:02d}" for i in range(n)]
    h = from_nested(random_nested(rng, ids, max_depth))
    # clustered vectors give a mix of confident and confused guidance
    centers = rng.normal(0, 1, (3, dim))
    vecs = centers[rng.integers(0, 3, n)] + rng.normal(0, 0.7, (n, dim))
    return h, Catalogue(tuple(ids), vecs)


@pytest.fixture
def two_leaf():
    return from_nested([["x"], ["y"]])


@pytest.fixture
def orthogonal_binary():
    """Perfect binary tree of depth 3 over 8 one-hot items."""
    ids = [f"i{k}" for k in range(8)]
    tree = [[[[ids[0]], [ids[1]]], [[ids[2]], [ids[3]]]], [[[ids[4]], [ids[5]]], [[ids[6]], [ids[7]]]]]
    return from_nested(tree), Catalogue(tuple(ids), np.eye(8))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.VERDICTS):
        terminalreporter.write_line(mod.verdict_line(k))
