import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.cluster.hierarchy import linkage
from sklearn.feature_extraction.text import TfidfVectorizer

from hqs.corpus import (
    Catalogue,
    CorpusError,
    SparseVector,
    average_link_merges,
    build_average_link_hierarchy,
    build_tfidf,
    centroid,
    parse_items,
    tokenize,
)
from hqs.hierarchy import parse_hierarchy

IDF_TWO_DOCS = 1.4054651081081644  # ln(3/2) + 1, from mpmath


def test_tfidf_single_doc():
    cat = build_tfidf({"d": "a a b"})
    assert cat.vocabulary == ("a", "b")
    np.testing.assert_array_equal(cat.vector("d"), [2.0, 1.0])


def test_tfidf_two_docs():
    cat = build_tfidf({"d1": "a", "d2": "b"})
    np.testing.assert_allclose(cat.vectors, [[IDF_TWO_DOCS, 0.0], [0.0, IDF_TWO_DOCS]], rtol=0, atol=1e-15)


def test_tfidf_empty():
    with pytest.raises(CorpusError):
        build_tfidf({})


def test_tokenize():
    assert tokenize("Blue-Denim  JACKET, size 42!") == ["blue", "denim", "jacket", "size", "42"]


def test_tfidf_matches_sklearn():
    docs = {
        "p1": "Red cotton shirt with long sleeves",
        "p2": "Blue denim jeans, slim fit; blue stitching",
        "p3": "Cotton socks - red and blue - pack of 3",
        "p4": "Leather belt",
        "p5": "shirt shirt shirt",
    }
    cat = build_tfidf(docs)
    vec = TfidfVectorizer(tokenizer=tokenize, lowercase=False, token_pattern=None, norm=None, smooth_idf=True)
    ref = vec.fit_transform(list(docs.values())).toarray()
    assert tuple(vec.get_feature_names_out()) == cat.vocabulary
    np.testing.assert_allclose(cat.vectors, ref, rtol=1e-13)


def test_tfidf_disjoint_vocabularies_are_orthogonal():
    cat = build_tfidf({"a": "red shirt", "b": "blue jeans", "c": "leather belt belt"})
    G = cat.vectors @ cat.vectors.T
    assert np.count_nonzero(G - np.diag(np.diag(G))) == 0


@pytest.mark.parametrize(
    "vecs, expected",
    [
        ([(1, 0)], (1, 0)),
        ([(1, 0), (0, 1)], (0.5, 0.5)),
        ([(2, 2), (4, 0), (0, 4)], (2, 2)),
    ],
)
def test_centroid(vecs, expected):
    cat = Catalogue(tuple(f"v{i}" for i in range(len(vecs))), np.array(vecs, dtype=float))
    np.testing.assert_allclose(centroid(cat, cat.ids), expected)


def test_centroid_empty():
    cat = Catalogue(("a",), np.ones((1, 2)))
    with pytest.raises(CorpusError):
        centroid(cat, [])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 5), st.floats(-5, 5, allow_nan=False), st.integers(0, 2**31))
def test_centroid_permutation_and_scaling(n, dim, k, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, dim))
    ids = tuple(f"i{j}" for j in range(n))
    c = centroid(Catalogue(ids, X), ids)
    perm = [ids[j] for j in rng.permutation(n)]
    np.testing.assert_allclose(centroid(Catalogue(ids, X), perm), c, atol=1e-12)
    np.testing.assert_allclose(centroid(Catalogue(ids, k * X), ids), k * c, atol=1e-12)


def _line(points):
    return Catalogue(tuple(f"p{p}" for p in points), np.array(points, dtype=float)[:, None])


def test_ac_single_item():
    h = build_average_link_hierarchy(_line([3]))
    assert h.node_count == 1 and h.root.items == ("p3",)


def test_ac_three_points():
    h = build_average_link_hierarchy(_line([0, 1, 10]))
    assert h.height == 2
    assert [(a, b) for a, b, _ in average_link_merges(np.array([[0.0], [1.0], [10.0]]))] == [(0, 1), (2, 3)]
    kids = {h.cluster_items(c): h.nodes[c].is_leaf for c in h.root.children}
    assert kids == {frozenset({"p0", "p1"}): False, frozenset({"p10"}): True}


def test_ac_four_points():
    merges = average_link_merges(np.array([[0.0], [1.0], [10.0], [11.0]]))
    assert [(a, b) for a, b, _ in merges] == [(0, 1), (2, 3), (4, 5)]
    h = build_average_link_hierarchy(_line([0, 1, 10, 11]))
    assert {h.cluster_items(c) for c in h.root.children} == {frozenset({"p0", "p1"}), frozenset({"p10", "p11"})}


def test_ac_tie_breaking_by_creation_index():
    # all pairwise distances equal: merge (0,1) first, then the new cluster 3 with 2
    X = np.eye(3)
    assert [(a, b) for a, b, _ in average_link_merges(X)] == [(0, 1), (2, 3)]


@pytest.mark.parametrize("seed", range(8))
def test_ac_heights_match_scipy(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(int(rng.integers(2, 60)), 4))
    ours = average_link_merges(X)
    D = ((X[:, None, :] - X[None, :, :]) ** 2).sum(-1)
    iu = np.triu_indices(len(X), 1)
    ref = linkage(D[iu], method="average")
    np.testing.assert_allclose([d for _, _, d in ours], ref[:, 2], rtol=1e-10, atol=1e-12)
    # continuous data has no ties, so the merge pairs agree too
    assert [(a, b) for a, b, _ in ours] == [tuple(sorted(map(int, r[:2]))) for r in ref]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**31))
def test_ac_tree_shape(n, seed):
    X = np.random.default_rng(seed).integers(0, 4, size=(n, 2)).astype(float)  # many ties
    cat = Catalogue(tuple(f"i{j}" for j in range(n)), X)
    h = build_average_link_hierarchy(cat)
    assert h.node_count == 2 * n - 1
    assert h.cluster_items(0) == set(cat.ids)
    assert all(len(leaf.items) == 1 for leaf in h.leaves())
    assert all(len(node.children) in (0, 2) for node in h.nodes)
    again = parse_hierarchy(h.to_json())
    assert [n.id for n in again.nodes] == [n.id for n in h.nodes]


def test_parse_items_vectors_and_sparse():
    cat = parse_items(
        [
            '{"id": "a", "vector": [1, 0, 2]}',
            "",
            '{"id": "b", "sparse": {"dim": 3, "indices": [1], "values": [5.5]}}',
        ]
    )
    assert cat.ids == ("a", "b")
    np.testing.assert_array_equal(cat.vectors, [[1, 0, 2], [0, 5.5, 0]])


def test_parse_items_text_builds_tfidf():
    cat = parse_items(['{"id": "d1", "text": "a"}', '{"id": "d2", "text": "b"}'])
    assert cat.vocabulary == ("a", "b")
    assert math.isclose(cat.vectors[0, 0], IDF_TWO_DOCS, rel_tol=1e-15)


@pytest.mark.parametrize(
    "lines, fragment",
    [
        (['{"id": "a", "text": "x"}', '{"id": "b", "vector": [1]}'], "mixed"),
        (['{"id": "a", "vector": [1]}', '{"id": "a", "vector": [2]}'], "duplicate"),
        (['{"id": "a", "vector": [1]}', '{"id": "b", "vector": [1, 2]}'], "dimension"),
        (['{"id": "a", "sparse": {"dim": 3, "indices": [2, 1], "values": [1, 1]}}'], "increasing"),
        (['{"id": "a", "sparse": {"dim": 2, "indices": [2], "values": [1]}}'], "increasing"),
        (['{"id": "a", "vector": [1, NaN]}'], "finite"),
        (['{"id": "a"}'], "exactly one"),
        (['{"id": "", "vector": [1]}'], "non-empty"),
        (["not json"], "malformed"),
        ([], "no records"),
    ],
)
def test_parse_items_rejects(lines, fragment):
    with pytest.raises(CorpusError, match=fragment):
        parse_items(lines)


def test_sparse_dense_interoperate():
    sv = SparseVector(4, (0, 3), (1.0, -2.0))
    cat = Catalogue.from_mapping({"s": sv, "d": [0.0, 1.0, 0.0, 0.0]})
    np.testing.assert_array_equal(cat.vectors, [[1, 0, 0, -2], [0, 1, 0, 0]])
