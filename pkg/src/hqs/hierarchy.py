"""Immutable tree model of a hierarchical clustering.

Items live only on leaves; the cluster of an internal node is the union of
the items below it.  Node indices are dense, assigned in document pre-order,
with the root at index 0.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Any, Iterable, Mapping


class HierarchyError(ValueError):
    """Raised for malformed or inconsistent hierarchy input."""


@dataclass(frozen=True)
class Node:
    index: int
    id: str
    parent: int | None
    children: tuple[int, ...]
    items: tuple[str, ...]
    depth: int

    @property
    def is_leaf(self) -> bool:
        return not self.children


class Hierarchy:
    """A validated rooted tree whose leaves partition a set of items."""

    def __init__(self, nodes: Iterable[Node]):
        self.nodes: tuple[Node, ...] = tuple(nodes)
        if not self.nodes:
            raise HierarchyError("hierarchy has no nodes")
        self.item_index: dict[str, int] = {}
        self.node_index: dict[str, int] = {}
        self._validate()
        self.sizes: tuple[int, ...] = self._subtree_sizes()
        self._cluster_cache: dict[int, frozenset[str]] = {}

    def _validate(self) -> None:
        roots = [n.index for n in self.nodes if n.parent is None]
        if roots != [0]:
            raise HierarchyError("hierarchy must have exactly one root at index 0")
        for i, node in enumerate(self.nodes):
            if node.index != i:
                raise HierarchyError(f"node {node.id!r} has index {node.index}, expected {i}")
            if node.id in self.node_index:
                raise HierarchyError(f"duplicate node id {node.id!r}")
            self.node_index[node.id] = i
            if node.children and node.items:
                raise HierarchyError(f"items listed on internal node {node.id!r}")
            if not node.children and not node.items:
                raise HierarchyError(f"empty leaf {node.id!r}")
            for c in node.children:
                if not 0 <= c < len(self.nodes) or self.nodes[c].parent != i:
                    raise HierarchyError(f"broken parent/child link under {node.id!r}")
            for x in node.items:
                if not x:
                    raise HierarchyError(f"empty item id under leaf {node.id!r}")
                if x in self.item_index:
                    raise HierarchyError(
                        f"duplicate item {x!r} in leaves "
                        f"{self.nodes[self.item_index[x]].id!r} and {node.id!r}"
                    )
                self.item_index[x] = i

    def _subtree_sizes(self) -> tuple[int, ...]:
        sizes = [len(n.items) for n in self.nodes]
        # pre-order: every child has a larger index than its parent
        for n in reversed(self.nodes):
            if n.parent is not None:
                sizes[n.parent] += sizes[n.index]
        return tuple(sizes)

    @property
    def root(self) -> Node:
        return self.nodes[0]

    @property
    def n_items(self) -> int:
        return len(self.item_index)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def height(self) -> int:
        return max(n.depth for n in self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"Hierarchy(n_items={self.n_items}, node_count={self.node_count})"

    def node(self, c: int | str) -> Node:
        if isinstance(c, str):
            if c not in self.node_index:
                raise HierarchyError(f"unknown node {c!r}")
            c = self.node_index[c]
        if not 0 <= c < len(self.nodes):
            raise HierarchyError(f"unknown node index {c}")
        return self.nodes[c]

    def leaves(self) -> list[Node]:
        return [n for n in self.nodes if n.is_leaf]

    def items(self) -> list[str]:
        """All item ids in leaf pre-order."""
        return [x for n in self.nodes for x in n.items]

    def cluster_items(self, c: int | str) -> frozenset[str]:
        """Items stored in the subtree rooted at ``c``."""
        node = self.node(c)
        cached = self._cluster_cache.get(node.index)
        if cached is not None:
            return cached
        out: set[str] = set()
        stack = [node.index]
        while stack:
            n = self.nodes[stack.pop()]
            out.update(n.items)
            stack.extend(n.children)
        result = frozenset(out)
        self._cluster_cache[node.index] = result
        return result

    def path_to_item(self, x: str) -> list[int]:
        """Root-to-leaf node indices whose clusters all contain ``x``."""
        if x not in self.item_index:
            raise HierarchyError(f"item {x!r} is not contained in the hierarchy")
        path = []
        c: int | None = self.item_index[x]
        while c is not None:
            path.append(c)
            c = self.nodes[c].parent
        path.reverse()
        return path

    def to_dict(self) -> dict[str, Any]:
        def shell(n: Node) -> dict[str, Any]:
            if n.is_leaf:
                return {"id": n.id, "items": list(n.items)}
            return {"id": n.id, "children": []}

        docs = [shell(n) for n in self.nodes]
        for n in self.nodes:
            if n.parent is not None:
                docs[n.parent]["children"].append(docs[n.index])
        return docs[0]

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)


_NODE_KEYS = {"id", "children", "items"}


def hierarchy_from_dict(doc: Mapping[str, Any]) -> Hierarchy:
    """Build a Hierarchy from a decoded nested node object."""
    nodes: list[dict[str, Any]] = []
    # explicit stack keeps deep (e.g. agglomerative) trees off the Python call stack
    stack: list[tuple[Any, int | None, int]] = [(doc, None, 0)]
    while stack:
        obj, parent, depth = stack.pop()
        if not isinstance(obj, Mapping):
            raise HierarchyError(f"node must be a JSON object, got {type(obj).__name__}")
        node_id = obj.get("id")
        if not isinstance(node_id, str):
            raise HierarchyError(f"node is missing a string 'id': {_short(obj)}")
        extra = set(obj) - _NODE_KEYS
        if extra:
            warnings.warn(f"ignoring unknown keys {sorted(extra)} on node {node_id!r}", stacklevel=2)
        has_children = "children" in obj
        has_items = "items" in obj
        if has_children == has_items:
            raise HierarchyError(f"node {node_id!r} must have exactly one of 'children' or 'items'")
        index = len(nodes)
        rec = {"index": index, "id": node_id, "parent": parent, "children": [], "items": (), "depth": depth}
        if has_children:
            kids = obj["children"]
            if not isinstance(kids, list):
                raise HierarchyError(f"'children' of node {node_id!r} must be a list")
            if not kids:
                raise HierarchyError(f"internal node {node_id!r} has zero children")
            for kid in reversed(kids):
                stack.append((kid, index, depth + 1))
        else:
            items = obj["items"]
            if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
                raise HierarchyError(f"'items' of node {node_id!r} must be a list of strings")
            if not items:
                raise HierarchyError(f"empty leaf {node_id!r}")
            rec["items"] = tuple(items)
        if parent is not None:
            nodes[parent]["children"].append(index)
        nodes.append(rec)
    return Hierarchy(
        Node(r["index"], r["id"], r["parent"], tuple(r["children"]), r["items"], r["depth"])
        for r in nodes
    )


def parse_hierarchy(document: str | bytes) -> Hierarchy:
    """Parse hierarchy JSON text into a validated Hierarchy."""
    try:
        doc = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise HierarchyError(f"malformed hierarchy document: {e}") from e
    except RecursionError as e:
        raise HierarchyError("hierarchy document is nested too deeply to decode") from e
    return hierarchy_from_dict(doc)


def load_hierarchy(path) -> Hierarchy:
    with open(path, "rb") as fh:
        return parse_hierarchy(fh.read())


def from_nested(spec: Any, prefix: str = "n") -> Hierarchy:
    """Build a hierarchy from nested lists; a list of strings is a leaf.

    ``from_nested([["a", "b"], ["c"]])`` is a root with two leaves.  Node
    ids are generated as ``<prefix><pre-order index>``.
    """
    root: dict[str, Any] = {}
    stack: list[tuple[dict[str, Any], Any]] = [(root, spec)]
    counter = 0
    while stack:
        doc, s = stack.pop()
        doc["id"] = f"{prefix}{counter}"
        counter += 1
        if all(isinstance(x, str) for x in s):
            doc["items"] = list(s)
            continue
        doc["children"] = [{} for _ in s]
        stack.extend(reversed(list(zip(doc["children"], s))))
    return hierarchy_from_dict(root)


def _short(obj: Any, limit: int = 60) -> str:
    text = repr(obj)
    return text if len(text) <= limit else text[: limit - 3] + "..."
