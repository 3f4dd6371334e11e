"""Greedy belief-space search policy for a single target item.

At each node on the target's path the bot compares searching here against a
one-step lookahead of descending (children treated as leaves), and descends
when the lookahead is at least as good.  The oracle value of the resulting
stop point is the item's score.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import Catalogue
from .guidance import softmax
from .hierarchy import Hierarchy
from .pomdp import DISCOUNT, Action, Belief, PomdpConfig, belief_update, q_go_hat, q_stay, reward
from .scoring import make_scorer


@dataclass(frozen=True)
class Step:
    depth: int
    node: int
    q_stay: float
    q_go_hat: float | None  # None at a leaf
    action: Action
    eta: float | None = None  # guidance towards the on-path child


@dataclass
class SearchTrace:
    item: str
    path: list[int]
    steps: list[Step] = field(default_factory=list)
    stop_depth: int = 0
    belief_at_stop: float = 1.0
    oracle_value: float = 0.0

    @property
    def stop_node(self) -> int:
        return self.path[-1]


@dataclass(frozen=True)
class Decision:
    q_stay: float
    q_go_hat: float | None
    action: Action
    children: tuple[int, ...] = ()
    etas: tuple[float, ...] = ()


def decide(h: Hierarchy, scorer, cfg: PomdpConfig, x: str, node: int, b: float, on_path: frozenset[int] | set[int]) -> Decision:
    """Search-or-descend choice at ``node`` holding belief ``b``."""
    n = h.nodes[node]
    n_items = h.n_items
    qs = q_stay(b, h.sizes[node], n_items)
    if n.is_leaf:
        return Decision(qs, None, Action.SEARCH)
    scores = [scorer.score(x, c, c in on_path) for c in n.children]
    etas = softmax(scores, cfg.schedule.at(n.depth))
    qg = q_go_hat(b, [(c, e, h.sizes[c]) for c, e in zip(n.children, etas)], n_items)
    # ties descend: equal estimates favour exploring (unary chains rely on this)
    action = Action.DESCEND if qg >= qs else Action.SEARCH
    return Decision(qs, qg, action, n.children, tuple(etas))


def run_simplified_rtbss(h: Hierarchy, cat: Catalogue, cfg: PomdpConfig, x: str, scorer=None) -> SearchTrace:
    """Follow the target's correct path until the policy chooses to search."""
    full_path = h.path_to_item(x)
    if scorer is None:
        scorer = make_scorer(h, cat, cfg.similarity)
    on_path = frozenset(full_path)
    belief = Belief(0, 1.0)
    trace = SearchTrace(item=x, path=[0])
    for t, node in enumerate(full_path):
        d = decide(h, scorer, cfg, x, node, belief.b, on_path)
        if d.action is Action.SEARCH:
            trace.steps.append(Step(t, node, d.q_stay, d.q_go_hat, Action.SEARCH))
            break
        nxt = full_path[t + 1]
        eta = d.etas[d.children.index(nxt)]
        trace.steps.append(Step(t, node, d.q_stay, d.q_go_hat, Action.DESCEND, eta))
        belief = belief_update(belief, eta, nxt)
        trace.path.append(nxt)
    trace.stop_depth = len(trace.path) - 1
    trace.belief_at_stop = belief.b
    trace.oracle_value = q_stay(belief.b, h.sizes[trace.stop_node], h.n_items)
    return trace


def oracle_value(h: Hierarchy, trace: SearchTrace) -> float:
    """Recompute the oracle value from the stop node and the descended edges."""
    prod = 1.0
    for s in trace.steps:
        if s.action is Action.DESCEND:
            prod *= s.eta
    return (reward(h.sizes[trace.stop_node], h.n_items) + 1.0) * prod - 1.0


def expand(
    h: Hierarchy,
    cat: Catalogue,
    cfg: PomdpConfig,
    x: str,
    belief: Belief,
    d: int,
    scorer=None,
    tie_descend: bool = True,
) -> tuple[float, Action]:
    """Depth-limited lower bound on the belief value and the maximising action.

    ``d`` counts lookahead actions.  Searching ends the episode, so it is
    always evaluable; descending must be followed by at least one more
    action, which needs ``d >= 2``.  Descending earns nothing immediately and
    explores every child weighted by its observation probability.
    """
    if d < 0:
        raise ValueError(f"lookahead depth must be >= 0, got {d}")
    if scorer is None:
        scorer = make_scorer(h, cat, cfg.similarity)
    on_path = frozenset(h.path_to_item(x))
    return _expand(h, scorer, cfg, x, belief, d, on_path, tie_descend)


def _expand(h, scorer, cfg, x, belief, d, on_path, tie_descend):
    node = h.nodes[belief.node]
    l_search = q_stay(belief.b, h.sizes[node.index], h.n_items)
    if d < 2 or node.is_leaf:
        return l_search, Action.SEARCH
    scores = [scorer.score(x, c, c in on_path) for c in node.children]
    etas = softmax(scores, cfg.schedule.at(node.depth))
    total = 0.0
    for c, eta in zip(node.children, etas):
        sub, _ = _expand(h, scorer, cfg, x, belief_update(belief, eta, c), d - 1, on_path, tie_descend)
        total += eta * sub
    l_descend = 0.0 + DISCOUNT * total
    if l_descend > l_search or (tie_descend and l_descend == l_search):
        return l_descend, Action.DESCEND
    return l_search, Action.SEARCH
