"""The search POMDP for one target item.

The full state space pairs every node with an on-path flag, plus two
terminal states.  Because the bot starts at the root certain that the target
is below it and never backtracks, the belief at a node collapses to one
number: the probability that the node's cluster contains the target.  That
scalar is the representation used throughout.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .guidance import SimilarityFn, SimilarityKind, TemperatureSchedule

#: discount factor; fixed because the search always ends in at most height+1 steps
DISCOUNT = 1.0

_E_MINUS_1 = math.e - 1.0


class Action(enum.Enum):
    DESCEND = "descend"
    SEARCH = "search"


TERMINAL = None


@dataclass(frozen=True)
class SearchState:
    """``location`` is a node index, or ``TERMINAL`` after searching."""

    location: int | None
    on_path: bool


@dataclass(frozen=True)
class Belief:
    node: int
    b: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"belief must lie in [0, 1], got {self.b}")

    def prob(self, state: SearchState) -> float:
        if state.location != self.node:
            return 0.0
        return self.b if state.on_path else 1.0 - self.b


@dataclass(frozen=True)
class PomdpConfig:
    schedule: TemperatureSchedule = field(default_factory=TemperatureSchedule)
    similarity: SimilarityKind | SimilarityFn = SimilarityKind.AVG_COSINE

    @property
    def discount(self) -> float:
        return DISCOUNT


def reward(cluster_size: int, n_items: int) -> float:
    """Payoff for finding the target in a cluster of this size; smaller clusters pay more."""
    if not 1 <= cluster_size <= n_items:
        raise ValueError(f"cluster size must be in [1, {n_items}], got {cluster_size}")
    return 1.0 - math.expm1(cluster_size / n_items) / _E_MINUS_1


def transition_probs(eta: float) -> tuple[float, float, float, float]:
    """Descent transition probabilities into one child with guidance ``eta``.

    Returned in order: on-path to on-path, on-path to off-path,
    off-path to on-path, off-path to off-path.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"guidance probability must lie in [0, 1], got {eta}")
    return eta * eta, eta * (1.0 - eta), 0.0, eta


def belief_update(belief: Belief, eta_to_child: float, child: int) -> Belief:
    """Belief after descending and observing arrival at ``child``.

    The observation probability of arriving at the child equals ``eta``, so
    Bayes' rule reduces to scaling the on-path mass by ``eta``.
    """
    return Belief(child, eta_to_child * belief.b)


def q_stay(b: float, cluster_size: int, n_items: int) -> float:
    return b * (reward(cluster_size, n_items) + 1.0) - 1.0


def q_go_hat(b: float, children: Sequence[tuple[int, float, int]], n_items: int) -> float:
    """One-step lookahead value of descending, treating every child as a leaf.

    ``children`` holds ``(node, eta, cluster_size)`` triples.
    """
    if not children:
        raise ValueError("cannot descend from a node without children")
    total = 0.0
    for _, eta, size in children:
        total += eta * q_stay(eta * b, size, n_items)
    return total
