"""Item-to-cluster similarity and the Boltzmann guidance distribution."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Collection, Sequence

import numpy as np

from .corpus import Catalogue, CorpusError

#: additive constant in the inverse squared euclidean similarity
EUCLID_EPS = 1e-4


class SimilarityKind(enum.Enum):
    AVG_COSINE = "avg-cosine"
    INV_SQ_EUCLID = "inv-sq-euclid"


#: user scoring function ``f(catalogue, x, cluster) -> float``
SimilarityFn = Callable[[Catalogue, str, Collection[str]], float]


@dataclass(frozen=True)
class TemperatureSchedule:
    """Temperature ``delta * nu**depth``; ``nu == 1`` keeps it constant."""

    delta: float = 0.01
    nu: float = 1.0

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive and finite, got {self.delta}")
        if not (self.nu >= 1 and math.isfinite(self.nu)):
            raise ValueError(f"nu must be >= 1, got {self.nu}")

    def at(self, depth: int) -> float:
        return self.delta * self.nu**depth


@dataclass(frozen=True)
class GuidanceDistribution:
    children: tuple[int, ...]
    probs: tuple[float, ...]

    def __getitem__(self, child: int) -> float:
        try:
            return self.probs[self.children.index(child)]
        except ValueError:
            return 0.0


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def similarity(kind: SimilarityKind | SimilarityFn, catalogue: Catalogue, x: str, cluster: Collection[str]) -> float:
    """Similarity between item ``x`` and a cluster, evaluated directly."""
    if not cluster:
        raise CorpusError("similarity to an empty cluster")
    vx = catalogue.vector(x)
    if kind is SimilarityKind.AVG_COSINE:
        others = [y for y in cluster if y != x]
        if not others:
            return 1.0
        return sum(cosine(vx, catalogue.vector(y)) for y in others) / len(others)
    if kind is SimilarityKind.INV_SQ_EUCLID:
        rows = [catalogue.row(y) for y in cluster]
        diff = vx - catalogue.vectors[rows].mean(axis=0)
        return 1.0 / (float(diff @ diff) + EUCLID_EPS)
    if callable(kind):
        s = float(kind(catalogue, x, cluster))
        if not math.isfinite(s):
            raise FloatingPointError(f"similarity function returned {s} for item {x!r}")
        return s
    raise TypeError(f"unknown similarity kind {kind!r}")


def softmax(scores: Sequence[float], temperature: float) -> list[float]:
    """Boltzmann weights with the maximum score subtracted first."""
    if not scores:
        raise ValueError("guidance needs at least one child")
    for s in scores:
        if not math.isfinite(s):
            raise FloatingPointError(f"non-finite similarity score {s}")
    top = max(scores)
    w = [math.exp((s - top) / temperature) for s in scores]
    total = 0.0
    for v in w:  # plain left-to-right sum; the compiled kernel matches it
        total += v
    return [v / total for v in w]


def guidance(sched: TemperatureSchedule, depth: int, scores: Sequence[tuple[int, float]]) -> GuidanceDistribution:
    """Probability of descending to each child, given its similarity score."""
    if not scores:
        raise ValueError("guidance needs at least one child")
    children = tuple(c for c, _ in scores)
    probs = softmax([s for _, s in scores], sched.at(depth))
    return GuidanceDistribution(children, tuple(probs))
