"""Constant-guidance model of how deep a searcher should go.

With a fixed per-step probability ``gamma`` of staying on the right path and
a reward ``1 - alpha**depth`` with ``alpha = gamma**g``, the value of
stopping at depth ``ell`` is ``gamma**ell * (2 - gamma**(g*ell)) - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class AnalysisParams:
    gamma_step: float
    g: float

    def __post_init__(self):
        if not 0.0 < self.gamma_step < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma_step}")
        if not self.g >= 0.0:
            raise ValueError(f"g must be >= 0, got {self.g}")


def value_at(p: AnalysisParams, depth: float) -> float:
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    if math.isinf(depth):
        return -1.0
    gl = p.gamma_step**depth
    return gl * (2.0 - p.gamma_step ** (p.g * depth)) - 1.0


def optimal_depth(p: AnalysisParams) -> float | None:
    """Turning point of :func:`value_at`; ``None`` when it falls below depth 0."""
    if p.g == 0:
        raise ValueError("optimal depth is undefined for g = 0")
    if p.g < 1:
        return None
    return (math.log(2.0) - math.log1p(p.g)) / (p.g * math.log(p.gamma_step))


def _gstar_residual(g: float) -> float:
    return g + (1.0 + g) * (math.log(2.0) - math.log1p(g))


def optimal_g(lo: float = 1.0, hi: float = 10.0, tol: float = 1e-10) -> float:
    """Reward exponent maximising the optimal depth, found by bisection."""
    f_lo, f_hi = _gstar_residual(lo), _gstar_residual(hi)
    if f_lo * f_hi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = _gstar_residual(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimal_depth_at_gstar(gamma_step: float) -> float:
    if not 0.0 < gamma_step < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma_step}")
    return 1.0 / ((1.0 + optimal_g()) * -math.log(gamma_step))


def value_curve(p: AnalysisParams, depths: Iterable[float]) -> Iterator[tuple[float, float]]:
    for ell in depths:
        yield ell, value_at(p, ell)
