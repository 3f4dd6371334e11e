"""Backend selection for batch policy evaluation.

The compiled extension is used when it was built; otherwise the pure-Python
implementation is used.  ``BACKEND`` names the active one.
"""
from __future__ import annotations

from . import _fallback

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None

BACKENDS = {"python": _fallback.evaluate_rows}
if _kernel is not None:
    BACKENDS["compiled"] = _kernel.evaluate_rows

BACKEND = "compiled" if _kernel is not None else "python"


def evaluate_rows(model, delta: float, nu: float, rows, backend: str | None = None):
    """Evaluate the policy for catalogue ``rows`` of a FlatModel.

    Returns arrays ``(value, stop_node, stop_depth, belief)`` aligned with
    ``rows``.  The compiled backend releases the GIL.
    """
    fn = BACKENDS[backend or BACKEND]
    return fn(model, delta, nu, rows)
