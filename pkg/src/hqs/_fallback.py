"""Pure-Python batch evaluation; the reference twin of the compiled kernel."""
from __future__ import annotations

import math

import numpy as np


def evaluate_rows(model, delta: float, nu: float, rows):
    rows = np.asarray(rows, dtype=np.int64)
    n = len(rows)
    out_value = np.empty(n)
    out_node = np.empty(n, dtype=np.int64)
    out_depth = np.empty(n, dtype=np.int64)
    out_belief = np.empty(n)
    child_ptr, child_idx, rew = model.child_ptr, model.child_idx, model.reward
    for i, row in enumerate(rows.tolist()):
        path = model.path(row)
        b = 1.0
        t = 0
        while True:
            c = path[t]
            lo, hi = int(child_ptr[c]), int(child_ptr[c + 1])
            if lo == hi:
                break
            qs = b * (rew[c] + 1.0) - 1.0
            nxt = path[t + 1]
            kids = child_idx[lo:hi].tolist()
            w = [model.score_row(row, k, k == nxt) for k in kids]
            if not all(math.isfinite(s) for s in w):
                raise FloatingPointError("non-finite similarity score")
            top = max(w)
            temp = delta * nu ** int(model.depth[c])
            total = 0.0
            for j, s in enumerate(w):
                w[j] = math.exp((s - top) / temp)
                total += w[j]
            qg = 0.0
            eta_next = 0.0
            for k, wk in zip(kids, w):
                eta = wk / total
                qg += eta * ((eta * b) * (rew[k] + 1.0) - 1.0)
                if k == nxt:
                    eta_next = eta
            if qg >= qs:
                b = eta_next * b
                t += 1
            else:
                break
        c = path[t]
        out_value[i] = b * (rew[c] + 1.0) - 1.0
        out_node[i] = c
        out_depth[i] = t
        out_belief[i] = b
    return out_value, out_node, out_depth, out_belief
