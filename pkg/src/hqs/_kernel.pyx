# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch evaluation of the greedy search policy.

Mirrors ``hqs._fallback.evaluate_rows`` operation for operation; the two
differ only in dot-product summation order.
"""
from libc.math cimport exp, pow, isfinite, INFINITY
from libc.stdlib cimport malloc, free

import numpy as np


cdef double _score(int kind, const double[:, ::1] vecs, const double[:, ::1] agg,
                   const double[::1] selfdot, const long long[::1] size,
                   Py_ssize_t row, Py_ssize_t node, bint contains, double eps) noexcept nogil:
    cdef Py_ssize_t k, dim = vecs.shape[1]
    cdef double acc = 0.0, d
    if kind == 0:
        if contains and size[node] == 1:
            return 1.0
        for k in range(dim):
            acc += vecs[row, k] * agg[node, k]
        if contains:
            return (acc - selfdot[row]) / (size[node] - 1)
        return acc / size[node]
    for k in range(dim):
        d = vecs[row, k] - agg[node, k]
        acc += d * d
    return 1.0 / (acc + eps)


def evaluate_rows(model, double delta, double nu, rows):
    """Return ``(value, stop_node, stop_depth, belief)`` arrays for item rows."""
    cdef const long long[::1] child_ptr = model.child_ptr
    cdef const long long[::1] child_idx = model.child_idx
    cdef const long long[::1] parent = model.parent
    cdef const long long[::1] depth = model.depth
    cdef const long long[::1] size = model.size
    cdef const double[::1] rew = model.reward
    cdef const long long[::1] item_leaf = model.item_leaf
    cdef const double[:, ::1] vecs = model.vecs
    cdef const double[:, ::1] agg = model.agg
    cdef const double[::1] selfdot = model.selfdot
    cdef int kind = model.kind_code
    cdef double eps = 1e-4
    cdef long long[::1] rws = np.ascontiguousarray(rows, dtype=np.int64)
    cdef Py_ssize_t n = rws.shape[0]

    out_value = np.empty(n)
    out_node = np.empty(n, dtype=np.int64)
    out_depth = np.empty(n, dtype=np.int64)
    out_belief = np.empty(n)
    cdef double[::1] ov = out_value
    cdef long long[::1] on = out_node
    cdef long long[::1] od = out_depth
    cdef double[::1] ob = out_belief

    cdef Py_ssize_t plen_max = model.height + 1
    cdef Py_ssize_t kmax = model.max_children
    cdef long long* path = <long long*> malloc(plen_max * sizeof(long long))
    cdef double* w = <double*> malloc(kmax * sizeof(double))
    if path == NULL or w == NULL:
        free(path)
        free(w)
        raise MemoryError()

    cdef Py_ssize_t i, j, t, plen, c, nxt, child, lo, hi
    cdef long long row, cc
    cdef double b, qs, qg, top, temp, total, eta, eta_next
    cdef bint bad = False
    try:
        with nogil:
            for i in range(n):
                row = rws[i]
                plen = 0
                cc = item_leaf[row]
                while cc >= 0:
                    path[plen] = cc
                    plen += 1
                    cc = parent[cc]
                # reverse in place: root first
                for j in range(plen // 2):
                    cc = path[j]
                    path[j] = path[plen - 1 - j]
                    path[plen - 1 - j] = cc

                b = 1.0
                t = 0
                while True:
                    c = path[t]
                    lo = child_ptr[c]
                    hi = child_ptr[c + 1]
                    if lo == hi:
                        break
                    qs = b * (rew[c] + 1.0) - 1.0
                    nxt = path[t + 1]
                    top = -INFINITY
                    for j in range(lo, hi):
                        child = child_idx[j]
                        w[j - lo] = _score(kind, vecs, agg, selfdot, size, row, child, child == nxt, eps)
                        if not isfinite(w[j - lo]):
                            bad = True
                        if w[j - lo] > top:
                            top = w[j - lo]
                    if bad:
                        break
                    temp = delta * pow(nu, <double> depth[c])
                    total = 0.0
                    for j in range(hi - lo):
                        w[j] = exp((w[j] - top) / temp)
                        total += w[j]
                    qg = 0.0
                    eta_next = 0.0
                    for j in range(lo, hi):
                        eta = w[j - lo] / total
                        qg += eta * ((eta * b) * (rew[child_idx[j]] + 1.0) - 1.0)
                        if child_idx[j] == nxt:
                            eta_next = eta
                    if qg >= qs:
                        b = eta_next * b
                        t += 1
                    else:
                        break
                if bad:
                    break
                c = path[t]
                ov[i] = b * (rew[c] + 1.0) - 1.0
                on[i] = c
                od[i] = t
                ob[i] = b
    finally:
        free(path)
        free(w)
    if bad:
        raise FloatingPointError("non-finite similarity score")
    return out_value, out_node, out_depth, out_belief
