# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``.

Same signatures and results; ``reduce_sorted`` works on int64 facet values,
so the caller must check magnitudes first.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def reduce_sorted(values):
    cdef cnp.int64_t[:, ::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0], f = v.shape[1]
    cdef cnp.int64_t[::1] kept = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t nk = 0, i, j, k, y
    cdef bint below
    for i in range(n):
        for j in range(nk):
            y = kept[j]
            below = True
            for k in range(f):
                if v[y, k] > v[i, k]:
                    below = False
                    break
            if below:
                break
        else:
            kept[nk] = i
            nk += 1
    return [int(kept[j]) for j in range(nk)]


def _pad3(nodes, weights, exps):
    nodes = [np.ascontiguousarray(x, dtype=np.float64) for x in nodes]
    weights = [np.ascontiguousarray(w, dtype=np.float64) for w in weights]
    exps = np.asarray(exps, dtype=np.int64).reshape(-1, len(nodes))
    while len(nodes) < 3:
        nodes.append(np.ones(1))
        weights.append(np.ones(1))
        exps = np.hstack([exps, np.zeros((exps.shape[0], 1), dtype=np.int64)])
    return nodes, weights, exps


def laplace_grid(nodes, weights, coeffs, exps, n_values):
    nodes, weights, exps = _pad3(nodes, weights, exps)
    cdef double[:, ::1] f0 = np.ascontiguousarray(np.power.outer(nodes[0], exps[:, 0]))
    cdef double[:, ::1] f1 = np.ascontiguousarray(np.power.outer(nodes[1], exps[:, 1]))
    cdef double[:, ::1] f2 = np.ascontiguousarray(np.power.outer(nodes[2], exps[:, 2]))
    cdef double[::1] w0 = weights[0], w1 = weights[1], w2 = weights[2]
    cdef double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef double[::1] nv = np.ascontiguousarray(n_values, dtype=np.float64)
    cdef Py_ssize_t nt = c.shape[0], nl = nv.shape[0]
    cdef Py_ssize_t n0 = w0.shape[0], n1 = w1.shape[0], n2 = w2.shape[0]
    cdef double[::1] p1 = np.empty(nt), p2 = np.empty(nt)
    cdef double[::1] z = np.zeros(nl), zs = np.zeros(nl)
    cdef Py_ssize_t i0, i1, i2, t, l
    cdef double h, hc, w, wa, x
    cdef double h_min = np.inf
    cdef Py_ssize_t a0 = 0, a1 = 0, a2 = 0
    for i0 in range(n0):
        for t in range(nt):
            p1[t] = c[t] * f0[i0, t]
        for l in range(nl):
            zs[l] = 0.0
        for i1 in range(n1):
            for t in range(nt):
                p2[t] = p1[t] * f1[i1, t]
            wa = w1[i1]
            for i2 in range(n2):
                h = 0.0
                for t in range(nt):
                    h += p2[t] * f2[i2, t]
                if h < h_min:
                    h_min = h
                    a0, a1, a2 = i0, i1, i2
                hc = h if h > 0.0 else 0.0
                w = wa * w2[i2]
                # n is increasing; past 745 exp underflows to exactly 0
                for l in range(nl):
                    x = nv[l] * hc
                    if x > 745.0:
                        break
                    zs[l] += w * exp(-x)
        for l in range(nl):
            z[l] += w0[i0] * zs[l]
    return np.asarray(z), float(h_min), (int(a0), int(a1), int(a2))
