"""Pure-Python / numpy implementations of the hot kernels.

These are the reference versions; ``_kernels.pyx`` mirrors them in Cython.
"""

from __future__ import annotations

import numpy as np


def reduce_sorted(values):
    """Indices of the irreducible rows of ``values``.

    ``values`` holds facet-value vectors ``F x`` of distinct nonzero lattice
    points of a pointed cone, sorted by total degree.  Row ``x`` is reducible
    iff some earlier irreducible ``y`` has ``F y <= F x`` componentwise, i.e.
    ``x - y`` lies in the cone.
    """
    kept: list[int] = []
    rows = [tuple(int(v) for v in r) for r in values]
    for i, x in enumerate(rows):
        for j in kept:
            y = rows[j]
            if all(a <= b for a, b in zip(y, x)):
                break
        else:
            kept.append(i)
    return kept


def _pad3(nodes, weights, exps):
    nodes = [np.asarray(x, dtype=float) for x in nodes]
    weights = [np.asarray(w, dtype=float) for w in weights]
    exps = np.asarray(exps, dtype=np.int64).reshape(-1, len(nodes))
    while len(nodes) < 3:
        nodes.append(np.ones(1))
        weights.append(np.ones(1))
        exps = np.hstack([exps, np.zeros((exps.shape[0], 1), dtype=np.int64)])
    return nodes, weights, exps


def laplace_grid(nodes, weights, coeffs, exps, n_values):
    """Tensor-grid sums ``sum_w w * exp(-n * H)`` for every ``n``.

    ``H = sum_t coeffs[t] * prod_k x_k ** exps[t, k]`` with up to three
    axes.  Returns ``(Z, h_min, argmin)`` where ``argmin`` indexes the grid
    point attaining the smallest raw value of ``H``.  Negative values are
    clamped to zero before exponentiation.
    """
    nodes, weights, exps = _pad3(nodes, weights, exps)
    coeffs = np.asarray(coeffs, dtype=float)
    n_values = np.asarray(n_values, dtype=float)
    fac = [np.power.outer(nodes[k], exps[:, k]).T for k in range(3)]  # (T, N_k)
    plane = fac[1][:, :, None] * fac[2][:, None, :]  # (T, N1, N2)
    wplane = np.outer(weights[1], weights[2])
    z = np.zeros(len(n_values))
    h_min, argmin = np.inf, (0, 0, 0)
    for i0 in range(len(nodes[0])):
        h = np.tensordot(coeffs * fac[0][:, i0], plane, axes=1)
        m = h.argmin()
        if h.flat[m] < h_min:
            h_min = float(h.flat[m])
            argmin = (i0,) + tuple(int(v) for v in np.unravel_index(m, h.shape))
        hc = np.maximum(h, 0.0)
        w = weights[0][i0] * wplane
        for li, n in enumerate(n_values):
            z[li] += float(np.sum(w * np.exp(-n * hc)))
    return z, h_min, argmin
