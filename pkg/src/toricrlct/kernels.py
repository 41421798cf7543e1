"""Kernel selection: compiled core when importable, Python fallback otherwise.

Set ``TORICRLCT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

_INT64_SAFE = 2**62

try:
    if os.environ.get("TORICRLCT_PURE_PYTHON"):
        raise ImportError("pure Python forced")
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def reduce_sorted(values):
    if _compiled is not None and values:
        if max(abs(int(v)) for row in values for v in row) < _INT64_SAFE:
            return _compiled.reduce_sorted(values)
    return _kernels_py.reduce_sorted(values)


def laplace_grid(nodes, weights, coeffs, exps, n_values):
    impl = _compiled if _compiled is not None else _kernels_py
    return impl.laplace_grid(nodes, weights, coeffs, exps, n_values)
