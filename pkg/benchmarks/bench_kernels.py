"""Compare the compiled kernels with the numpy/Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from toricrlct import _kernels_py
from toricrlct.cones import Cone, double_description
from toricrlct.hilbert import _SpanChart, _candidates, _placing
from toricrlct.lattice import dot
from toricrlct.verify import axis_rule

try:
    from toricrlct import _kernels as compiled
except ImportError:  # pragma: no cover
    compiled = None


def reduce_workload():
    c = Cone([(1, 0, 0, 0), (1, 7, 0, 0), (1, 0, 9, 0), (1, 0, 0, 11), (1, 3, 4, 5)], 4)
    chart = _SpanChart(c)
    coords = [chart.coords(g) for g in c.generators]
    cands = sorted({p for s in _placing(coords, chart.k) for p in _candidates(coords, s)})
    _, normals = double_description(coords, chart.k)
    vals = [tuple(dot(b, x) for b in normals) for x in cands]
    order = sorted(range(len(cands)), key=lambda i: (sum(vals[i]), cands[i]))
    return [vals[i] for i in order]


def laplace_workload(points):
    nodes, weights = zip(*(axis_rule(0.0, 1.0, points, 1.5) for _ in range(3)))
    # b2^2 + (a*b1^2 + (b2 - a*b1)^2)^2 expanded
    terms = {(0, 0, 2): 1, (0, 0, 4): 1, (1, 1, 3): -4, (1, 2, 2): 2, (2, 2, 2): 6,
             (2, 3, 1): -4, (2, 4, 0): 1, (3, 3, 1): -4, (3, 4, 0): 4, (4, 4, 0): 1}
    return list(nodes), list(weights), list(terms.values()), list(terms.keys()), [1e2, 1e3, 1e4, 1e5, 1e6]


def bench(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--points", type=int, default=128)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels not built; only the fallback is available")
    rows = []
    work = reduce_workload()
    lap = laplace_workload(args.points)
    for name, w in (("reduce_sorted", (work,)), ("laplace_grid", lap)):
        tp, outp = bench(getattr(_kernels_py, name), w, args.repeat)
        line = f"{name:14s} python {tp * 1e3:9.2f} ms"
        if compiled is not None:
            tc, outc = bench(getattr(compiled, name), w, args.repeat)
            same = outp == outc if name == "reduce_sorted" else np.allclose(outp[0], outc[0], rtol=1e-10)
            line += f"   cython {tc * 1e3:9.2f} ms   speedup {tp / tc:6.1f}x   agree={same}"
        rows.append(line)
    print(f"reduce_sorted: {len(work)} candidates; laplace_grid: {args.points}^3 nodes, 10 terms, 5 n values")
    print("\n".join(rows))


if __name__ == "__main__":
    main()
