"""Hilbert bases of pointed rational cones.

The cone is first rewritten in coordinates of the saturated lattice of its
linear span, so every computation happens on a full-dimensional cone.  A
placing triangulation splits it into simplicial cones; the lattice points of
each half-open fundamental parallelepiped, together with the generators,
contain the Hilbert basis.  Candidates are then reduced in degree order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from . import kernels
from .cones import Cone, NotPointedError, double_description
from .lattice import (
    determinant,
    dot,
    hermite_normal_form,
    inverse,
    matvec,
    rank,
    saturated_span_basis,
    transpose,
)

__all__ = ["HilbertBasis", "triangulate", "hilbert_basis", "monoid_membership", "parallelepiped_points"]


@dataclass(frozen=True)
class HilbertBasis:
    cone: Cone
    elements: list

    def to_json(self) -> dict:
        return {"cone": self.cone.to_json(), "hilbert_basis": [list(e) for e in self.elements]}


class _SpanChart:
    """Coordinates on ``span(cone) ∩ Z^n`` given by a saturated basis."""

    def __init__(self, cone: Cone):
        n = cone.ambient_dim
        self.basis = saturated_span_basis(cone.generators, n)
        self.k = len(self.basis)
        self.n = n
        # U B = [I; 0] because B is saturated
        _, self._u = hermite_normal_form(transpose(self.basis))

    def coords(self, x: Sequence[int]) -> tuple:
        return tuple(matvec(self._u[: self.k], x))

    def lift(self, t: Sequence[int]) -> tuple:
        return tuple(sum(ti * b[j] for ti, b in zip(t, self.basis)) for j in range(self.n))


def _placing(gens: list[tuple], k: int) -> list[tuple[int, ...]]:
    """Placing triangulation of a full-dimensional cone in ``R^k``.

    Returns simplices as sorted index tuples into ``gens``.  The starting
    simplex is the first linearly independent subset in input order; the
    remaining generators are placed in input order.
    """
    start: list[int] = []
    for i, g in enumerate(gens):
        if rank([gens[j] for j in start] + [g]) > len(start):
            start.append(i)
        if len(start) == k:
            break
    simplices = [tuple(sorted(start))]
    placed = list(start)
    for i, r in enumerate(gens):
        if i in start:
            continue
        new = []
        for s in simplices:
            for drop in s:
                facet = [j for j in s if j != drop]
                normal = _facet_normal([gens[j] for j in facet], k)
                if dot(normal, gens[drop]) < 0:
                    normal = tuple(-x for x in normal)
                # boundary facet of the current cone and visible from r
                if dot(normal, r) < 0 and all(dot(normal, gens[j]) >= 0 for j in placed):
                    new.append(tuple(sorted(facet + [i])))
        simplices += new
        placed.append(i)
    return simplices


def _facet_normal(vectors, k):
    from .lattice import integer_kernel

    ker = integer_kernel(vectors, ncols=k) if vectors else None
    if ker is None:
        return (1,)
    return ker[0]


def triangulate(c: Cone) -> list[Cone]:
    """Simplicial cones with disjoint interiors covering ``c``."""
    if not c.is_pointed():
        raise NotPointedError(f"{c!r} contains a line")
    if not c.generators:
        return []
    chart = _SpanChart(c)
    coords = [chart.coords(g) for g in c.generators]
    return [Cone([c.generators[i] for i in s], c.ambient_dim) for s in _placing(coords, chart.k)]


def parallelepiped_points(vs: Sequence[Sequence[int]]) -> list[tuple]:
    """Lattice points of ``{sum l_i v_i : 0 <= l_i < 1}`` for a basis ``vs`` of R^k.

    The coefficient vectors form the finite group generated by the
    fractional parts of the columns of ``V^-1``; it is enumerated by
    closure with integer numerators over ``|det V|``.
    """
    k = len(vs)
    v = transpose(vs)  # columns are the generators
    d = abs(determinant(v))
    if d == 1:
        return [tuple([0] * k)]
    inv = inverse(v)
    gens = []
    for j in range(k):
        col = tuple(int(inv[i][j] * d) % d for i in range(k))
        if any(col) and col not in gens:
            gens.append(col)
    seen = {tuple([0] * k)}
    frontier = [tuple([0] * k)]
    while frontier:
        nxt = []
        for lam in frontier:
            for g in gens:
                new = tuple((a + b) % d for a, b in zip(lam, g))
                if new not in seen:
                    seen.add(new)
                    nxt.append(new)
        frontier = nxt
    out = []
    for lam in seen:
        out.append(tuple(sum(v[i][j] * lam[j] for j in range(k)) // d for i in range(k)))
    return out


def _candidates(coords, simplex):
    vs = [coords[i] for i in simplex]
    return [p for p in parallelepiped_points(vs) if any(p)] + vs


def hilbert_basis(c: Cone, workers: int | None = None) -> HilbertBasis:
    """Minimal generating set of the monoid ``c ∩ Z^n``, sorted."""
    if not c.is_pointed():
        raise NotPointedError(f"{c!r} contains a line; its monoid has no finite Hilbert basis")
    if "hilbert" in c._cache:
        return c._cache["hilbert"]
    if not c.generators:
        hb = HilbertBasis(c, [])
        c._cache["hilbert"] = hb
        return hb
    chart = _SpanChart(c)
    coords = [chart.coords(g) for g in c.generators]
    simplices = _placing(coords, chart.k)
    if workers and len(simplices) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda s: _candidates(coords, s), simplices))
    else:
        parts = [_candidates(coords, s) for s in simplices]
    cands = sorted({p for part in parts for p in part})
    lin, normals = double_description(coords, chart.k)
    vals = [tuple(dot(b, x) for b in normals) for x in cands]
    order = sorted(range(len(cands)), key=lambda i: (sum(vals[i]), cands[i]))
    kept = kernels.reduce_sorted([vals[i] for i in order])
    elems = sorted(chart.lift(cands[order[i]]) for i in kept)
    hb = HilbertBasis(c, elems)
    c._cache["hilbert"] = hb
    return hb


def monoid_membership(c: Cone, v: Sequence[int]) -> dict | None:
    """Nonnegative integer coefficients of ``v`` over the Hilbert basis.

    Returns a mapping ``element -> multiplicity`` or None when ``v`` is not
    in ``c ∩ Z^n``.  Any lattice point of the cone minus a Hilbert element
    that stays in the cone is again in the monoid, so greedy subtraction
    always succeeds.
    """
    v = tuple(int(x) for x in v)
    if len(v) != c.ambient_dim:
        raise ValueError("dimension mismatch")
    if not c.contains(v):
        return None
    basis = hilbert_basis(c).elements
    out: dict = {}
    while any(v):
        for h in basis:
            rest = tuple(a - b for a, b in zip(v, h))
            if c.contains(rest):
                out[h] = out.get(h, 0) + 1
                v = rest
                break
        else:  # pragma: no cover - would mean the basis is wrong
            raise AssertionError(f"{v} is in the cone but not generated")
    return out
