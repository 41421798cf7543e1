"""Rational polyhedral cones, their duals, fans and lattice isomorphisms.

A :class:`Cone` is stored by primitive, deduplicated integer generators in
input order.  Duals are computed by double description (incremental
Fourier-Motzkin with an algebraic adjacency test), which gives the facet
normals of the cone; applying it twice gives the extreme rays.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import (
    determinant,
    dot,
    hermite_normal_form,
    integer_kernel,
    lattice_index,
    matmul,
    primitive,
    rank,
    saturated_span_basis,
    smith_invariants,
    solve,
    transpose,
)

__all__ = [
    "Cone",
    "Fan",
    "FanReport",
    "NotPointedError",
    "dual_cone",
    "is_pointed",
    "is_regular",
    "fan_validate",
    "cone_isomorphism",
    "chart_ring_generators",
    "double_description",
]


class NotPointedError(ValueError):
    """Raised when an operation needs a cone that contains no line."""


def _neg(v):
    return tuple(-x for x in v)


def double_description(ineqs: Iterable[Sequence[int]], dim: int) -> tuple[list[tuple], list[tuple]]:
    """Generators of ``{y : <a, y> >= 0 for every a in ineqs}``.

    Returns ``(lineality, rays)``: a basis of the lineality space and the
    primitive extreme rays of the pointed part.  Rays are sorted.
    """
    lin = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    rays: list[tuple] = []
    done: list[tuple] = []
    for a in ineqs:
        a = tuple(int(x) for x in a)
        if not any(a):
            continue
        vals = [dot(a, l) for l in lin]
        idx = next((i for i, v in enumerate(vals) if v != 0), None)
        if idx is not None:
            l, v = lin.pop(idx), vals.pop(idx)
            if v < 0:
                l, v = _neg(l), -v
            lin = [primitive(tuple(v * x - w * y for x, y in zip(m, l))) for m, w in zip(lin, vals)]
            rays = [_proj(r, l, v, a) for r in rays]
            rays.append(primitive(l))
        else:
            sv = [dot(a, r) for r in rays]
            pos = [r for r, s in zip(rays, sv) if s > 0]
            zero = [r for r, s in zip(rays, sv) if s == 0]
            neg = [r for r, s in zip(rays, sv) if s < 0]
            new = pos + zero
            target = dim - len(lin) - 2
            for p in pos:
                tp = {b for b in done if dot(b, p) == 0}
                sp = dot(a, p)
                for q in neg:
                    common = [b for b in done if b in tp and dot(b, q) == 0]
                    if target > 0 and (len(common) < target or rank(common) != target):
                        continue
                    sq = dot(a, q)
                    new.append(primitive(tuple(sp * y - sq * x for x, y in zip(p, q))))
            rays = sorted(set(new))
        done.append(a)
    rays = sorted(set(rays))
    return lin, rays


def _proj(r, l, v, a):
    w = dot(a, r)
    out = tuple(v * x - w * y for x, y in zip(r, l))
    return primitive(out) if any(out) else out


@dataclass(eq=False)
class Cone:
    """``Con(generators)`` inside ``R^ambient_dim``."""

    generators: tuple
    ambient_dim: int
    _cache: dict = field(default_factory=dict, repr=False)

    def __init__(self, generators: Iterable[Sequence[int]] = (), ambient_dim: int | None = None):
        gens = []
        for g in generators:
            g = tuple(int(x) for x in g)
            if ambient_dim is None:
                ambient_dim = len(g)
            if len(g) != ambient_dim:
                raise ValueError(f"generator {g} has wrong length for dimension {ambient_dim}")
            if not any(g):
                continue
            p = primitive(g)
            if p not in gens:
                gens.append(p)
        if ambient_dim is None or ambient_dim < 1:
            raise ValueError("ambient dimension must be positive")
        self.generators = tuple(gens)
        self.ambient_dim = ambient_dim
        self._cache = {}

    def __repr__(self):
        return f"Cone({list(map(list, self.generators))})"

    def __eq__(self, other):
        if not isinstance(other, Cone) or other.ambient_dim != self.ambient_dim:
            return NotImplemented
        return all(other.contains(g) for g in self.generators) and all(
            self.contains(g) for g in other.generators
        )

    __hash__ = None

    # --- cached double-description data -------------------------------
    def _dual_data(self):
        if "dual" not in self._cache:
            self._cache["dual"] = double_description(self.generators, self.ambient_dim)
        return self._cache["dual"]

    def facets(self) -> list[tuple]:
        """Inner normals ``b`` with ``cone = {x : <b, x> >= 0}``."""
        lin, rays = self._dual_data()
        out = list(rays)
        for l in lin:
            out += [l, _neg(l)]
        return out

    def dual(self) -> "Cone":
        if "dual_cone" not in self._cache:
            self._cache["dual_cone"] = Cone(sorted(self.facets()), self.ambient_dim)
        return self._cache["dual_cone"]

    def contains(self, x: Sequence) -> bool:
        return all(dot(b, x) >= 0 for b in self.facets())

    def dim(self) -> int:
        return rank(self.generators) if self.generators else 0

    def is_full_dimensional(self) -> bool:
        return self.dim() == self.ambient_dim

    def is_pointed(self) -> bool:
        if not self.generators:
            return True
        return rank(self.facets()) == self.ambient_dim

    def lineality(self) -> list[tuple]:
        lin, _ = double_description(self.facets(), self.ambient_dim)
        return lin

    def rays(self) -> list[tuple]:
        """Sorted primitive extreme rays; the cone must be pointed."""
        if "rays" not in self._cache:
            if not self.is_pointed():
                raise NotPointedError(f"{self!r} contains a line")
            lin, rays = double_description(self.facets(), self.ambient_dim)
            self._cache["rays"] = rays
        return self._cache["rays"]

    def is_simplicial(self) -> bool:
        r = self.rays()
        return rank(r) == len(r) if r else True

    def is_regular(self) -> bool:
        if not self.is_simplicial():
            return False
        r = self.rays()
        return not r or lattice_index(r) == 1

    def face(self, normal: Sequence[int]) -> "Cone":
        """``cone ∩ normal^⊥`` for a normal taken from the dual cone."""
        return Cone([g for g in self.rays_or_generators() if dot(normal, g) == 0], self.ambient_dim)

    def rays_or_generators(self):
        return self.rays() if self.is_pointed() else self.generators

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "Cone":
        gens = data["generators"]
        return cls(gens, data.get("ambient_dim", len(gens[0]) if gens else None))


def dual_cone(c: Cone) -> Cone:
    return c.dual()


def is_pointed(c: Cone) -> bool:
    return c.is_pointed()


def is_regular(c: Cone) -> bool:
    if not c.is_pointed():
        raise NotPointedError(f"{c!r} contains a line")
    return c.is_regular()


def intersect(c1: Cone, c2: Cone) -> Cone:
    lin, rays = double_description(c1.facets() + c2.facets(), c1.ambient_dim)
    return Cone(rays + lin + [_neg(l) for l in lin], c1.ambient_dim)


# --- fans ---------------------------------------------------------------


@dataclass
class Fan:
    cones: list

    def to_json(self) -> dict:
        return {"cones": [c.to_json() for c in self.cones]}

    @classmethod
    def from_json(cls, data: dict) -> "Fan":
        return cls([Cone.from_json(c) for c in data["cones"]])


@dataclass
class FanReport:
    valid: bool
    offending: tuple | None = None
    witnesses: dict = field(default_factory=dict)

    def __bool__(self):
        return self.valid


def _separating_normal(s: Cone, t: Cone) -> tuple:
    # relative interior point of s^v ∩ (-t)^v
    sep = Cone(list(s.generators) + [_neg(g) for g in t.generators], s.ambient_dim)
    u = [0] * s.ambient_dim
    for b in sep.facets():
        u = [x + y for x, y in zip(u, b)]
    return tuple(u)


def fan_validate(fan: Fan | Sequence[Cone]) -> FanReport:
    """Check that every pairwise intersection is a face of both cones.

    Uses the separation criterion: ``s ∩ t`` is a common face iff for
    ``u`` in the relative interior of ``s^v ∩ (-t)^v`` one has
    ``s ∩ u^⊥ = t ∩ u^⊥ = s ∩ t``.
    """
    cones = list(fan.cones if isinstance(fan, Fan) else fan)
    if cones and len({c.ambient_dim for c in cones}) != 1:
        raise ValueError("fan cones must share an ambient dimension")
    witnesses = {}
    for (i, s), (j, t) in itertools.combinations(enumerate(cones), 2):
        u = _separating_normal(s, t)
        meet = intersect(s, t)
        fs = Cone([g for g in s.generators if dot(u, g) == 0], s.ambient_dim)
        ft = Cone([g for g in t.generators if dot(u, g) == 0], t.ambient_dim)
        if not (fs == meet and ft == meet):
            return FanReport(False, (i, j), witnesses)
        witnesses[(i, j)] = u
    return FanReport(True, None, witnesses)


# --- lattice isomorphisms ------------------------------------------------


def cone_isomorphism(c1: Cone, c2: Cone) -> list[list[int]] | None:
    """A unimodular ``L`` (rows) with ``L(c1) = c2``, or None.

    Searches ray bijections; for each one the linear map is solved exactly
    from a basis of rays of ``c1``.  Orientation-preserving witnesses are
    preferred.
    """
    if c1.ambient_dim != c2.ambient_dim:
        raise ValueError("cones live in different dimensions")
    for c in (c1, c2):
        if not c.is_pointed():
            raise NotPointedError(f"{c!r} contains a line")
        if not c.is_full_dimensional():
            raise ValueError(f"{c!r} is not full-dimensional")
    r1, r2 = c1.rays(), c2.rays()
    n = c1.ambient_dim
    if len(r1) != len(r2):
        return None
    basis_idx = _independent_subset(r1, n)
    b = transpose([r1[i] for i in basis_idx])
    fallback = None
    target = set(r2)
    for perm in itertools.permutations(range(len(r2)), n):
        img = transpose([r2[p] for p in perm])
        lmat = _solve_matrix(b, img)
        if lmat is None:
            continue
        if {tuple(sum(x * y for x, y in zip(row, r)) for row in lmat) for r in r1} != target:
            continue
        d = determinant(lmat)
        if d == 1:
            return lmat
        if d == -1 and fallback is None:
            fallback = lmat
    return fallback


def _independent_subset(vectors, n):
    chosen: list[int] = []
    for i, v in enumerate(vectors):
        if rank([vectors[j] for j in chosen] + [v]) > len(chosen):
            chosen.append(i)
        if len(chosen) == n:
            break
    return chosen


def _solve_matrix(b, img):
    """Integer L with L b = img, where b is square and invertible."""
    bt = transpose(b)
    rows = []
    for target_row in img:
        x = solve(bt, target_row)
        if x is None or any(v.denominator != 1 for v in x):
            return None
        rows.append([int(v) for v in x])
    return rows


# --- chart coordinate rings ---------------------------------------------


def chart_ring_generators(c: Cone) -> list[tuple]:
    """Exponents of monomial generators of ``C[c^v ∩ Z^n]``.

    When ``c`` is not full-dimensional the dual contains the lattice
    ``c^⊥``; the generators are then a Hilbert basis of the pointed
    quotient, lifted back, together with ``±`` a basis of ``c^⊥ ∩ Z^n``.
    """
    from .hilbert import hilbert_basis

    if not c.is_pointed():
        raise NotPointedError(f"{c!r} contains a line; its dual is not full-dimensional")
    n = c.ambient_dim
    span = saturated_span_basis(c.generators, n)
    if len(span) == n:
        return hilbert_basis(c.dual()).elements
    w = len(span)
    # U B = [I; 0] for the n x w saturated basis B
    bmat = transpose(span)
    h, u = hermite_normal_form(bmat)
    coords = [tuple(row[:w]) for row in transpose(matmul([list(r) for r in u[:w]], transpose(c.generators)))]
    quotient = Cone(coords, w)
    ut = transpose(u)
    lifted = []
    for e in hilbert_basis(quotient.dual()).elements:
        full = list(e) + [0] * (n - w)
        lifted.append(tuple(sum(x * y for x, y in zip(row, full)) for row in ut))
    perp = integer_kernel(c.generators) if c.generators else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    out = set(lifted)
    for p in perp:
        out.add(tuple(p))
        out.add(_neg(p))
    return sorted(out)
