"""Exact Laurent polynomials with rational coefficients.

Terms are kept in a dict mapping exponent tuples to nonzero
:class:`~fractions.Fraction` coefficients.  Printing is canonical: terms in
ascending lexicographic exponent order, ``p/q`` coefficients, explicit ``*``
and ``^``.  The printed form parses back to the same polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .cones import Cone
from .lattice import integer_kernel

__all__ = [
    "LaurentPolynomial",
    "NewtonPolytope",
    "support",
    "newton_polytope",
    "hull_vertices",
    "initial_form",
    "multiply",
    "substitute_monomial",
    "toric_ideal_basis",
    "TORIC_BASIS_NOTE",
]

TORIC_BASIS_NOTE = "lattice-basis generators (not saturated)"


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact rational coefficient required, got {type(c).__name__}")


class LaurentPolynomial:
    __slots__ = ("variables", "terms")

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None, variables: Sequence[str] = ()):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not match variables {self.variables}")
            c = _coerce(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        self.terms = clean

    # --- constructors -------------------------------------------------
    @classmethod
    def constant(cls, c, variables: Sequence[str] = ()):
        return cls({(0,) * len(variables): c}, variables)

    @classmethod
    def variable(cls, name: str, variables: Sequence[str] | None = None):
        variables = tuple(variables) if variables is not None else (name,)
        exp = tuple(int(v == name) for v in variables)
        return cls({exp: 1}, variables)

    @classmethod
    def monomial(cls, exp: Sequence[int], variables: Sequence[str], coeff=1):
        return cls({tuple(exp): coeff}, variables)

    @classmethod
    def parse(cls, text: str, variables: Sequence[str] | None = None):
        from .parser import parse

        return parse(text, variables)

    # --- basic properties --------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def support(self) -> list[tuple]:
        return sorted(self.terms)

    def is_polynomial(self) -> bool:
        return all(e >= 0 for exp in self.terms for e in exp)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # --- variable handling ------------------------------------------
    def with_variables(self, variables: Sequence[str]) -> "LaurentPolynomial":
        """Re-express over ``variables`` (a superset in any order)."""
        variables = tuple(variables)
        missing = set(self.variables) - set(variables)
        if missing:
            used = {v for i, v in enumerate(self.variables) if any(e[i] for e in self.terms)}
            if used & missing:
                raise ValueError(f"variables {sorted(used & missing)} are used but not kept")
        idx = [self.variables.index(v) if v in self.variables else None for v in variables]
        terms = {tuple(exp[i] if i is not None else 0 for i in idx): c for exp, c in self.terms.items()}
        return LaurentPolynomial(terms, variables)

    def _align(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = LaurentPolynomial.constant(_coerce(other), self.variables)
        if other.variables == self.variables:
            return self, other
        union = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return self.with_variables(union), other.with_variables(union)

    # --- arithmetic ---------------------------------------------------
    def __add__(self, other):
        try:
            a, b = self._align(other)
        except TypeError:
            return NotImplemented
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, 0) + c
        return LaurentPolynomial(terms, a.variables)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self.terms.items()}, self.variables)

    def __sub__(self, other):
        try:
            a, b = self._align(other)
        except TypeError:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            a, b = self._align(other)
        except TypeError:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return LaurentPolynomial(terms, a.variables)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("negative powers are only defined for monomials")
            (e, c), = self.terms.items()
            return LaurentPolynomial({tuple(x * k for x in e): c**k}, self.variables)
        out = LaurentPolynomial.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            a, b = self._align(other)
        except TypeError:
            return NotImplemented
        return a.terms == b.terms

    def __hash__(self):
        named = frozenset(
            (tuple((v, e) for v, e in zip(self.variables, exp) if e), c) for exp, c in self.terms.items()
        )
        return hash(named)

    def scale(self, c) -> "LaurentPolynomial":
        c = _coerce(c)
        return LaurentPolynomial({e: c * v for e, v in self.terms.items()}, self.variables)

    # --- calculus and substitution -----------------------------------
    def diff(self, var: str) -> "LaurentPolynomial":
        i = self.variables.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                terms[tuple(ne)] = c * e[i]
        return LaurentPolynomial(terms, self.variables)

    def substitute(self, mapping: Mapping[str, "LaurentPolynomial"], variables: Sequence[str] | None = None):
        """Replace variables by polynomials; unmapped variables are kept."""
        keep = [v for v in self.variables if v not in mapping]
        out_vars = list(variables) if variables is not None else keep[:]
        for p in mapping.values():
            for v in p.variables:
                if v not in out_vars:
                    out_vars.append(v)
        for v in keep:
            if v not in out_vars:
                out_vars.append(v)
        images = []
        for v in self.variables:
            if v in mapping:
                images.append(mapping[v].with_variables(out_vars))
            else:
                images.append(LaurentPolynomial.variable(v, out_vars))
        result = LaurentPolynomial({}, out_vars)
        cache: dict = {}
        for e, c in self.terms.items():
            term = LaurentPolynomial.constant(c, out_vars)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            result = result + term
        return result

    def translate(self, var: str, offset, new_name: str | None = None) -> "LaurentPolynomial":
        """Substitute ``var -> new_name + offset``."""
        new_name = new_name or var
        order = [new_name if v == var else v for v in self.variables]
        if any(e[self.variables.index(var)] < 0 for e in self.terms):
            raise ValueError(f"cannot translate {var}: it appears with a negative exponent")
        shifted = LaurentPolynomial.variable(new_name, order) + _coerce(offset)
        return self.substitute({var: shifted}, order)

    def evaluate(self, point):
        """Evaluate at a mapping ``name -> value`` or a sequence in variable order."""
        if isinstance(point, Mapping):
            vals = [point[v] for v in self.variables]
        else:
            vals = list(point)
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t = t * x**k
            total = total + t
        return total

    def arrays(self):
        """``(coeffs, exps)`` as float / int lists for numeric kernels."""
        exps = sorted(self.terms)
        return [float(self.terms[e]) for e in exps], [list(e) for e in exps]

    # --- printing -----------------------------------------------------
    def _monomial_str(self, exp) -> str:
        parts = []
        for v, k in zip(self.variables, exp):
            if k == 1:
                parts.append(v)
            elif k:
                parts.append(f"{v}^{k}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for exp in sorted(self.terms):
            c = self.terms[exp]
            mono = self._monomial_str(exp)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not out:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"LaurentPolynomial({str(self)!r}, variables={list(self.variables)})"


def support(f: LaurentPolynomial) -> list[tuple]:
    return f.support()


@dataclass(frozen=True)
class NewtonPolytope:
    vertices: list
    support_cone: Cone


def hull_vertices(points: Iterable[Sequence[int]]) -> list[tuple]:
    """Vertices of the convex hull of integer points.

    A point is a vertex iff ``(p, 1)`` spans an extreme ray of the cone over
    the homogenized point set.
    """
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if len(pts) <= 1:
        return pts
    cone = Cone([p + (1,) for p in pts], len(pts[0]) + 1)
    return sorted(r[:-1] for r in cone.rays())


def newton_polytope(f: LaurentPolynomial) -> NewtonPolytope:
    if f.is_zero():
        raise ValueError("the zero polynomial has no Newton polytope")
    supp = f.support()
    nonzero = [e for e in supp if any(e)]
    return NewtonPolytope(hull_vertices(supp), Cone(nonzero, f.nvars))


def initial_form(f: LaurentPolynomial, w: Sequence) -> LaurentPolynomial:
    """Sum of the terms maximizing ``<w, a>`` over the support."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no initial form")
    w = [Fraction(x) for x in w]
    if len(w) != f.nvars:
        raise ValueError("weight length does not match the number of variables")
    score = {e: sum(a * b for a, b in zip(w, e)) for e in f.terms}
    top = max(score.values())
    return LaurentPolynomial({e: c for e, c in f.terms.items() if score[e] == top}, f.variables)


def multiply(f: LaurentPolynomial, g: LaurentPolynomial) -> LaurentPolynomial:
    return f * g


def substitute_monomial(f: LaurentPolynomial, matrix: Sequence[Sequence[int]], new_vars: Sequence[str]) -> LaurentPolynomial:
    """Apply ``x_j = prod_i u_i ** matrix[i][j]``; each term ``x^a`` becomes ``u^(A a)``."""
    new_vars = tuple(new_vars)
    if len(matrix) != len(new_vars):
        raise ValueError("one matrix row per new variable is required")
    if any(len(row) != f.nvars for row in matrix):
        raise ValueError("one matrix column per old variable is required")
    terms: dict = {}
    for e, c in f.terms.items():
        ne = tuple(sum(a * b for a, b in zip(row, e)) for row in matrix)
        terms[ne] = terms.get(ne, 0) + c
    return LaurentPolynomial(terms, new_vars)


def toric_ideal_basis(exponent_matrix: Sequence[Sequence[int]], variables: Sequence[str] | None = None) -> list[LaurentPolynomial]:
    """Binomials ``t^(l+) - t^(l-)`` for a lattice basis ``l`` of the kernel.

    These generate the lattice ideal of the kernel lattice up to saturation;
    they are not a Markov basis of the toric ideal.
    """
    n = len(exponent_matrix[0])
    variables = tuple(variables) if variables else tuple(f"t{i + 1}" for i in range(n))
    out = []
    for l in integer_kernel(exponent_matrix):
        plus = tuple(max(x, 0) for x in l)
        minus = tuple(max(-x, 0) for x in l)
        out.append(LaurentPolynomial({plus: 1, minus: -1}, variables))
    return out
