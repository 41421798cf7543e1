"""Exact integer linear algebra on small dense matrices.

Vectors are tuples of Python ints and matrices are lists of row lists, so
every routine works with arbitrary-precision entries.  Nothing here mutates
its arguments.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = tuple
Matrix = list

__all__ = [
    "hermite_normal_form",
    "smith_invariants",
    "integer_kernel",
    "determinant",
    "is_unimodular",
    "primitive",
    "rank",
    "inverse",
    "solve",
    "lattice_index",
    "saturated_span_basis",
    "identity",
    "transpose",
    "matmul",
    "matvec",
    "dot",
]


def _as_matrix(m: Sequence[Sequence[int]]) -> Matrix:
    rows = [list(map(int, r)) for r in m]
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return rows


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ m == H``.  Pivots of
    ``H`` are positive and the entries above each pivot lie in
    ``[0, pivot)``.

    >>> hermite_normal_form([[2, 4], [1, 1]])[0]
    [[1, 1], [0, 2]]
    """
    a = _as_matrix(m)
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    u = identity(nrows)
    p = 0
    for col in range(ncols):
        if p == nrows:
            break
        for i in range(p + 1, nrows):
            b = a[i][col]
            if b == 0:
                continue
            top = a[p][col]
            g, x, y = _xgcd(top, b)
            s, t = -b // g, top // g
            a[p], a[i] = (
                [x * r + y * q for r, q in zip(a[p], a[i])],
                [s * r + t * q for r, q in zip(a[p], a[i])],
            )
            u[p], u[i] = (
                [x * r + y * q for r, q in zip(u[p], u[i])],
                [s * r + t * q for r, q in zip(u[p], u[i])],
            )
        piv = a[p][col]
        if piv == 0:
            continue
        if piv < 0:
            a[p] = [-e for e in a[p]]
            u[p] = [-e for e in u[p]]
            piv = -piv
        for i in range(p):
            q = a[i][col] // piv
            if q:
                a[i] = [r - q * s for r, s in zip(a[i], a[p])]
                u[i] = [r - q * s for r, s in zip(u[i], u[p])]
        p += 1
    return a, u


def _is_diagonal(a: Matrix) -> bool:
    return all(a[i][j] == 0 for i in range(len(a)) for j in range(len(a[0])) if i != j)


def smith_invariants(m: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors d1 | d2 | ... of ``m``; their count is the rank."""
    a = _as_matrix(m)
    if not a or not a[0]:
        return []
    while not _is_diagonal(a):
        a, _ = hermite_normal_form(a)
        a, _ = hermite_normal_form(transpose(a))
        a = transpose(a)
    diag = [abs(a[i][i]) for i in range(min(len(a), len(a[0]))) if a[i][i] != 0]
    # restore the divisibility chain: (a, b) -> (gcd, lcm)
    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                g = gcd(diag[i], diag[j])
                if diag[i] != g:
                    diag[i], diag[j] = g, diag[i] * diag[j] // g
                    changed = True
    return sorted(diag)


def rank(m: Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free elimination."""
    a = [list(r) for r in m]
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nrows):
            if a[i][col]:
                f, g = a[r][col], a[i][col]
                a[i] = [f * x - g * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == nrows:
            break
    return r


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    a = _as_matrix(m)
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(m: Sequence[Sequence[int]]) -> bool:
    return abs(determinant(m)) == 1


def primitive(v: Sequence[int]) -> Vector:
    """Divide ``v`` by the gcd of its entries."""
    g = 0
    for e in v:
        g = gcd(g, int(e))
    if g == 0:
        raise ValueError("the zero vector has no primitive representative")
    return tuple(int(e) // g for e in v)


def integer_kernel(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[Vector]:
    """Lattice basis of ``{v in Z^cols : m v = 0}``, returned in Hermite normal form.

    ``ncols`` is only needed when ``m`` has no rows.
    """
    a = _as_matrix(m)
    cols = len(a[0]) if a else ncols
    if cols is None:
        raise ValueError("cannot infer the column count of an empty matrix")
    if not a:
        return [tuple(r) for r in identity(cols)]
    h, u = hermite_normal_form(transpose(a))
    basis = [u[i] for i in range(cols) if not any(h[i])]
    if not basis:
        return []
    hb, _ = hermite_normal_form(basis)
    return [tuple(r) for r in hb if any(r)]


def inverse(m: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Inverse over Q by Gauss-Jordan elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


def solve(m: Sequence[Sequence[int]], b: Sequence) -> tuple[Fraction, ...] | None:
    """Solve the square system ``m x = b`` over Q; None when ``m`` is singular."""
    try:
        inv = inverse(m)
    except ZeroDivisionError:
        return None
    return tuple(sum(Fraction(x) * y for x, y in zip(row, b)) for row in inv)


def lattice_index(vectors: Sequence[Sequence[int]]) -> int:
    """Index of the lattice spanned by ``vectors`` inside its saturation."""
    inv = smith_invariants(vectors)
    out = 1
    for d in inv:
        out *= d
    return out


def saturated_span_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[Vector]:
    """Lattice basis of ``span(vectors) ∩ Z^dim`` (HNF rows)."""
    vecs = [tuple(v) for v in vectors if any(v)]
    if not vecs:
        return []
    perp = integer_kernel(vecs)
    if not perp:
        return [tuple(r) for r in identity(dim)]
    return integer_kernel(perp)
