"""Chart-by-chart resolution of a polynomial by explicit scripts.

A chart carries the residual polynomial together with everything that was
factored out of it, so that at every point

    H(g(u)) = u^k * unit(u) * residual(u)
    |g'(u)| = |u^h * jacobian_unit(u)|

holds exactly.  Steps are monomial substitutions with unimodular matrices,
single-variable translations, and verified rewrites that introduce
auxiliary names for subexpressions.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cones import Cone
from .hilbert import hilbert_basis
from .lattice import determinant, lattice_index, saturated_span_basis, transpose
from .parser import parse
from .polynomial import LaurentPolynomial, substitute_monomial

__all__ = [
    "ResolutionError",
    "ChartDecompositionRequired",
    "ResolutionStep",
    "ChartState",
    "StepRecord",
    "ResolutionTrace",
    "NormalCrossingReport",
    "extract_monomial_factor",
    "initial_state",
    "apply_step",
    "is_normal_crossing",
    "resolve",
    "resolve_charts",
    "suggest_map",
    "regularity_check",
    "parse_script",
    "check_nonnegative",
]

log = logging.getLogger(__name__)


class ResolutionError(ValueError):
    pass


class ChartDecompositionRequired(ResolutionError):
    pass


@dataclass(frozen=True)
class ResolutionStep:
    """One script step.

    ``kind`` is ``"monomial"`` (``matrix``, ``new_vars``), ``"translate"``
    (``var``, ``offset``, optional ``new_var``) or ``"rewrite"`` (``poly``
    and ``define``, a mapping from new auxiliary names to expressions).
    """

    kind: str
    matrix: tuple = ()
    new_vars: tuple = ()
    var: str = ""
    offset: Fraction = Fraction(0)
    new_var: str = ""
    poly: str = ""
    define: tuple = ()

    @classmethod
    def monomial(cls, matrix, new_vars):
        return cls("monomial", matrix=tuple(tuple(int(x) for x in r) for r in matrix), new_vars=tuple(new_vars))

    @classmethod
    def translate(cls, var, offset, new_var: str | None = None):
        return cls("translate", var=var, offset=Fraction(offset), new_var=new_var or var)

    @classmethod
    def rewrite(cls, poly: str, define: dict):
        return cls("rewrite", poly=poly, define=tuple(sorted(define.items())))

    @classmethod
    def from_json(cls, data: dict) -> "ResolutionStep":
        kind = data.get("type")
        if kind == "monomial":
            return cls.monomial(data["matrix"], data["new_vars"])
        if kind == "translate":
            return cls.translate(data["var"], Fraction(str(data["offset"])), data.get("new_var"))
        if kind == "rewrite":
            return cls.rewrite(data["poly"], dict(data["define"]))
        raise ResolutionError(f"unknown step type {kind!r}")

    def to_json(self) -> dict:
        if self.kind == "monomial":
            return {"type": "monomial", "matrix": [list(r) for r in self.matrix], "new_vars": list(self.new_vars)}
        if self.kind == "translate":
            out = {"type": "translate", "var": self.var, "offset": str(self.offset)}
            if self.new_var != self.var:
                out["new_var"] = self.new_var
            return out
        return {"type": "rewrite", "poly": self.poly, "define": dict(self.define)}


@dataclass(frozen=True)
class ChartState:
    variables: tuple
    residual: LaurentPolynomial
    prefactor: tuple
    jacobian: tuple | None
    unit: LaurentPolynomial
    jacobian_unit: LaurentPolynomial
    det_sign: int = 1
    steps: tuple = ()
    aux: tuple = ()
    lifted: bool = False

    @property
    def terminal_unit(self) -> LaurentPolynomial:
        return (self.unit * self.residual).with_variables(self.variables)

    def prefactor_monomial(self) -> LaurentPolynomial:
        return LaurentPolynomial.monomial(self.prefactor, self.variables)

    def jacobian_monomial(self) -> LaurentPolynomial | None:
        if self.jacobian is None:
            return None
        return LaurentPolynomial.monomial(self.jacobian, self.variables)

    def total(self) -> LaurentPolynomial:
        """The full pulled-back polynomial ``u^k * unit * residual``."""
        return self.prefactor_monomial() * self.unit * self.residual

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "prefactor": list(self.prefactor),
            "prefactor_monomial": str(self.prefactor_monomial()),
            "jacobian": None if self.jacobian is None else list(self.jacobian),
            "unit": str(self.unit),
            "jacobian_unit": str(self.jacobian_unit),
            "residual": str(self.residual),
            "terminal_unit": str(self.terminal_unit),
            "det_sign": self.det_sign,
            "aux": list(self.aux),
            "lifted": self.lifted,
            "steps": [s.to_json() for s in self.steps],
        }


@dataclass(frozen=True)
class StepRecord:
    step: ResolutionStep
    substituted: LaurentPolynomial
    extracted: tuple
    residual: LaurentPolynomial


@dataclass(frozen=True)
class NormalCrossingReport:
    ok: bool
    constant_terms: dict
    diagnostics: list

    def __bool__(self):
        return self.ok


@dataclass
class ResolutionTrace:
    original: LaurentPolynomial
    charts: list
    records: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return bool(self.charts) and all(r.ok for r in self.reports)

    def to_json(self) -> dict:
        return {
            "input": str(self.original),
            "variables": list(self.original.variables),
            "complete": self.complete,
            "charts": [
                dict(
                    c.to_json(),
                    normal_crossing=r.ok,
                    diagnostics=r.diagnostics,
                    log=[
                        {"step": rec.step.to_json(), "substituted": str(rec.substituted),
                         "extracted": list(rec.extracted), "residual": str(rec.residual)}
                        for rec in recs
                    ],
                )
                for c, r, recs in zip(self.charts, self.reports, self.records)
            ],
            "warnings": list(self.warnings),
        }


def extract_monomial_factor(f: LaurentPolynomial) -> tuple[tuple, LaurentPolynomial]:
    """Split ``f = u^m * g`` with ``m`` the coordinatewise minimum of the support."""
    if f.is_zero():
        raise ResolutionError("cannot extract a monomial factor from the zero polynomial")
    m = tuple(min(col) for col in zip(*f.terms))
    g = LaurentPolynomial({tuple(a - b for a, b in zip(e, m)): c for e, c in f.terms.items()}, f.variables)
    return m, g


def initial_state(h: LaurentPolynomial) -> ChartState:
    if h.is_zero():
        raise ResolutionError("H must be nonzero")
    if not h.is_polynomial():
        raise ResolutionError("H must be a polynomial (no negative exponents)")
    m, g = extract_monomial_factor(h)
    one = LaurentPolynomial.constant(1, h.variables)
    return ChartState(h.variables, g, m, (0,) * h.nvars, one, one)


def _check_names(new_vars, kept):
    if len(set(new_vars)) != len(new_vars):
        raise ResolutionError(f"duplicate new variable names {list(new_vars)}")
    clash = set(new_vars) & set(kept)
    if clash:
        raise ResolutionError(f"new variable names clash with kept names {sorted(clash)}")


def _monomial(state: ChartState, step: ResolutionStep) -> tuple[ChartState, LaurentPolynomial]:
    a = [list(r) for r in step.matrix]
    new_vars = tuple(step.new_vars)
    nold = len(state.variables)
    if len(a) != len(new_vars) or any(len(r) != nold for r in a):
        raise ResolutionError(
            f"matrix must be {len(new_vars)}x{nold} (one row per new variable, one column per old variable)"
        )
    aux = state.aux
    if aux:
        # only the genuine chart variables must map unimodularly
        keep_cols = [j for j, v in enumerate(state.variables) if v not in aux]
        rows = [i for i in range(len(a)) if any(a[i][j] for j in keep_cols)]
        sub_m = [[a[i][j] for j in keep_cols] for i in rows]
        if len(sub_m) != len(keep_cols) or determinant(sub_m) not in (1, -1):
            raise ResolutionError("monomial map restricted to chart variables must be square and unimodular")
        det = None
    else:
        if len(a) != nold:
            raise ResolutionError("monomial map must be square")
        det = determinant(a)
        if det not in (1, -1):
            raise ResolutionError(f"monomial map must be unimodular, det = {det}")
    _check_names(new_vars, ())

    def sub(p: LaurentPolynomial) -> LaurentPolynomial:
        return substitute_monomial(p.with_variables(state.variables), a, new_vars)

    substituted = sub(state.residual)
    m, residual = extract_monomial_factor(substituted)
    k = tuple(sum(r[j] * state.prefactor[j] for j in range(nold)) + mi for r, mi in zip(a, m))
    if det is not None and state.jacobian is not None:
        h = tuple(sum(r[j] * state.jacobian[j] for j in range(nold)) + sum(r) - 1 for r in a)
        sign = state.det_sign * det
    else:
        h, sign = None, state.det_sign
    new = ChartState(
        new_vars, residual, k, h, sub(state.unit), sub(state.jacobian_unit), sign,
        state.steps + (step,), (), state.lifted or det is None,
    )
    return new, substituted


def _translate(state: ChartState, step: ResolutionStep) -> tuple[ChartState, LaurentPolynomial]:
    var, new_name, off = step.var, step.new_var or step.var, Fraction(step.offset)
    if var not in state.variables:
        raise ResolutionError(f"unknown variable {var!r}")
    if new_name != var and new_name in state.variables:
        raise ResolutionError(f"variable {new_name!r} already exists")
    i = state.variables.index(var)
    order = tuple(new_name if v == var else v for v in state.variables)

    def tr(p: LaurentPolynomial) -> LaurentPolynomial:
        return p.with_variables(state.variables).translate(var, off, new_name).with_variables(order)

    unit, junit = tr(state.unit), tr(state.jacobian_unit)
    k, h = list(state.prefactor), None if state.jacobian is None else list(state.jacobian)
    if off:
        shifted = LaurentPolynomial.variable(new_name, order) + off
        if k[i] < 0 or (h is not None and h[i] < 0):
            raise ChartDecompositionRequired(
                f"{var} carries a negative exponent; translating it away from 0 needs a chart decomposition"
            )
        unit = unit * shifted ** k[i]
        k[i] = 0
        if h is not None:
            junit = junit * shifted ** h[i]
            h[i] = 0
    substituted = tr(state.residual)
    m, residual = extract_monomial_factor(substituted)
    k = tuple(a + b for a, b in zip(k, m))
    new = ChartState(
        order, residual, k, None if h is None else tuple(h), unit, junit, state.det_sign,
        state.steps + (step,), tuple(new_name if v == var else v for v in state.aux), state.lifted,
    )
    return new, substituted


def _rewrite(state: ChartState, step: ResolutionStep) -> tuple[ChartState, LaurentPolynomial]:
    define = dict(step.define)
    clash = set(define) & set(state.variables)
    if clash:
        raise ResolutionError(f"auxiliary names clash with chart variables {sorted(clash)}")
    exprs = {name: parse(text, state.variables) for name, text in define.items()}
    for name, e in exprs.items():
        extra = set(e.variables) - set(state.variables)
        if extra:
            raise ResolutionError(f"definition of {name} uses unknown names {sorted(extra)}")
    order = state.variables + tuple(define)
    new_poly = parse(step.poly, order)
    if set(new_poly.variables) != set(order):
        extra = set(new_poly.variables) - set(order)
        raise ResolutionError(f"rewrite uses unknown names {sorted(extra)}")
    back = new_poly.substitute(exprs, state.variables).with_variables(state.variables)
    if back != state.residual:
        raise ResolutionError(f"rewrite {step.poly!r} does not equal the residual {state.residual}")
    m, residual = extract_monomial_factor(new_poly)
    if any(m[len(state.variables):]):
        raise ResolutionError("auxiliary names may not be factored out of the residual")
    k = state.prefactor + (0,) * len(define)
    k = tuple(a + b for a, b in zip(k, m))
    lift = lambda p: p.with_variables(order)
    new = ChartState(
        order, residual, k, None, lift(state.unit), lift(state.jacobian_unit), state.det_sign,
        state.steps + (step,), state.aux + tuple(define), True,
    )
    return new, new_poly


def apply_step(state: ChartState, step: ResolutionStep) -> ChartState:
    return _apply(state, step)[0]


def _apply(state, step):
    if step.kind == "monomial":
        return _monomial(state, step)
    if step.kind == "translate":
        return _translate(state, step)
    if step.kind == "rewrite":
        return _rewrite(state, step)
    raise ResolutionError(f"unknown step kind {step.kind!r}")


def _grid(d: int, budget: int = 200_000, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    per = max(3, int(round(budget ** (1 / d))) if d else 1)
    if per % 2 == 0:
        per += 1  # keep 0 on the grid
    axes = [np.linspace(lo, hi, per)] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1) if d else np.zeros((1, 0))


def _values(p: LaurentPolynomial, pts: np.ndarray) -> np.ndarray:
    coeffs, exps = p.arrays()
    out = np.zeros(pts.shape[:-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        for c, e in zip(coeffs, exps):
            term = np.full(pts.shape[:-1], c)
            for k, x in enumerate(e):
                if x:
                    term = term * pts[..., k] ** x
            out = out + term
    return out


def _zero_candidates(p: LaurentPolynomial, limit: int = 10) -> list:
    d = p.nvars
    if d == 0 or not p.is_polynomial():
        return []
    pts = _grid(d, budget=60_000)
    vals = _values(p, pts)
    scale = max(1.0, float(np.nanmax(np.abs(vals))))
    mask = np.abs(vals) <= 1e-12 * scale
    for ax in range(d):
        s = np.sign(vals)
        lhs = [slice(None)] * d
        rhs = [slice(None)] * d
        lhs[ax], rhs[ax] = slice(None, -1), slice(1, None)
        flip = (s[tuple(lhs)] * s[tuple(rhs)]) < 0
        mask[tuple(lhs)] |= flip
    idx = np.argwhere(mask)
    out = []
    for i in idx[:limit]:
        point = [round(float(x), 6) for x in pts[tuple(i)]]
        out.append(dict(zip(p.variables, point)))
    return out


def is_normal_crossing(state: ChartState) -> NormalCrossingReport:
    """Normal crossing at the chart origin: every non-monomial factor is a unit there.

    Diagnostics list sampled points of ``[-1, 1]^d`` where the terminal unit
    vanishes or changes sign; they point at zero loci away from the origin.
    """
    consts = {
        "residual": state.residual.constant_term(),
        "unit": state.unit.constant_term(),
        "jacobian_unit": state.jacobian_unit.constant_term(),
    }
    ok = all(c != 0 for c in consts.values())
    diags = _zero_candidates(state.terminal_unit)
    return NormalCrossingReport(ok, {k: str(v) for k, v in consts.items()}, diags)


def check_nonnegative(h: LaurentPolynomial) -> list[str]:
    """Warnings for sampled points of ``[0, 1]^d`` where ``h`` is negative."""
    if h.nvars == 0:
        return [] if h.constant_term() >= 0 else ["H is a negative constant"]
    pts = _grid(h.nvars, budget=50_000, lo=0.0)
    vals = _values(h, pts)
    scale = max(1.0, float(np.nanmax(np.abs(vals))))
    bad = np.argwhere(vals < -1e-12 * scale)
    if not len(bad):
        return []
    where = dict(zip(h.variables, (round(float(x), 6) for x in pts[tuple(bad[0])])))
    return [f"H is negative at {len(bad)} sampled points of [0,1]^d, e.g. {where}"]


def parse_script(data) -> list[list[ResolutionStep]]:
    """Script JSON: a list of steps (one chart) or ``{"charts": [[...], ...]}``."""
    if isinstance(data, dict):
        branches = data.get("charts")
        if not isinstance(branches, list):
            raise ResolutionError("script object needs a 'charts' list")
    elif isinstance(data, list):
        branches = [data]
    else:
        raise ResolutionError("script must be a JSON array or an object with 'charts'")
    try:
        return [[s if isinstance(s, ResolutionStep) else ResolutionStep.from_json(s) for s in b] for b in branches]
    except (KeyError, TypeError) as exc:
        raise ResolutionError(f"malformed step: {exc}") from exc


def _run_chart(h: LaurentPolynomial, steps: Sequence[ResolutionStep]):
    state = initial_state(h)
    records = []
    for step in steps:
        state, substituted = _apply(state, step)
        records.append(StepRecord(step, substituted, state.prefactor, state.residual))
    return state, records


def resolve_charts(h: LaurentPolynomial, branches: Sequence[Sequence[ResolutionStep]]) -> ResolutionTrace:
    trace = ResolutionTrace(h, [], warnings=check_nonnegative(h))
    for steps in branches:
        state, records = _run_chart(h, steps)
        trace.charts.append(state)
        trace.records.append(records)
        trace.reports.append(is_normal_crossing(state))
    return trace


def resolve(h: LaurentPolynomial, script=()) -> ResolutionTrace:
    """Apply ``script`` (a step list, or a JSON script with several charts)."""
    if isinstance(script, dict) or (script and not isinstance(script[0], (ResolutionStep, dict))):
        branches = parse_script(script)
    else:
        branches = parse_script(list(script))
    return resolve_charts(h, branches)


def _image_min(support, cols):
    imgs = [tuple(sum(c[i] * e[j] for j, c in enumerate(cols)) for i in range(len(cols[0]))) for e in support]
    low = tuple(min(x) for x in zip(*imgs))
    return low, low in imgs


def suggest_map(h: LaurentPolynomial, max_candidates: int = 12, budget: int = 200_000) -> list[list[int]] | None:
    """Propose a unimodular matrix whose columns come from the support-cone Hilbert basis.

    Columns are drawn from the Hilbert basis of ``Con(supp H)`` plus the
    standard basis.  A candidate resolves the chart when the image of the
    support has an attained coordinatewise minimum.  Ranking: resolving
    first, then more Hilbert-basis columns, then larger extracted monomial,
    then lexicographic.
    """
    if h.is_zero():
        return None
    n = h.nvars
    supp = h.support()
    nonzero = [e for e in supp if any(e)]
    identity = [[int(i == j) for j in range(n)] for i in range(n)]
    if not nonzero:
        return identity
    hb = [tuple(v) for v in hilbert_basis(Cone(nonzero, n)).elements]
    hb = sorted(hb, key=lambda v: (sum(v), v))[:max_candidates]
    std = [tuple(r) for r in identity]
    cands = hb + [s for s in std if s not in hb]
    best, best_key = None, None
    tried = 0
    for cols in itertools.permutations(cands, n):
        tried += 1
        if tried > budget:
            break
        if determinant(transpose(list(cols))) not in (1, -1):
            continue
        low, attained = _image_min(supp, cols)
        key = (attained, sum(c in hb for c in cols), sum(low), tuple(-x for c in cols for x in c))
        if best_key is None or key > best_key:
            best, best_key = cols, key
    if best is None:
        return None
    return transpose(list(best))


def regularity_check(h: LaurentPolynomial) -> dict:
    """Simplicial/unimodular test for the support cone of ``h``.

    Lower-dimensional cones are tested inside the saturated lattice of their
    span.  ``index`` is the index of the lattice generated by the extreme rays
    in that lattice (product of the Smith invariants).
    """
    if h.is_zero():
        raise ResolutionError("H must be nonzero")
    nonzero = [e for e in h.support() if any(e)]
    if not nonzero:
        return {"rays": [], "dim": 0, "full_dimensional": h.nvars == 0, "simplicial": True, "regular": True,
                "index": 1, "message": "H is constant"}
    c = Cone(nonzero, h.nvars)
    rays = c.rays()
    dim = c.dim()
    basis = saturated_span_basis(rays, h.nvars)
    idx = lattice_index(rays)
    simplicial = len(rays) == dim
    regular = simplicial and idx == 1
    if regular:
        msg = "parametrization is nonsingular (regular support cone)"
    else:
        msg = f"support cone is {'simplicial' if simplicial else 'not simplicial'} with index {idx}"
    if dim < h.nvars:
        msg += f"; checked on its {dim}-dimensional span"
    return {
        "rays": [list(r) for r in rays],
        "dim": dim,
        "span_basis": [list(b) for b in basis],
        "full_dimensional": dim == h.nvars,
        "simplicial": simplicial,
        "regular": regular,
        "index": idx,
        "message": msg,
    }
