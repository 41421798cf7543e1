"""Largest pole and multiplicity of the zeta function from chart data.

On a normal-crossing chart ``H = u^(2k) * unit`` with Jacobian ``u^h``, the
integral ``int H^z |g'| du`` has poles at ``z = -(h_i + 1) / (2 k_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .resolution import ChartState, ResolutionTrace, is_normal_crossing

__all__ = [
    "RlctError",
    "NoSingularity",
    "PoleSpectrum",
    "RlctReport",
    "chart_poles",
    "poles_from_exponents",
    "aggregate",
    "learning_curve",
    "stochastic_complexity_bound",
    "half_dim_bound_check",
    "report_from_trace",
    "PRECISION",
]

PRECISION = 50


class RlctError(ValueError):
    pass


class NoSingularity(RlctError):
    """The chart has no positive prefactor exponent: H is a unit there."""


@dataclass(frozen=True)
class PoleSpectrum:
    candidates: list  # (Fraction, variable name)
    lam: Fraction
    multiplicity: int
    unit_at_origin: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "lambda": str(self.lam),
            "multiplicity": self.multiplicity,
            "candidates": [[str(c), v] for c, v in self.candidates],
        }


@dataclass(frozen=True)
class RlctReport:
    lambda1: Fraction
    m1: int
    charts: list = field(default_factory=list)
    dimension: int | None = None
    provenance: str = ""

    @property
    def bound_d_over_2(self) -> bool | None:
        if self.dimension is None:
            return None
        return half_dim_bound_check(self, self.dimension)

    def to_json(self) -> dict:
        out = {
            "lambda1": str(self.lambda1),
            "m1": self.m1,
            "charts": [c.to_json() for c in self.charts],
            "bound_d_over_2": self.bound_d_over_2,
        }
        if self.dimension is not None:
            out["dimension"] = self.dimension
        if self.provenance:
            out["provenance"] = self.provenance
        return out

    @classmethod
    def from_json(cls, data: dict) -> "RlctReport":
        try:
            lam = Fraction(str(data["lambda1"]))
            m = int(data["m1"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise RlctError(f"malformed report: {exc}") from exc
        if lam <= 0 or m < 1:
            raise RlctError("report needs lambda1 > 0 and m1 >= 1")
        charts = [
            PoleSpectrum([(Fraction(c), v) for c, v in ch.get("candidates", [])], Fraction(ch["lambda"]), int(ch["multiplicity"]))
            for ch in data.get("charts", [])
        ]
        return cls(lam, m, charts, data.get("dimension"), data.get("provenance", ""))


def poles_from_exponents(prefactor: Sequence[int], jacobian: Sequence[int], names: Sequence[str] | None = None) -> PoleSpectrum:
    """Pole candidates ``(h_i + 1) / p_i`` for a prefactor ``u^p`` (``p = 2k``) and Jacobian ``u^h``."""
    names = list(names) if names else [f"u{i + 1}" for i in range(len(prefactor))]
    if len(prefactor) != len(jacobian) or len(names) != len(prefactor):
        raise RlctError("prefactor, Jacobian and names must have the same length")
    cands = []
    for p, h, v in zip(prefactor, jacobian, names):
        if p < 0:
            raise RlctError(f"negative prefactor exponent on {v}: the chart is not in the positive orthant")
        if h < 0:
            raise RlctError(f"negative Jacobian exponent on {v}: the chart is not in the positive orthant")
        if p % 2:
            raise RlctError(f"odd prefactor exponent {p} on {v}: H not locally a square times unit, check resolution")
        if p:
            cands.append((Fraction(h + 1, p), v))
    if not cands:
        raise NoSingularity("no singularity: the prefactor has no positive exponent")
    lam = min(c for c, _ in cands)
    return PoleSpectrum(cands, lam, sum(1 for c, _ in cands if c == lam))


def chart_poles(state: ChartState) -> PoleSpectrum:
    if state.lifted or state.jacobian is None:
        raise RlctError("chart went through a rewrite; its Jacobian is not tracked, so poles are not available")
    if not is_normal_crossing(state):
        raise RlctError("chart is not in normal crossing form at its origin")
    spec = poles_from_exponents(state.prefactor, state.jacobian, state.variables)
    unit0 = state.unit.constant_term() * state.residual.constant_term()
    return PoleSpectrum(spec.candidates, spec.lam, spec.multiplicity, unit0)


def aggregate(spectra: Sequence[PoleSpectrum], dimension: int | None = None, provenance: str = "") -> RlctReport:
    """Smallest chart lambda; multiplicity is the largest among charts attaining it."""
    spectra = list(spectra)
    if not spectra:
        raise RlctError("no chart spectra to aggregate")
    lam = min(s.lam for s in spectra)
    m = max(s.multiplicity for s in spectra if s.lam == lam)
    return RlctReport(lam, m, spectra, dimension, provenance)


def report_from_trace(trace: ResolutionTrace, provenance: str = "") -> RlctReport:
    if not trace.complete:
        raise RlctError("resolution is incomplete")
    spectra = []
    for state in trace.charts:
        try:
            spectra.append(chart_poles(state))
        except NoSingularity:
            continue
    if not spectra:
        raise NoSingularity("no chart has a positive prefactor exponent")
    return aggregate(spectra, trace.original.nvars, provenance)


def _n_decimal(n) -> Decimal:
    return n if isinstance(n, Decimal) else Decimal(int(n)) if isinstance(n, int) else Decimal(str(n))


def _frac(x: Fraction) -> Decimal:
    return Decimal(x.numerator) / Decimal(x.denominator)


def learning_curve(report: RlctReport, n) -> Decimal:
    """``K(n) = lambda/n + (m - 1)/(n ln n)`` at 50 significant digits."""
    with localcontext() as ctx:
        ctx.prec = PRECISION
        nd = _n_decimal(n)
        if nd < 2:
            raise RlctError("learning curve needs n >= 2")
        val = _frac(report.lambda1) / nd
        if report.m1 > 1:
            val += Decimal(report.m1 - 1) / (nd * nd.ln())
        return +val


def stochastic_complexity_bound(report: RlctReport, n) -> Decimal:
    """Upper-bound shape ``lambda ln n - (m - 1) ln ln n`` without the constant."""
    with localcontext() as ctx:
        ctx.prec = PRECISION
        nd = _n_decimal(n)
        if nd < 3:
            raise RlctError("stochastic complexity bound needs n >= 3")
        ln = nd.ln()
        val = _frac(report.lambda1) * ln
        if report.m1 > 1:
            val -= Decimal(report.m1 - 1) * ln.ln()
        return +val


def half_dim_bound_check(report: RlctReport, d: int) -> bool:
    return report.lambda1 <= Fraction(d, 2)
