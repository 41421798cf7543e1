"""Numeric estimate of the learning coefficient from Laplace integrals.

``Z(n) = int_box exp(-n H(w)) dw / vol(box)`` decays like
``n^-lambda (ln n)^(m-1)``, so ``F(n) = -ln Z(n)`` is fitted against
``ln n``, ``ln ln n`` and a constant.

Each axis ``[lo, hi]`` is mapped from ``t in R`` by
``x = lo + (hi - lo) * s(t)`` with ``s`` the logistic function.  Uniform
steps ``dt = ln(refine)`` give nodes that are geometric toward ``lo``, and
the trapezoid rule in ``t`` is then spectrally accurate for integrands
that are smooth in ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .polynomial import LaurentPolynomial

__all__ = [
    "VerifyError",
    "NegativeHError",
    "QuadratureSpec",
    "FitResult",
    "axis_rule",
    "estimate_free_energy",
    "fit_lambda",
    "DEFAULT_N",
]

DEFAULT_N = (100, 1000, 10_000, 100_000, 1_000_000)
_T_TOP = 37.0  # upper cut in t; 1 - s(37) ~ 9e-17
_T_LOW = -30.0  # lower cut for the lattice rule
MAX_DIM = 3


class VerifyError(ValueError):
    pass


class NegativeHError(VerifyError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    box: tuple = ()
    points_per_axis: int = 256
    refine: float = 1.5
    n_values: tuple = DEFAULT_N
    digits: int = 30
    method: str = "grid"
    samples: int = 2**18
    seed: int = 0

    def __post_init__(self):
        for lo, hi in self.box:
            if lo < 0:
                raise VerifyError("box lower bounds must be >= 0")
            if hi <= lo:
                raise VerifyError("each box interval needs lo < hi")
        ns = list(self.n_values)
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise VerifyError("n values must be strictly increasing")
        if ns and ns[0] <= 0:
            raise VerifyError("n values must be positive")
        if self.points_per_axis < 2:
            raise VerifyError("points_per_axis must be >= 2")
        if self.samples < 2:
            raise VerifyError("samples must be >= 2")
        if self.refine <= 1:
            raise VerifyError("refine must be > 1")
        if self.method not in ("grid", "mc"):
            raise VerifyError("method is 'grid' or 'mc'")

    @classmethod
    def from_json(cls, data: dict, nvars: int | None = None) -> "QuadratureSpec":
        try:
            box = tuple((Fraction(str(lo)), Fraction(str(hi))) for lo, hi in data.get("box", []))
            if not box and nvars is not None:
                box = ((Fraction(0), Fraction(1)),) * nvars
            return cls(
                box=box,
                points_per_axis=int(data.get("points_per_axis", 256)),
                refine=float(Fraction(str(data.get("refine", "1.5")))),
                n_values=tuple(int(n) for n in data.get("n", DEFAULT_N)),
                digits=int(data.get("digits", 30)),
                method=str(data.get("method", "grid")),
                samples=int(data.get("samples", 2**18)),
                seed=int(data.get("seed", 0)),
            )
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, VerifyError):
                raise
            raise VerifyError(f"malformed quadrature spec: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "box": [[str(lo), str(hi)] for lo, hi in self.box],
            "points_per_axis": self.points_per_axis,
            "refine": repr(self.refine),
            "n": list(self.n_values),
            "digits": self.digits,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
        }

    def refined(self) -> "QuadratureSpec":
        """Twice the node density over the same ``t`` range."""
        from dataclasses import replace

        return replace(self, points_per_axis=2 * self.points_per_axis - 1, refine=math.sqrt(self.refine))


def axis_rule(lo: float, hi: float, points: int, refine: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and trapezoid weights for ``int_lo^hi f(x) dx``."""
    dt = math.log(refine)
    t = _T_TOP - dt * np.arange(points)
    s = 1.0 / (1.0 + np.exp(-t))
    x = lo + (hi - lo) * s
    w = (hi - lo) * s * (1.0 - s) * dt
    w[0] *= 0.5
    w[-1] *= 0.5
    return x, w


def _prepare(h: LaurentPolynomial, spec: QuadratureSpec):
    d = h.nvars
    if d > MAX_DIM:
        raise VerifyError(f"dimension {d} > {MAX_DIM}: quadrature accuracy is not guaranteed")
    if not h.is_polynomial():
        raise VerifyError("H must be a polynomial")
    box = spec.box or ((Fraction(0), Fraction(1)),) * d
    if len(box) != d:
        raise VerifyError(f"box has {len(box)} intervals for {d} variables")
    coeffs, exps = h.arrays()
    if not coeffs:
        coeffs, exps = [0.0], [[0] * d]
    return box, coeffs, exps


def _scale(coeffs, exps, box):
    total = 0.0
    for c, e in zip(coeffs, exps):
        term = abs(c)
        for (lo, hi), k in zip(box, e):
            term *= max(abs(float(lo)), abs(float(hi)), 1.0) ** k
        total += term
    return max(total, 1e-300)


def _grid_z(h, spec, box, coeffs, exps):
    nodes, weights = [], []
    for lo, hi in box:
        x, w = axis_rule(float(lo), float(hi), spec.points_per_axis, spec.refine)
        nodes.append(x)
        weights.append(w)
    if not nodes:  # constant H
        z = np.exp(-np.asarray(spec.n_values, dtype=float) * max(coeffs[0], 0.0))
        return z, coeffs[0], {}
    z, h_min, arg = kernels.laplace_grid(nodes, weights, coeffs, exps, list(spec.n_values))
    where = {v: float(nodes[k][arg[k]]) for k, v in enumerate(h.variables)}
    return np.asarray(z), h_min, where


def _korobov(n: int, d: int) -> np.ndarray:
    """Generator ``(1, g, g^2, ...) mod n`` with ``g`` near ``n / golden ratio`` and coprime to ``n``."""
    g = max(1, int(round(n / 1.6180339887498949)))
    while math.gcd(g, n) != 1:
        g += 1
    return np.array([pow(g, k, n) for k in range(d)], dtype=np.int64)


def _mc_z(h, spec, box, coeffs, exps):
    # Randomly shifted rank-1 lattice in t.  The transformed integrand
    # vanishes at both ends of the t range, so the rule behaves as for a
    # periodic function.  Below t = _T_LOW the lost mass is < 1e-13 per axis.
    rng = np.random.default_rng(spec.seed)
    d = len(box)
    n = spec.samples
    span = _T_TOP - _T_LOW
    z = _korobov(n, d)
    unit = (np.outer(np.arange(n, dtype=np.int64), z) % n / n + rng.random(d)) % 1.0
    t = _T_LOW + span * unit
    s = 1.0 / (1.0 + np.exp(-t))
    lo = np.array([float(a) for a, _ in box])
    hi = np.array([float(b) for _, b in box])
    x = lo + (hi - lo) * s
    w = np.prod((hi - lo) * s * (1.0 - s) * span, axis=1)
    hv = np.zeros(len(x))
    for c, e in zip(coeffs, exps):
        hv += c * np.prod(x ** np.asarray(e), axis=1)
    i = int(np.argmin(hv))
    hc = np.maximum(hv, 0.0)
    zn = np.array([math.fsum(w * np.exp(-m * hc)) / n for m in spec.n_values])
    return zn, float(hv[i]), dict(zip(h.variables, map(float, x[i])))


def estimate_free_energy(h: LaurentPolynomial, spec: QuadratureSpec | None = None) -> list[tuple[int, float]]:
    """``[(n, F(n))]`` with ``F(n) = -ln(Z(n) / vol)`` under the uniform prior on the box."""
    spec = spec or QuadratureSpec(box=((Fraction(0), Fraction(1)),) * h.nvars)
    box, coeffs, exps = _prepare(h, spec)
    run = _mc_z if spec.method == "mc" else _grid_z
    z, h_min, where = run(h, spec, box, coeffs, exps)
    if h_min < -1e-9 * _scale(coeffs, exps, box):
        raise NegativeHError(f"H is negative ({h_min:.3e}) at {where}")
    vol = 1.0
    for lo, hi in box:
        vol *= float(hi - lo)
    out = []
    for n, zn in zip(spec.n_values, z):
        if zn <= 0:
            raise VerifyError(f"Z({n}) underflowed to zero; shrink the box or lower n")
        out.append((int(n), 0.0 - math.log(zn / vol)))
    return out


@dataclass(frozen=True)
class FitResult:
    lambda_hat: float
    m_minus_1_hat: float | None
    intercept: float
    residual_rms: float
    points: list = field(default_factory=list)

    def to_json(self, digits: int = 17) -> dict:
        fmt = lambda v: None if v is None else float(f"{v:.{min(digits, 17)}g}")
        return {
            "lambda_hat": fmt(self.lambda_hat),
            "m_minus_1_hat": fmt(self.m_minus_1_hat),
            "intercept": fmt(self.intercept),
            "residual_rms": fmt(self.residual_rms),
        }


def fit_lambda(points: Sequence[tuple], max_condition: float = 1e10) -> FitResult:
    """Least squares ``F(n) ~ lambda ln n - (m - 1) ln ln n + c``.

    The ``ln ln n`` column is used only when every ``n >= 3``.
    """
    pts = sorted((float(n), float(f)) for n, f in points)
    if len(pts) < 4:
        raise VerifyError("at least 4 points are needed")
    ns = np.array([p[0] for p in pts])
    fs = np.array([p[1] for p in pts])
    if ns[0] <= 1:
        raise VerifyError("n values must exceed 1")
    if math.log10(ns[-1] / ns[0]) < 3 - 1e-12:
        raise VerifyError("n values must span at least 3 decades")
    ln = np.log(ns)
    use_lnln = bool(np.all(ns >= 3))
    cols = [ln, -np.log(ln), np.ones_like(ln)] if use_lnln else [ln, np.ones_like(ln)]
    a = np.column_stack(cols)
    if np.linalg.cond(a) > max_condition:
        raise VerifyError("ill-conditioned design: n values too clustered")
    coef, *_ = np.linalg.lstsq(a, fs, rcond=None)
    resid = fs - a @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    if use_lnln:
        return FitResult(float(coef[0]), float(coef[1]), float(coef[2]), rms, pts)
    return FitResult(float(coef[0]), None, float(coef[1]), rms, pts)
