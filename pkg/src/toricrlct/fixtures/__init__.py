"""Bundled example polynomials with their resolution scripts.

Each JSON file under ``fixtures/`` holds ``polynomial``, ``variables``,
``script`` and optionally ``expected`` (``lambda1``, ``m1``) and ``note``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from ..cones import Cone, Fan
from ..parser import parse
from ..polynomial import LaurentPolynomial
from ..resolution import ResolutionStep, parse_script

__all__ = ["Fixture", "load", "names", "regular_model", "perceptron", "cone", "fan", "FIXTURE_DIR"]

FIXTURE_DIR = resources.files(__name__)


@dataclass
class Fixture:
    name: str
    polynomial: LaurentPolynomial
    branches: list
    expected: dict = field(default_factory=dict)
    note: str = ""
    replay_only: bool = False

    @property
    def dimension(self) -> int:
        return self.polynomial.nvars

    def to_json(self) -> dict:
        script = [s.to_json() for s in self.branches[0]] if len(self.branches) == 1 else {
            "charts": [[s.to_json() for s in b] for b in self.branches]
        }
        out = {
            "polynomial": str(self.polynomial),
            "variables": list(self.polynomial.variables),
            "script": script,
        }
        if self.expected:
            out["expected"] = {k: str(v) if isinstance(v, Fraction) else v for k, v in self.expected.items()}
        if self.note:
            out["note"] = self.note
        if self.replay_only:
            out["replay_only"] = True
        return out

    @classmethod
    def from_json(cls, name: str, data: dict) -> "Fixture":
        poly = parse(data["polynomial"], data.get("variables"))
        expected = dict(data.get("expected", {}))
        for key in ("lambda1", "bound"):
            if key in expected:
                expected[key] = Fraction(str(expected[key]))
        return cls(name, poly, parse_script(data.get("script", [])), expected, data.get("note", ""),
                   bool(data.get("replay_only", False)))


def names() -> list[str]:
    return sorted(p.name[:-5] for p in FIXTURE_DIR.iterdir() if p.name.endswith(".json") and "cone" not in p.name
                  and "fan" not in p.name)


def _read(name: str) -> dict:
    path = FIXTURE_DIR / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"no fixture named {name!r}")
    return json.loads(path.read_text())


def load(name: str) -> Fixture:
    return Fixture.from_json(name, _read(name))


def cone(name: str) -> Cone:
    return Cone.from_json(_read(name))


def fan(name: str) -> Fan:
    return Fan.from_json(_read(name))


def regular_model(d: int) -> Fixture:
    """``H = w1^2 + ... + wd^2`` with the blow-up chart ``w1 = r, wi = r*vi``.

    The chart gives ``H = r^2 (1 + sum vi^2)`` and Jacobian ``r^(d-1)``.
    """
    if d < 1:
        raise ValueError("d >= 1")
    old = [f"w{i + 1}" for i in range(d)]
    poly = sum((LaurentPolynomial.variable(v, old) ** 2 for v in old), LaurentPolynomial({}, old))
    if d == 1:
        script = [ResolutionStep.monomial([[1]], ["r"])]
    else:
        new = ["r"] + [f"v{i + 1}" for i in range(1, d)]
        matrix = [[1] * d] + [[int(j == i) for j in range(d)] for i in range(1, d)]
        script = [ResolutionStep.monomial(matrix, new)]
    return Fixture(f"regular_model_d{d}", poly, [script], {"lambda1": Fraction(d, 2), "m1": 1},
                   "radial chart of a regular quadratic model")


def perceptron(k: int, n: int, m: int) -> Fixture:
    """Diagonal form ``sum_h sum_p h * a_hp^2`` of the three-layer perceptron distance.

    The coefficients stand for the positive diagonal terms ``B_hh``; the
    input weights ``b_hq`` and biases ``c_h`` are carried as inert
    coordinates.  The chart ``a11 = v, a_hp = v*u_hp`` factors out ``v^2``.
    """
    a_vars = [f"a{h}_{p}" for h in range(1, k + 1) for p in range(1, n + 1)]
    rest = [f"b{h}_{q}" for h in range(1, k + 1) for q in range(1, m + 1)] + [f"c{h}" for h in range(1, k + 1)]
    old = a_vars + rest
    poly = LaurentPolynomial({}, old)
    for h in range(1, k + 1):
        for p in range(1, n + 1):
            poly = poly + LaurentPolynomial.variable(f"a{h}_{p}", old) ** 2 * h
    size = len(old)
    na = len(a_vars)
    new = ["v11"] + [f"u{v[1:]}" for v in a_vars[1:]] + rest
    matrix = [[0] * size for _ in range(size)]
    for j in range(na):
        matrix[0][j] = 1
    for i in range(1, size):
        matrix[i][i] = 1
    bound = Fraction(k, 2) * min(n, m + 1)
    return Fixture(f"perceptron_{k}_{n}_{m}", poly, [[ResolutionStep.monomial(matrix, new)]],
                   {"lambda1": Fraction(k * n, 2), "m1": 1, "bound": bound},
                   "projective chart a11 != 0 of the three-layer perceptron")
