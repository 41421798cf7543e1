import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from toricrlct.fixtures import load
from toricrlct.lattice import determinant
from toricrlct.polynomial import LaurentPolynomial, substitute_monomial
from toricrlct.resolution import (
    ChartDecompositionRequired,
    ResolutionError,
    ResolutionStep,
    apply_step,
    check_nonnegative,
    extract_monomial_factor,
    initial_state,
    is_normal_crossing,
    parse_script,
    regularity_check,
    resolve,
    resolve_charts,
    suggest_map,
)

from oracles import random_unimodular

H_B = "b2^2 + (a*b1^2 + (b2 - a*b1)^2)^2"
B_MAP = [[0, 1, 1], [0, 1, 2], [1, 1, 0]]


def P(text, variables=None):
    return LaurentPolynomial.parse(text, variables)


def mono(matrix, names):
    return ResolutionStep.monomial(matrix, names)


# extract_monomial_factor


def test_extract_examples():
    g = P("u1^4*u2^4*u3^2 + 2*u1^3*u2^4*u3 + u1^2*u2^4 + 3*u1^6*u2^6*u3^4")
    m, co = extract_monomial_factor(g)
    assert m == (2, 4, 0)
    assert co == P("(u1*u3 + 1)^2 + 3*u1^4*u2^2*u3^4", g.variables)
    assert extract_monomial_factor(P("x^2*y")) == ((2, 1), P("1", ["x", "y"]))
    assert extract_monomial_factor(P("x + y")) == ((0, 0), P("x + y"))
    with pytest.raises(ResolutionError):
        extract_monomial_factor(P("x - x"))


@settings(max_examples=100)
@given(st.dictionaries(st.tuples(st.integers(-3, 4), st.integers(-3, 4)), st.integers(-4, 4).filter(bool), min_size=1, max_size=6))
def test_cofactor_is_maximal(terms):
    f = LaurentPolynomial(terms, ("x", "y"))
    m, co = extract_monomial_factor(f)
    assert all(min(col) == 0 for col in zip(*co.terms))
    assert LaurentPolynomial.monomial(m, f.variables) * co == f


# square plus quartic: (ab + c)^2 + 3a^2b^4


def test_square_quartic_replay_strings():
    fx = load("square_quartic_replay")
    trace = resolve_charts(fx.polynomial, fx.branches)
    recs = trace.records[0]
    first = recs[0]
    assert str(first.substituted) == "u1^2*u2^4 + 2*u1^3*u2^4*u3 + u1^4*u2^4*u3^2 + 3*u1^6*u2^6*u3^4"
    assert first.substituted == P("u1^4*u2^4*u3^2 + 2*u1^3*u2^4*u3 + u1^2*u2^4 + 3*u1^6*u2^6*u3^4")
    assert str(LaurentPolynomial.monomial(first.extracted, first.residual.variables)) == "u1^2*u2^4"
    assert first.residual == P("(u1*u3 + 1)^2 + 3*u1^4*u2^2*u3^4", ["u1", "u2", "u3"])
    translated = recs[2]
    assert translated.substituted == P("bp1^2 + 3*(bp1 - 1)^4*d1^2", translated.substituted.variables)
    final = trace.charts[0]
    assert str(final.prefactor_monomial()) == "c1^2*s1^2"
    assert str(final.terminal_unit) == "1 + 3*s1^4*s2^10"
    assert trace.complete
    assert final.lifted and final.jacobian is None


def test_square_quartic_first_map_alone():
    fx = load("square_quartic")
    trace = resolve_charts(fx.polynomial, fx.branches)
    c = trace.charts[0]
    assert c.prefactor == (2, 4, 0)
    assert c.jacobian == (2, 3, 0)
    assert trace.complete


def test_normal_crossing_diagnostics():
    fx = load("square_quartic")
    c = resolve_charts(fx.polynomial, fx.branches).charts[0]
    rep = is_normal_crossing(c)
    assert rep.ok
    assert rep.diagnostics  # zeros near u1*u3 = -1, u2 = 0
    assert any(abs(d["u1"] * d["u3"] + 1) < 0.1 and abs(d["u2"]) < 0.1 for d in rep.diagnostics)

    fx = load("square_quartic_replay")
    c = resolve_charts(fx.polynomial, fx.branches).charts[0]
    rep = is_normal_crossing(c)
    assert rep.ok and rep.diagnostics == []

    bad = initial_state(P("u1 + u2"))
    assert not is_normal_crossing(bad).ok


# binomial mixture


def test_binomial_mixture_chart():
    h = P(H_B, ["a", "b1", "b2"])
    trace = resolve(h, [mono(B_MAP, ["w1", "w2", "w3"])])
    c = trace.charts[0]
    assert c.prefactor == (2, 4, 0)
    assert c.jacobian == (1, 2, 1)
    assert c.terminal_unit.constant_term() == 1
    assert trace.complete
    assert str(c.prefactor_monomial()) == "w1^2*w2^4"


def test_identity_step_and_trivial_resolution():
    h = P("x^2*y^4")
    s0 = initial_state(h)
    s1 = apply_step(s0, mono([[1, 0], [0, 1]], ["x", "y"]))
    assert s1.prefactor == (2, 4) and s1.jacobian == (0, 0)
    trace = resolve(h, [])
    assert trace.complete and trace.charts[0].prefactor == (2, 4)
    assert trace.charts[0].terminal_unit == P("1", ["x", "y"])


# conservation and Jacobians


def _forward(states, steps, point):
    """Map a point of the last chart back to the original coordinates."""
    vals = dict(zip(states[-1].variables, point))
    for prev, step in zip(reversed(states[:-1]), reversed(steps)):
        if step.kind == "monomial":
            new = {}
            for j, v in enumerate(prev.variables):
                x = Fraction(1)
                for i, u in enumerate(step.new_vars):
                    x *= vals[u] ** step.matrix[i][j]
                new[v] = x
            vals = new
        elif step.kind == "translate":
            vals = dict(vals)
            vals[step.var] = vals.pop(step.new_var) + step.offset
        else:
            raise AssertionError("only monomial and translate steps are replayed")
    return [vals[v] for v in states[0].variables]


def _random_chain(rng, h):
    """Random unimodular steps with an occasional legal translation."""
    n = h.nvars
    states, steps = [initial_state(h)], []
    for level in range(rng.randint(1, 3)):
        cur = states[-1]
        movable = [v for i, v in enumerate(cur.variables) if cur.prefactor[i] >= 0 and cur.jacobian[i] >= 0]
        if steps and movable and rng.random() < 0.4:
            step = ResolutionStep.translate(rng.choice(movable), Fraction(rng.randint(-3, 3), rng.randint(1, 3)), f"t{level}")
            steps.append(step)
            states.append(apply_step(states[-1], step))
        m = random_unimodular(np.random.default_rng(rng.randint(0, 10**6)), n)
        step = mono(m, [f"v{level}_{i}" for i in range(n)])
        steps.append(step)
        states.append(apply_step(states[-1], step))
    return states, steps


@settings(max_examples=40)
@given(st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_exact_conservation_at_random_points(n, seed):
    rnd = random.Random(seed)
    terms = {tuple(rnd.randint(0, 3) for _ in range(n)): Fraction(rnd.randint(1, 5)) for _ in range(4)}
    h = LaurentPolynomial(terms, tuple(f"x{i}" for i in range(n)))
    states, steps = _random_chain(rnd, h)
    for k in range(1, len(states)):
        checked = 0
        while checked < 20:
            u = [Fraction(rnd.choice([-1, 1]) * rnd.randint(1, 7), rnd.randint(1, 7)) for _ in range(n)]
            try:
                x = _forward(states[: k + 1], steps[:k], u)
                expected = h.evaluate(x)
            except ZeroDivisionError:  # an intermediate coordinate hit 0 under a Laurent map
                continue
            assert states[k].total().evaluate(u) == expected
            checked += 1


def _sympy_jacobian(matrix):
    n = len(matrix)
    u = sympy.symbols(f"u0:{n}", positive=True)
    x = [sympy.Mul(*[u[i] ** matrix[i][j] for i in range(n)]) for j in range(n)]
    jac = sympy.Matrix([[sympy.diff(xj, ui) for ui in u] for xj in x]).det()
    return u, sympy.simplify(jac)


@settings(max_examples=50)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_jacobian_formula_matches_symbolic_determinant(n, seed):
    rng = np.random.default_rng(seed)
    m = random_unimodular(rng, n, steps=4, bound=1)
    u, jac = _sympy_jacobian(m)
    det = determinant(m)
    rows = [sum(r) for r in m]
    expected = det * sympy.Mul(*[u[i] ** (rows[i] - 1) for i in range(n)])
    assert sympy.simplify(jac - expected) == 0
    h = LaurentPolynomial.monomial([2] * n, [f"x{i}" for i in range(n)])
    state = apply_step(initial_state(h), mono(m, [f"u{i}" for i in range(n)]))
    assert state.jacobian == tuple(r - 1 for r in rows)
    assert state.det_sign == det


@settings(max_examples=40)
@given(st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_unimodular_steps_compose(n, seed):
    rng = np.random.default_rng(seed)
    a = random_unimodular(rng, n, steps=3, bound=1)
    b = random_unimodular(rng, n, steps=3, bound=1)
    ba = [[sum(b[k][i] * a[i][j] for i in range(n)) for j in range(n)] for k in range(n)]
    assert abs(determinant(ba)) == 1
    h = LaurentPolynomial({(2,) * n: 1, (1,) + (3,) * (n - 1): 2}, tuple(f"x{i}" for i in range(n)))
    mid = [f"u{i}" for i in range(n)]
    end = [f"v{i}" for i in range(n)]
    seq = resolve(h, [mono(a, mid), mono(b, end)]).charts[0]
    one = resolve(h, [mono(ba, end)]).charts[0]
    assert seq.total() == one.total()
    assert seq.prefactor == one.prefactor
    assert seq.jacobian == one.jacobian
    assert substitute_monomial(substitute_monomial(h, a, mid), b, end) == substitute_monomial(h, ba, end)


# step errors


def test_non_unimodular_and_shape_errors():
    s = initial_state(P("x^2 + y^2"))
    with pytest.raises(ResolutionError, match="unimodular"):
        apply_step(s, mono([[2, 0], [0, 1]], ["u", "v"]))
    with pytest.raises(ResolutionError):
        apply_step(s, mono([[1, 0]], ["u"]))
    with pytest.raises(ResolutionError):
        apply_step(s, mono([[1, 0], [0, 1]], ["u", "u"]))


def test_translation_errors():
    s = initial_state(P("x^2 + y^2"))
    with pytest.raises(ResolutionError, match="unknown"):
        apply_step(s, ResolutionStep.translate("z", 1))
    with pytest.raises(ResolutionError, match="exists"):
        apply_step(s, ResolutionStep.translate("x", 1, "y"))
    laurent = apply_step(initial_state(P("x + x*y", ["x", "y"])), mono([[1, 0], [-1, 1]], ["u1", "u2"]))
    assert laurent.prefactor == (1, -1)
    with pytest.raises(ChartDecompositionRequired):
        apply_step(laurent, ResolutionStep.translate("u2", 1))


def test_translation_absorbs_prefactor():
    s = apply_step(initial_state(P("x^2*(1 + y)")), ResolutionStep.translate("x", 1, "t"))
    assert s.prefactor == (0, 0)
    assert s.total() == P("(t + 1)^2*(1 + y)", ["t", "y"])


def test_rewrite_must_match_residual():
    s = initial_state(P("x^2 + y^2"))
    with pytest.raises(ResolutionError, match="does not equal"):
        apply_step(s, ResolutionStep.rewrite("x^2 + e^2", {"e": "2*y"}))
    ok = apply_step(s, ResolutionStep.rewrite("x^2 + e^2", {"e": "y"}))
    assert ok.lifted and ok.jacobian is None


def test_script_json_round_trip():
    fx = load("square_quartic_replay")
    data = [s.to_json() for s in fx.branches[0]]
    assert parse_script(data) == fx.branches
    assert parse_script({"charts": [data, data]}) == [fx.branches[0]] * 2
    with pytest.raises(ResolutionError):
        parse_script([{"type": "blowup"}])
    with pytest.raises(ResolutionError):
        parse_script("nope")


def test_nonnegativity_warning():
    assert check_nonnegative(P("x^2 + y^2")) == []
    assert check_nonnegative(P("x - y"))
    trace = resolve(P("x - y"), [])
    assert trace.warnings


# heuristics


def test_suggest_map_binomial_mixture():
    h = P(H_B, ["a", "b1", "b2"])
    m = suggest_map(h)
    assert abs(determinant(m)) == 1
    cols = {tuple(m[i][j] for i in range(3)) for j in range(3)}
    assert cols <= {(0, 0, 1), (1, 1, 0), (1, 2, 0), (1, 1, 1), (1, 0, 0), (0, 1, 0)}
    trace = resolve(h, [mono(m, ["w1", "w2", "w3"])])
    assert trace.complete


def test_suggest_map_trivial_and_square_quartic():
    assert suggest_map(P("x^2")) == [[1]]
    h = P("a^2*b^2 + 2*a*b*c + c^2 + 3*a^2*b^4")
    m = suggest_map(h)
    assert abs(determinant(m)) == 1
    # the hand-picked map is also a valid input
    assert resolve(h, [mono([[1, 1, 1], [1, 1, 2], [0, 1, 0]], ["u1", "u2", "u3"])]).charts[0].prefactor == (2, 4, 0)


def test_regularity_check_examples():
    r = regularity_check(P("x^2 + y^2"))
    assert r["regular"] and r["index"] == 1 and r["full_dimensional"]
    assert regularity_check(P("x^2 + x*y + y^2"))["regular"]
    r = regularity_check(P("a^2*b^2 + c^2"))
    assert r["dim"] == 2 and not r["full_dimensional"]
    assert r["regular"] and r["index"] == 1
    r = regularity_check(P("y + x^2*y^-1"))
    assert r["simplicial"] and not r["regular"] and r["index"] == 2
