"""Command-line interface.

Exit codes: 0 ok, 2 parse error, 3 domain precondition, 4 incomplete
resolution, 5 verification mismatch.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import fixtures
from .cones import Cone, NotPointedError, cone_isomorphism
from .hilbert import hilbert_basis
from .lattice import determinant
from .parser import PolynomialSyntaxError, parse
from .polynomial import TORIC_BASIS_NOTE, initial_form, newton_polytope, toric_ideal_basis
from .resolution import ResolutionError, ResolutionStep, parse_script, resolve_charts, suggest_map
from .rlct import (
    NoSingularity,
    RlctError,
    RlctReport,
    learning_curve,
    report_from_trace,
    stochastic_complexity_bound,
)
from .verify import QuadratureSpec, VerifyError, estimate_free_energy, fit_lambda

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_INCOMPLETE, EXIT_MISMATCH = 0, 2, 3, 4, 5

REGULAR_NOTE = (
    "a positive definite quadratic form is not a monomial times a unit in coordinate charts; "
    "use a radial chart script (see the regular_model fixtures), which gives lambda = d/2, m = 1"
)


class CliError(Exception):
    def __init__(self, code: int, message: str, payload: dict | None = None):
        super().__init__(message)
        self.code = code
        self.payload = payload


# --- input helpers ---------------------------------------------------------
def _read_text(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    p = Path(arg)
    if p.is_file():
        return p.read_text()
    raise CliError(EXIT_PARSE, f"no such file: {arg}")


def _load_json(arg: str):
    text = arg if arg.lstrip().startswith(("{", "[")) else _read_text(arg)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"invalid JSON in {arg!r}: {exc}") from exc


def _load_cone(arg: str) -> Cone:
    data = _load_json(arg)
    try:
        return Cone.from_json(data)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CliError(EXIT_PARSE, f"invalid cone JSON: {exc}") from exc


def _variables(args):
    if args.vars:
        return [v.strip() for v in args.vars.split(",") if v.strip()]
    return None


def _load_input(args):
    """Polynomial plus optional script branches and expectations.

    The source is ``--fixture NAME``, a fixture JSON file, a text file, or a literal.
    """
    sources = [s for s in (getattr(args, "poly", None), getattr(args, "fixture", None)) if s]
    if len(sources) != 1:
        raise CliError(EXIT_PARSE, "give exactly one polynomial source (POLY or --fixture)")
    variables = _variables(args)
    if args.fixture:
        try:
            fx = fixtures.load(args.fixture)
        except KeyError as exc:
            raise CliError(EXIT_PARSE, str(exc)) from exc
        poly = fx.polynomial if not variables else fx.polynomial.with_variables(variables)
        return poly, fx.branches, fx.expected, fx
    text = args.poly
    p = Path(text)
    if text != "-" and not p.is_file():
        return _parse(text, variables), None, {}, None
    raw = _read_text(text)
    if raw.lstrip().startswith("{"):
        data = _load_json(text)
        try:
            fx = fixtures.Fixture.from_json(p.stem, data)
        except PolynomialSyntaxError as exc:
            raise CliError(EXIT_PARSE, f"polynomial syntax: {exc}") from exc
        except (KeyError, ResolutionError) as exc:
            raise CliError(EXIT_PARSE, f"invalid fixture file: {exc}") from exc
        poly = fx.polynomial if not variables else fx.polynomial.with_variables(variables)
        return poly, fx.branches, fx.expected, fx
    return _parse(raw.strip(), variables), None, {}, None


def _parse(text, variables):
    try:
        return parse(text, variables)
    except PolynomialSyntaxError as exc:
        raise CliError(EXIT_PARSE, f"polynomial syntax: {exc}") from exc


def _load_script(arg: str):
    try:
        return parse_script(_load_json(arg))
    except ResolutionError as exc:
        raise CliError(EXIT_PARSE, f"invalid script: {exc}") from exc


def _int_list(text: str, what: str) -> list[int]:
    if not text.strip():
        return []
    try:
        return [int(Fraction(x.strip())) for x in text.split(",")]
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"invalid {what}: {text!r}") from exc


# --- commands --------------------------------------------------------------
def cmd_hilbert(args):
    c = _load_cone(args.cone)
    if not c.is_pointed():
        raise CliError(EXIT_DOMAIN, "cone is not pointed; its monoid has no finite Hilbert basis")
    hb = hilbert_basis(c)
    return hb.to_json(), "\n".join(" ".join(map(str, v)) for v in hb.elements)


def cmd_dual(args):
    c = _load_cone(args.cone)
    d = c.dual()
    return d.to_json(), "\n".join(" ".join(map(str, v)) for v in d.generators)


def cmd_newton(args):
    poly, *_ = _load_input(args)
    if poly.is_zero():
        raise CliError(EXIT_DOMAIN, "the zero polynomial has no Newton polytope")
    np_ = newton_polytope(poly)
    rays = np_.support_cone.rays() if np_.support_cone.is_pointed() else []
    out = {
        "variables": list(poly.variables),
        "vertices": [list(v) for v in np_.vertices],
        "support_cone": np_.support_cone.to_json(),
        "support_cone_rays": [list(r) for r in rays],
    }
    text = "vertices:\n" + "\n".join(" ".join(map(str, v)) for v in np_.vertices)
    text += "\nsupport cone rays:\n" + "\n".join(" ".join(map(str, r)) for r in rays)
    return out, text


def cmd_initial(args):
    poly, *_ = _load_input(args)
    if poly.is_zero():
        raise CliError(EXIT_DOMAIN, "the zero polynomial has no initial form")
    try:
        w = [Fraction(x.strip()) for x in args.weight.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(EXIT_PARSE, f"invalid weight {args.weight!r}") from exc
    if len(w) != poly.nvars:
        raise CliError(EXIT_DOMAIN, f"weight has {len(w)} entries for {poly.nvars} variables")
    f = initial_form(poly, w)
    return {"variables": list(poly.variables), "weight": [str(x) for x in w], "initial_form": str(f)}, str(f)


def cmd_toric_ideal(args):
    m = _load_json(args.matrix)
    if not (isinstance(m, list) and m and all(isinstance(r, list) and len(r) == len(m[0]) for r in m)):
        raise CliError(EXIT_PARSE, "matrix must be a nonempty rectangular JSON array of arrays")
    try:
        m = [[int(x) for x in r] for r in m]
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_PARSE, "matrix entries must be integers") from exc
    names = _variables(args)
    if names and len(names) != len(m[0]):
        raise CliError(EXIT_DOMAIN, "--vars must name one variable per column")
    binomials = toric_ideal_basis(m, names)
    out = {"note": TORIC_BASIS_NOTE, "binomials": [str(b) for b in binomials]}
    return out, "# " + TORIC_BASIS_NOTE + "".join("\n" + str(b) for b in binomials)


def _branches(args, poly, fixture_branches):
    if getattr(args, "script", None):
        return _load_script(args.script), "script"
    if fixture_branches is not None:
        return fixture_branches, "fixture"
    m = suggest_map(poly)
    if m is None:
        return None, "suggest_map"
    n = poly.nvars
    if m == [[int(i == j) for j in range(n)] for i in range(n)]:
        return [[]], "suggest_map"
    new = [f"u{i + 1}" for i in range(n)]
    return [[ResolutionStep.monomial(m, new)]], "suggest_map"


def _trace(args):
    poly, fb, expected, fx = _load_input(args)
    if poly.is_zero():
        raise CliError(EXIT_DOMAIN, "H must be nonzero")
    branches, source = _branches(args, poly, fb)
    if branches is None:
        raise CliError(EXIT_INCOMPLETE, "no script given and no unimodular candidate map was found")
    try:
        trace = resolve_charts(poly, branches)
    except ResolutionError as exc:
        raise CliError(EXIT_DOMAIN, f"resolution step failed: {exc}") from exc
    return poly, trace, source, expected, fx


def _incomplete(trace, source, poly):
    diags = [{"chart": i, "constant_terms": r.constant_terms, "zero_candidates": r.diagnostics}
             for i, r in enumerate(trace.reports) if not r.ok]
    payload = {"complete": False, "script_source": source, "diagnostics": diags}
    msg = "resolution incomplete: a chart's cofactor vanishes at the chart origin"
    if _is_quadratic_form(poly):
        payload["note"] = REGULAR_NOTE
        msg += "; " + REGULAR_NOTE
    return CliError(EXIT_INCOMPLETE, msg, payload)


def _is_quadratic_form(poly) -> bool:
    return bool(poly.terms) and all(sum(e) == 2 and min(e) >= 0 for e in poly.terms)


def cmd_resolve(args):
    poly, trace, source, *_ = _trace(args)
    out = trace.to_json()
    out["script_source"] = source
    for w in trace.warnings:
        print(f"warning: {w}", file=sys.stderr)
    lines = []
    for i, (c, r) in enumerate(zip(trace.charts, trace.reports)):
        lines.append(f"chart {i}: {c.prefactor_monomial()} * ({c.terminal_unit})"
                     f"  jacobian={'untracked' if c.jacobian is None else list(c.jacobian)}"
                     f"  normal_crossing={r.ok}")
    text = "\n".join(lines)
    if not trace.complete:
        err = _incomplete(trace, source, poly)
        err.payload = out
        raise err
    return out, text


def cmd_rlct(args):
    poly, trace, source, expected, fx = _trace(args)
    for w in trace.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not trace.complete:
        raise _incomplete(trace, source, poly)
    try:
        report = report_from_trace(trace, provenance=source)
    except NoSingularity:
        out = {"lambda1": None, "m1": None, "charts": [], "bound_d_over_2": True, "note": "no singularity"}
        return out, "no singularity"
    except RlctError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from exc
    out = report.to_json()
    if not out["bound_d_over_2"]:
        print(f"warning: lambda1 = {report.lambda1} exceeds d/2 = {Fraction(poly.nvars, 2)}", file=sys.stderr)
    text = f"lambda1 = {report.lambda1}\nm1 = {report.m1}\nbound_d_over_2 = {str(out['bound_d_over_2']).lower()}"
    return out, text


def _load_report(arg: str) -> RlctReport:
    try:
        return RlctReport.from_json(_load_json(arg))
    except RlctError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc


def _shape(report: RlctReport) -> tuple[str, str]:
    lam, m = report.lambda1, report.m1
    k = f"K(n) = {lam}/n" + (f" + {m - 1}/(n*ln(n))" if m > 1 else "")
    g = f"{lam}*ln(n)" + (f" - {m - 1}*ln(ln(n))" if m > 1 else "") + " + C"
    return k, g


def cmd_curve(args):
    report = _load_report(args.report)
    ns = _int_list(args.n, "n list")
    rows = []
    for n in ns:
        if n < 3:
            raise CliError(EXIT_DOMAIN, "n must be >= 3 for both curve columns")
        rows.append((n, learning_curve(report, n), stochastic_complexity_bound(report, n)))
    k_shape, g_shape = _shape(report)
    buf = io.StringIO()
    buf.write("n,K,G_bound\n")
    for n, k, g in rows:
        buf.write(f"{n},{k},{g}\n")
    out = {
        "lambda1": str(report.lambda1),
        "m1": report.m1,
        "learning_curve": k_shape,
        "free_energy_shape": g_shape,
        "rows": [{"n": n, "K": str(k), "G_bound": str(g)} for n, k, g in rows],
    }
    return out, buf.getvalue().rstrip("\n"), "csv"


def cmd_cone_iso(args):
    c1, c2 = _load_cone(args.cone1), _load_cone(args.cone2)
    if c1.ambient_dim != c2.ambient_dim:
        raise CliError(EXIT_DOMAIN, "cones live in different ambient dimensions")
    if not (c1.is_pointed() and c2.is_pointed()):
        raise CliError(EXIT_DOMAIN, "cone isomorphism is defined here for pointed cones")
    m = cone_isomorphism(c1, c2)
    if m is None:
        return {"isomorphic": False, "matrix": None}, "not isomorphic"
    out = {"isomorphic": True, "matrix": m, "det": determinant(m)}
    return out, "\n".join(" ".join(map(str, r)) for r in m)


def cmd_verify(args):
    poly, _, expected, _ = _load_input(args)
    spec_data = _load_json(args.spec) if args.spec else {}
    if args.n:
        spec_data = dict(spec_data, n=_int_list(args.n, "n list"))
    try:
        spec = QuadratureSpec.from_json(spec_data, poly.nvars)
        points = estimate_free_energy(poly, spec)
        fit = fit_lambda(points)
    except VerifyError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from exc
    exact = None
    if args.lambda_:
        exact = Fraction(args.lambda_)
    elif args.report:
        exact = _load_report(args.report).lambda1
    elif "lambda1" in expected:
        exact = expected["lambda1"]
    summary = {"fit": fit.to_json(spec.digits), "spec": spec.to_json()}
    if poly.is_zero():
        summary["note"] = "no singularity"
    if exact is not None:
        diff = abs(fit.lambda_hat - float(exact))
        summary.update(lambda_exact=str(exact), tolerance=args.tolerance, within_tolerance=diff <= args.tolerance)
    digits = min(spec.digits, 17)
    csv = "n,F\n" + "".join(f"{n},{f:.{digits}g}\n" for n, f in points)
    out = dict(summary, points=[[n, float(f"{f:.{digits}g}")] for n, f in points])
    text = csv + "\n" + json.dumps(summary, indent=2)
    if exact is not None and not summary["within_tolerance"]:
        raise CliError(EXIT_MISMATCH, f"lambda_hat {fit.lambda_hat:.4f} differs from {exact} by more than "
                       f"{args.tolerance}", out)
    return out, text


# --- parser ----------------------------------------------------------------
def _globals(parser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--vars", default=d, help="comma-separated variable order")
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", default=d)
    fmt.add_argument("--text", dest="format", action="store_const", const="text", default=d)
    parser.add_argument("--output", default=d, help="write the result to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toricrlct", description="Toric resolution and learning coefficients.")
    _globals(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        _globals(sp, suppress=True)
        sp.set_defaults(func=func)
        return sp

    def poly_args(sp):
        sp.add_argument("poly", nargs="?", help="polynomial literal, text file, or fixture JSON file")
        sp.add_argument("--fixture", help="name of a bundled fixture")

    sp = add("hilbert", cmd_hilbert, "Hilbert basis of a pointed cone")
    sp.add_argument("cone")
    sp = add("dual", cmd_dual, "dual cone")
    sp.add_argument("cone")
    poly_args(add("newton", cmd_newton, "Newton polytope and support cone"))
    sp = add("initial", cmd_initial, "initial form for a weight")
    poly_args(sp)
    sp.add_argument("--weight", required=True, help="comma-separated rational weights")
    sp = add("toric-ideal", cmd_toric_ideal, "binomials from the kernel of an exponent matrix")
    sp.add_argument("matrix", help="JSON matrix literal or file")
    for name, func, help_ in (("resolve", cmd_resolve, "apply a resolution script"),
                              ("rlct", cmd_rlct, "learning coefficient and multiplicity")):
        sp = add(name, func, help_)
        poly_args(sp)
        sp.add_argument("--script", help="script JSON file")
    sp = add("curve", cmd_curve, "learning curve and free-energy bound samples")
    sp.add_argument("report", help="rlct report JSON")
    sp.add_argument("--n", default="10,100,1000,10000,100000,1000000", help="comma-separated sample sizes")
    sp = add("cone-iso", cmd_cone_iso, "unimodular isomorphism between two cones")
    sp.add_argument("cone1")
    sp.add_argument("cone2")
    sp = add("verify", cmd_verify, "numeric estimate of lambda by quadrature")
    poly_args(sp)
    sp.add_argument("--spec", help="quadrature spec JSON")
    sp.add_argument("--n", help="comma-separated sample sizes (overrides the --spec file)")
    sp.add_argument("--lambda", dest="lambda_", help="exact lambda to compare against")
    sp.add_argument("--report", help="rlct report JSON to compare against")
    sp.add_argument("--tolerance", type=float, default=0.08)
    return p


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text + ("\n" if text else ""))
    elif text:
        print(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    fmt = args.format or "json"
    try:
        result = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.payload is not None and fmt == "json":
            _emit(args, json.dumps(exc.payload, indent=2))
        return exc.code
    except NotPointedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PolynomialSyntaxError as exc:
        print(f"error: polynomial syntax: {exc}", file=sys.stderr)
        return EXIT_PARSE
    out, text, *kind = result
    if kind and kind[0] == "csv" and args.format != "json":
        _emit(args, text)
    elif fmt == "json":
        _emit(args, json.dumps(out, indent=2))
    else:
        _emit(args, text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
