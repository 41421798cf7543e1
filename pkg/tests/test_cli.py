import json
import subprocess
import sys
from decimal import Decimal

import pytest

from toricrlct.cli import main
from toricrlct.fixtures import FIXTURE_DIR

B_CONE = str(FIXTURE_DIR / "binomial_mixture_cone.json")
ORTHANT = str(FIXTURE_DIR / "orthant_cone.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out.strip() else None), err


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(p)


# hilbert / dual / cone-iso


def test_hilbert_examples(capsys, tmp_path):
    code, out, _ = run_json(capsys, "hilbert", B_CONE)
    assert code == 0 and out["hilbert_basis"] == [[0, 0, 1], [1, 1, 1], [1, 2, 0]]
    code, out, _ = run_json(capsys, "hilbert", ORTHANT)
    assert out["hilbert_basis"] == [[0, 1], [1, 0]]
    line = write(tmp_path, "line.json", {"ambient_dim": 2, "generators": [[1, 0], [-1, 0]]})
    assert run(capsys, "hilbert", line)[0] == 3
    assert run(capsys, "hilbert", write(tmp_path, "bad.json", "{not json"))[0] == 2
    assert run(capsys, "hilbert", str(tmp_path / "missing.json"))[0] == 2


def test_hilbert_text(capsys):
    code, out, _ = run(capsys, "--text", "hilbert", B_CONE)
    assert code == 0 and out.split() == ["0", "0", "1", "1", "1", "1", "1", "2", "0"]


def test_dual(capsys):
    code, out, _ = run_json(capsys, "dual", '{"ambient_dim": 2, "generators": [[0, 1], [2, -1]]}')
    assert code == 0
    assert sorted(map(tuple, out["generators"])) == [(1, 0), (1, 2)]


def test_cone_iso(capsys):
    e = '{"ambient_dim": 2, "generators": [[1, 0], [0, 1]]}'
    f = '{"ambient_dim": 2, "generators": [[1, 0], [1, 1]]}'
    g = '{"ambient_dim": 2, "generators": [[0, 1], [2, -1]]}'
    code, out, _ = run_json(capsys, "cone-iso", e, f)
    assert code == 0 and out["isomorphic"] and abs(out["det"]) == 1
    code, out, _ = run_json(capsys, "cone-iso", e, g)
    assert code == 0 and out == {"isomorphic": False, "matrix": None}
    assert run(capsys, "cone-iso", e, '{"ambient_dim": 3, "generators": [[1, 0, 0]]}')[0] == 3


# polynomial commands


def test_newton_and_initial(capsys):
    code, out, _ = run_json(capsys, "newton", "a^2*b^2 + 2*a*b*c + c^2 + 3*a^2*b^4")
    assert code == 0
    assert sorted(map(tuple, out["support_cone_rays"])) == [(0, 0, 1), (1, 1, 0), (1, 2, 0)]
    code, out, _ = run_json(capsys, "initial", "a^2*b^2 + 2*a*b*c + c^2", "--weight", "0,0,1")
    assert out["initial_form"] == "c^2"
    assert run(capsys, "initial", "x + y", "--weight", "1")[0] == 3
    assert run(capsys, "initial", "x + y", "--weight", "a,b")[0] == 2
    assert run(capsys, "newton", "x - x")[0] == 3
    assert run(capsys, "newton", "x + * y")[0] == 2


def test_vars_flag_orders_variables(capsys):
    code, out, _ = run(capsys, "--text", "--vars", "y,x", "newton", "x + y^2")
    assert code == 0
    code, out, _ = run_json(capsys, "--vars", "y,x", "initial", "x + y^2", "--weight", "1,0")
    assert out["initial_form"] == "y^2" and out["variables"] == ["y", "x"]


def test_toric_ideal(capsys):
    code, out, _ = run_json(capsys, "toric-ideal", "[[2,1,0],[0,1,2]]")
    assert code == 0 and "not saturated" in out["note"]
    assert out["binomials"] in (["-t2^2 + t1*t3"], ["t2^2 - t1*t3"])
    code, out, _ = run_json(capsys, "toric-ideal", "[[1,1]]")
    assert out["binomials"] in (["-t2 + t1"], ["-t1 + t2"])
    code, out, _ = run_json(capsys, "toric-ideal", "[[1,0],[0,1]]")
    assert out["binomials"] == []
    assert run(capsys, "toric-ideal", "[[1, 0], [1]]")[0] == 2


# resolve / rlct


def test_rlct_binomial_mixture(capsys):
    code, out, _ = run_json(capsys, "rlct", "--fixture", "binomial_mixture")
    assert code == 0
    assert out["lambda1"] == "3/4" and out["m1"] == 1 and out["bound_d_over_2"] is True
    assert out["charts"][0]["candidates"] == [["1", "w1"], ["3/4", "w2"]]
    code, text, _ = run(capsys, "--text", "rlct", str(FIXTURE_DIR / "binomial_mixture.json"))
    assert "lambda1 = 3/4" in text and "m1 = 1" in text


def test_rlct_with_script_file(capsys, tmp_path):
    script = write(tmp_path, "s.json", [{"type": "monomial", "matrix": [[0, 1, 1], [0, 1, 2], [1, 1, 0]], "new_vars": ["w1", "w2", "w3"]}])
    poly = write(tmp_path, "h.txt", "b2^2 + (a*b1^2 + (b2 - a*b1)^2)^2\n")
    code, out, _ = run_json(capsys, "--vars", "a,b1,b2", "rlct", poly, "--script", script)
    assert code == 0 and out["lambda1"] == "3/4"


def test_rlct_suggest_map_and_monomial(capsys):
    code, out, _ = run_json(capsys, "--vars", "a,b1,b2", "rlct", "b2^2 + (a*b1^2 + (b2 - a*b1)^2)^2")
    assert code == 0 and out["lambda1"] == "3/4" and out["provenance"] == "suggest_map"
    code, out, _ = run_json(capsys, "rlct", "x^2*y^4")
    assert (out["lambda1"], out["m1"]) == ("1/4", 1)


def test_rlct_quadratic_form_without_chart_script(capsys):
    code, out, err = run_json(capsys, "rlct", "x^2 + y^2")
    assert code == 4
    assert "radial chart" in out["note"] and "radial chart" in err
    code, out, _ = run_json(capsys, "rlct", "--fixture", "regular_model_d2")
    assert (out["lambda1"], out["m1"]) == ("1", 1)


def test_rlct_errors(capsys, tmp_path):
    assert run(capsys, "rlct", "x^2 +")[0] == 2
    assert run(capsys, "rlct", "x - x")[0] == 3
    assert run(capsys, "rlct", "--fixture", "nope")[0] == 2
    assert run(capsys, "rlct")[0] == 2
    bad = write(tmp_path, "s.json", [{"type": "monomial", "matrix": [[2, 0], [0, 1]], "new_vars": ["u", "v"]}])
    assert run(capsys, "rlct", "x^2*y^2", "--script", bad)[0] == 3
    assert run(capsys, "rlct", "x^2*y^2", "--script", write(tmp_path, "t.json", '[{"type": "warp"}]'))[0] == 2
    assert run(capsys, "rlct", "--fixture", "square_quartic_replay")[0] == 3
    code, out, _ = run_json(capsys, "rlct", "1 + x^2")
    assert code == 0 and out["note"] == "no singularity"


def test_resolve_emits_trace(capsys):
    code, out, _ = run_json(capsys, "resolve", "--fixture", "square_quartic_replay")
    assert code == 0 and out["complete"]
    final = out["charts"][0]
    assert final["prefactor_monomial"] == "c1^2*s1^2" and final["terminal_unit"] == "1 + 3*s1^4*s2^10"
    assert final["log"][0]["substituted"] == "u1^2*u2^4 + 2*u1^3*u2^4*u3 + u1^4*u2^4*u3^2 + 3*u1^6*u2^6*u3^4"
    code, out, _ = run_json(capsys, "resolve", "x^2 + y^2")
    assert code == 4 and out["complete"] is False


# curve


def test_curve(capsys, tmp_path):
    report = write(tmp_path, "r.json", {"lambda1": "3/4", "m1": 1})
    code, out, _ = run(capsys, "curve", report, "--n", "10,100")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,K,G_bound"
    assert Decimal(lines[1].split(",")[1]) == Decimal("0.075")
    assert Decimal(lines[2].split(",")[1]) == Decimal("0.0075")
    code, data, _ = run_json(capsys, "--json", "curve", report, "--n", "10")
    assert data["free_energy_shape"] == "3/4*ln(n) + C"
    assert data["learning_curve"] == "K(n) = 3/4/n"
    code, out, _ = run(capsys, "curve", report, "--n", "")
    assert code == 0 and out.strip() == "n,K,G_bound"
    assert run(capsys, "curve", write(tmp_path, "bad.json", {"lambda1": "x"}))[0] == 2


def test_curve_regular_model(capsys, tmp_path):
    report = write(tmp_path, "r.json", {"lambda1": "1/2", "m1": 1})
    code, out, _ = run(capsys, "curve", report, "--n", "10,1000")
    for row in out.strip().splitlines()[1:]:
        n, k, _ = row.split(",")
        assert Decimal(k) == Decimal(1) / (2 * Decimal(n))


# verify


def test_verify_monomial(capsys):
    code, out, _ = run_json(capsys, "verify", "u1^2*u2^4", "--lambda", "1/4", "--tolerance", "0.05")
    assert code == 0
    assert abs(out["fit"]["lambda_hat"] - 0.25) <= 0.05 and out["within_tolerance"]
    assert [p[0] for p in out["points"]] == [100, 1000, 10000, 100000, 1000000]


def test_verify_text_output_and_mismatch(capsys, tmp_path):
    code, out, _ = run(capsys, "--text", "verify", "u^2", "--n", "100,1000,10000,100000")
    assert code == 0 and out.startswith("n,F\n100,")
    report = write(tmp_path, "r.json", {"lambda1": "3/2", "m1": 1})
    code, out, err = run_json(capsys, "verify", "u^2", "--report", report)
    assert code == 5 and out["within_tolerance"] is False
    code, out, _ = run_json(capsys, "verify", "0*u", "--n", "100,1000,10000,100000")
    assert code == 0 and out["note"] == "no singularity" and abs(out["fit"]["lambda_hat"]) < 1e-9


def test_verify_errors(capsys, tmp_path):
    assert run(capsys, "verify", "a*b*c*d")[0] == 3
    assert run(capsys, "verify", "x - 1/2")[0] == 3
    assert run(capsys, "verify", "x^2", "--n", "100,200")[0] == 3
    assert run(capsys, "verify", "x^2", "--spec", write(tmp_path, "s.json", '{"box": [["0", "1"]], "n": [1000, 100]}'))[0] == 3


def test_verify_fixture_uses_expected_lambda(capsys):
    code, out, _ = run_json(capsys, "verify", "--fixture", "binomial_mixture")
    assert code == 0 and out["lambda_exact"] == "3/4" and out["within_tolerance"]


# global behaviour


def test_output_flag_and_round_trip(capsys, tmp_path):
    dest = tmp_path / "report.json"
    code, out, _ = run(capsys, "--output", str(dest), "rlct", "--fixture", "binomial_mixture")
    assert code == 0 and out == ""
    code, text, _ = run(capsys, "curve", str(dest), "--n", "1000")
    assert code == 0 and text.splitlines()[1].startswith("1000,0.00075")
    cone_out = tmp_path / "dual.json"
    run(capsys, "--output", str(cone_out), "dual", B_CONE)
    code, out, _ = run_json(capsys, "hilbert", str(cone_out))
    assert code == 0 and out["hilbert_basis"]


@pytest.mark.parametrize(
    "argv",
    [
        ["rlct", "--fixture", "binomial_mixture"],
        ["resolve", "--fixture", "square_quartic_replay"],
        ["hilbert", B_CONE],
        ["verify", "u1^2*u2^4"],
    ],
)
def test_deterministic_output(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second


def test_flags_after_subcommand(capsys):
    code, out, _ = run(capsys, "rlct", "--fixture", "binomial_mixture", "--text")
    assert code == 0 and out.startswith("lambda1 = 3/4")


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "toricrlct", "rlct", "x^2*y^4"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["lambda1"] == "1/4"
    proc = subprocess.run([sys.executable, "-m", "toricrlct", "hilbert", "{"], capture_output=True, text=True)
    assert proc.returncode == 2
