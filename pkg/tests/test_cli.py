import json
import math
import subprocess
import sys

import jsonschema
import pytest

from vfieldlab import cycles, flow, polyalg
from vfieldlab.cli import main
from vfieldlab.exprio import REPORT_SCHEMA
from vfieldlab.polyalg import VectorField2

EX1_P, EX1_Q = "y + x*(x^2+y^2-1)", "-x + y*(x^2+y^2-1)"
EY1_P, EY1_Q = "2*y + x*(x^2+y^2-1)", "-2*x + y*(x^2+y^2-1)"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    return code, doc, err


def test_bracket_example(capsys):
    code, doc, _ = run_json(capsys, "bracket", "--x", EX1_P, EX1_Q, "--y", EY1_P, EY1_Q)
    assert code == 0
    assert doc["result"]["bracket"] == {"P": "0", "Q": "0"} and doc["result"]["zero"] is True
    assert doc["command"] == "bracket" and doc["inputs"]["X"]["P"] == "x^3 + x*y^2 - x + y"


def test_centralizer_example(capsys):
    code, doc, _ = run_json(capsys, "centralizer", "--x", "x", "y", "-N", "3")
    assert code == 0 and doc["result"]["dimension"] == 4
    assert doc["result"]["closed_within_degree"] is True


@pytest.mark.slow
def test_cycles_rotation_center_band(capsys):
    code, doc, _ = run_json(capsys, "cycles", "--x", "y", "-x", "--rmin", "0.2", "--rmax", "2")
    assert code == 0
    assert doc["result"]["cycles"] == []
    assert doc["result"]["center_bands"] == [["0.20000000000000001", "2"]]


def test_leading_minus_components(capsys):
    code, doc, _ = run_json(capsys, "divergence", "--x", "-x", "-y")
    assert code == 0 and doc["result"]["divergence"] == "-2"


# every subcommand, with inputs that keep the run short
SUBCOMMANDS = [
    ["bracket", "--preset", "rotation", "--y", "x^2", "0"],
    ["divergence", "--preset", "example1-x"],
    ["scale", "--preset", "rotation", "--f", "x^2+y^2+1"],
    ["centralizer", "--preset", "rotation", "-N", "3"],
    ["compare-centralizers", "--preset", "rotation", "--f", "x^2+y^2+1", "-N", "3"],
    ["dimension-profile", "--preset", "rotation", "-N", "4"],
    ["first-integrals", "--preset", "rotation", "-N", "4"],
    ["corank", "--preset", "rotation", "-N", "2"],
    ["poisson-check", "--preset", "example1-x", "--y-preset", "example1-y"],
    ["polar", "--x", "x", "-y"],
    ["return-map", "--preset", "vdp", "--r0", "1.5"],
    ["cycles", "--preset", "example1-mirror", "--rmin", "0.5", "--rmax", "1.5"],
    ["multiplier", "--preset", "example1-y", "--r0", "1"],
    ["invariance", "--preset", "example1-mirror", "--y-preset", "rotation", "--rmin", "0.5", "--rmax", "1.5"],
    ["probe-perturbation", "--preset", "homogeneous-n2", "--e", "x^2", "0", "--eps", "1/10"],
    ["verify-paper-examples", "--exact-only"],
]


def _leaves(prefix, value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            _leaves(f"{prefix}.{k}", v, out)
    elif isinstance(value, list):
        for v in value:
            _leaves(prefix, v, out)
    elif isinstance(value, str):
        out.append(value)


@pytest.mark.parametrize("argv", SUBCOMMANDS, ids=[a[0] for a in SUBCOMMANDS])
def test_json_schema_and_text_agree(capsys, argv):
    code, doc, _ = run_json(capsys, *argv)
    assert code == 0
    assert doc["command"] == argv[0]
    tcode, text, _ = run(capsys, *argv)
    assert tcode == 0
    values = []
    _leaves("", doc["result"], values)
    for v in values:
        try:
            float(v)
        except ValueError:
            continue
        assert v in text, f"{v} missing from text output"


def test_subcommand_results(capsys):
    _, doc, _ = run_json(capsys, "corank", "--preset", "rotation", "-N", "2")
    assert doc["result"]["corank"] == 2 and doc["result"]["kernel"] == ["1", "x^2 + y^2"]
    _, doc, _ = run_json(capsys, "compare-centralizers", "--preset", "rotation", "--f", "x^2+y^2+1")
    assert doc["result"]["necessary_conditions_hold"] is False
    _, doc, _ = run_json(capsys, "poisson-check", "--preset", "example1-x", "--y-preset", "example1-y")
    assert doc["result"]["poisson_bracket"] == "0" and doc["result"]["independent"] is True
    _, doc, _ = run_json(capsys, "multiplier", "--preset", "example1-y", "--r0", "1")
    assert abs(float(doc["result"]["multiplier"]) / math.exp(2 * math.pi) - 1) <= 1e-3
    _, doc, _ = run_json(capsys, "dimension-profile", "--preset", "rotation", "-N", "5")
    assert doc["result"]["profile"] == [[1, 2], [2, 2], [3, 4], [4, 4], [5, 6]]


@pytest.mark.parametrize("argv, fragment", [
    (["bracket", "--x", "y + z", "-x", "--preset", "rotation"], "either"),
    (["bracket", "--x", "y + z", "-x", "--y-preset", "rotation"], "component P: unknown variable 'z' at position 4"),
    (["divergence", "--x", "x^-1", "y"], "negative exponent at position 2"),
    (["divergence", "--x", "x", "2y"], "component Q: unexpected"),
    (["centralizer", "--x", "0", "0"], "zero field"),
    (["centralizer", "--preset", "rotation", "-N", "9"], "cap"),
    (["centralizer", "--preset", "homogeneous-n3"], "odd"),
    (["centralizer", "--preset", "nope"], "unknown preset"),
    (["divergence"], "missing field"),
    (["probe-perturbation", "--preset", "rotation", "--e", "x", "0", "--eps", "0.1"], "rational"),
    (["cycles", "--preset", "rotation", "--rmin", "2", "--rmax", "1"], "rmin"),
    (["return-map", "--preset", "rotation", "--r0", "-1"], "positive"),
])
def test_input_errors_exit_2(capsys, argv, fragment):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert fragment in err


def test_input_error_json_report(capsys):
    code, out, err = run(capsys, "--json", "divergence", "--x", "x +", "y")
    assert code == 2 and "position 3" in err
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["result"]["error"] == "ExprSyntaxError"


@pytest.mark.parametrize("argv, name", [
    (["return-map", "--preset", "example1-x", "--r0", "1.5"], "Blowup"),
    (["return-map", "--x", "-x", "-2*y", "--r0", "1", "--alpha", "0.7"], "NoEvent"),
    (["return-map", "--x", "x", "y", "--r0", "1"], "NonTransversal"),
    (["multiplier", "--preset", "vdp", "--r0", "3", "--rtol", "1e-10"], None),
])
def test_numerical_failures_exit_3(capsys, argv, name):
    code, doc, err = run_json(capsys, *argv)
    if name is None:  # vdp at r0=3 returns fine; it is simply not a cycle
        assert code == 0 and doc["result"]["stability"] == "stable"
        return
    assert code == 3
    assert doc["result"]["error"] == name and name in err


def test_argparse_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_crashing_check_keeps_its_row(capsys, monkeypatch):
    def broken(X, Y):
        raise RuntimeError("boom")

    monkeypatch.setattr(polyalg, "lie_bracket", broken)
    code, out, _ = run(capsys, "verify-paper-examples", "--exact-only")
    assert code == 1
    assert "[FAIL] Example 1: [X, Y] = 0" in out and "RuntimeError: boom" in out


def test_verify_exact_only(capsys):
    code, out, _ = run(capsys, "verify-paper-examples", "--exact-only")
    assert code == 0
    assert out.count("[PASS]") == 6 and "[FAIL]" not in out


@pytest.mark.slow
def test_verify_full(capsys):
    code, doc, _ = run_json(capsys, "verify-paper-examples")
    assert code == 0
    rows = doc["result"]["checks"]
    assert len(rows) == 9 and all(r["passed"] for r in rows)
    assert {"claim", "location", "computed", "passed"} <= set(rows[0])


def _flipped_bracket(X, Y):
    # second half of the Jacobian formula with the wrong sign
    P, Q, R, S = X.P, X.Q, Y.P, Y.Q
    return VectorField2(P * R.partial("x") + Q * R.partial("y") + R * P.partial("x") + S * P.partial("y"),
                        P * S.partial("x") + Q * S.partial("y") + R * Q.partial("x") + S * Q.partial("y"))


def test_mutation_bracket_sign(capsys, monkeypatch):
    monkeypatch.setattr(polyalg, "lie_bracket", _flipped_bracket)
    code, doc, _ = run_json(capsys, "verify-paper-examples", "--exact-only")
    assert code == 1
    failed = [r for r in doc["result"]["checks"] if not r["passed"]]
    assert any(r["location"] == "Example 1" and r["claim"].startswith("[X, Y] = 0") for r in failed)
    assert all(r["passed"] for r in doc["result"]["checks"] if r["location"].startswith("Example 2"))


@pytest.mark.slow
def test_mutation_multiplier_without_period(capsys, monkeypatch):
    def bad_multiplier(X, cycle, cfg=flow.DEFAULT_CONFIG):
        return math.exp(flow.quadrature_along(X, cycle.start, polyalg.divergence(X), 1.0, cfg))

    monkeypatch.setattr(cycles, "multiplier", bad_multiplier)
    code, out, _ = run(capsys, "verify-paper-examples")
    assert code == 1
    fails = [ln for ln in out.splitlines() if ln.startswith("[FAIL]")]
    assert any("Example 1: unit circle" in ln for ln in fails)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "vfieldlab", "--json", "divergence", "--preset", "rotation"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["result"]["divergence"] == "0"
