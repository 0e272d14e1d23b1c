import json

import pytest

from yamabe_lab.cli import build_parser, main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _strip_timestamp(text):
    data = json.loads(text)
    data.pop("timestamp")
    return json.dumps(data, sort_keys=True)


def test_verify_default_passes(capsys):
    code, out, _ = _run(capsys, "verify")
    report = json.loads(out)
    assert code == 0
    assert report["passed"] and report["schema"] == 1
    assert len(report["checks"]) >= 20
    assert all(c["anchor"] for c in report["checks"])
    assert report["config"]["seed"] == 42 and report["config"]["samples"] == 1_000_000


def test_verify_small_budget_fails(capsys):
    code, out, err = _run(capsys, "verify", "--samples", "10")
    assert code == 1
    reasons = [c["reason"] for c in json.loads(out)["checks"] if not c["passed"]]
    assert reasons and all("insufficient budget" in r for r in reasons)
    assert "FAIL" in err


def test_verify_is_deterministic(capsys):
    a = _run(capsys, "verify", "--samples", "2000")[1]
    b = _run(capsys, "verify", "--samples", "2000")[1]
    assert _strip_timestamp(a) == _strip_timestamp(b)


@pytest.mark.parametrize("argv", [
    ["verify", "--bogus"],
    ["frobnicate"],
    [],
    ["scan", "--n-min", "5"],
    ["scan", "--n-min", "60", "--n-max", "50"],
    ["eps-star", "--n", "8"],
    ["verify", "--samples", "1"],
    ["verify", "--tol", "oops"],
])
def test_usage_errors_exit_two(capsys, argv):
    assert main(argv) == 2


def test_scan_full_range(capsys):
    code, out, err = _run(capsys, "scan", "--n-min", "11", "--n-max", "100")
    assert code == 0
    assert "first certified dimension: 52" in err
    assert json.loads(out)["first_certified"] == 52


def test_scan_below_threshold(capsys):
    code, out, err = _run(capsys, "scan", "--n-min", "11", "--n-max", "51")
    assert "none certified" in err
    assert json.loads(out)["first_certified"] is None


def test_scan_single_row_csv(capsys):
    code, out, _ = _run(capsys, "scan", "--n-min", "52", "--n-max", "52", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "n,discriminant,eps_star,F_at_star,d2F,bracket1,bracket2,eig_min,certified"
    row = lines[1].split(",")
    assert len(lines) == 2 and row[0] == "52" and row[-1] == "1"
    assert float(row[2]) == 0.7071067811865476


def test_eps_star_52(capsys):
    code, out, _ = _run(capsys, "eps-star", "--n", "52")
    rep = json.loads(out)
    assert code == 0
    assert rep["discriminant"] == pytest.approx(0.0204081632653, rel=1e-10)
    assert rep["eps_star"] == pytest.approx(0.70710678118654, rel=1e-12)
    assert rep["certified_min"] and rep["in_omega"]


def test_eps_star_51_fails(capsys):
    code, out, _ = _run(capsys, "eps-star", "--n", "51")
    assert code == 1
    assert not json.loads(out)["certified_min"]


def test_hessian_command(capsys):
    code, out, _ = _run(capsys, "hessian", "--n", "12", "--eps", "0.4", "--samples", "200000")
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert len(rep["closed"]) == 12


def test_curvature_order_test(capsys):
    code, out, _ = _run(capsys, "curvature", "--order-test", "--format", "csv")
    rows = out.strip().splitlines()
    assert code == 0
    assert rows[0] == "n,field_seed,slope" and len(rows) == 7
    assert all(2.7 <= float(r.split(",")[2]) <= 3.3 for r in rows[1:])


def test_energy_reports_exponents(capsys):
    code, out, _ = _run(capsys, "energy", "--samples", "64", "--mu", "0.1", "--lambda", "0.02")
    rep = json.loads(out)
    assert code in (0, 1)
    names = [c["name"] for c in rep["checks"]]
    assert names == ["quadratic energy scaling identity", "A1 lambda-exponent", "A12 lambda-exponent"]
    assert rep["config"]["lambda"] == 0.02


def test_output_file_and_tolerances(tmp_path, capsys):
    path = tmp_path / "r.json"
    code = main(["eps-star", "--n", "60", "--out", str(path), "--tol", "grad=1e-9"])
    assert code == 0
    rep = json.loads(path.read_text(encoding="utf-8"))
    assert rep["config"]["tolerances"] == {"grad": 1e-9}
    assert rep["command"] == "eps-star"


def test_parser_lists_all_commands():
    parser = build_parser()
    text = parser.format_help()
    for cmd in ("verify", "scan", "eps-star", "hessian", "curvature", "energy"):
        assert cmd in text
