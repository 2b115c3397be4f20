import json
import subprocess
import sys

import pytest

from instanton_lab.cli import canonical_json, run


def ok(argv):
    code, text = run(argv)
    assert code == 0, text
    return json.loads(text)


@pytest.fixture(scope="module")
def monad7(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "thooft7.json"
    code, text = run(["fixture", "thooft", "--n", "5", "--p", "7", "--out", str(path)])
    assert (code, text) == (0, "")
    return str(path)


def test_fixture_report_shape(monad7):
    report = ok(["fixture", "thooft", "--n", "2", "--p", "5"])
    assert report["schema"] == 1 and report["command"] == "fixture thooft"
    assert report["config"] == {"n": 2, "p": 5, "seed": 0}
    assert "timing" not in report
    result = report["result"]
    assert result["n"] == 2 and result["field"] == {"p": 5}
    # one coefficient matrix per variable
    assert [len(a) for a in result["A"]] == [6] * 4 and [len(b) for b in result["B"]] == [2] * 4


def test_report_is_canonical(monad7):
    code, text = run(["scan", "multijump", "--monad", monad7])
    assert text == canonical_json(json.loads(text))
    assert run(["scan", "multijump", "--monad", monad7]) == (code, text)


def test_multijump_scan_counts(monad7):
    result = ok(["scan", "multijump", "--monad", monad7])["result"]
    assert result["lines_scanned"] == 2850
    orders = [m["order"] for m in result["matches"]]
    assert orders.count(5) == 8 and min(orders) >= 2


def test_jobs_do_not_change_reports(monad7):
    one = run(["scan", "multijump", "--monad", monad7, "--jobs", "1"])
    many = run(["scan", "multijump", "--monad", monad7, "--jobs", "8"])
    assert one == many


def test_timing_is_opt_in(monad7):
    report = ok(["scan", "order", "--monad", monad7, "--line", "1,0,0,0,0,0", "--timing"])
    assert report["timing"]["seconds"] >= 0
    assert report["result"]["order"] == 5


def test_undecidable_order(monad7):
    code, text = run(["scan", "order", "--monad", monad7, "--line", "0,1,0,0,0,0"])
    assert code == 2
    assert json.loads(text)["error"]["category"] == "undecidable"
    assert ok(["scan", "order", "--monad", monad7, "--line", "0,1,0,0,0,0", "--symplectic"])["result"]["order"] in (0, 1)


def test_invalid_input_exit_code(monad7, tmp_path):
    code, text = run(["scan", "order", "--monad", monad7, "--line", "1,0,0,0,0,1"])
    assert code == 1 and json.loads(text)["error"]["category"] == "validation"
    bad = tmp_path / "bad.json"
    zero_a, zero_b = [[[0]] * 4] * 4, [[[0] * 4]] * 4
    bad.write_text(json.dumps({"field": {"p": 7}, "n": 1, "A": zero_a, "B": zero_b}))
    assert run(["scan", "multijump", "--monad", str(bad)])[0] == 1


def test_io_and_usage_exit_codes(tmp_path):
    assert run(["scan", "multijump", "--monad", str(tmp_path / "missing.json")])[0] == 3
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run(["scan", "multijump", "--monad", str(broken)])[0] == 3
    assert run(["scan", "teleport"])[0] == 64
    assert run(["fixture", "thooft"])[0] == 64
    assert run(["fixture", "thooft", "--n", "2", "--jobs", "0"])[0] == 64


def test_report_files_are_accepted_as_input(monad7, tmp_path):
    report = tmp_path / "report.json"
    report.write_text(run(["fixture", "thooft", "--n", "5", "--p", "7"])[1])
    assert ok(["scan", "multijump", "--monad", str(report)])["result"] == ok(["scan", "multijump", "--monad", monad7])["result"]


def test_net_commands(tmp_path):
    monad = tmp_path / "m.json"
    run(["fixture", "thooft", "--n", "4", "--p", "101", "--out", str(monad)])
    net = tmp_path / "net.json"
    assert run(["net", "at-point", "--monad", str(monad), "--point", "1,7,3,9", "--out", str(net)])[0] == 0
    result = json.loads(net.read_text())["result"]
    assert result["discriminant"]["degree"] == 4 and result["symplectic_solution_dim"] == 1
    spaces = ok(["theta", "spaces", "--net", str(net)])["result"]
    assert spaces["dims"]["theta2"] == 8 and spaces["h1_oc1"] == 1
    beta = ok(["theta", "beta", "--net", str(net)])["result"]
    assert beta["r"] == 1 == beta["stacked_rank"]
    obs = ok(["theta", "obstruction", "--monad", str(monad), "--point", "1,7,3,9", "--random", "5"])["result"]
    assert len(obs["pairs"]) == 5 and obs["distinguished"]["vanishes"]
    assert all(p["vanishes"] == p["in_image"] for p in obs["pairs"])


def test_stability_command(tmp_path):
    net = tmp_path / "block.json"
    zero = [[0] * 4 for _ in range(4)]
    m = [[0, 0, 1, 2], [0, 0, 3, 4], [1, 3, 1, 0], [2, 4, 0, 2]]
    net.write_text(json.dumps({"field": {"p": 5}, "n": 4, "M": [m, zero, m]}))
    result = ok(["net", "stability", "--net", str(net), "--p", "5"])["result"]
    assert result["verdict"] != "stable"
    assert result["witness"] == [[1, 0, 0, 0], [0, 1, 0, 0]]


def test_chow_commands(tmp_path):
    res = ok(["chow", "residual", "--n", "4", "--alpha", "2", "--beta", "2", "--pi", "1", "--chi", "1"])["result"]
    assert res["tu_coeff"] == 16 and res["smooth"]["tu_coeff"] == 16
    data = tmp_path / "kummer.json"
    data.write_text(json.dumps({"n": 5, "alpha": 4, "beta": 4, "pi": 5, "chi": 2, "c1Omega_sq": 0}))
    assert ok(["chow", "residual", "--data", str(data)])["result"]["tu_coeff"] == 32
    flags = ["--alpha", "4", "--beta", "4", "--pi", "5", "--chi", "2", "--c1omega-sq"]
    assert ok(["chow", "identity", *flags, "0"])["result"]["holds"] is True
    assert ok(["chow", "identity", *flags, "1"])["result"]["holds"] is False
    assert ok(["chow", "sym2"])["result"]["h2_coeff"] == 4
    assert run(["chow", "residual", "--n", "4"])[0] == 1


def test_geometry_commands(monad7, tmp_path):
    ngon = ok(["geom", "ngon", "--monad", monad7, "--point", "1,0,0,1"])["result"]
    assert len(ngon["rulings"]) == 6 and len(ngon["vertices"]) == 15
    assert all(v["discriminant"] == 0 for v in ngon["vertices"])
    lines = tmp_path / "lines.json"
    # four rulings x0 = t x1, x2 = t x3 of one regulus
    four = [[0, 1, 1, 1, 1, 0], [0, 1, 4, 4, 2, 0], [0, 1, 5, 5, 4, 0], [0, 1, 2, 2, 4, 0]]
    lines.write_text(json.dumps({"field": {"p": 7}, "lines": four}))
    result = ok(["geom", "transversals", "--lines", str(lines)])["result"]
    assert result["infinite"] is True and result["lines"] is None
    lines.write_text(json.dumps({"field": {"p": 7}, "lines": four[:3]}))
    assert run(["geom", "transversals", "--lines", str(lines)])[0] == 1


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "instanton_lab", "chow", "sym2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["h2_coeff"] == 4
    proc = subprocess.run([sys.executable, "-m", "instanton_lab", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 64 and proc.stdout == ""
