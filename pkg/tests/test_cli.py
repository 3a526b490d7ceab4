import io
import json
import sys

import pytest

from smallheight import cli
from smallheight.serialize import dumps, loads


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_weil_three_halves(capsys):
    code, out, _ = run(capsys, "weil", "3/2")
    assert code == 0
    assert json.loads(out)["weil_height"]["exact"] == "3"


def test_height_from_stdin(capsys, monkeypatch):
    code, out, _ = run(capsys, "height", stdin="[3, 4]", monkeypatch=monkeypatch)
    rep = json.loads(out)
    assert code == 0
    assert (rep["H"]["exact"], rep["cal_H"]["exact"], rep["h"]["exact"]) == ("4", "5", "4")


def test_avoid_example(capsys, data_dir):
    code, out, _ = run(capsys, "avoid", str(data_dir / "q_x1x2.json"))
    rep = json.loads(out)
    assert code == 0
    assert rep["verdict"] == "certified"
    assert rep["certificate"]["point"] == ["1", "1"]
    assert rep["bound"]["interval"] == ["5.656854", "5.656855"]
    assert "timing_seconds" not in rep


def test_avoid_no_point(capsys, data_dir):
    code, out, _ = run(capsys, "avoid", str(data_dir / "v_equals_u1.json"))
    assert code == 2
    assert json.loads(out)["verdict"] == "no-point-exists"


def test_avoid_function_field(capsys, data_dir):
    code, out, _ = run(capsys, "avoid", str(data_dir / "f3_x1x2.json"))
    rep = json.loads(out)
    assert code == 0 and rep["bound"]["exact"] == "1"


def test_subspace_and_siegel(capsys, data_dir):
    code, out, _ = run(capsys, "subspace", str(data_dir / "qi_kernel.json"))
    rep = json.loads(out)
    assert code == 0 and rep["duality_ok"] and rep["HV"]["exact"] == "sqrt(2)"
    code, out, _ = run(capsys, "siegel", str(data_dir / "qi_kernel.json"))
    assert code == 0 and json.loads(out)["siegel"]["status"] == "certified"


def test_count_lattice(capsys, data_dir):
    code, out, _ = run(capsys, "count-lattice", str(data_dir / "lattices.json"))
    rep = json.loads(out)
    assert code == 0
    assert [r["exact"] for r in rep["results"]] == [9, 15, 7]


def test_twisted(capsys, data_dir):
    code, out, _ = run(capsys, "twisted", str(data_dir / "twisted.json"))
    assert code == 0 and json.loads(out)["ok"]


@pytest.mark.parametrize("argv,key,value", [
    (["grid", "--field", "Q", "--R", "2"], "count", 5),
    (["grid", "--field", "Q(sqrt(-1))", "--R", "3"], "count", 29),
    (["grid", "--field", "F3(t)", "--M", "5"], "lemma_ok", True),
])
def test_grid(capsys, argv, key, value):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and json.loads(out)[key] == value


def test_grid_lower_bound_identity(capsys):
    code, out, _ = run(capsys, "grid", "--field", "F3(t)", "--M", "5")
    rep = json.loads(out)
    assert rep["R"]["exact"] == "9" and rep["lower"]["exact"] == "6"


@pytest.mark.parametrize("argv", [
    ["height", "[1, \"x\"]"],
    ["weil", "1/0"],
    ["height", "[1]", "--field", "Q(sqrt(4))"],
    ["avoid", "/nonexistent/problem.json"],
    ["grid", "--field", "Q"],
    ["verify", "--suite", "nope"],
])
def test_malformed_exit_3(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3
    assert "error" in err


def test_schema_violation(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"field": {"kind": "rational"}, "subspace": {"basis": "nope"}}))
    assert run(capsys, "avoid", str(p))[0] == 3
    p.write_text("{not json")
    assert run(capsys, "avoid", str(p))[0] == 3


def test_budget_exhausted_exit_5(capsys, tmp_path):
    p = tmp_path / "big.json"
    p.write_text(json.dumps({"field": {"kind": "rational"},
                             "subspace": {"basis": [["97", "89", "83", "79", "73", "71"],
                                                   ["61", "-59", "53", "47", "-43", "41"]]}}))
    code, _, _ = run(capsys, "siegel", str(p), "--budget", "3")
    assert code == 5


def test_unresolved_exit_4(capsys, monkeypatch, data_dir):
    from smallheight.certified import UnresolvedComparison

    def boom(*a, **k):
        raise UnresolvedComparison("forced")
    monkeypatch.setattr(cli.HT, "weil_height", boom)
    assert run(capsys, "weil", "2")[0] == 4


def test_deterministic_and_roundtrip(capsys, data_dir):
    outs = [run(capsys, "avoid", str(data_dir / "q2_line.json"))[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert dumps(loads(outs[0])) == outs[0]


def test_timing_flag(capsys, data_dir):
    _, out, _ = run(capsys, "avoid", str(data_dir / "q_x1x2.json"), "--timing")
    assert "timing_seconds" in json.loads(out)


def test_text_format(capsys, data_dir):
    code, out, _ = run(capsys, "avoid", str(data_dir / "q_x1x2.json"), "--format", "text")
    assert code == 0
    assert "verdict: certified" in out
    assert "4*sqrt(2) in [5.656854, 5.656855]" in out


def test_precision_flag(capsys):
    import smallheight.certified as C
    code, out, _ = run(capsys, "height", "[3, 4]", "--precision", "128")
    assert code == 0
    assert C.START_BITS == 128
    assert len(json.loads(out)["H"]["interval"][0].split(".")[1]) == 12
    C.set_start_bits(64)
    assert run(capsys, "height", "[1]", "--precision", "0")[0] == 3


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "tightness", "--seed", "3")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["seed"] == 3
    assert "elapsed_seconds" not in rep["results"][0]


def test_module_entry_point(data_dir):
    import subprocess
    r = subprocess.run([sys.executable, "-m", "smallheight", "weil", "3/2"], capture_output=True, text=True)
    assert r.returncode == 0 and '"exact": "3"' in r.stdout
