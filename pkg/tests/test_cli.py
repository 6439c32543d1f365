import csv
import io
import json
import subprocess
import sys

import pytest

from diagsolve.harness.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_search_and_count(capsys):
    code, out, _ = run(capsys, "search", "--form", "k=4 a=1,1,-17,-17", "--max-norm", "6")
    assert code == 0
    assert json.loads(out)["found"] == {"witness": [2, 1, 1, 0], "norm": 2}
    code, out, _ = run(capsys, "count", "--form", "k=3 a=1,1,-1,-1", "--box", "1")
    assert json.loads(out)["count"] == 6


def test_analyze_insoluble_form(capsys):
    code, out, _ = run(capsys, "analyze", "--form", "k=3 a=1,-2,7,-14", "--mode", "heuristic",
                       "--integral-samples", "20000", "--box", "5", "--series-q", "30")
    res = json.loads(out)
    assert code == 0
    assert res["local"]["overall"] == "locally_insoluble" and res["local"]["obstruction"] == 7
    assert res["prediction"]["rho_predicted"] == 0.0
    assert res["certificate"]["value"] is None


def test_exit_codes(capsys):
    code, _, err = run(capsys, "count", "--form", "k=3 a=1,0", "--box", "1")
    assert code == 2 and "error:" in err
    code, _, _ = run(capsys, "search", "--form", "k=3 a=1,-2,7,-14,49,-98", "--max-norm", "50", "--budget", "100")
    assert code == 3
    with pytest.raises(SystemExit):
        main(["survey", "local", "--k", "3"])


def test_survey_and_export(capsys, tmp_path):
    store = tmp_path / "runs.jsonl"
    code, out, _ = run(capsys, "survey", "local", "--k", "3", "--s", "5", "--A", "5", "--n", "6",
                       "--seed", "3", "--out", str(store), "--mode", "heuristic")
    assert code == 0 and "kind=local_density" in out and "95% CI" in out
    run(capsys, "survey", "hasse", "--k", "3", "--s", "4", "--A", "3", "--B", "2", "--n", "4",
        "--seed", "1", "--out", str(store), "--mode", "heuristic")
    code, out, _ = run(capsys, "export", "--in", str(store))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["kind"] for r in rows] == ["local_density", "hasse"]
    assert rows[0]["params.k"] == "3" and rows[1]["results.found.n"]


def test_exact_commands(capsys):
    assert json.loads(run(capsys, "xi", "--k", "3", "--s", "3", "--A", "1", "--B", "1")[1])["xi"] == 48
    assert json.loads(run(capsys, "upsilon", "--k", "3", "--t", "1", "--A", "1", "--B", "1")[1])["upsilon"] == 16
    assert json.loads(run(capsys, "pairs", "--B", "1", "--d", "2", "--K", "3")[1])["pairs"] == 5
    code, out, _ = run(capsys, "lattice", "check-duality", "--n", "4", "--trials", "50", "--seed", "1")
    assert code == 0 and "PASS" in out


def test_adversarial_commands(capsys):
    res = json.loads(run(capsys, "adversarial", "pq", "--k", "3", "--t", "2", "--p", "7")[1])
    assert res["verified"] and res["padic_at_p"]["status"] == "insoluble"
    res = json.loads(run(capsys, "adversarial", "ab", "--k", "4", "--t", "2", "--a", "1", "--b", "17")[1])
    assert res["verified"] and res["solutions_checked"] > 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "diagsolve", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip().endswith("0.1.0")
