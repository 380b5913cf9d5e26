import csv
import json
import subprocess
import sys

import pytest

from kvwave import cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_eval_step_at_boundary(capsys):
    code, out, _ = run(["eval", "--pulse", "step", "--xi", "0", "--tau", "0.5",
                        "--format", "json"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["value"] == pytest.approx(1.0, abs=1e-10)
    assert rec["status"] == "ok"
    assert rec["function_evals"] > 0
    assert rec["wall_time_ms"] >= 0


def test_eval_text_output_lists_fields(capsys):
    code, out, _ = run(["eval", "--pulse", "step", "--xi", "0.5", "--tau", "0.5"], capsys)
    assert code == 0
    keys = [line.split(":")[0] for line in out.splitlines()]
    for k in ("value", "error_estimate", "function_evals", "wall_time_ms"):
        assert k in keys


def test_eval_integral_and_ilt_agree(capsys):
    vals = []
    for method in ("integral", "ilt"):
        code, out, _ = run(["eval", "--pulse", "delta", "--xi", "0.5", "--tau", "0.5",
                            "--method", method, "--format", "json"], capsys)
        assert code == 0
        vals.append(json.loads(out)["value"])
    assert abs(vals[0] - vals[1]) <= 1e-6


def test_eval_morrison_agrees_with_integral(capsys):
    vals = []
    for method in ("integral", "morrison"):
        code, out, _ = run(["eval", "--pulse", "step", "--xi", "0.5", "--tau", "0.5",
                            "--method", method, "--format", "json"], capsys)
        assert code == 0
        vals.append(json.loads(out)["value"])
    assert abs(vals[0] - vals[1]) <= 1e-5


def test_eval_material_conversion(capsys):
    code, out, _ = run(["eval", "--pulse", "step", "--material", "4,1,2", "--x", "1",
                        "--t", "1", "--format", "json"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert (rec["xi"], rec["tau"]) == (1.0, 0.5)


@pytest.mark.parametrize("argv", [
    ["eval", "--pulse", "step", "--xi", "0.5"],
    ["eval", "--pulse", "step", "--xi", "0.5", "--tau", "1", "--method", "hanin"],
    ["eval", "--pulse", "delta", "--xi", "0.5", "--tau", "1", "--method", "morrison"],
    ["eval", "--pulse", "step", "--xi", "-1", "--tau", "1"],
    ["eval", "--pulse", "step", "--xi", "0.5", "--tau", "1", "--method", "nope"],
    ["eval", "--pulse", "delta", "--xi", "0", "--tau", "1", "--method", "ilt"],
    ["eval", "--pulse", "square", "--xi", "0.5", "--tau", "1"],
    ["eval", "--pulse", "step", "--material", "1,1", "--x", "1", "--t", "1"],
    ["sweep", "--pulse", "step", "--points", "1"],
    ["sweep", "--pulse", "step", "--from", "2", "--to", "1"],
    ["sweep", "--pulse", "step", "--fix", "tau=0.5", "--from", "0", "--spacing", "log"],
    ["sweep", "--pulse", "step", "--fix", "eta=1"],
    ["compare", "--pulse", "step", "--methods", "integral"],
    ["bench", "--pulse", "step", "--repeats", "2", "--points", "2"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_one(argv, capsys):
    with pytest.raises(SystemExit) as info:
        sys.exit(cli.main(argv))
    assert info.value.code == 1


def test_eval_nonconvergence_exits_two(capsys):
    code, _, err = run(["eval", "--pulse", "step", "--xi", "0.5", "--tau", "10",
                        "--method", "morrison"], capsys)
    assert code == 2
    assert "did not converge" in err


def test_smoke_sweep_at_boundary(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(["sweep", "--pulse", "step", "--fix", "xi=0", "--from", "0.5",
                      "--to", "1", "--points", "2", "--methods", "integral",
                      "--out", str(out)], capsys)
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == cli.CSV_HEADER
    assert len(rows) == 2
    for row in rows:
        assert float(row["value"]) == pytest.approx(1.0, abs=1e-10)
        assert row["status"] == "ok"


def test_sweep_row_order_and_format(tmp_path, capsys):
    out = tmp_path / "s.csv"
    methods = "integral,ilt,asym-small-tau,asym-large-tau"
    code, _, _ = run(["sweep", "--pulse", "step", "--fix", "xi=0.5", "--points", "3",
                      "--methods", methods, "--out", str(out)], capsys)
    assert code == 0
    rows = read_csv(out)
    assert [r["method"] for r in rows] == methods.split(",") * 3
    assert [float(r["tau"]) for r in rows[::4]] == [0.05, 2.525, 5.0]
    for r in rows:
        mantissa = r["value"].split("e")[0].lstrip("-").replace(".", "")
        assert len(mantissa) == 17
    closed = [r for r in rows if r["method"].startswith("asym")]
    assert all(r["error_estimate"] == "" and r["function_evals"] == "0" for r in closed)


def test_sweep_log_spacing(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(["sweep", "--pulse", "delta", "--fix", "tau=0.5", "--from", "0.01",
                      "--to", "1", "--points", "3", "--spacing", "log",
                      "--methods", "integral", "--out", str(out)], capsys)
    assert code == 0
    xs = [float(r["xi"]) for r in read_csv(out)]
    assert xs == pytest.approx([0.01, 0.1, 1.0])


def test_sweep_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        code, _, _ = run(["sweep", "--pulse", "delta", "--fix", "tau=0.5", "--points", "6",
                          "--methods", "integral,ilt,hanin,asym-small-xi",
                          "--out", str(p)], capsys)
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sweep_failures_are_rows_and_exit_two(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, err = run(["sweep", "--pulse", "step", "--fix", "xi=0.5", "--from", "6",
                        "--to", "10", "--points", "3", "--methods", "morrison,integral",
                        "--out", str(out)], capsys)
    assert code == 2
    rows = read_csv(out)
    assert len(rows) == 6
    last = rows[4]
    assert (last["method"], last["status"], last["value"]) == ("morrison", "no_converge", "")
    assert rows[5]["status"] == "ok"
    assert "failed" in err


def test_sweep_refusals_become_failed_rows(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, err = run(["sweep", "--pulse", "delta", "--fix", "tau=0.5", "--from", "0",
                        "--to", "1", "--points", "2", "--methods", "hanin",
                        "--out", str(out)], capsys)
    assert code == 2
    assert read_csv(out)[0]["status"] == "no_converge"
    assert "warning" in err


def test_compare_report_schema(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, _, _ = run(["compare", "--pulse", "step", "--fix", "xi=0.5", "--points", "5",
                      "--methods", "integral,ilt", "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert set(rep) == {"pulse", "method_a", "method_b", "grid", "max_abs_discrepancy",
                        "argmax", "wall_time_ms"}
    assert (rep["method_a"], rep["method_b"]) == ("integral", "ilt")
    assert set(rep["grid"][0]) == {"xi", "tau", "a", "b", "abs_diff"}
    assert rep["max_abs_discrepancy"] == max(p["abs_diff"] for p in rep["grid"])
    assert {"xi": rep["argmax"]["xi"], "tau": rep["argmax"]["tau"]} in [
        {"xi": p["xi"], "tau": p["tau"]} for p in rep["grid"]]
    assert rep["max_abs_discrepancy"] <= 1e-6
    assert set(rep["wall_time_ms"]) == {"a", "b"}


def test_compare_is_symmetric(capsys):
    reps = []
    for methods in ("integral,hanin", "hanin,integral"):
        code, out, _ = run(["compare", "--pulse", "delta", "--fix", "tau=0.5",
                            "--points", "5", "--methods", methods], capsys)
        assert code == 0
        reps.append(json.loads(out))
    assert reps[0]["max_abs_discrepancy"] == reps[1]["max_abs_discrepancy"]
    assert reps[0]["argmax"] == reps[1]["argmax"]


def test_compare_dozio_report(capsys):
    code, out, _ = run(["compare", "--pulse", "delta", "--fix", "xi=0.5", "--points", "4",
                        "--methods", "integral,dozio"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["max_abs_discrepancy"] > 0


def test_bench_product_grid(capsys):
    code, out, _ = run(["bench", "--pulse", "delta", "--xi", "0.25,0.5", "--tau", "0.5,1",
                        "--methods", "integral,ilt,hanin", "--repeats", "3"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert len(rep["points"]) == 4
    for point in rep["points"]:
        assert set(point["results"]) == {"integral", "ilt", "hanin"}
        for res in point["results"].values():
            assert len(res["samples_ms"]) == 3
            assert res["median_ms"] == sorted(res["samples_ms"])[1]
            assert res["status"] == "ok"


def test_bench_records_morrison_status(capsys):
    code, out, _ = run(["bench", "--pulse", "step", "--xi", "0.5", "--tau", "6,10",
                        "--methods", "morrison", "--repeats", "3"], capsys)
    assert code == 2
    statuses = [p["results"]["morrison"]["status"] for p in json.loads(out)["points"]]
    assert statuses == ["ok", "no_converge"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kvwave", "eval", "--pulse", "step",
                           "--xi", "0", "--tau", "0.5", "--format", "json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"
    proc = subprocess.run([sys.executable, "-m", "kvwave", "eval", "--pulse"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
