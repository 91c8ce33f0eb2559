"""End-to-end tests of the job-file front end: exit codes, JSON/CSV artifacts."""

import csv
import json
import re

from soficlen.cli import main

T_MINUS_ONE_Z = "1 1 Z Z\n0 0 1@1 -1@0\n"


def _run(tmp_path, job_text, files=(), name="job", argv_extra=()):
    job = tmp_path / f"{name}.ini"
    job.write_text(job_text)
    for fname, content in files:
        (tmp_path / fname).write_text(content)
    out = tmp_path / "out"
    code = main(["run", str(job), "--out", str(out), *argv_extra])
    json_path = out / f"{name}.json"
    csv_path = out / f"{name}.csv"
    report = json.loads(json_path.read_text()) if json_path.exists() else None
    rows = None
    if csv_path.exists():
        with open(csv_path) as fh:
            rows = list(csv.reader(fh))
    return code, report, rows


def test_vrk_job_circulant(tmp_path):
    job = """
[job]
quantity = vrk-fp
schedule = 100,1000

[matrix]
file = f.txt
"""
    code, report, rows = _run(tmp_path, job, files=[("f.txt", T_MINUS_ONE_Z)])
    assert code == 0
    assert report["quantity"] == "vrk"
    assert report["headline"] == 0.001
    assert report["headline_num"] == 1 and report["headline_den"] == 1000
    assert report["series"] == [
        {"d": 100, "seed": 0, "value_num": 1, "value_den": 100},
        {"d": 1000, "seed": 0, "value_num": 1, "value_den": 1000},
    ]
    assert report["snapped"] == {"num": 0, "den": 1}
    assert rows[0] == ["d", "seed", "value_num", "value_den", "value"]
    assert len(rows) == 3


def test_mrk_relative_job(tmp_path):
    job = """
[job]
quantity = mrk-relative
group = Z
ring = Z
schedule = 100
radius = 1

[generators]
n = 1
a1 = 1@1 -1@0
b1 = 1@0
"""
    code, report, rows = _run(tmp_path, job)
    assert code == 0
    assert report["quantity"] == "mrk"
    assert 0.97 <= report["headline"] <= 1.0
    assert report["snapped"] == {"num": 1, "den": 1}
    assert len(rows) == 2


def test_addition_check_job(tmp_path):
    job = """
[job]
quantity = addition-check
schedule = 64,128

[matrix]
file = f.txt
"""
    code, report, rows = _run(tmp_path, job, files=[("f.txt", T_MINUS_ONE_Z)])
    assert code == 0
    assert report["quantity"] == "addition-check"
    assert report["max_residual_routes"] == 0.0
    assert report["max_residual_addition"] == 0.0
    assert len(rows) == 3


def test_folner_compare_job(tmp_path):
    job = """
[job]
quantity = folner
group = Z
ring = Z
schedule = 200
boxes = 20,100
tolerance = 0.02

[generators]
n = 1
a1 = 1@1 -1@0
"""
    code, report, rows = _run(tmp_path, job)
    assert code == 0
    assert report["oracle"]["kind"] == "folner"
    assert report["oracle"]["series"][-1]["value"] == 1.0
    assert report["compare"]["passed"] is True
    assert report["compare"]["residual"] <= 0.02


def test_folner_compare_failing_tolerance(tmp_path):
    job = """
[job]
quantity = folner
group = Z
ring = Z
schedule = 100
boxes = 100
tolerance = 0.000001

[generators]
n = 1
a1 = 1@1 -1@0
"""
    code, report, rows = _run(tmp_path, job)
    assert code == 2
    assert report["compare"]["passed"] is False


def test_finite_oracle_job(tmp_path):
    table = "2\n0 1\n1 0\n"
    job = """
[job]
quantity = finite-oracle
group = finite:z2.table
ring = Q

[matrix]
file = f.txt
"""
    matrix = "1 1 Q finite\n0 0 1@0 1@1\n"
    code, report, rows = _run(tmp_path, job,
                              files=[("z2.table", table), ("f.txt", matrix)])
    assert code == 0
    assert report["headline"] == 0.5
    assert report["oracle"] == {"kind": "finite-group", "num": 1, "den": 2,
                                "value": 0.5}
    assert report["compare"]["residual"] == 0.0
    assert report["compare"]["passed"] is True


def test_laurent_oracle_job(tmp_path):
    job = """
[job]
quantity = laurent-oracle
dims = 8x8

[matrix]
file = f.txt
"""
    matrix = "1 1 Z Z^2\n0 0 1@1,0 -2@0,0\n"
    code, report, rows = _run(tmp_path, job, files=[("f.txt", matrix)])
    assert code == 0
    assert report["headline"] == 0.0
    assert report["oracle"]["kind"] == "laurent"
    assert report["oracle"]["rank"] == 1
    assert report["compare"]["passed"] is True


def test_defect_job(tmp_path):
    job = """
[job]
quantity = defect
group = F2
schedule = 100
seeds = 1
radius = 1
"""
    code, report, rows = _run(tmp_path, job)
    assert code == 0
    assert report["quantity"] == "defect"
    assert len(report["window"]) == 5
    point = report["series"][0]
    assert point["summary"]["min_multiplicativity"] == 1.0
    assert 0.9 <= point["summary"]["min_separation"] <= 1.0
    assert rows[0][0] == "d"


def test_direct_finite_job(tmp_path):
    job = """
[job]
quantity = direct-finite

[matrix]
file = a.txt

[matrix_b]
file = b.txt
"""
    a = "1 1 Z F2\n0 0 1@s1\n"
    b = "1 1 Z F2\n0 0 1@s1^-1\n"
    code, report, rows = _run(tmp_path, job, files=[("a.txt", a), ("b.txt", b)])
    assert code == 0
    assert report["verdict"] == "confirmed_two_sided"
    assert report["ba"] is None


def test_unknown_quantity_exits_one(tmp_path, capsys):
    job = "[job]\nquantity = eigenvalues\n"
    path = tmp_path / "bad.ini"
    path.write_text(job)
    assert main(["run", str(path)]) == 1
    err = capsys.readouterr().err
    assert "error:" in err and "eigenvalues" in err


def test_missing_matrix_section_exits_one(tmp_path, capsys):
    job = "[job]\nquantity = vrk-fp\nschedule = 10\n"
    path = tmp_path / "bad.ini"
    path.write_text(job)
    assert main(["run", str(path)]) == 1
    assert "[matrix]" in capsys.readouterr().err


def test_vrk_over_prime_field_refused(tmp_path, capsys):
    job = """
[job]
quantity = vrk-fp
schedule = 10

[matrix]
file = f.txt
"""
    matrix = "1 1 GF(5) Z\n0 0 1@1 -1@0\n"
    code, report, rows = _run(tmp_path, job, files=[("f.txt", matrix)])
    assert code == 1
    assert report is None
    assert "mean-rank only" in capsys.readouterr().err


def test_malformed_matrix_reports_position(tmp_path, capsys):
    job = """
[job]
quantity = vrk-fp
schedule = 10

[matrix]
file = f.txt
"""
    matrix = "1 1 Z Z\n0 0 1@1\n0 0 2@0\n"
    code, report, rows = _run(tmp_path, job, files=[("f.txt", matrix)])
    assert code == 1
    assert "line 3" in capsys.readouterr().err


def test_validate_subcommand(tmp_path, capsys):
    job = """
[job]
quantity = vrk-fp
schedule = 10,20

[matrix]
file = f.txt
"""
    path = tmp_path / "check.ini"
    path.write_text(job)
    (tmp_path / "f.txt").write_text(T_MINUS_ONE_Z)
    assert main(["validate", str(path)]) == 0
    out = capsys.readouterr().out
    assert "ok" in out and "points: 2" in out
    assert main(["validate", str(tmp_path / "missing.ini")]) == 1


def test_inline_comments_and_seed_ranges(tmp_path):
    job = """
[job]
quantity = vrk-fp       ; quantity under test
schedule = 10,20
seeds = 1..3

[matrix]
file = f.txt
"""
    code, report, rows = _run(tmp_path, job, files=[("f.txt", T_MINUS_ONE_Z)])
    assert code == 0
    assert len(rows) == 1 + 2 * 3  # header + |ds| x |seeds|
    seeds = {p["seed"] for p in report["series"]}
    assert seeds == {1, 2, 3}


def _strip_timestamp(text):
    return re.sub(r'"generated_at": "[^"]*"', '"generated_at": ""', text)


def test_reruns_are_byte_identical(tmp_path):
    job = """
[job]
quantity = vrk-fp
schedule = 20,40
seeds = 1,2

[matrix]
file = f.txt
"""
    (tmp_path / "f.txt").write_text(T_MINUS_ONE_Z)
    path = tmp_path / "again.ini"
    path.write_text(job)
    outs = []
    for run in ("one", "two"):
        out = tmp_path / run
        assert main(["run", str(path), "--out", str(out)]) == 0
        outs.append(_strip_timestamp((out / "again.json").read_text()))
    assert outs[0] == outs[1]


def test_parallel_run_matches_serial(tmp_path):
    job = """
[job]
quantity = vrk-fp
group = F2
schedule = 30,60
seeds = 1,2

[matrix]
file = f.txt
"""
    matrix = "1 1 Z F2\n0 0 1@s1 -1@e\n"
    (tmp_path / "f.txt").write_text(matrix)
    path = tmp_path / "par.ini"
    path.write_text(job)
    serial_out = tmp_path / "serial"
    parallel_out = tmp_path / "parallel"
    assert main(["run", str(path), "--out", str(serial_out)]) == 0
    assert main(["run", str(path), "--out", str(parallel_out), "--jobs", "2"]) == 0
    a = _strip_timestamp((serial_out / "par.json").read_text())
    b = _strip_timestamp((parallel_out / "par.json").read_text())
    assert a == b
