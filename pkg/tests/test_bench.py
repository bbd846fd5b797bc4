import csv
import json

import pytest

from ukp import bench
from ukp.bench import (
    BenchRow,
    DisagreementError,
    check_agreement,
    format_summary,
    median_of_reps,
    run_matrix,
    summarize,
    write_report,
)
from ukp.core import write_instance
from ukp.gen import gen_breq, gen_subset_sum

from conftest import COUNTEREXAMPLE


def _row(t, status="optimal", value=1, alg="oso", iid="a"):
    return BenchRow(iid, alg, t, status, value if status == "optimal" else None)


def test_two_algorithms_one_instance():
    rows = run_matrix([("ce", COUNTEREXAMPLE)], ["oso", "mtu1"])
    assert len(rows) == 2
    assert {r.optimal_value for r in rows} == {30}
    assert {r.algorithm for r in rows} == {"oso", "mtu1"}


def test_forced_timeout_records_limit():
    inst = gen_subset_sum(500, 10**3, 5 * 10**5, 5 * 10**6, 10**7, 0)
    (row,) = run_matrix([("big", inst)], ["naive"], timeout=0.001)
    assert row.terminated_by == "timeout" and row.elapsed_s == 0.001
    assert row.optimal_value is None


def test_crash_becomes_error_row(monkeypatch):
    def boom(instance, timeout=None):
        raise RuntimeError("kaboom")

    monkeypatch.setitem(bench.SOLVERS, "oso", boom)
    rows = run_matrix([("ce", COUNTEREXAMPLE)], ["oso", "tso"])
    assert rows[0].terminated_by == "error" and "kaboom" in rows[0].error
    assert rows[1].optimal_value == 30


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        run_matrix([("ce", COUNTEREXAMPLE)], ["edu"])


def test_summary_examples():
    s = summarize([_row(1.0), _row(3.0), _row(5.0, "timeout")])[("default", "oso")]
    assert (s["fin"], s["avg"], s["max"]) == (2, 2.0, 3.0)
    s = summarize([_row(5.0, "timeout"), _row(5.0, "timeout")])[("default", "oso")]
    assert s["fin"] == 0 and s["avg"] is None
    assert "--" in format_summary({("default", "oso"): s})
    s = summarize([_row(1.5)])[("default", "oso")]
    assert s["sd"] is None and s["avg"] == 1.5


def test_agreement_check():
    check_agreement([_row(1.0, value=4), _row(2.0, value=4, alg="tso"), _row(1, "timeout")])
    with pytest.raises(DisagreementError):
        check_agreement([_row(1.0, value=4), _row(2.0, value=5, alg="tso")])


def test_median_of_reps():
    rows = [_row(t) for t in (3.0, 1.0, 2.0)]
    assert [r.elapsed_s for r in median_of_reps(rows)] == [2.0]


def test_files_csv_and_sidecar(tmp_path):
    data = tmp_path / "breq"
    data.mkdir()
    for seed in range(2):
        write_instance(gen_breq(50, seed), data / f"b{seed}.ukp")
    files = sorted(str(p) for p in data.glob("*.ukp"))
    rows = run_matrix(files, ["oso", "tso", "gfdp", "mtu1", "mtu2"], timeout=30)
    again = run_matrix(files, ["oso", "tso", "gfdp", "mtu1", "mtu2"], timeout=30)
    assert [r.optimal_value for r in rows] == [r.optimal_value for r in again]
    assert {r.dataset for r in rows} == {"breq"}
    out = tmp_path / "report.csv"
    sidecar = write_report(rows, out, {"algs": "all"})
    header = next(csv.reader(out.open()))
    assert header[:6] == ["instance_id", "algorithm", "rep", "elapsed_s",
                          "terminated_by", "optimal_value"]
    assert "nodes_expanded" in header and "inner_iterations" in header
    doc = json.loads(sidecar.read_text())
    assert doc["config"] == {"algs": "all"} and len(doc["rows"]) == 10
    assert {s["algorithm"] for s in doc["summary"]} == {"oso", "tso", "gfdp", "mtu1", "mtu2"}


def test_parallel_matches_serial():
    pairs = [(f"b{s}", gen_breq(40, s)) for s in range(3)]
    serial = run_matrix(pairs, ["oso", "mtu1"])
    par = run_matrix(pairs, ["oso", "mtu1"], parallel=2)
    assert [r.optimal_value for r in serial] == [r.optimal_value for r in par]
