import json

import pytest

from ukp.cli import main
from ukp.core import checksum, render_ukp_instance, write_instance
from ukp.gen import gen_subset_sum

from conftest import COUNTEREXAMPLE


@pytest.fixture
def ce_file(tmp_path):
    path = tmp_path / "ce.ukp"
    write_instance(COUNTEREXAMPLE, path)
    return path


def _json(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.mark.parametrize("alg", ["naive", "oso", "tso", "gfdp", "mtu1", "mtu2"])
def test_solve(ce_file, capsys, alg):
    assert main(["solve", str(ce_file), "--alg", alg, "--stats"]) == 0
    doc = _json(capsys)
    assert doc["value"] == 30 and doc["terminated_by"] == "optimal"
    assert doc["version"] and doc["config"]["alg"] == alg
    assert doc["checksum"] == checksum(render_ukp_instance(COUNTEREXAMPLE))
    assert "stats" in doc


def test_solve_missing_file(tmp_path):
    assert main(["solve", str(tmp_path / "missing.ukp")]) == 2


def test_solve_bad_input(tmp_path):
    bad = tmp_path / "bad.ukp"
    bad.write_text("n: 1\nc: 5\nbegin data\n3 0\nend data\n")
    assert main(["solve", str(bad)]) == 2


def test_solve_timeout(tmp_path):
    big = tmp_path / "big.ukp"
    write_instance(gen_subset_sum(500, 10**3, 5 * 10**5, 5 * 10**6, 10**7, 0), big)
    assert main(["solve", str(big), "--alg", "naive", "--timeout", "0.001"]) == 3


def test_usage_errors(ce_file, capsys):
    assert main(["solve", str(ce_file), "--bogus"]) == 1
    assert main(["solve", str(ce_file), "--alg", "edu"]) == 1
    assert main([]) == 1
    assert main(["solve", str(ce_file), "--alg", "mtu1", "--no-tiebreak"]) == 1
    assert main(["solve", "--help"]) == 0


def test_analyze(ce_file, capsys):
    assert main(["analyze", str(ce_file), "--dominance", "collective", "--periodicity"]) == 0
    doc = _json(capsys)
    assert {"removed_count", "survivor_count", "y_dprime", "reduced_capacity"} <= set(doc)
    assert main(["analyze", str(ce_file)]) == 1


def test_generate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.ukp", tmp_path / "b.ukp"
    for out in (a, b):
        assert main(["generate", "--preset", "breq-128-16", "--n", "64", "--seed", "3",
                     "-o", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(capsys.readouterr().out.split("\n}\n")[0] + "}")
    assert doc["checksum"] == checksum(a.read_text())


def test_generate_needs_params(tmp_path):
    assert main(["generate", "--dist", "subset_sum", "--n", "5", "-o", str(tmp_path / "x")]) == 1
    assert main(["generate", "--dist", "subset_sum", "--n", "5", "--w-min", "1", "--w-max", "9",
                 "--c-min", "10", "--c-max", "20", "-o", str(tmp_path / "x")]) == 0


def test_bench(tmp_path, capsys):
    for s in range(2):
        write_instance(gen_subset_sum(20, 10, 200, 500, 900, s), tmp_path / f"s{s}.ukp")
    report = tmp_path / "r.csv"
    assert main(["bench", "--instances", str(tmp_path / "*.ukp"), "--algs", "oso,mtu1",
                 "--out", str(report), "--format", "json"]) == 0
    doc = _json(capsys)
    assert len(doc["config"]["files"]) == 2
    assert report.exists() and report.with_suffix(".json").exists()
    assert main(["bench", "--instances", str(tmp_path / "none*.ukp")]) == 2


def test_colgen(tmp_path, capsys):
    bpp = tmp_path / "i.bpp"
    bpp.write_text("3\n10\n6\n4\n4\n")
    trace = tmp_path / "t.csv"
    assert main(["colgen", str(bpp), "--pricer", "mtu1", "--trace", str(trace)]) == 0
    doc = _json(capsys)
    assert doc["lp_value"] == pytest.approx(1.5)
    assert {"iterations", "total_pricing_s", "master_s"} <= set(doc)
    assert trace.read_text().startswith("iteration,pricing_s,master_s,lp_value")
    assert main(["colgen", str(bpp), "--pricer", "mtu1", "--profit", "native"]) == 1
