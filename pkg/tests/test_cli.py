import csv
import io
import shutil
import subprocess
import sys
from decimal import Decimal

import pytest

from permocc import cli, fixtures
from permocc.oracle import brute_histogram
from permocc.series import SeriesTable, write_sequence


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_count_2413(capsys):
    code, out, _ = run(capsys, "count", "--pattern", "2413", "--n", "7")
    assert code == 0
    psi = {int(r["r"]): int(r["psi"]) for r in rows(out)}
    assert psi[1] == 402


def test_count_21_matches_brute_force(capsys):
    code, out, _ = run(capsys, "count", "--pattern", "21", "--n", "4")
    assert code == 0
    assert {int(r["r"]): int(r["psi"]) for r in rows(out)} == brute_histogram(4, (2, 1))


def test_count_pattern_longer_than_n(capsys):
    code, out, _ = run(capsys, "count", "--pattern", "1234", "--n", "3")
    assert (code, out) == (0, "n,pattern,r,psi\n3,1234,0,6\n")


def test_count_range_and_several_patterns(capsys, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "count", "--pattern", "132", "--pattern", "1,2,3",
                       "--n", "3", "--max-n", "5", "--basis", "rotation", "--out", str(target))
    assert code == 0 and out == ""
    got = rows(target.read_text())
    assert {(r["n"], r["pattern"]) for r in got} == {
        (str(n), p) for n in (3, 4, 5) for p in ("132", "123")
    }


def test_count_invalid_pattern(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["count", "--pattern", "1224", "--n", "4"])
    assert info.value.code == 2


def test_count_requires_pattern_and_n(capsys):
    assert run(capsys, "count", "--n", "4")[0] == cli.EXIT_USAGE
    assert run(capsys, "count", "--pattern", "12")[0] == cli.EXIT_USAGE
    assert run(capsys, "count", "--pattern", "12", "--n", "0")[0] == cli.EXIT_USAGE


def test_mem_cap_floor_and_abort(capsys):
    assert run(capsys, "count", "--pattern", "12", "--n", "3", "--mem-cap", "1M")[0] == cli.EXIT_USAGE
    code, _, err = run(capsys, "count", "--pattern", "1324", "--n", "10", "--mem-cap", "64M")
    assert code == cli.EXIT_RESOURCE
    assert "node budget" in err


def test_parse_size():
    assert cli.parse_size("4G") == 4 * 2**30
    assert cli.parse_size("512MiB") == 512 * 2**20
    assert cli.parse_size("1000") == 1000


def test_node_budget_split_between_workers():
    cfg = cli.RunConfig("count", mem_cap=2**30, threads=4)
    assert cfg.node_budget() == 2**30 // (450 * 4)


def test_verify_passes(capsys):
    code, _, err = run(capsys, "verify", "--max-n", "6")
    assert code == 0
    assert "FAIL" not in err
    assert "checks passed" in err


def test_verify_report_to_file(capsys, tmp_path):
    target = tmp_path / "report.txt"
    code, _, _ = run(capsys, "verify", "--max-n", "5", "--out", str(target))
    lines = target.read_text().splitlines()
    assert code == 0
    assert all(l.startswith("PASS") for l in lines[:-1])


def test_verify_detects_corrupted_fixture(capsys, tmp_path):
    bad = tmp_path / "fx"
    shutil.copytree(fixtures.default_dir(), bad)
    path = bad / "class4_2143_r1.txt"
    path.write_text(path.read_text().replace("\n642\n", "\n643\n"))
    code, _, err = run(capsys, "verify", "--max-n", "7", "--fixtures", str(bad))
    assert code == cli.EXIT_FAIL
    assert "FAIL fixture integrity" in err
    assert "pipeline 642, fixture 643" in err


def test_verify_missing_fixtures(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--fixtures", str(tmp_path))
    assert code == cli.EXIT_USAGE
    assert "MANIFEST" in err


def test_wilf_k3(capsys):
    code, out, _ = run(capsys, "wilf", "--k", "3", "--max-n", "8")
    assert code == 0
    assert out.splitlines() == ["-\t123 321", "-\t132 213 231 312"]


def test_wilf_coarse_partition_reported_without_error(capsys):
    code, out, err = run(capsys, "wilf", "--k", "4", "--max-n", "5")
    assert code == 0
    assert len(out.splitlines()) < 7
    assert "reference has 7" in err


def test_wilf_rejects_other_k(capsys):
    assert run(capsys, "wilf", "--k", "5")[0] == cli.EXIT_USAGE


def test_formulas(capsys):
    code, out, _ = run(capsys, "formulas", "--pattern", "123", "--r", "0", "--max-n", "5")
    assert code == 0
    assert [int(r["psi"]) for r in rows(out)] == [1, 1, 2, 5, 14, 42]


def test_formulas_match_pipeline(capsys):
    _, f, _ = run(capsys, "formulas", "--pattern", "123", "--r", "3", "--max-n", "12")
    _, c, _ = run(capsys, "count", "--pattern", "123", "--n", "1", "--max-n", "9")
    want = {int(r["n"]): int(r["psi"]) for r in rows(f)}
    got = {int(r["n"]): int(r["psi"]) for r in rows(c) if r["r"] == "3"}
    for n in range(1, 10):
        assert got.get(n, 0) == want[n]


def test_formulas_unsupported(capsys):
    code, _, err = run(capsys, "formulas", "--pattern", "123", "--r", "7")
    assert code == cli.EXIT_USAGE and "unsupported" in err
    assert run(capsys, "formulas", "--pattern", "132", "--r", "4")[0] == cli.EXIT_USAGE
    assert run(capsys, "formulas", "--pattern", "1234")[0] == cli.EXIT_USAGE


def test_analyze_synthetic(capsys, tmp_path):
    scale = 10**40
    s = SeriesTable("syn", 1, [9**n * scale // n**4 for n in range(1, 41)])
    path = tmp_path / "syn.txt"
    path.write_text(write_sequence(s))
    code, out, _ = run(capsys, "analyze", str(path), "--mu", "9")
    assert code == 0
    q = [Decimal(r["q[g[syn]]"]) for r in rows(out) if r["q[g[syn]]"]]
    assert abs(q[-1] + 4) < Decimal("0.01")


def test_analyze_formulas_output(capsys, tmp_path):
    path = tmp_path / "p1.csv"
    assert run(capsys, "formulas", "--pattern", "123", "--r", "1", "--max-n", "60", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "analyze", str(path), "--mu", "4")
    assert code == 0
    last = rows(out)[-1]
    assert last["n"] == "60"
    assert -1.55 <= float(list(last.values())[-1]) <= -1.45


def test_analyze_amplitude_against_reference(capsys):
    d = fixtures.default_dir()
    code, out, _ = run(capsys, "analyze", str(d / "A217057_prefix.txt"), "--mu", "9",
                       "--reference", str(d / "A005802_prefix.txt"), "--power", "0")
    assert code == 0
    amp = [float(list(r.values())[-1]) for r in rows(out) if list(r.values())[-1]]
    assert all(a < b for a, b in zip(amp[-5:], amp[-4:]))
    assert 0.3 < amp[-1] < 0.6


def test_analyze_malformed(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1\n2\n")
    assert run(capsys, "analyze", str(path))[0] == cli.EXIT_USAGE
    assert run(capsys, "analyze", str(tmp_path / "missing.txt"))[0] == cli.EXIT_USAGE


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "permocc", "count", "--pattern", "12", "--n", "3"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[1:] == ["3,12,0,1", "3,12,1,2", "3,12,2,2", "3,12,3,1"]
