"""End-to-end tests of the command-line surface."""

import csv
import json
import pathlib
import shutil
from math import gcd

import pytest

from divmatch.census import census_row
from divmatch.cli import main

DATA = pathlib.Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_matchable_decisions(capsys):
    code, out, _ = run(capsys, "matchable", "8")
    assert code == 0
    assert "not matchable" in out
    assert "p=2, tau=4, r=0" in out
    code, out, _ = run(capsys, "matchable", "18")
    assert code == 0 and "18 is matchable" in out
    # 4 is the one multiple of 4 that still matches
    code, out, _ = run(capsys, "matchable", "4")
    assert code == 0 and "4 is matchable" in out


def test_alpha_digits(capsys):
    code, out, _ = run(capsys, "alpha", "--digits", "14")
    assert code == 0
    assert out.strip() == "0.72199023441955"


def test_match_verify_roundtrip(tmp_path, capsys):
    for n in (1, 2, 18, 81, 135, 210, 2310):
        path = tmp_path / f"cert{n}.json"
        code, _, _ = run(capsys, "match", str(n), "--out", str(path))
        assert code == 0
        code, out, _ = run(capsys, "verify-cert", str(path))
        assert code == 0 and "valid coprime matching" in out


def test_match_nonmatchable_exits_1(capsys):
    code, _, err = run(capsys, "match", "8")
    assert code == 1
    assert "not matchable" in err


def test_verify_cert_reports_offending_pair(tmp_path, capsys):
    path = tmp_path / "cert.json"
    run(capsys, "match", "210", "--out", str(path))
    doc = json.loads(path.read_text())
    pairs = [(int(a), int(b)) for a, b in doc["pairs"]]
    # swap two targets so a pair shares a factor but both sets survive
    swapped = None
    for i, (d1, t1) in enumerate(pairs):
        for j, (d2, t2) in enumerate(pairs):
            if i != j and gcd(d1, t2) > 1:
                swapped = (i, j)
                break
        if swapped:
            break
    i, j = swapped
    (d1, t1), (d2, t2) = pairs[i], pairs[j]
    doc["pairs"][i] = [d1, t2]
    doc["pairs"][j] = [d2, t1]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "verify-cert", str(bad))
    assert code == 1
    assert "not coprime" in err
    assert f"({d1}, {t2})" in err


def test_partition_route_and_depth_flag(tmp_path, capsys):
    path = tmp_path / "c.json"
    code, _, _ = run(capsys, "match", "30030", "--via-partition", "--j", "2",
                     "--out", str(path))
    assert code == 0
    assert run(capsys, "verify-cert", str(path))[0] == 0
    # M-number route for a non-squarefree n
    code, _, _ = run(capsys, "match", "3150", "--via-partition",
                     "--out", str(path))
    assert code == 0
    assert run(capsys, "verify-cert", str(path))[0] == 0
    # not an M-number: usage error, not a crash
    code, _, err = run(capsys, "match", "176400", "--via-partition")
    assert code == 2 and "input error" in err


def test_big_integers_survive_json(tmp_path, capsys):
    n = 2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23 * 29 * 31 * 37 * 41 * 43
    assert n > 2**53
    path = tmp_path / "big.json"
    code, _, _ = run(capsys, "match", str(n), "--via-partition",
                     "--out", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert isinstance(doc["domain"]["n"], str)  # too wide for binary64
    assert any(isinstance(a, str) for a, _ in doc["pairs"])
    assert run(capsys, "verify-cert", str(path))[0] == 0


def test_mp_output_and_errors(tmp_path, capsys):
    code, out, _ = run(capsys, "mp", "3")
    assert code == 0
    assert "m_3 = 18" in out
    assert "psi(1) = 6" in out and "psi(2) = 9" in out
    path = tmp_path / "mp5.json"
    assert run(capsys, "mp", "5", "--out", str(path))[0] == 0
    assert run(capsys, "verify-cert", str(path))[0] == 0
    code, _, err = run(capsys, "mp", "4")
    assert code == 2 and "input error" in err


def test_census_csv_roundtrip(tmp_path, capsys):
    path = tmp_path / "rows.csv"
    code, _, _ = run(capsys, "census", "--ell", "3..12", "--mode", "full",
                     "--out", str(path))
    assert code == 0
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:3] == ["ell", "omega_max", "c_0"]
    for cells in rows[1:]:
        ell = int(cells[0])
        row = census_row(ell, "full")
        assert int(cells[1]) == row.omega_max
        for i in range(7):
            cell = cells[2 + i]
            if i <= row.omega_max:
                assert int(cell) == row.c[i]
            else:
                assert cell == ""
        assert cells[9] == ""  # omega_max < 7 throughout this range

    # a bundled row with a populated c_ge7 column, exact by default
    code, out, _ = run(capsys, "census", "--ell", "29", "--mode", "odd")
    cells = list(csv.reader(out.splitlines()))[1]
    row = census_row(29, "odd")
    assert int(cells[9]) == row.at_least(7)
    assert int(cells[2]) == row.c[0] > 10**8


def test_census_rounded_matches_published(capsys):
    ref = json.loads((DATA / "reference_tables.json").read_text())
    code, out, _ = run(capsys, "census", "--ell", "24..28", "--mode", "odd",
                       "--rounded")
    assert code == 0
    for cells in list(csv.reader(out.splitlines()))[1:]:
        assert cells[1:] == ref["census_odd"][cells[0]]


def test_gcds_table_blanks_match_published(capsys):
    ref = json.loads((DATA / "reference_tables.json").read_text())
    code, out, _ = run(capsys, "gcds", "--ell", "19..26", "--mode", "full",
                       "--rounded")
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["ell", "gcd_105", "gcd_15", "gcd_21", "gcd_3", "x3",
                       "gcd_5"]
    for cells in rows[1:]:
        assert cells[1:] == ref["gcd_full"][cells[0]]


def test_gcds_selected_divisors_json(capsys):
    code, out, _ = run(capsys, "gcds", "--ell", "24", "--mode", "odd",
                       "--d", "105,15")
    assert code == 0
    rec = json.loads(out)[0]
    assert rec["gcd_105"] == 83729
    assert rec["gcd_15"] == 504881
    assert rec["x3"] == 6334949
    code, _, err = run(capsys, "gcds", "--ell", "24", "--mode", "odd",
                       "--d", "9")
    assert code == 2 and "input error" in err


def test_replay_few_cli(capsys):
    code, out, _ = run(capsys, "replay-few", "--ell", "24", "--mode", "odd",
                       "--explain")
    assert code == 0
    for line in (
        "88,525 < 131,072",
        "485,129 < 1,048,576",
        "568,858 < 2,097,152",
        "2,151,882 < 3,145,728",
        "6,377,708 < 7,340,032",
        "12,741,251 < 14,680,064",
    ):
        assert line in out
    assert "all checks passed" in out
    code, _, err = run(capsys, "replay-few", "--ell", "45", "--mode", "odd")
    assert code == 2 and "replay-sqfr" in err


def test_replay_sqfr_cli(capsys):
    code, out, _ = run(capsys, "replay-sqfr", "--ell", "45..64")
    assert code == 0
    assert "anchor (93/50)^4/24 < 1/2: pass" in out
    assert "20 values checked: all pass" in out
    code, _, err = run(capsys, "replay-sqfr", "--ell", "44..50")
    assert code == 2 and "input error" in err


def test_bundle_integrity_and_override(tmp_path, capsys, monkeypatch):
    import divmatch.bundle as bundle

    src = bundle.bundle_path()
    shutil.copy(src, tmp_path / bundle.BUNDLE_NAME)
    monkeypatch.setenv("DIVMATCH_DATA_DIR", str(tmp_path))
    code, out, _ = run(capsys, "census", "--ell", "45", "--mode", "odd")
    assert code == 0

    doc = json.loads((tmp_path / bundle.BUNDLE_NAME).read_text())
    key = next(iter(doc["payload"]["census"]["odd"]))
    doc["payload"]["census"]["odd"][key]["c"][0] += 1
    (tmp_path / bundle.BUNDLE_NAME).write_text(json.dumps(doc))
    bundle._load.cache_clear()
    code, _, err = run(capsys, "census", "--ell", "45", "--mode", "odd")
    assert code == 1 and "integrity" in err
    monkeypatch.delenv("DIVMATCH_DATA_DIR")
    bundle._load.cache_clear()


def test_recompute_agrees_with_bundle(capsys):
    _, bundled, _ = run(capsys, "census", "--ell", "29..30", "--mode", "full")
    code, fresh, _ = run(capsys, "census", "--ell", "29..30", "--mode",
                         "full", "--recompute", "--threads", "2")
    assert code == 0
    assert fresh == bundled


def test_strong_cli(capsys):
    code, out, _ = run(capsys, "strong", "2")
    assert code == 0 and "2 is strongly matchable" in out
    code, out, _ = run(capsys, "strong", "4")
    assert code == 0
    assert "not strongly matchable" in out
    assert "S=[2, 4]" in out and "q0=" in out
    code, _, err = run(capsys, "strong", "30030")
    assert code == 3 and "refused" in err


def test_strong_density_cli(capsys):
    code, out, _ = run(capsys, "strong-density")
    assert code == 0
    assert "0.221640" in out
    assert "0.000331" in out
    assert "0.3694" in out


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["census", "--ell", "3"])  # missing --mode
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "census", "--ell", "5..3", "--mode", "odd")
    assert code == 2 and "input error" in err
