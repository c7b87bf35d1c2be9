import json

import numpy as np
import pytest

from taxicab.cli import EXIT_ARITHMETIC, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, EXIT_VERIFY, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    records = [json.loads(line) for line in out.out.splitlines() if line.strip()]
    return code, records, out.err


@pytest.mark.parametrize("argv,expected", [
    (["--n", "50", "--j", "10"], 4),
    (["--n", "50", "--j", "2", "--max-part", "25"], 1),
    (["--n", "3", "--j", "2"], 0),
])
def test_count(capsys, argv, expected):
    code, recs, _ = run(capsys, "count", "--k", "2", *argv)
    assert code == EXIT_OK
    assert set(recs[0]) == {"k", "n", "j", "mu", "count"}
    assert recs[0]["count"] == expected


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--k", "2"])
    assert exc.value.code == EXIT_USAGE
    code, _, err = run(capsys, "taxicab", "--k", "2", "--j", "5", "--m", "3", "--cap", "3")
    assert code == EXIT_USAGE and "cap" in err
    code, _, _ = run(capsys, "taxicab", "--k", "2", "--j", "5", "--m", "3", "--bound", "lots")
    assert code == EXIT_USAGE
    code, _, _ = run(capsys, "decide", "--j", "4", "--m", "3")
    assert code == EXIT_USAGE


def test_overflow_exit(capsys):
    code, _, err = run(capsys, "cache", "build", "--k", "1", "--j-max", "200", "--n-max", "1000",
                       "--path", "/dev/null")
    assert code == EXIT_ARITHMETIC and "overflow" in err


def test_resource_exit(capsys):
    code, _, err = run(capsys, "taxicab", "--k", "2", "--j", "9", "--m", "3", "--bound", "100000",
                       "--memory-budget", "0.01")
    assert code == EXIT_RESOURCE


def test_taxicab_records(capsys):
    code, recs, _ = run(capsys, "taxicab", "--k", "2", "--j", "6", "--m", "36", "--bound", "auto")
    assert code == EXIT_OK
    assert recs[0]["status"] == "proved-absent" and recs[0]["bound_used"] == 55696
    code, recs, err = run(capsys, "taxicab", "--k", "2", "--j", "4", "--m", "1")
    assert recs[0]["n"] == 4
    code, recs, _ = run(capsys, "taxicab", "--k", "3", "--j", "2", "--m", "3", "--bound", "100000000")
    assert recs[0]["n"] == 87539319 and recs[0]["status"] == "found"


def test_cubes_default_constant_warns_and_never_proves(capsys, caplog):
    code, recs, _ = run(capsys, "taxicab", "--k", "3", "--j", "3", "--m", "40", "--bound", "auto")
    assert code == EXIT_OK
    assert "default constant" in caplog.text
    assert recs[0]["status"] == "absent-up-to" and recs[0]["provenance"] == "empirical"


def test_decide(capsys):
    code, recs, _ = run(capsys, "decide", "--j", "7", "--m", "44")
    assert code == EXIT_OK
    assert recs[0]["status"] == "proved-absent" and recs[0]["bound_used"] == 108241


def test_certify(capsys, tmp_path):
    out = tmp_path / "c.txt"
    code, recs, _ = run(capsys, "certify", "--kind", "nonexistence", "--j", "10", "--m", "3",
                        "--out-record", str(out))
    assert code == EXIT_OK and recs[0]["j_cert"] == 12 and recs[0]["t"] == 50
    assert out.read_text().startswith("certificate nonexistence")
    code, recs, _ = run(capsys, "certify", "--kind", "increment", "--j", "2", "--m", "2")
    assert code == EXIT_VERIFY and recs[0]["certificate"] is None


def test_verify_subset(capsys):
    code, recs, _ = run(capsys, "verify", "--suite", "oeis", "--only", "tables-case1-case2", "A025416-prefix")
    assert code == EXIT_OK
    assert [r["status"] for r in recs] == ["pass", "pass"]
    assert all("bound" in r for r in recs)


def test_verify_budget_skip(capsys):
    code, recs, _ = run(capsys, "verify", "--only", "A295795-44", "--memory-budget", "0.01")
    assert code == EXIT_OK and recs[0]["status"] == "skipped(budget)"


def test_grid_complement_and_determinism(capsys, tmp_path):
    files = {}
    for w in ("1", "4"):
        pbm, csv_ = tmp_path / f"g{w}.pbm", tmp_path / f"g{w}.csv"
        code, recs, _ = run(capsys, "grid", "--k", "2", "--j", "7..30", "--m", "1..50",
                            "--out-pbm", str(pbm), "--out-csv", str(csv_), "--workers", w)
        assert code == EXIT_OK
        assert recs[-1]["complement"] == [3, 11, 17, 23, 32, 34, 35, 36, 38, 41, 43, 45, 46, 47, 49]
        files[w] = (pbm.read_bytes(), csv_.read_bytes())
    assert files["1"] == files["4"]


def test_grid_refuses_undetermined_pbm(capsys, tmp_path):
    code, _, err = run(capsys, "grid", "--k", "2", "--j", "1..4", "--m", "1..5", "--out-pbm", str(tmp_path / "x.pbm"))
    assert code == EXIT_USAGE and "undetermined" in err
    code, recs, _ = run(capsys, "grid", "--k", "2", "--j", "1..4", "--m", "1..5",
                        "--out-pbm", str(tmp_path / "x.pbm"), "--undetermined", "white")
    assert code == EXIT_OK


def test_sequence(capsys, tmp_path):
    code, recs, _ = run(capsys, "sequence", "--k", "2", "--m-limit", "10", "--out-csv", str(tmp_path / "s.csv"),
                        "--out-boundary", str(tmp_path / "b.csv"))
    assert code == EXIT_OK
    assert set(range(1, 11)) - {3} <= set(recs[-1]["members"])
    assert (tmp_path / "b.csv").read_text().splitlines()[0] == "m,J,provenance"


def test_fit(capsys, tmp_path):
    x = np.arange(1, 40)
    path = tmp_path / "synthetic.csv"
    path.write_text("x,y\n" + "".join(f"{a},{float(2 * a ** (1 / 8) - 1)!r}\n" for a in x))
    code, recs, _ = run(capsys, "fit", "--family", "root", "--root", "8", "--in", str(path), "--compare", "g2")
    assert code == EXIT_OK
    assert recs[0]["a"] == pytest.approx(2, abs=1e-9) and recs[0]["b"] == pytest.approx(-1, abs=1e-9)
    assert recs[0]["residual"] <= recs[0]["compare"]["residual"]
    code, _, _ = run(capsys, "fit", "--family", "root", "--in", str(path))
    assert code == EXIT_USAGE


def test_cache_commands(capsys, tmp_path):
    path = tmp_path / "t.txcb"
    code, recs, _ = run(capsys, "cache", "build", "--k", "2", "--j-max", "6", "--n-max", "1000",
                        "--cap", "9", "--path", str(path))
    assert code == EXIT_OK
    code, recs, _ = run(capsys, "cache", "check", "--path", str(path), "--rebuild")
    assert code == EXIT_OK and recs[0]["valid"] and recs[0]["matches_rebuild"]
    code, recs, _ = run(capsys, "cache", "check", "--path", str(path), "--expect-cap", "5")
    assert code == EXIT_VERIFY and not recs[0]["valid"]


def test_cache_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("TAXICAB_CACHE_DIR", str(tmp_path))
    code, recs, _ = run(capsys, "taxicab", "--k", "2", "--j", "10", "--m", "3", "--bound", "auto")
    assert recs[0]["status"] == "proved-absent"
    assert list(tmp_path.glob("*.txcb"))
    code, again, _ = run(capsys, "taxicab", "--k", "2", "--j", "10", "--m", "3", "--bound", "auto")
    assert again == recs
