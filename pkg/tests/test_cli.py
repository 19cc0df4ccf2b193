import json

from esscoh import cli
from esscoh import grouptheory as gt


def run(argv):
    return cli.main(argv)


def test_compute_q8(tmp_path, capsys):
    out = tmp_path / "q8.json"
    code = run(["compute", "--group", "Q8", "--maxdeg", "10",
                "--out", str(out)])
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["group"] == "Q8"
    assert blob["verdict"] == "FreeToDegree"
    assert blob["hilbert_ok"] is True
    assert blob["theorem_violation"] is False


def test_compute_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert run(["compute", "--group", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "unreadable" in err


def test_compute_missing_group(capsys):
    assert run(["compute", "--group", "NoSuchGroup"]) == 1


def test_compute_klein_flags_exclusion(tmp_path):
    out = tmp_path / "v.json"
    code = run(["compute", "--group", "C2^2", "--maxdeg", "8",
                "--out", str(out)])
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["hypothesis_excluded"] is True


def test_compute_deterministic_bytes(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        assert run(["compute", "--group", "C4xC2", "--maxdeg", "8",
                    "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_compute_group_file(tmp_path):
    spec = {"name": "V4", "p": 2,
            "table": gt.catalog_group("C2^2").table.tolist()}
    gfile = tmp_path / "v4.json"
    gfile.write_text(json.dumps(spec))
    out = tmp_path / "v4-report.json"
    assert run(["compute", "--group", str(gfile), "--maxdeg", "6",
                "--out", str(out)]) == 0
    blob = json.loads(out.read_text())
    assert blob["group"] == "V4"


def test_compute_text_format(capsys, tmp_path):
    assert run(["compute", "--group", "C4", "--maxdeg", "6",
                "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "verdict: FreeToDegree" in out


def test_env_override_maxdeg(tmp_path, monkeypatch):
    monkeypatch.setenv("ESSCOH_MAXDEG", "6")
    parser = cli.build_parser()
    args = parser.parse_args(["compute", "--group", "C4"])
    assert args.maxdeg == 6


def test_catalog_text(capsys):
    assert run(["catalog"]) == 0
    out = capsys.readouterr().out
    lines = [l for l in out.strip().splitlines()[1:] if l.strip()]
    assert len(lines) >= 13


def test_catalog_json(capsys):
    assert run(["catalog", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) >= 13
    names = {r["name"] for r in rows}
    assert {"Q8", "M16", "C2^2xC4"} <= names


def test_catalog_filter_order(capsys):
    assert run(["catalog", "--format", "json", "--order", "16"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) >= 3
    assert all(r["order"] == 16 for r in rows)


def test_verify_small_subset(capsys):
    code = run(["verify", "--group", "C2,C4", "--maxdeg", "6", "--pairs", "20"])
    assert code == 0
    out = capsys.readouterr().out
    assert "checks passed" in out


def test_verify_unknown_group(capsys):
    assert run(["verify", "--group", "Nope"]) == 1


def test_verify_max_order_filter(capsys):
    code = run(["verify", "--max-order", "4", "--maxdeg", "5",
                "--pairs", "10"])
    assert code == 0
    out = capsys.readouterr().out
    assert "(3 groups)" in out


def test_verify_parallel_jobs(capsys):
    code = run(["verify", "--group", "C2,C4", "--maxdeg", "5",
                "--pairs", "10", "--jobs", "2"])
    assert code == 0


def test_cache_roundtrip_and_corruption(tmp_path, capsys):
    cache = tmp_path / "cache"
    out = tmp_path / "r1.json"
    assert run(["compute", "--group", "C4", "--maxdeg", "6",
                "--cache-dir", str(cache), "--out", str(out)]) == 0
    entries = sorted(cache.glob("C4_*deg6*.json"))
    assert entries
    # Cached rerun produces identical bytes.
    out2 = tmp_path / "r2.json"
    assert run(["compute", "--group", "C4", "--maxdeg", "6",
                "--cache-dir", str(cache), "--out", str(out2)]) == 0
    assert out.read_bytes() == out2.read_bytes()
    # Corrupt the entry: verify must fail naming the revalidation.
    blob = json.loads(entries[0].read_text())
    nbytes = len(bytes.fromhex(blob["diffs"][1][0]))
    blob["diffs"][1][0] = "ff" * nbytes
    entries[0].write_text(json.dumps(blob))
    code = run(["verify", "--group", "C4", "--maxdeg", "6",
                "--cache-dir", str(cache), "--pairs", "5"])
    assert code == 2
    err = capsys.readouterr().err
    assert "cache revalidation failed" in err
    # compute reports an input-style error for a corrupt cache.
    assert run(["compute", "--group", "C4", "--maxdeg", "6",
                "--cache-dir", str(cache), "--out", str(out)]) == 1


def test_compute_no_checks(tmp_path):
    out = tmp_path / "r.json"
    assert run(["compute", "--group", "C4", "--maxdeg", "6",
                "--out", str(out), "--no-checks"]) == 0
    blob = json.loads(out.read_text())
    assert blob["checks"] == {}
    assert blob["verdict"] == "FreeToDegree"


def test_compute_exit_code_on_forced_violation(tmp_path, monkeypatch, capsys):
    # The exit-code contract for a theorem-violating verdict, with the
    # verdict forced through a stub report (no real group violates it).
    real = cli.essential_report

    def forced(group, maxdeg=None, registry=None, run_checks=True):
        rep = real(group, maxdeg=maxdeg, registry=registry,
                   run_checks=run_checks)
        rep.verdict = "RelationFound"
        rep.verdict_degree = 3
        rep.hilbert_ok = False
        rep.theorem_violation = True
        return rep

    monkeypatch.setattr(cli, "essential_report", forced)
    out = tmp_path / "r.json"
    code = run(["compute", "--group", "Q8", "--maxdeg", "6",
                "--out", str(out)])
    assert code == 2
    err = capsys.readouterr().err
    assert "RelationFound" in err
    blob = json.loads(out.read_text())
    assert blob["theorem_violation"] is True


def test_verify_exit_code_on_forced_check_failure(monkeypatch, capsys):
    def broken(name, maxdeg, seed, pairs, cache_dir):
        return [(name, "resolution.dd_zero", False, "degrees [2]")]

    monkeypatch.setattr(cli, "_verify_one", broken)
    code = run(["verify", "--group", "C2"])
    assert code == 2
    err = capsys.readouterr().err
    assert "FAIL C2 resolution.dd_zero" in err
