import json

import pytest

from tiltcouple.cli import build_parser, main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_verify_gamma_example_three_claims(capsys):
    rc, out, _ = run(capsys, "verify", "thm1", "--family", "gamma",
                     "--a", "2", "--nu", "1", "--n", "100000",
                     "--seeds", "1,2,3")
    assert rc == 0
    lines = [l for l in out.splitlines() if l.startswith("thm1 ")]
    assert len(lines) == 3
    assert all(l.endswith(": PASS") for l in lines)
    assert "overall: PASS" in out


def test_verify_rejects_zero_nu(capsys):
    rc, _, err = run(capsys, "verify", "thm1", "--nu", "0")
    assert rc == 2
    assert "nu must be positive" in err


def test_verify_statistical_failure_exits_one(capsys):
    # an absurd level turns the fixed-seed true-law checks into failures
    rc, out, _ = run(capsys, "verify", "beta-gamma", "--n", "5000",
                     "--level", "0.99")
    assert rc == 1
    assert "overall: FAIL" in out


def test_sample_pd_bridge_columns(tmp_path, capsys):
    out_file = tmp_path / "bridge.csv"
    rc, _, _ = run(capsys, "sample", "pd-bridge", "--alpha", "0.5",
                   "--theta", "-0.25", "--n", "50", "--out", str(out_file))
    assert rc == 0
    lines = out_file.read_text().splitlines()
    header = next(l for l in lines if not l.startswith("#"))
    assert header == "xi_H,H,T,p1,p2,p3,p4,p5,p6,p7,p8"
    assert len([l for l in lines if not l.startswith("#")]) == 51


def test_sample_reruns_are_byte_identical(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for path in (a, b):
        rc, _, _ = run(capsys, "sample", "gg-measure", "--alpha", "0.5",
                       "--nu", "0.5", "--n", "40", "--out", str(path))
        assert rc == 0
    assert a.read_bytes() == b.read_bytes()


def test_sample_without_out_prints_csv(capsys):
    rc, out, _ = run(capsys, "sample", "stable", "--alpha", "0.5",
                     "--n", "20", "--seeds", "9")
    assert rc == 0
    lines = out.splitlines()
    assert lines[1] == "T"
    assert "seed=9" in lines[0]
    assert len(lines) == 22


def test_config_file_merges_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 0.5, "n": 30, "seeds": [4]}))
    out_a = tmp_path / "a.csv"
    rc, _, _ = run(capsys, "sample", "stable", "--config", str(cfg),
                   "--out", str(out_a))
    assert rc == 0
    # flag overrides the config's n
    out_b = tmp_path / "b.csv"
    rc, _, _ = run(capsys, "sample", "stable", "--config", str(cfg),
                   "--n", "5", "--out", str(out_b))
    assert rc == 0
    rows_a = [l for l in out_a.read_text().splitlines()
              if not l.startswith("#")]
    rows_b = [l for l in out_b.read_text().splitlines()
              if not l.startswith("#")]
    assert len(rows_a) == 31 and len(rows_b) == 6


def test_config_unknown_key_is_error(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"alhpa": 0.5}')
    rc, _, err = run(capsys, "sample", "stable", "--config", str(cfg))
    assert rc == 2
    assert "unknown config key" in err


def test_config_must_be_flat(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"alpha": {"value": 0.5}}')
    rc, _, err = run(capsys, "sample", "stable", "--config", str(cfg))
    assert rc == 2
    assert "flat" in err


def test_bad_domain_flags_exit_two(capsys):
    assert run(capsys, "verify", "beta-gamma", "--alpha", "1.5")[0] == 2
    assert run(capsys, "verify", "beta-gamma", "--n", "-3")[0] == 2
    assert run(capsys, "sample", "stable", "--seeds", ",")[0] == 2
    assert run(capsys, "verify", "beta-gamma", "--level", "2")[0] == 2


def test_unknown_claim_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["verify", "no-such-claim"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_report_requires_out(capsys):
    rc, _, err = run(capsys, "report", "kernels")
    assert rc == 2
    assert "--out" in err


def test_report_json_round_trip(tmp_path, capsys):
    out = tmp_path / "rep.json"
    rc, _, _ = run(capsys, "report", "kernels", "--out", str(out))
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["overall"] is True
    assert doc["claims"][0]["claim"] == "kernels"
    names = [c["name"] for c in doc["claims"][0]["checks"]]
    assert names == ["stable-density", "negative-moment",
                     "exponent-closed-forms"]
    # rerun lands byte-identical
    first = out.read_bytes()
    rc, _, _ = run(capsys, "report", "kernels", "--out", str(out))
    assert rc == 0
    assert out.read_bytes() == first


def test_report_csv_has_report_rows(tmp_path, capsys):
    out = tmp_path / "rep.csv"
    rc, _, _ = run(capsys, "report", "factorization", "--out", str(out))
    assert rc == 0
    lines = out.read_text().splitlines()
    header = next(l for l in lines if not l.startswith("#"))
    assert header.startswith("claim,check,kind,test,statistic")
    assert any(l.startswith("factorization,grid-identity,gate,") for l in lines)


def test_verify_workers_do_not_change_reports(tmp_path, capsys):
    outs = []
    for w in ("1", "3"):
        path = tmp_path / f"w{w}.csv"
        rc, _, _ = run(capsys, "verify", "beta-gamma", "--n", "20000",
                       "--workers", w, "--out", str(path))
        assert rc == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_excursion_command_writes_triples(tmp_path, capsys):
    out = tmp_path / "exc.csv"
    rc, _, _ = run(capsys, "excursion", "--alpha", "0.5", "--nu", "1.5",
                   "--b", "1", "--n", "60", "--out", str(out))
    assert rc == 0
    lines = out.read_text().splitlines()
    assert "case=CompoundPoisson" in lines[0]
    assert lines[1] == "xi,overshoot,undershoot,duration"
    assert len(lines) == 62


def test_excursion_command_rejects_heavy_untilted(capsys):
    rc, _, err = run(capsys, "excursion", "--alpha", "0.5", "--nu", "1.5",
                     "--b", "0")
    assert rc == 2
    assert err.startswith("error:")


def test_diversity_command_writes_replicates(tmp_path, capsys):
    out = tmp_path / "div.csv"
    rc, _, _ = run(capsys, "diversity", "--alpha", "0.5", "--n", "300",
                   "--replicates", "12", "--out", str(out))
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "replicate,blocks,diversity"
    assert len(lines) == 14


@pytest.mark.slow
def test_verify_all_quick_runs_every_claim(capsys):
    rc, out, _ = run(capsys, "verify", "all", "--quick")
    assert rc == 0
    from tiltcouple.claims import CLAIM_NAMES
    for name in CLAIM_NAMES:
        assert any(l.startswith(f"{name} ") for l in out.splitlines()), name
    assert "overall: PASS (11 claims" in out
