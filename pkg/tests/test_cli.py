import json
import subprocess
import sys
from fractions import Fraction

import pytest

from latticesums.cli import main
from latticesums.scalar import ExactRing, parse_scalar


def run_cli(args):
    proc = subprocess.run([sys.executable, "-m", "latticesums.cli"] + args,
                          capture_output=True, text=True, timeout=600)
    return proc


def test_module_entry_point():
    proc = run_cli(["eval", "--arrangement", "a1_alpha1.json",
                    "--k", "2,2,2", "--y", "0"])
    assert proc.returncode == 0
    record = json.loads(proc.stdout)
    assert record["S"] == "pi^2/2 - 39/8"
    assert record["mode"] == "exact"
    assert record["N_cyclotomic"] == 4


def test_eval_result_roundtrip(tmp_path):
    out = tmp_path / "result.json"
    rc = main(["eval", "--arrangement", "a1_alpha2.json", "--k", "2,2,2",
               "--y", "0", "--out", str(out)])
    assert rc == 0
    record = json.loads(out.read_text())
    ring = ExactRing(record["N_cyclotomic"])
    value = parse_scalar(ring, record["S"])
    assert value == ring.pi_pow(2) * ring.from_fraction(Fraction(1, 32)) \
        - ring.from_fraction(Fraction(39, 512))


def test_eval_numeric_mode(capsys):
    rc = main(["eval", "--arrangement", "a1_alpha1.json", "--k", "2,2,2",
               "--y", "0", "--mode", "numeric", "--precision", "128"])
    assert rc == 0
    record = json.loads(capsys.readouterr().out)
    # at least 30 correct digits against the exact value
    from mpmath.ctx_mp import MPContext
    ctx = MPContext()
    ctx.prec = 200
    got = ctx.mpmathify(record["S"].replace(" ", ""))
    ring = ExactRing(4)
    want = (ring.pi_pow(2) * ring.from_fraction(Fraction(1, 2))
            - ring.from_fraction(Fraction(39, 8))).embed(ctx)
    assert abs(got - want) < ctx.mpf(10) ** -30


def test_job_config_validation():
    from latticesums.cli import JobConfig
    with pytest.raises(ValueError):
        JobConfig("x.json", mode="fancy").validate()
    with pytest.raises(ValueError):
        JobConfig("x.json", k=[-1]).validate()
    with pytest.raises(ValueError):
        JobConfig("x.json", oracle_windows=[100, 100]).validate()
    assert JobConfig("x.json", k=[2], y=[Fraction(0)]).validate()


def test_exit_code_missing_file():
    assert main(["eval", "--arrangement", "definitely_missing.json",
                 "--k", "1", "--y", "0"]) == 1


def test_exit_code_excluded_point():
    # indispensable functional with weight 1 at an excluded point
    import json as _json
    import tempfile
    blob = {"rank": 2, "functionals": [
        {"direction": [1, 0], "constant": 0},
        {"direction": [0, 1], "constant": 0},
        {"direction": [0, 2], "constant": 1}]}
    with tempfile.NamedTemporaryFile("w", suffix=".json",
                                     delete=False) as fh:
        _json.dump(blob, fh)
        path = fh.name
    assert main(["eval", "--arrangement", path, "--k", "1,2,2",
                 "--y", "0,1/3"]) == 2


def test_reproduce_examples_table(tmp_path, capsys):
    out = tmp_path / "table.csv"
    rc = main(["reproduce-examples", "--out", str(out), "--format", "csv"])
    text = capsys.readouterr().out
    assert rc == 0
    assert "FAIL" not in text
    assert "14/14 rows reproduced" in text
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 15  # header + 14 rows


def test_verify_oracle(tmp_path):
    out = tmp_path / "scan.csv"
    rc = main(["verify", "oracle", "--arrangement", "a1_alpha1.json",
               "--k", "2,2,2", "--y", "0", "--N", "100,200,400",
               "--precision", "96", "--out", str(out), "--format", "csv"])
    assert rc == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "N,re,im,diff_prev,err"
    assert len(rows) == 4


def test_verify_polytope(capsys):
    rc = main(["verify", "polytope", "--arrangement", "a1_alpha_half.json",
               "--y", "1/3", "--order", "4"])
    assert rc == 0
    assert "max discrepancy: 0 (exact)" in capsys.readouterr().out


def test_verify_hierarchy(capsys):
    rc = main(["verify", "hierarchy", "--arrangement", "a1_alpha1.json",
               "--y", "0", "--order", "4", "--remove", "f0"])
    assert rc == 0
    assert "max discrepancy: 0 (exact)" in capsys.readouterr().out


def test_deterministic_output_bytes():
    args = ["eval", "--arrangement", "triangle_rational.json",
            "--k", "1,2,2", "--y", "1/7,1/11"]
    outs = set()
    for _ in range(2):
        proc = run_cli(args)
        record = json.loads(proc.stdout)
        record.pop("timing_ms")
        outs.add(json.dumps(record, sort_keys=True))
    proc = run_cli(args + ["--workers", "3"])
    record = json.loads(proc.stdout)
    record.pop("timing_ms")
    outs.add(json.dumps(record, sort_keys=True))
    assert len(outs) == 1
