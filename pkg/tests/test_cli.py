import argparse
import math
import subprocess
import sys

import pytest

from scfde.cli import main, parse_count, parse_grid
from scfde.records import point_from_json, read_curve_csv, read_json


def test_parse_grid_inclusive_stop():
    assert parse_grid("15:35:5") == (15.0, 20.0, 25.0, 30.0, 35.0)
    assert parse_grid("0:1:0.25") == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert parse_grid("12.5") == (12.5,)


@pytest.mark.parametrize("bad", ["a:b:c", "5:0:1", "0:5:0", "0:5"])
def test_parse_grid_rejects(bad):
    with pytest.raises(argparse.ArgumentTypeError):
        parse_grid(bad)


def test_parse_count_scientific():
    assert parse_count("1e6") == 1_000_000
    with pytest.raises(argparse.ArgumentTypeError):
        parse_count("2.5")


def test_outage_writes_round_tripping_outputs(tmp_path):
    code = main(["outage", "--nu", "1", "--block", "4", "--rates", "1,2", "--snr", "0:20:10",
                 "--trials", "20000", "--out", str(tmp_path), "--deterministic"])
    assert code == 0
    for R in ("1", "2"):
        stem = tmp_path / f"outage_mmse_nu1_L4_R{R}"
        from_csv = read_curve_csv(stem.with_suffix(".csv"))
        payload = read_json(stem.with_suffix(".json"))
        assert from_csv == [point_from_json(p) for p in payload["points"]]
        assert payload["analytic_d"] == 2
        assert "generated_at" not in payload["meta"]
    summary = read_json(tmp_path / "outage_summary.json")
    assert len(summary["curves"]) == 2


def test_deterministic_outputs_are_byte_identical(tmp_path):
    args = ["outage", "--nu", "2", "--block", "6", "--rates", "2", "--snr", "5:15:5",
            "--trials", "5000", "--seed", "7", "--deterministic"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b"), "--workers", "2"])
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_short_block_is_config_error(tmp_path, capsys):
    code = main(["outage", "--nu", "3", "--block", "2", "--rates", "1", "--out", str(tmp_path)])
    assert code == 2
    assert "block length must be at least nu+1" in capsys.readouterr().err


def test_single_tap_point_inside_interval(tmp_path):
    main(["outage", "--nu", "0", "--block", "1", "--rates", "1", "--snr", "10",
          "--trials", "200000", "--out", str(tmp_path), "--deterministic", "--format", "json"])
    pt = point_from_json(read_json(tmp_path / "outage_mmse_nu0_L1_R1.json")["points"][0])
    exact = -math.expm1(-(2 ** 1 - 1) / 10)
    assert pt.ci_low <= exact <= pt.ci_high
    assert not (tmp_path / "outage_mmse_nu0_L1_R1.csv").exists()


def test_check_tol_reports_failure(tmp_path):
    # far too few trials for a slope near d = 3
    code = main(["outage", "--nu", "2", "--block", "10", "--rates", "1", "--trials", "200",
                 "--out", str(tmp_path), "--check-tol", "0.1"])
    assert code == 1


def test_ser_and_zf_and_blocklength_run(tmp_path):
    assert main(["ser", "--nu", "1", "--block", "4", "--rates", "2", "--snr", "0:10:5",
                 "--trials", "2000", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "ser_mmse_nu1_L4_R2.csv").exists()
    assert main(["zf", "--nu", "1", "--block", "4", "--rates", "1", "--snr", "0:10:5",
                 "--trials", "2000", "--out", str(tmp_path)]) == 0
    assert read_json(tmp_path / "outage_zf_nu1_L4_R1.json")["analytic_d"] == 1
    assert main(["blocklength", "--nu", "1", "--rates", "1", "--blocks", "2,4",
                 "--snr", "0:10:5", "--trials", "2000", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "blocklength_slopes.csv").read_text().splitlines()
    assert lines[0] == "block_length,slope,analytic_d" and len(lines) == 3


def test_table_output(tmp_path, capsys):
    assert main(["table", "--nu", "2", "--blocks", "10", "--rates", "1,2,3,4",
                 "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "diversity_table.csv").read_text().splitlines()
    assert [r.split(",")[3] for r in rows[1:]] == ["3", "3", "2", "1"]
    assert "intervals nu=2 L=10" in capsys.readouterr().out
    assert (tmp_path / "rate_intervals.csv").exists()


def test_oracle_subcommands(tmp_path):
    assert main(["oracle", "interp", "--configs", "20", "--out", str(tmp_path)]) == 0
    assert read_json(tmp_path / "oracle_interp.json")["passed"] is True
    assert main(["oracle", "remark1", "--nu", "1", "--trials", "1e5"]) == 0
    assert main(["oracle", "lemma1", "--n", "4", "--m", "1.5", "--trials", "1000",
                 "--tol", "1e-6"]) == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "scfde", "table", "--nu", "1", "--blocks", "2",
                          "--rates", "1"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "intervals nu=1 L=2" in res.stdout
