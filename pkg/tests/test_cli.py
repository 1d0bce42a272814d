import csv
import io
import json
import subprocess
import sys

import pytest

from permwave import cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_encode_first_index(capsys):
    code, out, _ = run(["encode", "--L", "4", "--M", "2", "--index", "1"], capsys)
    assert code == 0
    r = rows(out)[0]
    assert r["perm"] == "0,1,2,3" and r["phases"] == "0,0,0,0"


def test_encode_decode_round_trip(tmp_path, capsys):
    for fmt in ("csv", "json"):
        f = tmp_path / f"e.{fmt}"
        assert cli.main(["encode", "--L", "4", "--M", "2", "--index", "1", "--out", str(f),
                         "--format", fmt]) == 0
        code, out, _ = run(["decode", "--L", "4", "--M", "2", "--input", str(f)], capsys)
        assert code == 0 and rows(out)[0]["index"] == "1"
    code, out, _ = run(["decode", "--L", "3", "--M", "4", "--perm", "2,0,1", "--phases", "3,3,1",
                        "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["index"] == 4 * 64 + 3 * 16 + 3 * 4 + 1 + 1


def test_manifest_written_and_replayed(tmp_path, capsys):
    out = tmp_path / "b.csv"
    argv = ["bounds", "--L", "4", "--M", "2", "--channel", "awgn", "--N", "2", "--snr", "0:2:20",
            "--out", str(out)]
    assert cli.main(argv) == 0
    man = json.loads((tmp_path / "b.csv.manifest.json").read_text())
    assert man["config"]["command"] == "bounds" and man["config"]["snr"][-1] == 20.0
    table = rows(out.read_text())
    assert len(table) == 11
    for r in table:
        assert float(r["union"]) >= float(r["nn"])
        assert r["new_upper"] == ""
    replay = tmp_path / "replay.csv"
    assert cli.main(["bounds", "--from-manifest", str(tmp_path / "b.csv.manifest.json"),
                     "--out", str(replay)]) == 0
    assert replay.read_bytes() == out.read_bytes()
    capsys.readouterr()


def test_manifest_command_mismatch(tmp_path, capsys):
    assert cli.main(["encode", "--out", str(tmp_path / "e.csv")]) == 0
    code, _, err = run(["bounds", "--from-manifest", str(tmp_path / "e.csv.manifest.json")], capsys)
    assert code == 2 and "manifest" in err


def test_bler_is_deterministic_across_threads(tmp_path, capsys):
    base = ["bler", "--L", "4", "--M", "2", "--snr", "0:3:9", "--max-trials", "3000",
            "--receiver", "both", "--seed", "9"]
    assert cli.main(base + ["--threads", "1", "--out", str(tmp_path / "a.csv")]) == 0
    assert cli.main(base + ["--threads", "4", "--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    header = (tmp_path / "a.csv").read_text().splitlines()[0]
    assert header == "snr_db,trials,errors,bler,ci95"
    capsys.readouterr()


def test_usage_errors(capsys):
    assert run(["bounds", "--bogus"], capsys)[0] == 2
    assert run([], capsys)[0] == 2
    assert run(["explode"], capsys)[0] == 2
    assert run(["bler", "--snr", "1:0:3"], capsys)[0] == 2
    assert run(["decode", "--L", "4"], capsys)[0] == 2
    assert run(["bler", "--threads", "0"], capsys)[0] == 2


def test_runtime_error_exit_code(capsys):
    code, _, err = run(["encode", "--L", "4", "--M", "2", "--index", "999"], capsys)
    assert code == 1 and "outside" in err


def test_help_lists_units(capsys):
    code, out, _ = run(["bler", "--help"], capsys)
    assert code == 0
    for flag in ("--snr", "--T", "--max-trials", "--rho", "--K", "--threads", "--N"):
        assert flag in out
    assert "dB" in out and "seconds" in out


def test_parse_range():
    assert cli.parse_range("0:2:6") == [0.0, 2.0, 4.0, 6.0]
    assert cli.parse_range("-5:5:15") == [-5.0, 0.0, 5.0, 10.0, 15.0]
    assert cli.parse_range("0:0.1:0.3") == [0.0, 0.1, 0.2, 0.3]
    assert cli.parse_range("3,7") == [3.0, 7.0]
    with pytest.raises(Exception):
        cli.parse_range("a:b")


def test_synth_af_cuts_crlb_psl(tmp_path, capsys):
    code, out, _ = run(["synth", "--L", "2", "--M", "2", "--index", "4", "--oversampling", "2"], capsys)
    t = rows(out)
    assert code == 0 and len(t) == 8 and set(t[0]) == {"t", "re", "im"}

    code, out, _ = run(["af", "--L", "3", "--n-tau", "5", "--n-omega", "7"], capsys)
    assert code == 0 and len(rows(out)) == 35

    prefix = tmp_path / "cuts"
    assert cli.main(["af-cuts", "--L", "4", "--index", "9", "--n-tau", "9", "--n-omega", "9",
                     "--out", str(prefix)]) == 0
    zd = rows((tmp_path / "cuts.zero_delay.csv").read_text())
    assert float(zd[4]["value"]) == pytest.approx(1.0)
    assert (tmp_path / "cuts.zero_doppler.csv").exists()

    code, out, _ = run(["crlb", "--L", "8", "--M", "4", "--T", "1e-6", "--snr", "0:10:20"], capsys)
    t = rows(out)
    assert code == 0 and len(t) == 3
    assert float(t[0]["crlb_tau_full"]) >= float(t[0]["crlb_tau_simpl"])

    code, out, err = run(["crlb", "--snr", "0"], capsys)
    assert code == 0 and rows(out)[0]["crlb_tau_full"] == "" and "positive definite" in err

    code, out, _ = run(["psl-stats", "--L", "5", "--samples", "4", "--n-tau", "64", "--n-omega", "64",
                        "--out", str(tmp_path / "psl.csv")], capsys)
    summary = json.loads(out)
    assert code == 0 and summary["n"] == 4 and len(summary["cdf_knots"]["psl"]) == 21
    assert len(rows((tmp_path / "psl.csv").read_text())) == 4


def test_bounds_rayleigh_columns(capsys):
    code, out, _ = run(["bounds", "--channel", "rayleigh", "--rho", "0.5", "--snr", "10"], capsys)
    r = rows(out)[0]
    assert code == 0 and r["new_upper"] != ""
    assert float(r["new_upper"]) <= float(r["union"])


def test_reproduce_small(capsys):
    code, out, _ = run(["reproduce", "--figure", "rician", "--max-trials", "300", "--snr", "10"], capsys)
    t = rows(out)
    assert code == 0 and len(t) == 3 and all(r["union"] == "" for r in t)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "permwave.cli", "encode", "--index", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "0,1,2,3" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "permwave.cli", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2
