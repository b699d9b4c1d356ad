import csv
import io
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from composite_pulses.cli import EXIT_OK, EXIT_USER, EXIT_VERIFY, fmt_data, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestParams:
    def test_corpse(self, capsys):
        code, out, _ = run(capsys, "params", "--family", "corpse", "--theta", "45")
        assert code == EXIT_OK
        assert rows(out) == [["theta", "theta1", "theta2", "theta3"], ["45.0", "371.5", "337.9", "11.5"]]

    def test_scrofulous(self, capsys):
        code, out, _ = run(capsys, "params", "--family", "scrofulous", "--theta", "45")
        assert rows(out)[1][:5] == ["45.0", "96.7", "73.4", "180.0", "274.9"]
        assert rows(out)[1][5] == "0"

    def test_scrofulous_extrapolated(self, capsys):
        _, out, _ = run(capsys, "params", "--family", "scrofulous", "--theta", "10")
        assert rows(out)[1][-1] == "1"

    def test_bb1(self, capsys):
        _, out, _ = run(capsys, "params", "--family", "bb1", "--theta", "180")
        assert rows(out)[1] == ["180.0", "104.5", "313.4"]

    def test_bb1_45_is_correctly_rounded(self, capsys):
        # 3 * arccos(-1/16) = 280.74997 deg
        _, out, _ = run(capsys, "params", "--family", "bb1", "--theta", "45")
        assert rows(out)[1] == ["45.0", "93.6", "280.7"]

    def test_short_corpse(self, capsys):
        _, out, _ = run(capsys, "params", "--family", "short-corpse", "--theta", "180")
        assert rows(out)[1] == ["180.0", "60.0", "300.0", "60.0"]

    def test_json_schema(self, capsys):
        code, out, _ = run(capsys, "params", "--family", "bb1", "--theta", "180", "--placements", "0.5", "--format", "json")
        doc = json.loads(out)
        assert code == EXIT_OK
        assert set(doc) == {"pulses", "target", "family"}
        assert doc["target"] == {"theta_deg": 180.0, "phi_deg": 0.0}
        assert [round(p["theta_deg"], 9) for p in doc["pulses"]] == [90, 180, 360, 180, 90]
        assert doc["family"] == "bb1(n=1,placements=0.5;)"

    @pytest.mark.parametrize(
        "argv",
        [
            ["--family", "corpse", "--theta", "180", "--corpse-n", "1", "0", "0"],
            ["--family", "scrofulous", "--theta", "200"],
            ["--family", "bb1", "--theta", "90", "--wn", "2", "--placements", "0.5"],
            ["--family", "bb1", "--theta", "90", "--placements", "1.5"],
            ["--family", "nope", "--theta", "90"],
            ["--family", "plain", "--theta", "-5"],
            ["--family", "plain", "--theta", "nan"],
        ],
    )
    def test_user_errors(self, capsys, argv, tmp_path):
        target = tmp_path / "out.csv"
        code, out, err = run(capsys, "params", *argv, "--output", str(target))
        assert code == EXIT_USER
        assert out == ""
        assert not target.exists()
        assert "Traceback" not in err
        assert err.strip()


def test_tables(capsys):
    code, out, _ = run(capsys, "tables")
    assert code == EXIT_OK
    assert "30.0,367.6,345.1,7.6" in out
    assert "90.0,115.2,62.0,180.0,280.6" in out
    assert "180.0,104.5,313.4" in out


class TestSweep:
    def test_corpse_f(self, capsys):
        code, out, _ = run(capsys, "sweep", "--family", "corpse", "--theta", "180", "--axis", "f", "--lo", "-1", "--hi", "1", "--count", "201")
        assert code == EXIT_OK
        table = rows(out)
        assert table[0] == ["error_value", "fidelity_composite", "fidelity_plain"]
        body = np.array(table[1:], dtype=float)
        assert len(body) == 201
        assert ["0", "1", "1"] in table
        near = np.abs(body[:, 0]) <= 0.66
        assert np.all(body[near, 1] >= body[near, 2])

    def test_bb1_g(self, capsys):
        _, out, _ = run(capsys, "sweep", "--family", "bb1", "--theta", "180", "--axis", "g", "--lo", "-0.5", "--hi", "0.5", "--count", "11")
        body = {r[0]: (float(r[1]), float(r[2])) for r in rows(out)[1:]}
        # 50-digit SU(2) evaluation gives 0.95017473722 at g = +-0.5
        for g in ("-0.5", "0.5"):
            composite, plain = body[g]
            assert composite == pytest.approx(0.950174737219, abs=1e-11)
            assert composite > plain
        assert body["0.3"][0] > 0.99 and body["-0.3"][0] > 0.99

    def test_twelve_significant_digits(self, capsys):
        _, out, _ = run(capsys, "sweep", "--family", "plain", "--theta", "180", "--axis", "f", "--lo", "0", "--hi", "0.1", "--count", "2")
        last = rows(out)[-1]
        assert last[0] == "0.1"
        assert last[1] == f"{math.sin(math.pi * math.sqrt(1.01) / 2) / math.sqrt(1.01):.12g}"

    def test_json(self, capsys):
        _, out, _ = run(capsys, "sweep", "--family", "scrofulous", "--theta", "90", "--axis", "g", "--lo", "-0.2", "--hi", "0.2", "--count", "3", "--format", "json")
        doc = json.loads(out)
        assert doc["axis"] == "g" and len(doc["samples"]) == 3
        assert doc["samples"][1] == {"error_value": 0.0, "fidelity_composite": 1.0, "fidelity_plain": 1.0}

    def test_invalid_range(self, capsys):
        code, _, err = run(capsys, "sweep", "--family", "plain", "--theta", "90", "--axis", "g", "--lo", "-1", "--hi", "1")
        assert code == EXIT_USER and "above -1" in err

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(capsys, "sweep", "--family", "plain", "--theta", "90", "--axis", "f", "--lo", "0", "--hi", "1",
                           "--output", str(tmp_path / "missing" / "x.csv"))
        assert code == EXIT_USER and "cannot write" in err

    def test_deterministic(self, tmp_path):
        args = ["sweep", "--family", "bb1", "--theta", "90", "--axis", "g", "--lo", "-0.9", "--hi", "0.9", "--count", "57"]
        main(args + ["--output", str(tmp_path / "a.csv")])
        main(args + ["--output", str(tmp_path / "b.csv")])
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_output_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("COMPOSITE_PULSES_OUTPUT_DIR", str(tmp_path))
        code = main(["sweep", "--family", "plain", "--theta", "90", "--axis", "f", "--lo", "0", "--hi", "1", "--output", "s.csv"])
        assert code == EXIT_OK
        assert (tmp_path / "s.csv").read_text().startswith("error_value,")


class TestGrid:
    def test_layout(self, capsys):
        code, out, _ = run(capsys, "grid", "--family", "plain", "--theta", "180", "--f-range", "-1", "1", "--g-range", "-0.5", "0.5", "--counts", "5", "3")
        assert code == EXIT_OK
        table = rows(out)
        assert table[0] == ["f", "g", "fidelity"]
        body = np.array(table[1:], dtype=float)
        assert len(body) == 15
        # g outer, f inner
        assert list(body[:5, 1]) == [-0.5] * 5
        assert list(body[:5, 0]) == [-1, -0.5, 0, 0.5, 1]
        assert ["0", "0", "1"] in table
        fid = body[:, 2].reshape(3, 5)
        assert np.allclose(fid, fid[:, ::-1], atol=1e-12)

    def test_bad_range(self, capsys):
        code, _, _ = run(capsys, "grid", "--family", "plain", "--theta", "180", "--g-range", "-1", "1")
        assert code == EXIT_USER

    def test_json(self, capsys):
        _, out, _ = run(capsys, "grid", "--family", "corpse", "--theta", "180", "--counts", "3", "3", "--format", "json")
        doc = json.loads(out)
        assert np.array(doc["fidelity"]).shape == (3, 3)
        assert doc["fidelity"][1][1] == 1.0

    def test_four_full_grids_are_fast(self, tmp_path):
        start = time.perf_counter()
        for fam in ("plain", "corpse", "scrofulous", "bb1"):
            assert main(["grid", "--family", fam, "--theta", "180", "--output", str(tmp_path / f"{fam}.csv")]) == EXIT_OK
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0
        assert sum(1 for _ in open(tmp_path / "bb1.csv")) == 201 * 201 + 1


def test_fmt_data():
    assert fmt_data(-0.0) == "0"
    assert fmt_data(1.0) == "1"
    assert fmt_data(0.1234567890123456) == "0.123456789012"


def test_usage_error_exit_code(capsys):
    code, _, err = run(capsys, "sweep", "--theta", "90")
    assert code == EXIT_USER


def test_verify_report(capsys, tmp_path):
    code = main(["verify", "--quiet", "--output", str(tmp_path / "report.txt")])
    lines = (tmp_path / "report.txt").read_text().splitlines()
    checks = [l for l in lines if l.startswith(("PASS", "FAIL"))]
    assert len(checks) == 15
    all_pass = all(l.startswith("PASS") for l in checks)
    assert code == (EXIT_OK if all_pass else EXIT_VERIFY)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "composite_pulses", "params", "--family", "corpse", "--theta", "180"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "180.0,420.0,300.0,60.0"
