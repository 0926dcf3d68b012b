import csv
import json
import os
import subprocess
import sys

import pytest

from hodgelab.cli import main
from hodgelab.config import ConfigError, parse_config
from hodgelab.report import CheckRecord, ExperimentReport, strip_timestamp, table_csv

SMALL = {"n": 2, "K": 4, "oversample": 2}


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(tmp_path, data, out="out"):
    cfg = write_config(tmp_path, data)
    out_dir = tmp_path / out
    return main(["run", "--config", cfg, "--out", str(out_dir)]), out_dir


class TestConfig:
    @pytest.mark.parametrize("bad", [
        {"experiment": "nothing"},
        {"experiment": "majorant", "geometry": {"n": 2, "K": 0}},
        {"experiment": "majorant", "geometry": {"n": 2, "K": 2, "extra": 1}},
        {"experiment": "kuranishi", "seed": {"kind": "explicit"}},
        {"experiment": "kuranishi", "seed": {"targetC1Norm": -1}},
        {"experiment": "kuranishi", "N": 0},
        {"experiment": "kuranishi", "tolerances": {"madeUp": 1e-3}},
        {"experiment": "kuranishi", "tGrid": [1.5]},
        {"experiment": "majorant", "majorant": {"c": "0"}},
        {"experiment": "majorant", "majorant": {"x1": "abc"}},
        {"experiment": "majorant", "unknownKey": 1},
        [],
    ])
    def test_rejected(self, bad):
        with pytest.raises(ConfigError):
            parse_config(bad)

    def test_defaults_and_overrides(self):
        cfg = parse_config({"experiment": "kuranishi", "tolerances": {"twoPath": 1e-6}})
        assert cfg.tolerance("twoPath") == 1e-6
        assert cfg.tolerance("integrability") == 1e-9
        assert cfg.seed.kind == "divergence-free-synthetic"


class TestReport:
    def test_pass_is_residual_below_tolerance(self):
        assert CheckRecord("a", "x", None, None, 1e-10, 1e-10).passed
        assert not CheckRecord("a", "x", None, None, 2e-10, 1e-10).passed

    def test_record_fields(self):
        rep = ExperimentReport(config={})
        rep.check("c", "anchor", 0.0, 1.0, lhs=1, rhs=1)
        rec = rep.to_dict()["records"][0]
        assert set(rec) == {"name", "anchor", "lhs", "rhs", "residual", "tolerance", "pass"}

    def test_csv_union_of_keys(self):
        text = table_csv([{"a": 1}, {"b": [1, 2]}])
        rows = list(csv.DictReader(text.splitlines()))
        assert rows == [{"a": "1", "b": ""}, {"a": "", "b": "1 2"}]

    def test_non_finite_values_serialised(self):
        rep = ExperimentReport(config={})
        rep.info["x"] = float("inf")
        assert json.loads(rep.to_json())["info"]["x"] == "inf"


class TestExitCodes:
    def test_majorant_catalan(self, tmp_path, capsys):
        code, out = run(tmp_path, {"experiment": "majorant", "majorant": {"c": "1", "x1": "1", "N": 50}})
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["passed"] and report["info"]["radius"] == "1/4"
        rows = list(csv.DictReader((out / "coefficients.csv").read_text().splitlines()))
        assert [r["x_n"] for r in rows[:6]] == ["1", "1", "2", "5", "14", "42"]
        lines = capsys.readouterr().out.splitlines()
        assert sum(line.startswith(("PASS ", "FAIL ")) for line in lines) == len(report["records"])

    def test_invalid_config_writes_nothing(self, tmp_path):
        code, out = run(tmp_path, {"experiment": "majorant", "geometry": {"n": 2, "K": 0}})
        assert code == 2
        assert not out.exists()

    def test_unparseable_config(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["run", "--config", str(path)]) == 2
        assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2

    def test_unwritable_out_dir(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        cfg = write_config(tmp_path, {"experiment": "majorant"})
        assert main(["run", "--config", cfg, "--out", str(blocker)]) == 2

    def test_tolerance_violation_exit_one(self, tmp_path):
        data = {"experiment": "kuranishi", "geometry": SMALL, "N": 3, "tolerances": {"twoPath": 0.0}}
        code, out = run(tmp_path, data)
        assert code == 1
        report = json.loads((out / "report.json").read_text())
        failing = [r for r in report["records"] if not r["pass"]]
        assert failing and all(r["residual"] > r["tolerance"] for r in failing)

    def test_harmonic_kuranishi(self, tmp_path):
        data = {"experiment": "kuranishi", "geometry": SMALL, "N": 4,
                "seed": {"kind": "harmonic-constant", "targetC1Norm": 0.2}}
        code, out = run(tmp_path, data)
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        vanish = [r for r in report["records"] if r["name"] == "higher orders vanish"]
        assert vanish[0]["residual"] == 0
        assert (out / "integrability.csv").exists()

    def test_bad_arguments(self):
        assert main(["nonsense"]) == 2
        assert main(["majorant", "--c", "1"]) == 2

    def test_schema(self, capsys):
        assert main(["schema", "kuranishi"]) == 0
        assert json.loads(capsys.readouterr().out)["experiment"] == "kuranishi"
        assert main(["schema", "bogus"]) == 2


class TestSubcommands:
    def test_majorant_command(self, tmp_path):
        assert main(["majorant", "--c", "3/7", "--x1=-2/5", "--order", "8", "--out", str(tmp_path / "m")]) == 0
        report = json.loads((tmp_path / "m" / "report.json").read_text())
        assert report["info"]["radius"] == "35/24"

    def test_calibrate_command(self, tmp_path):
        code = main(["calibrate", "--K", "3", "--samples", "6", "--out", str(tmp_path / "c")])
        assert code in (0, 1)
        report = json.loads((tmp_path / "c" / "report.json").read_text())
        assert report["info"]["calibration"]["sampleCount"] == 6

    def test_console_script(self, tmp_path):
        out = subprocess.run([sys.executable, "-m", "hodgelab.cli", "majorant", "--c", "1", "--x1", "1",
                              "--order", "5"], capture_output=True, text=True)
        assert out.returncode == 0
        assert "PASS Catalan numbers" in out.stdout


class TestExperiments:
    @pytest.mark.parametrize("data", [
        {"experiment": "verify-identities", "identities": {"instances": 3}},
        {"experiment": "quasi-isometry", "geometry": SMALL, "samples": 6},
        {"experiment": "dbar-inverse", "geometry": SMALL, "samples": 6},
        {"experiment": "kahler-family", "geometry": SMALL, "N": 3, "m": 2,
         "seed": {"kind": "separable", "targetC1Norm": 0.05}},
    ])
    def test_runs_pass(self, tmp_path, data):
        code, out = run(tmp_path, data)
        assert code == 0
        assert json.loads((out / "report.json").read_text())["passed"]

    def test_auto_target_uses_calibration(self, tmp_path):
        data = {"experiment": "kuranishi", "geometry": SMALL, "N": 3,
                "seed": {"targetC1Norm": "auto"}, "calibration": {"sampleCount": 6}}
        code, out = run(tmp_path, data)
        report = json.loads((out / "report.json").read_text())
        c1 = report["info"]["calibration"]["C1hat"]
        assert report["info"]["seed"]["scale"] == pytest.approx(1 / (4 * c1))
        assert (out / "domination.csv").exists() and (out / "radius_scan.csv").exists()

    def test_auto_target_multi_parameter(self, tmp_path):
        data = {"experiment": "kuranishi", "geometry": SMALL, "N": 2, "m": 2,
                "seed": {"targetC1Norm": "auto"}, "calibration": {"sampleCount": 4}}
        _, out = run(tmp_path, data)
        report = json.loads((out / "report.json").read_text())
        c1 = report["info"]["calibration"]["C1hat"]
        assert report["info"]["seed"]["scale"] == pytest.approx(1 / (8 * 2 * c1))


class TestDeterminism:
    def test_identical_reports_modulo_timestamp(self, tmp_path):
        data = {"experiment": "kuranishi", "geometry": SMALL, "N": 3}
        _, a = run(tmp_path, data, "a")
        _, b = run(tmp_path, data, "b")
        ra = json.loads((a / "report.json").read_text())
        rb = json.loads((b / "report.json").read_text())
        assert strip_timestamp(ra) == strip_timestamp(rb)
        for name in os.listdir(a):
            if name.endswith(".csv"):
                assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_thread_count_does_not_change_results(self, tmp_path, monkeypatch):
        data = {"experiment": "quasi-isometry", "geometry": SMALL, "samples": 4}
        _, a = run(tmp_path, data, "a")
        monkeypatch.setenv("HODGELAB_THREADS", "2")
        _, b = run(tmp_path, data, "b")
        ra = strip_timestamp(json.loads((a / "report.json").read_text()))
        rb = strip_timestamp(json.loads((b / "report.json").read_text()))
        assert ra == rb
