import json

import pytest
from click.testing import CliRunner

from antisym_eof.cli import fmt, main, to_json


@pytest.fixture
def runner():
    return CliRunner()


def test_fmt_round_trips_floats():
    for x in (0.1, 1 / 3, 2.0, 1e-300, -0.0):
        assert float(fmt(x)) == x
    assert fmt(True) == "true" and fmt(3) == "3"


def test_to_json_is_valid_and_ordered():
    text = to_json({"b": 1.5, "a": [1, 2.0], "c": {"x": None, "y": "q\""}, "d": []})
    assert json.loads(text) == {"b": 1.5, "a": [1, 2.0], "c": {"x": None, "y": 'q"'}, "d": []}
    assert text.index('"b"') < text.index('"a"')


def test_help(runner):
    res = runner.invoke(main, ["--help"])
    assert res.exit_code == 0
    for cmd in ("verify-lemma1", "scan-spectrum", "scan-bounds", "verify-additivity", "sample-states"):
        assert cmd in res.output


class TestScanSpectrum:
    def test_row_count_and_pass(self, runner):
        res = runner.invoke(main, ["scan-spectrum", "--grid-step", "0.05"])
        assert res.exit_code == 0, res.output
        lines = res.stdout.strip().splitlines()
        assert len(lines) == 232
        assert lines[0].startswith("p23,p31,p12,theta,lambda1")
        assert "points=231" in res.stderr and "pass=true" in res.stderr

    def test_byte_identical_reruns(self, runner):
        a = runner.invoke(main, ["scan-spectrum", "--grid-step", "0.02"]).stdout_bytes
        b = runner.invoke(main, ["scan-spectrum", "--grid-step", "0.02"]).stdout_bytes
        assert a == b and len(a) > 0

    def test_json(self, runner):
        res = runner.invoke(main, ["scan-spectrum", "--grid-step", "0.1", "--format", "json"])
        data = json.loads(res.stdout)
        assert data["summary"]["points"] == 66 and data["summary"]["pass"] is True

    def test_tolerance_failure_exits_one(self, runner):
        res = runner.invoke(main, ["scan-spectrum", "--grid-step", "0.05", "--tol", "1e-30"])
        assert res.exit_code == 1

    @pytest.mark.parametrize("args", [["--grid-step", "0.3"], ["--grid-step", "0"],
                                      ["--grid-step", "0.03"], ["--tol", "-1"],
                                      ["--format", "xml"], ["--grid-step", "abc"]])
    def test_usage_errors_exit_two(self, runner, args):
        assert runner.invoke(main, ["scan-spectrum"] + args).exit_code == 2

    def test_env_override(self, runner):
        res = runner.invoke(main, ["scan-spectrum"], env={"ANTISYM_EOF_SCAN_SPECTRUM_GRID_STEP": "0.1"})
        assert res.exit_code == 0
        assert len(res.stdout.strip().splitlines()) == 67

    def test_out_file(self, runner, tmp_path):
        out = tmp_path / "s.csv"
        res = runner.invoke(main, ["scan-spectrum", "--grid-step", "0.1", "--out", str(out)])
        assert res.exit_code == 0 and res.stdout == ""
        assert len(out.read_text().splitlines()) == 67


class TestScanBounds:
    def test_pass_and_curve(self, runner, tmp_path):
        curve = tmp_path / "curve.csv"
        res = runner.invoke(main, ["scan-bounds", "--grid-step", "0.05", "--z-step", "1e-3",
                                   "--curve-out", str(curve)])
        assert res.exit_code == 0, res.output
        assert "min_total=2" in res.stderr
        lines = curve.read_text().splitlines()
        assert lines[0] == "z,neg_z_log2_z,bound,slack"
        assert len(lines) > 334

    def test_json_summary(self, runner):
        res = runner.invoke(main, ["scan-bounds", "--grid-step", "0.1", "--z-step", "1e-3", "--format", "json"])
        s = json.loads(res.stdout)["summary"]
        assert s["pass"] and s["min_total"] == pytest.approx(2.0, abs=1e-12)
        assert s["min_certificate"] >= 1.0

    def test_bad_z_step(self, runner):
        assert runner.invoke(main, ["scan-bounds", "--z-step", "0"]).exit_code == 2


class TestVerifyBasisAlignment:
    def test_pass(self, runner):
        res = runner.invoke(main, ["verify-lemma1", "--samples", "50"])
        assert res.exit_code == 0, res.output
        data = json.loads(res.stdout)
        assert data["pass"] is True and data["counterexamples"] == []
        assert data["max_unitarity_residual"] <= 1e-10

    def test_inject_fault_exits_one(self, runner):
        res = runner.invoke(main, ["verify-lemma1", "--samples", "5", "--inject-fault"])
        assert res.exit_code == 1
        data = json.loads(res.stdout)
        assert data["pass"] is False and data["counterexamples"][0]["sample"] == 0

    def test_csv_format(self, runner):
        res = runner.invoke(main, ["verify-lemma1", "--samples", "5", "--format", "csv"])
        assert res.exit_code == 0 and res.stdout.startswith("metric,value\n")

    def test_zero_samples_is_usage_error(self, runner):
        assert runner.invoke(main, ["verify-lemma1", "--samples", "0"]).exit_code == 2


class TestSampleStates:
    def test_pass_and_determinism(self, runner):
        args = ["sample-states", "--samples", "50", "--seed", "7"]
        a, b = runner.invoke(main, args), runner.invoke(main, args)
        assert a.exit_code == 0, a.output
        assert a.stdout_bytes == b.stdout_bytes
        assert len(a.stdout.splitlines()) == 51

    def test_seed_changes_output(self, runner):
        a = runner.invoke(main, ["sample-states", "--samples", "5", "--seed", "1"]).stdout
        b = runner.invoke(main, ["sample-states", "--samples", "5", "--seed", "2"]).stdout
        assert a != b


class TestVerifyAdditivity:
    def test_small_run(self, runner):
        args = ["verify-additivity", "--samples", "1", "--states", "10",
                "--evaluations", "3000", "--starts", "1", "--seed", "3"]
        res = runner.invoke(main, args)
        assert res.exit_code == 0, res.output
        data = json.loads(res.stdout)
        assert data["pass"] is True
        inst = data["instances"][0]
        assert inst["upper"] == pytest.approx(2.0, abs=1e-6)
        assert inst["lower_evidence"]["range_min"] >= 2 - 1e-6
        assert runner.invoke(main, args).stdout_bytes == res.stdout_bytes

    def test_negative_budget_is_usage_error(self, runner):
        assert runner.invoke(main, ["verify-additivity", "--states", "-1"]).exit_code == 2
