"""Tests for the command line."""

import json

import pytest

from app.main import cli


@pytest.mark.unit
class TestCLambdaCommand:
    """ckp clambda"""

    def test_table(self, runner):
        """Table output in the default normalization."""
        result = runner.invoke(cli, ["clambda", "--partition", "1"])
        assert result.exit_code == 0
        assert "λ = (1)  D = 1" in result.output
        assert "Ĉ = 1/2*t_1/2" in result.output

    def test_vertex_normalization(self, runner):
        """Doubled odd times."""
        result = runner.invoke(cli, ["--normalization", "vertex", "clambda", "--partition", "1"])
        assert result.exit_code == 0
        assert "Ĉ = t_1/2" in result.output

    def test_json(self, runner):
        """JSON report with exact term lists."""
        result = runner.invoke(cli, ["--format", "json", "clambda", "--partition", "3,1"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["D"] == "-1"
        assert report["normalization"] == "gamma"
        assert report["hatC"] == [
            {"coeff": "3/4", "even": {}, "odd": [1, 3]},
            {"coeff": "1/2", "even": {"1": 2}, "odd": []},
        ]

    def test_closed_mode(self, runner):
        """Closed mode drops odd times."""
        result = runner.invoke(cli, ["clambda", "--partition", "3", "--mode", "closed"])
        assert result.exit_code == 0
        assert "Ĉ = 0" in result.output

    def test_bad_partition(self, runner):
        """Malformed input exits with code 2."""
        result = runner.invoke(cli, ["clambda", "--partition", "2"])
        assert result.exit_code == 2
        assert "Error:" in result.output

    def test_json_error(self, runner):
        """With JSON output errors are JSON on stderr."""
        result = runner.invoke(cli, ["--format", "json", "clambda", "--partition", "2"])
        assert result.exit_code == 2
        error = json.loads(result.stderr)
        assert error["error"] == "PartitionError"


@pytest.mark.unit
class TestOtherCommands:
    """Remaining subcommands"""

    def test_count_paths(self, runner):
        """N_{0→(3,1)} = 2."""
        result = runner.invoke(cli, ["count-paths", "--to", "3,1"])
        assert result.exit_code == 0
        assert result.output.strip() == "2"

    def test_pfhf(self, runner):
        """Both sides print and agree."""
        result = runner.invoke(cli, ["pfhf", "--points", "1,2"])
        assert result.exit_code == 0
        assert "Pf = -1/9" in result.output
        assert "equal" in result.output

    def test_pfhf_odd_points(self, runner):
        """An odd number of points is an input error."""
        result = runner.invoke(cli, ["pfhf", "--points", "1"])
        assert result.exit_code == 2

    def test_tau(self, runner):
        """Coefficients of the heat element."""
        result = runner.invoke(cli, ["--format", "json", "tau", "--g", "quad:1/2,1/2=a", "--cap", "2"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["group_element"] == "quad:1/2,1/2=a"
        assert report["coefficients"]["1,1"]["D"] == "2"
        assert report["coefficients"]["1,1"]["g"] == [{"coeff": "2/1", "even": {"a1": 1}, "odd": []}]

    def test_hirota(self, runner):
        """The identity has no residual."""
        result = runner.invoke(cli, ["hirota", "--g", "identity", "--cap", "2"])
        assert result.exit_code == 0
        assert "residual vanishes to weight 2" in result.output

    def test_wave(self, runner):
        """ŵ_(1) = 1 for the identity."""
        result = runner.invoke(cli, ["wave", "--alpha", "1", "--cap", "1"])
        assert result.exit_code == 0
        assert "z^0: 1" in result.output

    def test_wave_even_length(self, runner):
        """Even length is an input error."""
        result = runner.invoke(cli, ["wave", "--alpha", "3,1", "--cap", "1"])
        assert result.exit_code == 2

    def test_skew(self, runner):
        """Ĉ_{(1,1)/∅} in the times s."""
        result = runner.invoke(cli, ["skew", "--partition", "1,1", "--sub", ""])
        assert result.exit_code == 0
        assert "= s_1" in result.output

    def test_bad_cap(self, runner):
        """Decimal caps are rejected."""
        result = runner.invoke(cli, ["tau", "--g", "identity", "--cap", "1.5"])
        assert result.exit_code == 2


@pytest.mark.unit
class TestVerifyCommand:
    """ckp verify"""

    def test_qdim(self, runner):
        """A passing suite exits 0."""
        result = runner.invoke(cli, ["verify", "qdim", "--cap", "3"])
        assert result.exit_code == 0
        assert "PASS" in result.output
        assert "1/1 passed" in result.output

    def test_pfhf_json(self, runner):
        """JSON suite report."""
        result = runner.invoke(
            cli, ["--format", "json", "verify", "pfhf", "--orders", "2,4", "--trials", "1", "--seed", "3"]
        )
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["suite"] == "pfhf"
        assert [item["status"] for item in report["items"]] == ["pass", "pass"]

    def test_unknown_suite(self, runner):
        """Unknown suites are rejected by click."""
        result = runner.invoke(cli, ["verify", "nope"])
        assert result.exit_code == 2

    def test_bad_orders(self, runner):
        """Malformed order lists are input errors."""
        result = runner.invoke(cli, ["verify", "pfhf", "--orders", "two"])
        assert result.exit_code == 2

    def test_bad_group_element(self, runner):
        """Group elements are validated before running."""
        result = runner.invoke(cli, ["verify", "hirota", "--g", "quad:1/2"])
        assert result.exit_code == 2


@pytest.mark.unit
class TestHelp:
    """Help texts"""

    def test_normalization_default_is_named(self, runner):
        """The help names gamma as the default and shows both forms of Ĉ_(1)."""
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        text = " ".join(result.output.split())
        assert "'gamma' (default)" in text
        assert "Ĉ_(1) = 1/2*t_1/2" in text
        assert "Ĉ_(1) = t_1/2" in text

    def test_verify_cap_help(self, runner):
        """The verify help explains how caps apply to suites."""
        result = runner.invoke(cli, ["verify", "--help"])
        assert result.exit_code == 0
        text = " ".join(result.output.split())
        assert "each suite uses its own default" in text
        assert "applies to every suite" in text


@pytest.mark.unit
def test_config_file(runner, tmp_path):
    """A YAML settings file selects the output format."""
    path = tmp_path / "ckp.yaml"
    path.write_text("output_format: json\nodd_time_normalization: vertex\n")
    result = runner.invoke(cli, ["--config", str(path), "clambda", "--partition", "1"])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["normalization"] == "vertex"
    assert report["hatC"] == [{"coeff": "1/1", "even": {}, "odd": [1]}]
