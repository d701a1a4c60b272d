"""End-to-end tests for the qna CLI.

Covers:
- Wall diagrams from presets, files and inline JSON
- Gauss norms of series documents
- Spectrum sampling of A_q(S)
- Quantum GL2 sup-norms
- Exit codes for malformed and inadmissible input
"""

import json
from pathlib import Path
from unittest.mock import patch

import pytest
import yaml
from click.testing import CliRunner

from qna import __version__
from qna.cli import main
from qna.exceptions import ConvergenceError


@pytest.fixture
def cli_runner():
    """CLI test runner."""
    return CliRunner()


def _run(cli_runner, args, out: Path):
    """Invoke with ``--out`` and return the result and the parsed document."""
    result = cli_runner.invoke(main, [*args, "--out", str(out)])
    document = json.loads(out.read_text()) if result.exit_code == 0 else None
    return result, document


class TestScatter:
    """Wall-diagram completion."""

    def test_pentagon_preset(self, cli_runner, temp_dir):
        result, document = _run(
            cli_runner, ["scatter", "--preset", "pentagon", "--order", "8"], temp_dir / "d.json"
        )
        assert result.exit_code == 0, result.output
        assert document["count"] == 3
        assert document["order"] == 8
        composite = document["lines"][2]
        assert composite["kind"] == "composite"
        assert composite["covector"] == [1, 1]
        assert composite["base"] == ["3", "3"]
        assert sorted(composite["parents"]) == ["dx", "dy"]
        assert composite["factor"]["type"] == "coeffs"

    @pytest.mark.slow
    def test_order_ten(self, cli_runner, temp_dir):
        result, document = _run(
            cli_runner, ["scatter", "--preset", "pentagon", "--order", "10"], temp_dir / "d.json"
        )
        assert result.exit_code == 0, result.output
        assert document["count"] == 3
        assert len(document["lines"]) == 3

    def test_order_zero_echoes_input(self, cli_runner, temp_dir):
        result, document = _run(
            cli_runner, ["scatter", "--preset", "pentagon", "--order", "0"], temp_dir / "d.json"
        )
        assert result.exit_code == 0, result.output
        assert document["count"] == 2
        assert [line["ident"] for line in document["lines"]] == ["dx", "dy"]
        assert all(line["factor"]["type"] == "dilog" for line in document["lines"])

    def test_yaml_input(self, cli_runner, temp_dir, pentagon_document):
        source = temp_dir / "walls.yaml"
        source.write_text(yaml.safe_dump(pentagon_document))
        result, document = _run(cli_runner, ["scatter", "--in", str(source)], temp_dir / "d.json")
        assert result.exit_code == 0, result.output
        assert document["count"] == 3
        assert document["q"]["terms"] == [[0, "1"], [1, "1"]]

    def test_output_can_be_read_back(self, cli_runner, temp_dir, pentagon_document):
        first = temp_dir / "first.json"
        result, _ = _run(cli_runner, ["scatter", "--json", json.dumps(pentagon_document)], first)
        assert result.exit_code == 0, result.output
        result, document = _run(
            cli_runner,
            ["scatter", "--in", str(first), "--precision", "24", "--order", "6"],
            temp_dir / "second.json",
        )
        assert result.exit_code == 0, result.output
        assert document["count"] == 3

    def test_region_blocks_collision(self, cli_runner, temp_dir, pentagon_document):
        pentagon_document["region"] = ["0", "0", "2", "2"]
        result, document = _run(
            cli_runner, ["scatter", "--json", json.dumps(pentagon_document)], temp_dir / "d.json"
        )
        assert result.exit_code == 0, result.output
        assert document["count"] == 2

    def test_list_presets(self, cli_runner):
        result = cli_runner.invoke(main, ["scatter", "--list-presets"])
        assert result.exit_code == 0

    def test_needs_one_source(self, cli_runner):
        result = cli_runner.invoke(main, ["scatter"])
        assert result.exit_code == 2

    def test_unknown_preset(self, cli_runner):
        result = cli_runner.invoke(main, ["scatter", "--preset", "hexagon"])
        assert result.exit_code == 2


class TestNorm:
    """Gauss norms."""

    def test_unit_radius(self, cli_runner, temp_dir, series_document):
        result, document = _run(
            cli_runner, ["norm", "--json", json.dumps(series_document)], temp_dir / "n.json"
        )
        assert result.exit_code == 0, result.output
        assert document == {"log_norm": "1", "radius": ["0", "0"], "terms": 3}

    def test_radius_override(self, cli_runner, temp_dir, series_document):
        source = temp_dir / "series.json"
        source.write_text(json.dumps(series_document))
        result, document = _run(
            cli_runner, ["norm", "--in", str(source), "--radius", "0,-1"], temp_dir / "n.json"
        )
        assert result.exit_code == 0, result.output
        assert document["log_norm"] == "0"

    def test_zero_series(self, cli_runner, temp_dir, series_document):
        series_document["terms"] = []
        result, document = _run(
            cli_runner, ["norm", "--json", json.dumps(series_document)], temp_dir / "n.json"
        )
        assert result.exit_code == 0, result.output
        assert document["log_norm"] == "-inf"

    def test_convergence_failure_exit_code(self, cli_runner, series_document):
        with patch("qna.cli.gauss_norm", side_effect=ConvergenceError("no fixed point")):
            result = cli_runner.invoke(main, ["norm", "--json", json.dumps(series_document)])
        assert result.exit_code == 1


class TestSpectrum:
    """Seminorm sampling against the image of j."""

    def test_default_grid(self, cli_runner, temp_dir):
        result, document = _run(cli_runner, ["spectrum"], temp_dir / "s.json")
        assert result.exit_code == 0, result.output
        assert len(document["rows"]) == 100
        assert document["failures"] == 0
        assert {row["source"] for row in document["rows"]} == {"gauss"}

    def test_shift_rows(self, cli_runner, temp_dir):
        result, document = _run(
            cli_runner,
            ["spectrum", "--grid", "-1,1,3", "--shift", "-2,0,2", "--window", "12"],
            temp_dir / "s.json",
        )
        assert result.exit_code == 0, result.output
        shift_rows = [row for row in document["rows"] if row["source"] == "shift"]
        assert len(document["rows"]) == 12
        assert [row["rho"] for row in shift_rows] == ["-2", "0", "2"]
        assert all(row["in_image"] for row in shift_rows)

    @pytest.mark.slow
    def test_wide_grid_with_shifts(self, cli_runner, temp_dir):
        result, document = _run(
            cli_runner,
            ["spectrum", "--grid", "-2,2,20", "--shift", "-2,-1,0,1,2"],
            temp_dir / "s.json",
        )
        assert result.exit_code == 0, result.output
        assert len(document["rows"]) == 405
        assert document["failures"] == 0

    def test_random_points_are_seeded(self, cli_runner, temp_dir):
        args = ["spectrum", "--grid", "0,0,1", "--random", "5", "--seed", "7"]
        _, first = _run(cli_runner, args, temp_dir / "a.json")
        _, second = _run(cli_runner, args, temp_dir / "b.json")
        assert len(first["rows"]) == 6
        assert first == second

    def test_bad_grid(self, cli_runner):
        result = cli_runner.invoke(main, ["spectrum", "--grid", "0,1"])
        assert result.exit_code == 2


class TestGL2Norm:
    """Sup-norms over admissible leaves."""

    def test_t11(self, cli_runner, temp_dir):
        request = {"p": 5, "q": "6", "element": [[1, 0, 0, 0, "1"]], "window": 16}
        result, document = _run(
            cli_runner, ["gl2norm", "--json", json.dumps(request)], temp_dir / "g.json"
        )
        assert result.exit_code == 0, result.output
        assert document["log_norm"] == "-1"
        assert len(document["per_sample"]) == 9
        assert document["stable"] is True

    def test_document_with_overrides(self, cli_runner, temp_dir, gl2_document):
        source = temp_dir / "gl2.yaml"
        source.write_text(yaml.safe_dump(gl2_document))
        result, document = _run(
            cli_runner, ["gl2norm", "--in", str(source), "--window", "12"], temp_dir / "g.json"
        )
        assert result.exit_code == 0, result.output
        assert document["log_norm"] == "-1"

    def test_inadmissible_sample_exit_code(self, cli_runner, gl2_document):
        gl2_document["samples"] = [{"c": "2", "t": "1"}]
        result = cli_runner.invoke(main, ["gl2norm", "--json", json.dumps(gl2_document)])
        assert result.exit_code == 3

    def test_invalid_prime_exit_code(self, cli_runner, gl2_document):
        result = cli_runner.invoke(
            main, ["gl2norm", "--json", json.dumps(gl2_document), "--prime", "4"]
        )
        assert result.exit_code == 2

    def test_malformed_json(self, cli_runner):
        result = cli_runner.invoke(main, ["gl2norm", "--json", "{not json"])
        assert result.exit_code == 2


class TestUtilityCommands:
    def test_version(self, cli_runner):
        result = cli_runner.invoke(main, ["version"])
        assert result.exit_code == 0
        assert f"qna {__version__}" in result.output

    def test_log_file_records_failure(self, cli_runner, temp_dir):
        log_file = temp_dir / "logs" / "qna.log"
        result = cli_runner.invoke(
            main, ["--log-file", str(log_file), "gl2norm", "--json", "{not json"]
        )
        assert result.exit_code == 2
        text = log_file.read_text()
        assert "gl2norm" in text
        assert "exit code 2" in text

    def test_log_file_records_stage_timing(self, cli_runner, temp_dir):
        log_file = temp_dir / "qna.log"
        result = cli_runner.invoke(
            main,
            ["--log-file", str(log_file), "scatter", "--preset", "pentagon", "--order", "4"],
        )
        assert result.exit_code == 0, result.output
        text = log_file.read_text()
        assert "| scatter |" in text
        assert "build_scattering_tree finished in" in text

    def test_help(self, cli_runner):
        result = cli_runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for command in ("scatter", "norm", "spectrum", "gl2norm"):
            assert command in result.output

    @pytest.mark.parametrize(
        "command, accepted",
        [
            ("scatter", {"--in", "--json", "--order", "--precision", "--q"}),
            ("norm", {"--in", "--json"}),
            ("spectrum", {"--precision", "--q", "--seed", "--window"}),
            ("gl2norm", {"--in", "--json", "--prime", "--q", "--window"}),
        ],
    )
    def test_shared_option_scope(self, command, accepted):
        shared = {"--in", "--json", "--order", "--precision", "--prime", "--q", "--seed", "--window"}
        options = {opt for param in main.commands[command].params for opt in param.opts}
        assert {"--out", "--summary"} <= options
        assert options & shared == accepted
