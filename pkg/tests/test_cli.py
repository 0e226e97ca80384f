"""Integration tests for the hecke-product CLI."""

import json
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from cli.main import EXIT_CERTIFICATION, EXIT_CONFIG, EXIT_IDENTITY_FAILED, EXIT_OK, cli, exit_code_for
from core.persistence import save_report
from core.report import CSV_FIELDS, VerificationReport


@pytest.fixture
def runner():
    """Create a CLI runner."""
    return CliRunner()


@pytest.fixture
def temp_reports_dir(tmp_path):
    """Create a temporary reports directory."""
    reports_dir = tmp_path / "reports"
    reports_dir.mkdir()
    with patch("core.persistence.REPORTS_DIR", reports_dir):
        yield reports_dir


def fake_report(which="s2", scenario_name="zeta", lhs=1.0 + 0j, rhs=1.0 + 0j, error=None, kind=None):
    return VerificationReport.create(
        identity=getattr(which, "value", which),
        scenario=scenario_name,
        parameters={"u": 2.2 + 0j, "v": 2.3 + 0j, "k": 3, "gamma": 1.5, "x": 1.0},
        lhs=None if error else lhs,
        rhs=None if error else rhs,
        tolerance=1e-6,
        error=error,
        error_kind=kind,
    )


class TestExitCodes:
    """Tests for exit_code_for."""

    def test_precedence(self):
        """Errors outrank failures, failures outrank passes."""
        ok = fake_report()
        bad = fake_report(rhs=2.0 + 0j)
        broken = fake_report(error="QuadratureError: x", kind="certification")
        assert exit_code_for([ok]) == EXIT_OK
        assert exit_code_for([ok, bad]) == EXIT_IDENTITY_FAILED
        assert exit_code_for([bad, broken]) == EXIT_CERTIFICATION


class TestListScenarios:
    """Tests for list-scenarios."""

    def test_lists_builtins(self, runner):
        """All built-in scenarios are shown."""
        result = runner.invoke(cli, ["list-scenarios"])

        assert result.exit_code == 0
        for name in ("tau", "zeta", "sigma_3"):
            assert name in result.output


class TestCheckCommand:
    """Tests for the check command."""

    def test_hypothesis_violation_exits_2(self, runner):
        """k below 2 gamma - delta is refused before computing."""
        with patch("cli.main.verify_identity") as verify:
            result = runner.invoke(cli, ["check", "-s", "zeta", "-i", "id2", "--k", "1", "--gamma", "1.5"])

        assert result.exit_code == EXIT_CONFIG
        assert "hypothesis violated: k > 2γ − δ" in result.output
        verify.assert_not_called()

    def test_gamma_derived_for_new_point(self, runner):
        """Moving (u, v, k) without --gamma derives an admissible gamma."""
        seen = []

        def record(which, scenario, point, settings):
            seen.append(point)
            return fake_report(which, scenario.name)

        with patch("cli.main.verify_identity", side_effect=record):
            result = runner.invoke(cli, ["check", "--scenario", "zeta", "--identity", "id2",
                                         "--u", "1.2", "--v", "1.3", "--k", "1", "--x", "1.0"])

        assert result.exit_code == EXIT_OK
        (point,) = seen
        assert point.gamma == pytest.approx(0.625)
        assert point.right is None

    def test_no_admissible_gamma_exits_2(self, runner):
        """k = 0 leaves no gamma; the gate names the inequality."""
        with patch("cli.main.verify_identity") as verify:
            result = runner.invoke(cli, ["check", "-s", "zeta", "-i", "id2", "--k", "0"])

        assert result.exit_code == EXIT_CONFIG
        assert "k > 2γ − δ" in result.output
        verify.assert_not_called()

    def test_unknown_identity_exits_2(self, runner):
        """Unknown identity names are configuration errors."""
        result = runner.invoke(cli, ["check", "-i", "id9"])

        assert result.exit_code == EXIT_CONFIG
        assert "unknown identity" in result.output

    def test_unknown_scenario_exits_2(self, runner):
        """Unknown scenarios are configuration errors."""
        result = runner.invoke(cli, ["check", "-s", "eta"])

        assert result.exit_code == EXIT_CONFIG

    def test_bad_complex_exits_2(self, runner):
        """Unparseable u is a configuration error."""
        result = runner.invoke(cli, ["check", "--u", "two"])

        assert result.exit_code == EXIT_CONFIG

    @pytest.mark.parametrize("reports,code", [
        ([fake_report()], EXIT_OK),
        ([fake_report(rhs=1.5 + 0j)], EXIT_IDENTITY_FAILED),
        ([fake_report(error="TruncationError: cap", kind="certification")], EXIT_CERTIFICATION),
    ])
    def test_exit_code_follows_reports(self, runner, reports, code):
        """The exit code reflects the worst report."""
        with patch("cli.main.verify_identity", side_effect=lambda *a, **kw: reports[0]):
            result = runner.invoke(cli, ["check", "-s", "zeta", "-i", "s2", "--x", "1.0"])

        assert result.exit_code == code

    def test_json_output(self, runner, tmp_path):
        """--format json writes the stable JSON document."""
        out = tmp_path / "run.json"
        with patch("cli.main.verify_identity", return_value=fake_report()):
            result = runner.invoke(cli, ["check", "-i", "s2", "--x", "1.0", "--format", "json",
                                         "--out", str(out)])

        assert result.exit_code == 0
        data = json.loads(out.read_text())
        assert data["schema"] == 1
        assert data["reports"][0]["identity"] == "s2"

    def test_text_output_writes_json_twin(self, runner, tmp_path):
        """A text report file gets a JSON file beside it."""
        out = tmp_path / "run.txt"
        with patch("cli.main.verify_identity", return_value=fake_report()):
            result = runner.invoke(cli, ["check", "-i", "s2", "--x", "1.0", "--out", str(out)])

        assert result.exit_code == 0
        assert "s2 on zeta" in out.read_text()
        assert (tmp_path / "run.json").exists()

    def test_save(self, runner, temp_reports_dir):
        """--save stores each report."""
        with patch("cli.main.verify_identity", return_value=fake_report()):
            result = runner.invoke(cli, ["check", "-i", "s2", "--x", "1.0", "--save"])

        assert result.exit_code == 0
        assert len(list(temp_reports_dir.glob("*.json"))) == 1

    def test_config_file(self, runner, tmp_path):
        """Flags override values from --config."""
        path = tmp_path / "run.yaml"
        path.write_text("run:\n  scenario: tau\n  identity: id2\n")
        seen = []

        def record(which, scenario, point, settings):
            seen.append((which.value, scenario.name))
            return fake_report(which, scenario.name)

        with patch("cli.main.verify_identity", side_effect=record):
            result = runner.invoke(cli, ["check", "--config", str(path), "-i", "s2"])

        assert result.exit_code == 0
        assert set(seen) == {("s2", "tau")}


class TestSweepCommand:
    """Tests for the sweep command."""

    def test_empty_grid_prints_header(self, runner):
        """No grid means a header-only CSV and success."""
        result = runner.invoke(cli, ["sweep", "-s", "zeta", "-i", "s2"])

        assert result.exit_code == 0
        assert result.output.strip() == ",".join(CSV_FIELDS)

    def test_skips_hypothesis_violations(self, runner, tmp_path):
        """Grid points outside the admissible region are marked, not run."""
        out = tmp_path / "grid.csv"
        with patch("cli.main.verify_identity", side_effect=lambda w, s, p, st: fake_report(w, s.name)):
            result = runner.invoke(cli, ["sweep", "-s", "zeta", "-i", "id2", "--grid", "k=0,3",
                                         "--out", str(out)])

        assert result.exit_code == 0
        text = out.read_text()
        assert text.count("skipped: hypothesis") == 2     # k = 0 at x = 1.0 and 1.3
        assert text.count(",pass,") == 2

    def test_bad_grid_key(self, runner):
        """Only u, v, k and x can be swept."""
        result = runner.invoke(cli, ["sweep", "--grid", "gamma=1,2"])

        assert result.exit_code == EXIT_CONFIG

    def test_bad_grid_value(self, runner):
        """Grid values must be numeric."""
        result = runner.invoke(cli, ["sweep", "--grid", "k=three"])

        assert result.exit_code == EXIT_CONFIG


class TestReportsCommands:
    """Tests for reports list/show/delete."""

    def test_list_empty(self, runner, temp_reports_dir):
        """reports list with nothing saved shows a message."""
        result = runner.invoke(cli, ["reports", "list"])

        assert result.exit_code == 0
        assert "No saved reports" in result.output

    def test_show(self, runner, temp_reports_dir):
        """reports show finds a report by prefix."""
        report = fake_report()
        save_report(report)

        result = runner.invoke(cli, ["reports", "show", report.id[:8], "--format", "json"])

        assert result.exit_code == 0
        assert json.loads(result.output)["reports"][0]["id"] == report.id

    def test_show_missing(self, runner, temp_reports_dir):
        """Unknown IDs exit with 1."""
        result = runner.invoke(cli, ["reports", "show", "nonexistent"])

        assert result.exit_code == 1
        assert "Report not found" in result.output

    def test_delete(self, runner, temp_reports_dir):
        """reports delete removes the file."""
        report = fake_report()
        save_report(report)

        result = runner.invoke(cli, ["reports", "delete", report.id[:8]])

        assert result.exit_code == 0
        assert not list(temp_reports_dir.glob("*.json"))


class TestSelftest:
    """Tests for selftest."""

    def test_quick_passes(self, runner):
        """The quick self-test passes on a correct installation."""
        result = runner.invoke(cli, ["selftest", "--quick"])

        assert result.exit_code == 0
        assert "tau coefficients" in result.output
