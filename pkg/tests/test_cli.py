# Tests for the atomicity command line: exit codes, golden reports and bundles

import logging

import pytest
from click.testing import CliRunner

from kernel_atomicity import __version__
from kernel_atomicity.cli import cli
from kernel_atomicity.report import parse_bundle, parse_report


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def detach_cli_logging():
    yield
    logger = logging.getLogger("kernel_atomicity")
    for handler in list(logger.handlers):
        if getattr(handler, "_atomicity_cli", False):
            logger.removeHandler(handler)


@pytest.fixture
def in_specs(specs_dir, monkeypatch):
    monkeypatch.chdir(specs_dir)
    for name in ("ATOMICITY_MAX_ORDER", "ATOMICITY_ASSOCIATIVITY_CAP", "ATOMICITY_ALLOW_SAMPLED"):
        monkeypatch.delenv(name, raising=False)
    return specs_dir


def run(runner, tmp_path, *args):
    out = tmp_path / "report.out"
    result = runner.invoke(cli, [*args, "--output", str(out)])
    text = out.read_text(encoding="utf-8") if out.exists() else ""
    return result, text


class TestExitCodes:
    @pytest.mark.parametrize(
        "command, spec, summary",
        [
            ("verify-hom", "sign_map.json", "summary: 11 checks, 11 passed, 0 failed, 0 skipped"),
            ("verify-hom", "sign_generators.yaml", "summary: 11 checks, 11 passed, 0 failed, 0 skipped"),
            ("verify-group", "s3.json", "summary: 4 checks, 4 passed, 0 failed, 0 skipped"),
            ("verify-group", "z3_cayley.json", "summary: 4 checks, 4 passed, 0 failed, 0 skipped"),
            ("verify-action", "natural_s3.yaml", "summary: 7 checks, 7 passed, 0 failed, 0 skipped"),
            ("verify-action", "swap_action.json", "summary: 7 checks, 7 passed, 0 failed, 0 skipped"),
            ("verify-quotient", "quotient_a3.json", "summary: 5 checks, 5 passed, 0 failed, 0 skipped"),
            ("solve", "gf3_system.yaml", "summary: 7 checks, 7 passed, 0 failed, 0 skipped"),
            ("solve", "underdetermined.json", "summary: 7 checks, 6 passed, 0 failed, 1 skipped"),
        ],
    )
    def test_passing_specs(self, runner, tmp_path, in_specs, command, spec, summary):
        result, text = run(runner, tmp_path, command, spec)
        assert result.exit_code == 0
        assert text.splitlines()[-1] == summary

    def test_failed_group_axiom(self, runner, tmp_path, in_specs):
        result, text = run(runner, tmp_path, "verify-group", "not_a_group.json")
        assert result.exit_code == 1
        assert "FAIL group.inverses: every element has a two-sided inverse" in text
        assert "  witness: elements=[1]" in text

    def test_broken_action(self, runner, tmp_path, in_specs):
        result, text = run(runner, tmp_path, "verify-action", "broken_action.json")
        assert result.exit_code == 1
        assert "  witness: g=1, h=1, x=0" in text

    def test_parse_error(self, runner, tmp_path, in_specs):
        result, text = run(runner, tmp_path, "solve", "float_entry.json")
        assert result.exit_code == 2
        assert "error: parse-error:" in text
        assert "field 'matrix[0][1]'" in text

    def test_wrong_kind_for_command(self, runner, tmp_path, in_specs):
        result, text = run(runner, tmp_path, "verify-hom", "underdetermined.json")
        assert result.exit_code == 2
        assert "expected one of hom, hom-gen" in text

    def test_missing_file(self, runner, tmp_path, in_specs):
        result, _ = run(runner, tmp_path, "verify-group", "absent.json")
        assert result.exit_code == 2

    def test_cap_exceeded(self, runner, tmp_path, in_specs):
        result, text = run(runner, tmp_path, "verify-group", "too_big.json", "--max-order", "100")
        assert result.exit_code == 3
        assert "error: cap-exceeded:" in text
        assert "  witness: cap=100, size=120" in text

    def test_bad_environment(self, runner, tmp_path, in_specs, monkeypatch):
        monkeypatch.setenv("ATOMICITY_MAX_ORDER", "lots")
        result, _ = run(runner, tmp_path, "verify-group", "s3.json")
        assert result.exit_code == 2

    def test_sampled_groups_skip_theorem_checks(self, runner, tmp_path, in_specs, monkeypatch):
        monkeypatch.setenv("ATOMICITY_ASSOCIATIVITY_CAP", "4")
        result, text = run(runner, tmp_path, "verify-hom", "sign_map.json")
        assert result.exit_code == 0
        assert text.splitlines()[-1] == "summary: 11 checks, 3 passed, 0 failed, 8 skipped"
        assert "--allow-sampled" in text

        result, text = run(runner, tmp_path, "verify-hom", "sign_map.json", "--allow-sampled")
        assert text.splitlines()[-1] == "summary: 11 checks, 11 passed, 0 failed, 0 skipped"

    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output


class TestGoldenReports:
    @pytest.mark.parametrize(
        "command, spec, golden",
        [
            ("verify-hom", "sign_corrupted.json", "sign_corrupted.txt"),
            ("verify-quotient", "quotient_not_normal.json", "quotient_not_normal.txt"),
            ("solve", "inconsistent.json", "inconsistent.txt"),
        ],
    )
    def test_matches_golden(self, runner, tmp_path, in_specs, golden_dir, command, spec, golden):
        result, text = run(runner, tmp_path, command, spec)
        assert result.exit_code == 1
        assert text == (golden_dir / golden).read_text(encoding="utf-8")

    def test_output_is_deterministic(self, runner, tmp_path, in_specs):
        _, first = run(runner, tmp_path, "solve", "gf3_system.yaml", "--seed", "11")
        _, second = run(runner, tmp_path, "solve", "gf3_system.yaml", "--seed", "11")
        assert first == second


class TestStructured:
    def test_single_report(self, runner, tmp_path, in_specs):
        result, text = run(runner, tmp_path, "solve", "underdetermined.json", "--format", "structured")
        assert result.exit_code == 0
        report = parse_report(text)
        assert report.kind == "linear-system"
        basis = next(check for check in report.checks if check.name == "linear.kernel-basis")
        assert basis.witness == {"dimension": 1, "basis": [["1", "1"]]}
        particular = next(check for check in report.checks if check.name == "linear.particular")
        assert particular.witness == {"y0": ["2", "0"]}

    def test_failure_witness_round_trips(self, runner, tmp_path, in_specs):
        result, text = run(runner, tmp_path, "verify-hom", "sign_corrupted.json", "--format", "structured")
        assert result.exit_code == 1
        report = parse_report(text)
        assert report.checks[0].witness == {"x": 1, "y": 2}
        assert report.exit_code == 1

    def test_rank_nullity_counts_basis_vectors(self, runner, tmp_path, in_specs):
        _, text = run(runner, tmp_path, "solve", "underdetermined.json", "--format", "structured")
        check = next(check for check in parse_report(text).checks if check.name == "linear.rank-nullity")
        assert check.status == "pass"
        assert check.witness == {"rank": 1, "nullity": 1, "columns": 2}

    def test_identity_sent_elsewhere_fails_the_pair_check(self, runner, tmp_path, in_specs):
        spec = tmp_path / "shifted.json"
        spec.write_text(
            '{"spec_version": 1, "kind": "hom",'
            ' "domain": {"kind": "catalog", "name": "symmetric", "parameter": 3},'
            ' "codomain": {"kind": "catalog", "name": "cyclic", "parameter": 2},'
            ' "map": [1, 1, 1, 1, 1, 1]}',
            encoding="utf-8",
        )
        result, text = run(runner, tmp_path, "verify-hom", str(spec), "--format", "structured")
        assert result.exit_code == 1
        report = parse_report(text)
        assert (report.checks[0].name, report.checks[0].status) == ("hom.valid", "fail")
        assert report.checks[0].witness == {"x": 0, "y": 0}
        assert [check.name for check in report.checks].count("hom.valid") == 1
        assert len(report.checks) == 11


class TestBundles:
    def test_bundle_keeps_input_order(self, runner, tmp_path, in_specs):
        specs = ["sign_map.json", "natural_s3.yaml", "inconsistent.json", "quotient_a3.json"]
        result, text = run(runner, tmp_path, "report", *specs, "--format", "structured")
        assert result.exit_code == 1
        reports = parse_bundle(text)
        assert [r.subject for r in reports] == specs
        assert [r.exit_code for r in reports] == [0, 0, 1, 0]

    def test_parse_error_beats_cap_and_failure(self, runner, tmp_path, in_specs):
        specs = ["sign_corrupted.json", "too_big.json", "float_entry.json"]
        result, text = run(runner, tmp_path, "report", *specs, "--max-order", "100")
        assert result.exit_code == 2
        assert text.count("kernel-atomicity report v1") == 3

    def test_cap_beats_failure(self, runner, tmp_path, in_specs):
        result, _ = run(runner, tmp_path, "report", "sign_corrupted.json", "too_big.json", "--max-order", "100")
        assert result.exit_code == 3
