import json
import subprocess
import sys

import pytest

from dualitylab.cli import main
from dualitylab.scenarios import (ConfigError, ScenarioConfig, list_scenarios,
                                  run_scenario)

EXPECTED_NAMES = [
    "brauer-duality", "vust-a", "vust-bcd", "double-centralizer",
    "intersection-remark", "casimir-identity", "so-vs-o", "grading-audit",
    "trace-identities", "condition-explorer",
]


# ----------------------------------------------------------------------
# registry
# ----------------------------------------------------------------------
def test_registry_contains_exactly_the_ten_scenarios():
    assert [name for name, _ in list_scenarios()] == EXPECTED_NAMES


def test_registry_citations_nonempty_and_stable():
    first = list_scenarios()
    second = list_scenarios()
    assert first == second
    for _, citation in first:
        assert citation.strip()


def test_unknown_scenario_rejected():
    with pytest.raises(ConfigError):
        run_scenario(ScenarioConfig(scenario="nonsense"))


# ----------------------------------------------------------------------
# running scenarios in-process
# ----------------------------------------------------------------------
def test_brauer_duality_report_shape():
    config = ScenarioConfig(scenario="brauer-duality", family="sp", rank=2,
                            seed=5)
    report = run_scenario(config)
    assert report.passed
    data = json.loads(report.to_json())
    assert data["scenario"] == "brauer-duality"
    assert data["backend"]["primes"] and data["backend"]["rational_certified"]
    for check in data["checks"]:
        assert check["citation"].strip()
        assert set(check) >= {"name", "expected", "computed", "passed"}
    assert "total" in data["timings"]
    assert "human_summary" in data


def test_reports_are_replayable():
    config = ScenarioConfig(scenario="vust-bcd", family="sp",
                            partition=(2, 1, 1, 1, 1), d=2, seed=11)
    first = run_scenario(config)
    second = run_scenario(config)
    assert first.dimensions == second.dimensions
    assert [c.as_dict() for c in first.checks] == \
        [c.as_dict() for c in second.checks]


def test_so_family_resolved_from_partition():
    config = ScenarioConfig(scenario="condition-explorer", family="so",
                            partition=(3, 1, 1), d=1, seed=0)
    report = run_scenario(config)
    assert report.config["family"] == "so-odd"
    assert report.config["rank"] == 2


def test_vust_bcd_requires_normality_entry():
    config = ScenarioConfig(scenario="vust-bcd", family="sp",
                            partition=(4, 2), d=2)
    with pytest.raises(ConfigError, match=r"\[4,2\]|normality"):
        run_scenario(config)


def test_vust_bcd_rejects_failed_hypotheses():
    config = ScenarioConfig(scenario="vust-bcd", family="sp",
                            partition=(2, 2), d=2)
    with pytest.raises(ConfigError, match="condition-explorer"):
        run_scenario(config)


def test_condition_explorer_emits_observations_only():
    config = ScenarioConfig(scenario="condition-explorer", family="sp",
                            partition=(2, 2), d=2)
    report = run_scenario(config)
    assert report.passed  # no verdict: observations always pass
    names = {c.name for c in report.checks}
    assert "dimension-comparison" in names
    assert report.dimensions["extended-brauer"] <= report.dimensions["lie-commutant"]


def test_grading_audit_with_user_supplied_h():
    config = ScenarioConfig(scenario="grading-audit", family="sp",
                            partition=(4,), h_diag=(-3, -1))
    report = run_scenario(config)
    assert report.passed


def test_report_written_to_file(tmp_path):
    path = tmp_path / "report.json"
    config = ScenarioConfig(scenario="casimir-identity", family="sp", rank=1,
                            report_path=str(path))
    report = run_scenario(config)
    assert report.passed
    data = json.loads(path.read_text())
    assert data["passed"] is True


# ----------------------------------------------------------------------
# CLI
# ----------------------------------------------------------------------
def test_cli_list_scenarios(capsys):
    assert main(["--list-scenarios"]) == 0
    out = capsys.readouterr().out
    for name in EXPECTED_NAMES:
        assert name in out


def test_cli_pass_and_fail_exit_codes(capsys):
    assert main(["--scenario", "brauer-duality", "--family", "sp",
                 "--rank", "1", "--quiet"]) == 0
    # the so_6 [3,1,1,1] configuration is the documented red case
    code = main(["--scenario", "vust-bcd", "--family", "so",
                 "--partition", "3,1,1,1", "--quiet"])
    assert code == 1
    capsys.readouterr()


def test_cli_config_error_exit_code(capsys):
    assert main(["--scenario", "vust-bcd", "--family", "sp",
                 "--partition", "3,1", "--quiet"]) == 2
    assert main(["--scenario", "nonsense"]) == 2
    assert main(["--scenario", "vust-a", "--family", "sp",
                 "--partition", "2,1,1", "--quiet"]) == 2
    capsys.readouterr()


def test_cli_batch_mode(tmp_path, capsys):
    batch = tmp_path / "batch.txt"
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    batch.write_text(
        "# two quick scenarios\n"
        f"--scenario casimir-identity --family sp --rank 1 --report {r1}\n"
        f"--scenario so-vs-o --family so-even --rank 2 --d 2 --report {r2}\n")
    assert main(["--batch", str(batch), "--quiet"]) == 0
    assert json.loads(r1.read_text())["passed"]
    assert json.loads(r2.read_text())["passed"]
    capsys.readouterr()


def test_cli_subprocess_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dualitylab.cli", "--scenario",
         "casimir-identity", "--family", "so-odd", "--rank", "1"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "result: PASS" in proc.stdout


def test_cli_report_determinism_across_processes(tmp_path):
    paths = []
    for k in range(2):
        path = tmp_path / f"rep{k}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "dualitylab.cli", "--scenario",
             "trace-identities", "--family", "sp", "--rank", "1",
             "--instances", "25", "--seed", "9", "--quiet",
             "--report", str(path)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        paths.append(json.loads(path.read_text()))
    a, b = paths
    assert a["checks"] == b["checks"]
    assert a["dimensions"] == b["dimensions"]
    assert a["backend"] == b["backend"]
