"""
Command-line runner tests: exit codes, report output and golden results.
"""

import json
from pathlib import Path

import pytest

from src.cli import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_PRECONDITION_FAILED,
    EXIT_REPORT_WRITE_FAILED,
    build_parser,
    main,
)

pytestmark = pytest.mark.integration

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "golden"
GATE_OPEN = ["--set", "sim.tcp_sequence_compromised=true"]
# Extra flags per golden scenario, keeping the long runs short.
GOLDEN_ARGS = {"spoof_vs_hardened": ["--set", "topology.guesses=1000"]}


def assert_subset(expected, actual, path="report"):
    if isinstance(expected, dict):
        assert isinstance(actual, dict), path
        for key, value in expected.items():
            assert key in actual, f"{path}.{key} missing"
            assert_subset(value, actual[key], f"{path}.{key}")
    else:
        assert actual == expected, f"{path}: {actual!r} != {expected!r}"


class TestExitCodes:
    """Each failure class maps to its own exit code."""

    def test_success_writes_report(self, tmp_path):
        report = tmp_path / "out" / "report.json"

        code = main(["--scenario", "mempool_reflection", "--report", str(report), *GATE_OPEN])

        assert code == EXIT_OK
        data = json.loads(report.read_text(encoding="utf-8"))
        assert 13_533 <= data["amplification_payload"] <= 13_535

    def test_invalid_config_value(self, tmp_path):
        code = main([
            "--scenario", "getheaders_reflection",
            "--set", "topology.headers_returned=2001",
            "--report", str(tmp_path / "r.json"),
        ])
        assert code == EXIT_CONFIG_ERROR
        assert not (tmp_path / "r.json").exists()

    def test_compromised_seeds_out_of_range(self, tmp_path):
        code = main([
            "--scenario", "eclipse_via_seed",
            "--set", "topology.compromised_seeds=5",
            "--report", str(tmp_path / "r.json"),
        ])
        assert code == EXIT_CONFIG_ERROR

    def test_missing_scenario(self, tmp_path):
        assert main(["--report", str(tmp_path / "r.json")]) == EXIT_CONFIG_ERROR

    def test_missing_config_file(self, tmp_path):
        assert main(["--config", str(tmp_path / "absent.yaml")]) == EXIT_CONFIG_ERROR

    def test_closed_spoof_gate(self, tmp_path):
        code = main(["--scenario", "getheaders_reflection", "--report", str(tmp_path / "r.json")])
        assert code == EXIT_PRECONDITION_FAILED

    def test_closed_gate_without_enforcement_completes(self, tmp_path):
        report = tmp_path / "r.json"
        code = main([
            "--scenario", "getheaders_reflection",
            "--set", "topology.enforce_preconditions=false",
            "--report", str(report),
        ])

        assert code == EXIT_OK
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["victim_rx_payload_bytes"] == 0
        assert "amplification_payload" not in data

    def test_unwritable_report(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")

        code = main(["--scenario", "mempool_reflection", "--report", str(blocker / "r.json"), *GATE_OPEN])

        assert code == EXIT_REPORT_WRITE_FAILED


class TestOutputs:
    """Report determinism, trace output and flag handling."""

    def test_reruns_are_byte_identical(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            assert main(["--scenario", "getheaders_reflection", "--seed", "11",
                         "--report", str(path), *GATE_OPEN]) == EXIT_OK

        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_trace_is_written(self, tmp_path):
        trace = tmp_path / "trace.jsonl"

        code = main(["--scenario", "getheaders_reflection", "--report", str(tmp_path / "r.json"),
                     "--trace", str(trace), *GATE_OPEN])

        assert code == EXIT_OK
        events = [json.loads(line) for line in trace.read_text(encoding="utf-8").splitlines()]
        assert [e["command"] for e in events] == ["version", "verack", "verack", "getheaders", "headers"]

    def test_config_file_with_flag_override(self, tmp_path, write_config):
        path = write_config({
            "scenario": "mempool_reflection",
            "sim": {"tcp_sequence_compromised": True},
            "topology": {"mempool_size": 10},
        })
        report = tmp_path / "r.json"

        code = main(["--config", str(path), "--framing-overhead", "paper_total", "--report", str(report)])

        assert code == EXIT_OK
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["victim_rx_payload_bytes"] == 24 + 10 * 36
        assert data["attacker_tx_framed_bytes"] == 133 + 3 * 145

    def test_sweep_scenario(self, tmp_path):
        report = tmp_path / "sweep.json"

        code = main(["--scenario", "amplification_sweep", "--report", str(report),
                     "--set", "topology.mempool_sizes=[0, 100, 1000]", *GATE_OPEN])

        assert code == EXIT_OK
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["notes"]["strictly_increasing"] is True
        assert len(data["notes"]["sweep"]) == 3

    def test_report_defaults_to_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("REFLECTSIM_OUTPUT_DIR", str(tmp_path / "results"))

        code = main(["--scenario", "mempool_reflection", *GATE_OPEN])

        assert code == EXIT_OK
        data = json.loads((tmp_path / "results" / "mempool_reflection.json").read_text(encoding="utf-8"))
        assert data["scenario"] == "mempool_reflection"

    def test_framing_overhead_rejects_negative(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["--framing-overhead", "-5"])

    def test_set_requires_assignment(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["--set", "no-equals-sign"])


class TestGoldenReports:
    """Reports match the stored reference subsets."""

    @pytest.mark.parametrize("scenario", sorted(p.stem for p in GOLDEN_DIR.glob("*.json")))
    def test_matches_golden(self, scenario, tmp_path):
        report = tmp_path / f"{scenario}.json"

        code = main(["--scenario", scenario, "--seed", "7", "--report", str(report),
                     *GATE_OPEN, *GOLDEN_ARGS.get(scenario, [])])

        assert code == EXIT_OK
        expected = json.loads((GOLDEN_DIR / f"{scenario}.json").read_text(encoding="utf-8"))
        actual = json.loads(report.read_text(encoding="utf-8"))
        assert_subset(expected, actual)
