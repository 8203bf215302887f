"""
Unit tests for environment settings and scenario configuration files.
"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.config.config import AppSettings, get_config, get_environment_config
from src.config.logging_config import LoggingConfig
from src.config.scenario_config import (
    SCENARIO_NAMES,
    apply_overrides,
    build_scenario_config,
    load_scenario_config,
    read_config_file,
)
from src.exceptions import ConfigError
from src.wire.sizing import SizeMode

pytestmark = pytest.mark.unit


class TestAppSettings:
    """Environment-driven process settings."""

    def test_reads_prefixed_environment(self, monkeypatch):
        monkeypatch.setenv("REFLECTSIM_LOG_LEVEL", "debug")
        monkeypatch.setenv("REFLECTSIM_LOG_FORMAT", "CONSOLE")

        settings = AppSettings()

        assert settings.log_level == "DEBUG"
        assert settings.log_format == "console"

    def test_test_environment_from_conftest(self):
        assert get_config().environment == "test"

    def test_rejects_unknown_environment(self, monkeypatch):
        monkeypatch.setenv("REFLECTSIM_ENVIRONMENT", "staging")
        with pytest.raises(ValidationError):
            AppSettings()

    def test_rejects_unknown_log_level(self, monkeypatch):
        monkeypatch.setenv("REFLECTSIM_LOG_LEVEL", "VERBOSE")
        with pytest.raises(ValidationError):
            AppSettings()

    def test_prod_never_logs_debug(self, monkeypatch):
        monkeypatch.setenv("REFLECTSIM_ENVIRONMENT", "prod")
        monkeypatch.setenv("REFLECTSIM_LOG_LEVEL", "DEBUG")
        get_config.cache_clear()

        assert get_environment_config()["log_level"] == "INFO"


class TestLoggingConfig:
    """Logging setup validation."""

    def test_rejects_unknown_format(self):
        with pytest.raises(ValueError):
            LoggingConfig("INFO", "xml")

    def test_level_is_normalised(self):
        assert LoggingConfig("warning", "console").level == "WARNING"


class TestScenarioFiles:
    """YAML and JSON scenario files."""

    @pytest.mark.parametrize("suffix", [".yaml", ".json"])
    def test_loads_both_formats(self, write_config, suffix):
        path = write_config({
            "scenario": "mempool_reflection",
            "sim": {"seed": 9, "tcp_sequence_compromised": True},
            "topology": {"mempool_size": 28758},
        }, suffix)

        cfg = load_scenario_config(path)

        assert cfg.scenario == "mempool_reflection"
        assert cfg.sim.seed == 9
        assert cfg.sim.spoof_gate_open
        assert cfg.topology.mempool_size == 28758
        assert cfg.output.report is None

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(tmp_path / "absent.yaml")

    def test_malformed_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("scenario: [unterminated", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_config_file(path)

    def test_top_level_must_be_mapping(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_config_file(path)

    def test_empty_file_is_empty_dict(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert read_config_file(path) == {}


class TestScenarioValidation:
    """Validation errors name the offending key."""

    def test_headers_cap_is_enforced(self):
        with pytest.raises(ConfigError) as exc:
            build_scenario_config({"scenario": "getheaders_reflection", "topology": {"headers_returned": 2001}})
        assert exc.value.key == "topology.headers_returned"
        assert exc.value.value == 2001

    def test_compromised_seeds_cannot_exceed_seed_services(self):
        with pytest.raises(ConfigError) as exc:
            build_scenario_config({
                "scenario": "eclipse_via_seed",
                "topology": {"seed_services": 2, "compromised_seeds": 3},
            })
        assert exc.value.key == "topology"
        assert "compromised_seeds" in str(exc.value)

    def test_unknown_key_is_rejected(self):
        with pytest.raises(ConfigError) as exc:
            build_scenario_config({"scenario": "crawl", "topology": {"nodes": 5}})
        assert exc.value.key == "topology.nodes"

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError) as exc:
            build_scenario_config({"scenario": "smurf"})
        assert exc.value.key == "scenario"

    def test_scenario_is_required(self):
        with pytest.raises(ConfigError):
            build_scenario_config({})

    def test_nonce_bits_range(self):
        with pytest.raises(ConfigError):
            build_scenario_config({"scenario": "spoof_vs_hardened", "topology": {"nonce_bits": 16}})

    def test_sweep_sizes_are_bounded(self):
        with pytest.raises(ConfigError):
            build_scenario_config({"scenario": "amplification_sweep", "topology": {"mempool_sizes": [-1]}})

    def test_size_model_from_strings(self):
        cfg = build_scenario_config({
            "scenario": "mempool_reflection",
            "sim": {"size_model": {"mode": "encoded", "framing_overhead_per_message": 145}},
        })
        assert cfg.sim.size_model.mode is SizeMode.ENCODED
        assert cfg.sim.size_model.framing_overhead_per_message == 145

    def test_every_scenario_name_validates(self):
        for name in SCENARIO_NAMES:
            assert build_scenario_config({"scenario": name}).scenario == name


class TestOverrides:
    """Dotted-key overrides on top of a file."""

    def test_nested_keys_are_created(self):
        data = apply_overrides({}, {"sim.size_model.mode": "encoded", "scenario": "crawl"})
        assert data == {"sim": {"size_model": {"mode": "encoded"}}, "scenario": "crawl"}

    def test_none_values_are_skipped(self):
        assert apply_overrides({"scenario": "crawl"}, {"scenario": None}) == {"scenario": "crawl"}

    def test_override_beats_file(self, write_config):
        path = write_config({"scenario": "crawl", "sim": {"seed": 1}})

        cfg = load_scenario_config(path, {"sim.seed": 42, "topology.node_count": 50})

        assert cfg.sim.seed == 42
        assert cfg.topology.node_count == 50
