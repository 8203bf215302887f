"""
Scenario configuration files.

A scenario file is YAML (``.yaml``/``.yml``) or JSON (``.json``) holding a
``scenario`` name and optional ``sim``, ``topology`` and ``output`` sections.
Command-line overrides are dotted keys applied on top of the file.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union, get_args

import structlog
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..exceptions import ConfigError
from ..netsim.config import SimConfig
from ..node.session import DEFAULT_MIN_ACCEPTED_VERSION
from ..wire.types import HEADERS_CAP, INV_CAP

logger = structlog.get_logger(__name__)

ScenarioName = Literal[
    "getheaders_reflection",
    "mempool_reflection",
    "spoof_vs_hardened",
    "eclipse_via_seed",
    "crawl",
    "flood_demo",
    "sync_demo",
    "amplification_sweep",
]

SCENARIO_NAMES = get_args(ScenarioName)

MAX_MEMPOOL_SIZE = 1_000_000
MAX_NODES = 10_000


class TopologyParams(BaseModel):
    """Per-scenario sizes and switches. Each scenario reads only the fields it needs."""

    model_config = ConfigDict(extra="forbid")

    node_count: int = Field(default=100, ge=1, le=MAX_NODES)
    reflector_chain_height: int = Field(default=2100, ge=0, le=1_000_000)
    headers_returned: int = Field(default=HEADERS_CAP, ge=0, le=HEADERS_CAP)
    mempool_size: int = Field(default=INV_CAP, ge=0, le=MAX_MEMPOOL_SIZE)
    mempool_sizes: List[int] = Field(default_factory=lambda: [0, 6_607, 28_758, 50_000])
    tx_payload_len: int = Field(default=250, ge=0, le=100_000)
    hardened: bool = False
    min_accepted_version: int = Field(default=DEFAULT_MIN_ACCEPTED_VERSION, ge=0)
    guesses: int = Field(default=1_000_000, ge=1, le=100_000_000)
    nonce_bits: int = Field(default=64, ge=32, le=64)
    compromised_seed: bool = True
    seed_services: int = Field(default=1, ge=1, le=64)
    compromised_seeds: Optional[int] = Field(default=None, ge=0, le=64)
    honest_count: int = Field(default=32, ge=1, le=MAX_NODES)
    attacker_count: int = Field(default=16, ge=1, le=MAX_NODES)
    attacker_share_in_honest_pool: float = Field(default=0.0, ge=0.0, lt=1.0)
    vulnerable_count: int = Field(default=3, ge=0, le=MAX_NODES)
    blocks_behind: int = Field(default=4_500, ge=0, le=1_000_000)
    enforce_preconditions: bool = True

    @field_validator("mempool_sizes")
    @classmethod
    def validate_mempool_sizes(cls, v: List[int]) -> List[int]:
        for size in v:
            if not 0 <= size <= MAX_MEMPOOL_SIZE:
                raise ValueError(f"mempool size {size} outside [0, {MAX_MEMPOOL_SIZE}]")
        return v

    @model_validator(mode="after")
    def check_compromised_seeds(self):
        if self.compromised_seeds is not None and self.compromised_seeds > self.seed_services:
            raise ValueError(
                f"compromised_seeds ({self.compromised_seeds}) exceeds seed_services ({self.seed_services})"
            )
        return self


class OutputPaths(BaseModel):
    # Without an explicit report path the runner writes <output_dir>/<scenario>.json.
    model_config = ConfigDict(extra="forbid")

    report: Optional[Path] = None
    trace: Optional[Path] = None


class ScenarioConfig(BaseModel):
    """One scenario run: which scenario, the simulator, its parameters and where results go."""

    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioName
    sim: SimConfig = Field(default_factory=SimConfig)
    topology: TopologyParams = Field(default_factory=TopologyParams)
    output: OutputPaths = Field(default_factory=OutputPaths)


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse a YAML or JSON scenario file into a plain dict."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("config", str(path), str(e)) from e

    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError("config", str(path), f"parse error: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config", str(path), "top level must be a mapping")
    return data


def apply_overrides(data: Dict[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Set dotted keys (``sim.seed``) in a nested dict, creating sections as needed."""
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = data
        *parents, leaf = dotted.split(".")
        for key in parents:
            child = node.get(key)
            if not isinstance(child, dict):
                child = node[key] = {}
            node = child
        node[leaf] = value
    return data


def build_scenario_config(data: Dict[str, Any]) -> ScenarioConfig:
    """Validate a nested dict; the first validation error becomes a ConfigError naming its key."""
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigError(key, first.get("input"), first["msg"]) from e


def load_scenario_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ScenarioConfig:
    data = read_config_file(path) if path is not None else {}
    data = apply_overrides(data, overrides or {})
    config = build_scenario_config(data)
    logger.debug("Scenario configuration loaded", path=str(path) if path else None, scenario=config.scenario)
    return config
