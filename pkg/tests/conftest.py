"""
Pytest configuration and fixtures for reflectsim tests.

This module provides common test fixtures (simulators, nodes, established
sessions, scenario files) and marker registration for all test modules.
"""

import json
import os
from typing import Any, Dict, Tuple

import numpy as np
import pytest
import structlog
import yaml

from src.config.config import get_config
from src.netsim.config import SimConfig
from src.netsim.network import Network
from src.node.chain import ChainStore
from src.node.node import Node
from src.node.session import NodeConfig, PeerSession, SessionState
from src.wire.types import NetAddress

# Configure test logging
structlog.configure(
    processors=[
        structlog.stdlib.filter_by_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.JSONRenderer()
    ],
    logger_factory=structlog.stdlib.LoggerFactory(),
    wrapper_class=structlog.stdlib.BoundLogger,
    cache_logger_on_first_use=True,
)

# Test environment variables
os.environ["REFLECTSIM_ENVIRONMENT"] = "test"
os.environ["REFLECTSIM_LOG_LEVEL"] = "WARNING"

ALICE = NetAddress("10.0.0.1")
BOB = NetAddress("10.0.0.2")
CAROL = NetAddress("10.0.0.3")


@pytest.fixture
def rng():
    """Seeded generator for property-style tests."""
    return np.random.default_rng(20240601)


@pytest.fixture
def gate_open_config():
    """Simulator config with TCP sequence protection defeated."""
    return SimConfig(seed=7, tcp_sequence_compromised=True)


@pytest.fixture
def gate_open_net(gate_open_config):
    return Network(gate_open_config)


@pytest.fixture
def closed_net():
    """Simulator with an off-path attacker and intact sequence protection."""
    return Network(SimConfig(seed=7))


@pytest.fixture
def legacy_node():
    return Node(BOB, NodeConfig(rng_seed=1))


@pytest.fixture
def hardened_node():
    return Node(BOB, NodeConfig(rng_seed=1, hardened=True))


def establish(node: Node, peer: NetAddress) -> PeerSession:
    """Force an inbound established session without running the handshake."""
    session = node.session_for(peer)
    session.state = SessionState.ESTABLISHED
    return session


@pytest.fixture
def connected_pair() -> Tuple[Network, Node, Node]:
    """Two legacy nodes on one network with an established connection ALICE -> BOB."""
    net = Network(SimConfig(seed=3))
    alice = net.register(Node(ALICE, NodeConfig(rng_seed=11)))
    bob = net.register(Node(BOB, NodeConfig(rng_seed=12), ChainStore.generate(10)))
    net.post(ALICE, alice.connect(BOB))
    net.run()
    return net, alice, bob


@pytest.fixture
def write_config(tmp_path):
    """Write a scenario dict to a YAML or JSON file and return its path."""
    def _write(data: Dict[str, Any], suffix: str = ".yaml"):
        path = tmp_path / f"scenario{suffix}"
        if suffix == ".json":
            path.write_text(json.dumps(data), encoding="utf-8")
        else:
            path.write_text(yaml.safe_dump(data), encoding="utf-8")
        return path
    return _write


@pytest.fixture(autouse=True)
def setup_test_environment():
    """Setup test environment before each test."""
    get_config.cache_clear()
    yield
    get_config.cache_clear()


# Test markers
def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "unit: Unit tests for individual modules"
    )
    config.addinivalue_line(
        "markers", "integration: End-to-end scenario and CLI tests"
    )
    config.addinivalue_line(
        "markers", "performance: Runtime-bounded acceptance runs"
    )
    config.addinivalue_line(
        "markers", "slow: Slow running tests that may be skipped locally"
    )
