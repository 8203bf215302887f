"""
Unit tests for scenario topology builders.
"""

import numpy as np
import pytest

from src.attacks.topology import (
    Topology,
    derive_seeds,
    node_address,
    random_connected_edges,
    random_topology,
    reachable,
)
from src.node.session import NodeConfig
from src.wire.types import NetAddress

pytestmark = pytest.mark.unit


class TestAddresses:
    def test_node_address(self):
        assert node_address(0) == NetAddress("10.0.0.1")
        assert node_address(255) == NetAddress("10.0.1.0")
        assert node_address(3, prefix=172) == NetAddress("172.0.0.4")

    def test_derive_seeds_is_stable(self):
        assert derive_seeds(5, 4) == derive_seeds(5, 4)
        assert derive_seeds(5, 4) != derive_seeds(6, 4)
        assert len(set(derive_seeds(5, 100))) == 100
        assert derive_seeds(5, 0) == []


class TestRandomGraph:
    """Spanning tree plus chords."""

    def test_graph_is_connected_without_duplicates(self, rng):
        addrs = [node_address(i) for i in range(50)]
        edges = random_connected_edges(addrs, 50, rng)

        assert len(edges) == 99
        assert len({frozenset(e) for e in edges}) == 99
        topo = Topology(nodes=[(a, NodeConfig()) for a in addrs], edges=edges)
        assert reachable(topo, addrs[0]) == set(addrs)

    def test_chords_are_capped_by_complete_graph(self, rng):
        addrs = [node_address(i) for i in range(4)]
        assert len(random_connected_edges(addrs, 100, rng)) == 6

    def test_overrides_apply_to_one_node(self):
        topo = random_topology(5, 1, np.random.default_rng(1), overrides={2: {"hardened": True}})

        flags = [config.hardened for _, config in topo.nodes]
        assert flags == [False, False, True, False, False]

    def test_invalid_override_is_rejected(self):
        with pytest.raises(ValueError):
            random_topology(3, 1, np.random.default_rng(1),
                            overrides={0: {"proto_version": 60000, "min_accepted_version": 70001}})


class TestTopologyValidation:
    def test_self_loop(self):
        a = node_address(0)
        with pytest.raises(ValueError):
            Topology(nodes=[(a, NodeConfig())], edges=[(a, a)]).validate()

    def test_unknown_edge_endpoint(self):
        a, b = node_address(0), node_address(1)
        with pytest.raises(ValueError):
            Topology(nodes=[(a, NodeConfig())], edges=[(a, b)]).validate()

    def test_attacker_must_not_be_honest(self):
        a = node_address(0)
        with pytest.raises(ValueError):
            Topology(nodes=[(a, NodeConfig())], attacker=a).validate()

    def test_reachable_from_isolated_node(self):
        a, b = node_address(0), node_address(1)
        topo = Topology(nodes=[(a, NodeConfig()), (b, NodeConfig())])
        assert reachable(topo, a) == {a}
