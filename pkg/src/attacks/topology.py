"""
Topology builders for scenarios.

Addresses are assigned deterministically from documentation ranges, node
seeds are spawned from the simulator seed, and random graphs are drawn from
the simulator's numpy generator so a topology is a pure function of the seed.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import structlog

from ..netsim.network import Network
from ..node.chain import ChainStore
from ..node.node import Node
from ..node.session import NodeConfig
from ..wire.types import NetAddress

logger = structlog.get_logger(__name__)

ATTACKER = NetAddress("203.0.113.66")
VICTIM = NetAddress("198.51.100.7")
REFLECTOR = NetAddress("192.0.2.10")
CRAWLER = NetAddress("203.0.113.200")

Edge = Tuple[NetAddress, NetAddress]


def node_address(index: int, prefix: int = 10) -> NetAddress:
    """The ``index``-th address of a private /8, skipping the network address."""
    n = index + 1
    return NetAddress(f"{prefix}.{(n >> 16) & 0xFF}.{(n >> 8) & 0xFF}.{n & 0xFF}")


def derive_seeds(seed: int, count: int) -> List[int]:
    """``count`` independent 64-bit node seeds derived from one simulator seed."""
    if count == 0:
        return []
    state = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


def random_connected_edges(
    addresses: Sequence[NetAddress],
    extra_edges: int,
    rng: np.random.Generator,
) -> List[Edge]:
    """
    Random spanning tree over ``addresses`` plus ``extra_edges`` distinct random chords.

    Each edge is ordered (initiator, responder) with no duplicates in either direction.
    """
    n = len(addresses)
    if n < 2:
        return []

    order = rng.permutation(n)
    edges: List[Edge] = []
    seen: Set[frozenset] = set()
    for i in range(1, n):
        a = addresses[order[i]]
        b = addresses[order[int(rng.integers(0, i))]]
        edges.append((a, b))
        seen.add(frozenset((a, b)))

    max_edges = n * (n - 1) // 2
    target = min(len(edges) + extra_edges, max_edges)
    while len(edges) < target:
        i, j = rng.choice(n, size=2, replace=False)
        a, b = addresses[int(i)], addresses[int(j)]
        key = frozenset((a, b))
        if key in seen:
            continue
        seen.add(key)
        edges.append((a, b))
    return edges


@dataclass
class Topology:
    nodes: List[Tuple[NetAddress, NodeConfig]] = field(default_factory=list)
    edges: List[Edge] = field(default_factory=list)
    attacker: Optional[NetAddress] = None
    victim: Optional[NetAddress] = None

    def validate(self) -> None:
        names = {addr for addr, _ in self.nodes}
        if len(names) != len(self.nodes):
            raise ValueError("Duplicate node address in topology")
        for a, b in self.edges:
            if a not in names or b not in names:
                raise ValueError(f"Edge {a} - {b} references an unknown node")
            if a == b:
                raise ValueError(f"Self-loop on {a}")
        if self.attacker is not None and self.attacker == self.victim:
            raise ValueError("Attacker and victim must be distinct")
        if self.attacker in names or self.victim in names:
            raise ValueError("Attacker and victim must not be honest nodes")

    def neighbours(self) -> Dict[NetAddress, List[NetAddress]]:
        adj: Dict[NetAddress, List[NetAddress]] = {addr: [] for addr, _ in self.nodes}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def random_topology(
    node_count: int,
    seed: int,
    rng: np.random.Generator,
    *,
    extra_edges: Optional[int] = None,
    base_config: Optional[NodeConfig] = None,
    overrides: Optional[Dict[int, Dict]] = None,
) -> Topology:
    """
    ``node_count`` nodes on a random connected graph.

    ``overrides`` maps a node index to NodeConfig field updates (e.g. an older
    proto_version). Without ``extra_edges`` the graph gets about one chord per node.
    """
    base = base_config or NodeConfig()
    overrides = overrides or {}
    addresses = [node_address(i) for i in range(node_count)]
    seeds = derive_seeds(seed, node_count)
    nodes = [
        (addr, NodeConfig(**{**base.model_dump(), "rng_seed": s, **overrides.get(i, {})}))
        for i, (addr, s) in enumerate(zip(addresses, seeds))
    ]
    chords = node_count if extra_edges is None else extra_edges
    topo = Topology(nodes=nodes, edges=random_connected_edges(addresses, chords, rng))
    topo.validate()
    return topo


def build_nodes(
    net: Network,
    topology: Topology,
    chain_factory: Optional[Callable[[NetAddress], ChainStore]] = None,
) -> Dict[NetAddress, Node]:
    """Instantiate and register one Node per topology entry."""
    nodes: Dict[NetAddress, Node] = {}
    for addr, config in topology.nodes:
        chain = chain_factory(addr) if chain_factory else None
        nodes[addr] = net.register(Node(addr, config, chain))
    return nodes


def connect_edges(net: Network, nodes: Dict[NetAddress, Node], edges: Sequence[Edge]) -> int:
    """Run the handshake over every edge. Returns how many edges ended established on both sides."""
    for initiator, responder in edges:
        net.post(initiator, nodes[initiator].connect(responder))
    net.run()

    established = sum(
        1 for a, b in edges
        if nodes[a].session_for(b).established and nodes[b].session_for(a).established
    )
    if established != len(edges):
        logger.warning("Some topology edges failed to establish", edges=len(edges), established=established)
    return established


def seed_known_peers(nodes: Dict[NetAddress, Node], topology: Topology) -> None:
    """Fill each node's peer database with its graph neighbours (no connections opened)."""
    for addr, peers in topology.neighbours().items():
        nodes[addr].known_peers.update(peers)


def reachable(topology: Topology, entry: NetAddress) -> Set[NetAddress]:
    """Plain BFS over the neighbour relation."""
    adj = topology.neighbours()
    seen = {entry}
    frontier = [entry]
    while frontier:
        nxt = []
        for addr in frontier:
            for peer in adj.get(addr, ()):
                if peer not in seen:
                    seen.add(peer)
                    nxt.append(peer)
        frontier = nxt
    return seen
