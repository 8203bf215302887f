"""
Attack and Demonstration Scenarios

Each scenario registers its endpoints on a fresh ``Network``, drives it to
quiescence and summarises the byte ledger in an ``AttackReport``. Scenarios
never open the spoof gate themselves; that is a property of the SimConfig.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set

import structlog

from ..exceptions import ScenarioPreconditionFailed
from ..netsim.config import SimConfig
from ..netsim.network import Network, Sink
from ..netsim.seeds import SEED_SAMPLE_SIZE, SeedDirectory, SeedService
from ..node.chain import ChainStore
from ..node.hardened import NonceGen
from ..node.node import Node
from ..node.session import DEFAULT_MIN_ACCEPTED_VERSION, NodeConfig
from ..wire.types import HEADERS_CAP, INV_CAP, GetHeaders, Hash256, Headers, Inv, Mempool, NetAddress, Tx, Version
from .actors import GUESS_BATCH, Crawler, SpoofingAttacker
from .report import AttackReport
from .topology import (
    ATTACKER,
    CRAWLER,
    REFLECTOR,
    VICTIM,
    build_nodes,
    connect_edges,
    derive_seeds,
    node_address,
    random_topology,
    reachable,
    seed_known_peers,
)

logger = structlog.get_logger(__name__)

DEFAULT_CHAIN_HEIGHT = 2100
DEFAULT_TX_PAYLOAD_LEN = 250
DEFAULT_GUESSES = 1_000_000
DEFAULT_SWEEP_SIZES = (0, 6_607, 28_758, 50_000)
VULNERABLE_PROTO_VERSION = 60002
ATTACKER_PREFIX = 172

# Commonly published figures for a full GETHEADERS reflection. The per-message
# sizes 85 + 24 + 69 actually sum to 178, which is what the ledger measures.
PUBLISHED_REQUEST_BYTES = 168
PUBLISHED_AMPLIFICATION = 964.29


def _require_spoof_gate(net: Network, scenario: str, enforce: bool) -> None:
    if net.config.spoof_gate_open:
        return
    if enforce:
        raise ScenarioPreconditionFailed(
            f"{scenario} needs a forged source to reach the reflector: set tcp_sequence_compromised "
            f"or attacker_on_path"
        )
    logger.warning("Spoof gate closed, spoofed traffic will be rejected", scenario=scenario)


def _reflection_setup(net: Network, reflector: Node, victim: NetAddress, attacker: NetAddress) -> SpoofingAttacker:
    attacker_seed = derive_seeds(net.config.seed, 2)[1]
    mallory = SpoofingAttacker(attacker, NonceGen(attacker_seed, nonce_bits=reflector.config.nonce_bits))
    net.register(reflector)
    net.register(Sink(victim))
    net.register(mallory, attacker=True)
    return mallory


def _reflector_config(net: Network, hardened: bool, **updates) -> NodeConfig:
    return NodeConfig(hardened=hardened, rng_seed=derive_seeds(net.config.seed, 2)[0], **updates)


def getheaders_reflection(
    net: Network,
    reflector_chain_height: int = DEFAULT_CHAIN_HEIGHT,
    victim: NetAddress = VICTIM,
    *,
    headers_returned: int = HEADERS_CAP,
    hardened: bool = False,
    enforce_preconditions: bool = True,
    reflector: NetAddress = REFLECTOR,
    attacker: NetAddress = ATTACKER,
) -> AttackReport:
    """
    Reflect a HEADERS reply onto ``victim``.

    The attacker completes a blind spoofed handshake with the reflector as
    ``victim``, then sends GETHEADERS whose locator sits ``headers_returned``
    blocks below the reflector's tip.

    Args:
        net: Network the reflector, attacker and victim are registered on
        reflector_chain_height: Blocks above genesis on the reflector
        victim: Address the attacker impersonates
        headers_returned: Headers the reply should carry (at most 2000)
        hardened: Give the reflector the nonce-echo handshake
        enforce_preconditions: Raise when the spoof gate is closed

    Returns:
        AttackReport with byte totals and amplification for the reflection

    Raises:
        ScenarioPreconditionFailed: If the spoof gate is closed or the chain is too short
    """
    if not 0 <= headers_returned <= HEADERS_CAP:
        raise ScenarioPreconditionFailed(f"headers_returned must be within [0, {HEADERS_CAP}], got {headers_returned}")
    if reflector_chain_height < headers_returned:
        raise ScenarioPreconditionFailed(
            f"Reflector chain height {reflector_chain_height} is below headers_returned {headers_returned}"
        )
    _require_spoof_gate(net, "getheaders_reflection", enforce_preconditions)

    chain = ChainStore.generate(reflector_chain_height)
    node = Node(reflector, _reflector_config(net, hardened), chain)
    mallory = _reflection_setup(net, node, victim, attacker)

    locator_height = chain.height - headers_returned
    mallory.blind_reflection(net, reflector, victim, GetHeaders(locator=chain.entry_at(locator_height).id))
    net.run()

    sink = net.endpoint(victim)
    replies = [env.msg for env in sink.received if isinstance(env.msg, Headers)]
    notes = {
        "reflector_chain_height": reflector_chain_height,
        "locator_height": locator_height,
        "headers_returned": sum(len(h.entries) for h in replies),
        "hardened": hardened,
        "published_request_bytes": PUBLISHED_REQUEST_BYTES,
        "published_amplification": PUBLISHED_AMPLIFICATION,
    }
    report = AttackReport.from_ledger(
        "getheaders_reflection", net, attacker, victim,
        success=bool(replies), notes=notes, audit=node.audit if hardened else None,
    )
    logger.info("Scenario completed", scenario=report.scenario, success=report.success,
                amplification=report.amplification_payload)
    return report


def mempool_reflection(
    net: Network,
    mempool_size: int = INV_CAP,
    victim: NetAddress = VICTIM,
    *,
    tx_payload_len: int = DEFAULT_TX_PAYLOAD_LEN,
    hardened: bool = False,
    enforce_preconditions: bool = True,
    reflector: NetAddress = REFLECTOR,
    attacker: NetAddress = ATTACKER,
) -> AttackReport:
    """
    Reflect the reflector's full mempool inventory onto ``victim`` with a spoofed MEMPOOL request.

    Args:
        net: Network to run on
        mempool_size: Transactions preloaded into the reflector's mempool
        victim: Address the attacker impersonates
        tx_payload_len: Payload length of each preloaded transaction
        hardened: Give the reflector the nonce-echo handshake
        enforce_preconditions: Raise when the spoof gate is closed

    Returns:
        AttackReport; INV replies larger than 50,000 items are split across messages
    """
    if mempool_size < 0:
        raise ScenarioPreconditionFailed(f"mempool_size must be non-negative, got {mempool_size}")
    _require_spoof_gate(net, "mempool_reflection", enforce_preconditions)

    node = Node(reflector, _reflector_config(net, hardened))
    for i in range(mempool_size):
        node.mempool.add(Tx(id=Hash256.from_int(i + 1), payload_len=tx_payload_len))
    mallory = _reflection_setup(net, node, victim, attacker)

    mallory.blind_reflection(net, reflector, victim, Mempool())
    net.run()

    sink = net.endpoint(victim)
    invs = [env.msg for env in sink.received if isinstance(env.msg, Inv)]
    notes = {
        "mempool_size": mempool_size,
        "inv_messages": len(invs),
        "inv_items": sum(len(inv.items) for inv in invs),
        "hardened": hardened,
    }
    report = AttackReport.from_ledger(
        "mempool_reflection", net, attacker, victim,
        success=bool(invs), notes=notes, audit=node.audit if hardened else None,
    )
    logger.info("Scenario completed", scenario=report.scenario, success=report.success,
                mempool_size=mempool_size, amplification=report.amplification_payload)
    return report


def spoof_vs_hardened(
    net: Network,
    guesses: int = DEFAULT_GUESSES,
    victim: NetAddress = VICTIM,
    *,
    nonce_bits: int = 64,
    mempool_size: int = 0,
    batch: int = GUESS_BATCH,
    enforce_preconditions: bool = True,
    reflector: NetAddress = REFLECTOR,
    attacker: NetAddress = ATTACKER,
) -> AttackReport:
    """
    Spoofed handshake against a nonce-hardened reflector.

    After one forged VERSION the attacker sends ``guesses`` VERACK echoes with
    random nonces. An on-path attacker instead echoes the nonce it saw the
    reflector send to ``victim``. If a guess lands, a MEMPOOL request follows
    to show the session is usable.

    Args:
        net: Network to run on
        guesses: Forged VERACK echoes to send
        victim: Address the attacker impersonates
        nonce_bits: Width of the reflector's nonce
        mempool_size: Transactions in the reflector's mempool for the follow-up request
        batch: Guesses sent per tick

    Returns:
        AttackReport with the reflector's audit summary attached
    """
    if guesses < 1:
        raise ScenarioPreconditionFailed(f"guesses must be positive, got {guesses}")
    _require_spoof_gate(net, "spoof_vs_hardened", enforce_preconditions)

    node = Node(reflector, _reflector_config(net, True, nonce_bits=nonce_bits))
    for i in range(mempool_size):
        node.mempool.add(Tx(id=Hash256.from_int(i + 1), payload_len=DEFAULT_TX_PAYLOAD_LEN))
    mallory = _reflection_setup(net, node, victim, attacker)
    net.add_tap(mallory, [victim])

    step = net.latency(attacker, reflector)
    net.send(mallory.forge(victim, reflector, Version(proto_version=NodeConfig().proto_version), at=net.now + step))
    first_guess = net.now + step + net.latency(reflector, victim) + 1
    mallory.schedule_guesses(net, reflector, victim, guesses, start=first_guess, batch=batch)
    net.run()

    success = node.session_for(victim).established
    if success:
        net.send(mallory.forge(victim, reflector, Mempool()))
        net.run()

    notes = {
        "nonce_guesses": mallory.guesses_made,
        "nonce_bits": nonce_bits,
        "audit_records": len(node.audit),
        "observed_nonce_used": mallory.used_observed_nonce,
    }
    report = AttackReport.from_ledger(
        "spoof_vs_hardened", net, attacker, victim, success=success, notes=notes, audit=node.audit,
    )
    logger.info("Scenario completed", scenario=report.scenario, success=success,
                guesses=mallory.guesses_made, audit_records=len(node.audit))
    return report


def eclipse_via_seed(
    net: Network,
    victim: NetAddress = VICTIM,
    compromised: bool = True,
    *,
    honest_count: int = 32,
    attacker_count: int = 16,
    seed_services: int = 1,
    compromised_seeds: Optional[int] = None,
    attacker_share_in_honest_pool: float = 0.0,
    max_outbound: int = 8,
) -> AttackReport:
    """
    Boot ``victim`` from seed answers and measure the share of its outbound
    connections that land on attacker nodes.

    ``compromised_seeds`` overrides how many of the ``seed_services`` answer
    only with attacker addresses (all of them when ``compromised``, none
    otherwise). ``attacker_share_in_honest_pool`` mixes attacker addresses
    into the honest answer pool at that proportion.
    """
    if not 0.0 <= attacker_share_in_honest_pool < 1.0:
        raise ScenarioPreconditionFailed("attacker_share_in_honest_pool must be within [0, 1)")
    if compromised_seeds is None:
        compromised_seeds = seed_services if compromised else 0
    if not 0 <= compromised_seeds <= seed_services:
        raise ScenarioPreconditionFailed(f"compromised_seeds must be within [0, {seed_services}]")

    share = attacker_share_in_honest_pool
    mixed = round(share / (1.0 - share) * honest_count) if share > 0 else 0
    attacker_total = max(attacker_count, mixed)

    honest = [node_address(i) for i in range(honest_count)]
    malicious = [node_address(i, prefix=ATTACKER_PREFIX) for i in range(attacker_total)]
    seeds = derive_seeds(net.config.seed, honest_count + attacker_total + 1)
    for addr, s in zip(honest + malicious, seeds):
        net.register(Node(addr, NodeConfig(rng_seed=s)))
    booting = net.register(Node(victim, NodeConfig(rng_seed=seeds[-1], max_outbound=max_outbound)))

    directory = SeedDirectory([
        SeedService(
            name=f"seed-{i}",
            honest_peers=honest + malicious[:mixed],
            attacker_peers=list(malicious),
            compromised=i < compromised_seeds,
        )
        for i in range(seed_services)
    ])
    answers = directory.query_all(net.rng, SEED_SAMPLE_SIZE)
    booting.known_peers.update(answers)
    for peer in answers[:max_outbound]:
        net.post(victim, booting.connect(peer))
    net.run()

    attacker_set: Set[NetAddress] = set(malicious)
    connections = booting.established_peers()
    hostile = [p for p in connections if p in attacker_set]
    fraction = len(hostile) / len(connections) if connections else 0.0

    notes = {
        "malicious_fraction": fraction,
        "connections": len(connections),
        "malicious_connections": len(hostile),
        "seed_services": seed_services,
        "compromised_seeds": compromised_seeds,
        "seed_answers": len(answers),
    }
    report = AttackReport.from_ledger(
        "eclipse_via_seed", net, None, victim,
        success=bool(connections) and fraction == 1.0, notes=notes,
    )
    logger.info("Scenario completed", scenario=report.scenario, malicious_fraction=fraction,
                connections=len(connections))
    return report


@dataclass
class CrawlResult:
    discovered: Set[NetAddress] = field(default_factory=set)
    census: Dict[int, int] = field(default_factory=dict)
    vulnerable: List[NetAddress] = field(default_factory=list)


def crawl_network(
    net: Network,
    entry: NetAddress,
    *,
    crawler: NetAddress = CRAWLER,
    census_threshold: int = DEFAULT_MIN_ACCEPTED_VERSION,
) -> CrawlResult:
    """
    Breadth-first GETADDR crawl from ``entry`` over nodes already registered on ``net``.

    Args:
        net: Network holding the nodes to crawl
        entry: First node contacted
        crawler: Address the crawler registers under
        census_threshold: Versions below this are listed as vulnerable

    Returns:
        CrawlResult with the discovered addresses, version census and vulnerable nodes
    """
    bot = net.register(Crawler(crawler, census_threshold=census_threshold))
    net.post(crawler, bot.start(entry))
    net.run()
    logger.info("Crawl finished", entry=str(entry), discovered=len(bot.discovered), handshakes=len(bot.versions))
    return CrawlResult(discovered=set(bot.discovered), census=bot.census(), vulnerable=bot.vulnerable())


def crawl_scenario(
    net: Network,
    node_count: int = 200,
    *,
    vulnerable_count: int = 3,
    census_threshold: int = DEFAULT_MIN_ACCEPTED_VERSION,
    extra_edges: Optional[int] = None,
) -> AttackReport:
    """Build a random knowledge graph with some outdated nodes, crawl it and report the census."""
    if not 0 <= vulnerable_count <= node_count:
        raise ScenarioPreconditionFailed("vulnerable_count must be within [0, node_count]")
    outdated = sorted(int(i) for i in net.rng.choice(node_count, size=vulnerable_count, replace=False))
    overrides = {
        i: {"proto_version": VULNERABLE_PROTO_VERSION, "min_accepted_version": VULNERABLE_PROTO_VERSION}
        for i in outdated
    }
    topo = random_topology(node_count, net.config.seed, net.rng, extra_edges=extra_edges, overrides=overrides)
    nodes = build_nodes(net, topo)
    seed_known_peers(nodes, topo)

    entry = topo.nodes[0][0]
    result = crawl_network(net, entry, census_threshold=census_threshold)
    expected = reachable(topo, entry)

    notes = {
        "nodes": node_count,
        "discovered": len(result.discovered),
        "reachable": len(expected),
        "census": {str(version): count for version, count in result.census.items()},
        "census_threshold": census_threshold,
        "vulnerable": [str(a) for a in result.vulnerable],
    }
    return AttackReport.from_ledger(
        "crawl", net, None, None, success=result.discovered == expected, notes=notes,
    )


def flood_demo(net: Network, node_count: int = 100, *, extra_edges: Optional[int] = None) -> AttackReport:
    """Inject one transaction at a node of a random connected network and flood it to quiescence."""
    if node_count < 1:
        raise ScenarioPreconditionFailed("node_count must be positive")
    topo = random_topology(node_count, net.config.seed, net.rng, extra_edges=extra_edges)
    nodes = build_nodes(net, topo)
    connect_edges(net, nodes, topo.edges)

    tx = Tx(id=Hash256.of(b"flood-demo-tx"), payload_len=DEFAULT_TX_PAYLOAD_LEN)
    origin = topo.nodes[0][0]
    net.post(origin, nodes[origin].accept_transaction(tx))
    net.run()

    holders = sum(1 for node in nodes.values() if tx.id in node.mempool)
    max_announcements = max(node.announcements[tx.id] for node in nodes.values())
    getdata = sum(node.getdata_sent for node in nodes.values())
    notes = {
        "nodes": node_count,
        "edges": len(topo.edges),
        "nodes_with_tx": holders,
        "max_announcements_per_node": max_announcements,
        "getdata_requests": getdata,
        "nodes_lacking_tx": node_count - 1,
    }
    success = holders == node_count and max_announcements <= 1 and getdata == node_count - 1
    logger.info("Scenario completed", scenario="flood_demo", success=success, nodes_with_tx=holders)
    return AttackReport.from_ledger("flood_demo", net, None, None, success=success, notes=notes)


def sync_demo(
    net: Network,
    blocks_behind: int = 4_500,
    *,
    peer: NetAddress = REFLECTOR,
    syncing: NetAddress = VICTIM,
) -> AttackReport:
    """A node at genesis catches up with a peer ``blocks_behind`` blocks ahead via paged GETHEADERS."""
    if blocks_behind < 0:
        raise ScenarioPreconditionFailed("blocks_behind must be non-negative")
    seeds = derive_seeds(net.config.seed, 2)
    ahead = net.register(Node(peer, NodeConfig(rng_seed=seeds[0]), ChainStore.generate(blocks_behind)))
    behind = net.register(Node(syncing, NodeConfig(rng_seed=seeds[1])))
    connect_edges(net, {peer: ahead, syncing: behind}, [(syncing, peer)])

    net.post(syncing, behind.start_sync(peer))
    net.run()

    progress = behind.sync[peer]
    equal = behind.chain.entries == ahead.chain.entries
    notes = {
        "blocks_behind": blocks_behind,
        "getheaders_rounds": progress.rounds,
        "final_height": behind.chain.height,
        "chains_equal": equal,
    }
    logger.info("Scenario completed", scenario="sync_demo", rounds=progress.rounds, chains_equal=equal)
    return AttackReport.from_ledger("sync_demo", net, None, syncing, success=progress.complete and equal, notes=notes)


def amplification_sweep(
    config: SimConfig,
    mempool_sizes: Sequence[int] = DEFAULT_SWEEP_SIZES,
    **kwargs,
) -> List[AttackReport]:
    """One mempool reflection per size, each on its own network."""
    return [mempool_reflection(Network(config), size, **kwargs) for size in mempool_sizes]


def sweep_report(reports: Sequence[AttackReport]) -> AttackReport:
    """Fold a sweep into one report listing each point."""
    points = [
        {
            "mempool_size": r.notes["mempool_size"],
            "victim_rx_payload_bytes": r.victim_rx_payload_bytes,
            "amplification_payload": round(r.amplification_payload, 2) if r.amplification_payload is not None else None,
            "amplification_framed": round(r.amplification_framed, 2) if r.amplification_framed is not None else None,
        }
        for r in reports
    ]
    ratios = [r.amplification_payload or 0.0 for r in reports]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    return AttackReport(
        scenario="amplification_sweep",
        success=bool(reports) and all(r.success for r in reports),
        notes={"sweep": points, "strictly_increasing": increasing},
    )


ScenarioRunner = Callable[..., AttackReport]

SCENARIOS: Dict[str, ScenarioRunner] = {
    "getheaders_reflection": getheaders_reflection,
    "mempool_reflection": mempool_reflection,
    "spoof_vs_hardened": spoof_vs_hardened,
    "eclipse_via_seed": eclipse_via_seed,
    "crawl": crawl_scenario,
    "flood_demo": flood_demo,
    "sync_demo": sync_demo,
}
