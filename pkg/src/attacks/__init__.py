"""
Attacks Module

Scenario drivers reproducing the GETHEADERS and MEMPOOL reflection attacks,
the spoofed handshake against a nonce-hardened node, seed-based eclipse,
GETADDR crawling and the flood and sync demonstrations. Every scenario
returns an AttackReport built from the simulator's byte ledger.
"""

from .actors import GUESS_BATCH, Crawler, SpoofingAttacker
from .report import AttackReport
from .scenarios import (
    DEFAULT_SWEEP_SIZES,
    SCENARIOS,
    CrawlResult,
    amplification_sweep,
    crawl_network,
    crawl_scenario,
    eclipse_via_seed,
    flood_demo,
    getheaders_reflection,
    mempool_reflection,
    spoof_vs_hardened,
    sweep_report,
    sync_demo,
)
from .topology import ATTACKER, CRAWLER, REFLECTOR, VICTIM, Topology, random_topology, reachable

__all__ = [
    "GUESS_BATCH",
    "Crawler",
    "SpoofingAttacker",
    "AttackReport",
    "DEFAULT_SWEEP_SIZES",
    "SCENARIOS",
    "CrawlResult",
    "amplification_sweep",
    "crawl_network",
    "crawl_scenario",
    "eclipse_via_seed",
    "flood_demo",
    "getheaders_reflection",
    "mempool_reflection",
    "spoof_vs_hardened",
    "sweep_report",
    "sync_demo",
    "ATTACKER",
    "CRAWLER",
    "REFLECTOR",
    "VICTIM",
    "Topology",
    "random_topology",
    "reachable",
]
