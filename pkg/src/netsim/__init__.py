"""
Network Simulator Module

Deterministic discrete-event transport with an explicit spoofing attacker
model, a DNS-seed service and per-flow byte accounting.
"""

from .config import SimConfig
from .ledger import ByteLedger, FlowCounters
from .network import Endpoint, Envelope, Network, SimTrace, Sink, TraceEvent
from .seeds import SEED_SAMPLE_SIZE, SeedDirectory, SeedService, seed_query

__all__ = [
    "SimConfig",
    "ByteLedger",
    "FlowCounters",
    "Endpoint",
    "Envelope",
    "Network",
    "SimTrace",
    "Sink",
    "TraceEvent",
    "SEED_SAMPLE_SIZE",
    "SeedDirectory",
    "SeedService",
    "seed_query",
]
