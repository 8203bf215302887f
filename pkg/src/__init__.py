"""
reflectsim

Deterministic simulator and protocol library for the Bitcoin P2P message
subset used in reflection and amplification attacks:
- Wire codec and size models (VERSION, VERACK, GETHEADERS, MEMPOOL, ...)
- Honest node state machine with the nonce-hardened handshake
- Discrete-event transport with a spoofing attacker model and byte ledger
- Attack scenarios producing amplification reports
"""

__version__ = "1.0.0"
__description__ = "Bitcoin P2P reflection and amplification simulator"

# Core modules
from . import config
from . import exceptions

# Protocol and simulation modules
from . import wire
from . import node
from . import netsim
from . import attacks

__all__ = [
    "config",
    "exceptions",
    "wire",
    "node",
    "netsim",
    "attacks",
]
