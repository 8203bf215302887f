"""
Node Module

The protocol state machine an honest node runs (handshake, peer discovery,
gossip flood, headers sync, mempool serving) and the nonce-hardened
handshake with its incomplete-handshake audit log.
"""

from .chain import GENESIS, ChainStore, KnownPeers, MempoolSet, make_block
from .hardened import (
    AuditReason,
    HandshakeAuditLog,
    HandshakeAuditRecord,
    NonceGen,
    gen_nonce,
    verify_echo,
)
from .node import Node, Outgoing
from .session import NodeConfig, PeerSession, SessionState

__all__ = [
    "GENESIS",
    "ChainStore",
    "KnownPeers",
    "MempoolSet",
    "make_block",
    "AuditReason",
    "HandshakeAuditLog",
    "HandshakeAuditRecord",
    "NonceGen",
    "gen_nonce",
    "verify_echo",
    "Node",
    "Outgoing",
    "NodeConfig",
    "PeerSession",
    "SessionState",
]
