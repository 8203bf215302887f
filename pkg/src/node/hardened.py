"""
Nonce-hardened handshake support.

The responder places a fresh random nonce in its VERACK; the initiator must
echo it in its own VERACK before any other traffic is accepted. An off-path
sender forging the initiator's address never sees the nonce and has to
guess it. Failed or incomplete handshakes are recorded in an audit log so
repeated bad echoes from one claimed peer can be reported.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Union

import numpy as np
import structlog

from ..wire.types import NetAddress

logger = structlog.get_logger(__name__)

# Attempt count at which a claimed peer is reported as a likely spoofer.
SUSPICION_THRESHOLD = 3


class NonceGen:
    """Seedable source of handshake nonces, uniform over ``[0, 2**nonce_bits)``."""

    def __init__(
        self,
        seed: Union[int, np.random.SeedSequence, np.random.Generator, None] = None,
        nonce_bits: int = 64,
    ):
        if not 32 <= nonce_bits <= 64:
            raise ValueError(f"nonce_bits must be between 32 and 64, got {nonce_bits}")
        self.nonce_bits = nonce_bits
        self._rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self._shift = 64 - nonce_bits

    def next(self) -> int:
        return int(self._rng.bit_generator.random_raw()) >> self._shift

    def draw_many(self, count: int) -> np.ndarray:
        """``count`` independent nonces as a uint64 array."""
        raw = self._rng.bit_generator.random_raw(count)
        return raw >> np.uint64(self._shift)


def gen_nonce(gen: NonceGen) -> int:
    return gen.next()


class AuditReason(str, Enum):
    WRONG_NONCE = "wrong_nonce"
    MISSING_NONCE = "missing_nonce"
    PREMATURE_MESSAGE = "premature_message"
    VERSION_REJECTED = "version_rejected"
    INCOMPLETE = "incomplete"


@dataclass(frozen=True, slots=True)
class HandshakeAuditRecord:
    """One failed or abandoned handshake step. Never carries nonce values."""

    time: int
    claimed_peer: NetAddress
    reason: AuditReason
    attempt_count: int


@dataclass
class PeerAuditSummary:
    claimed_peer: NetAddress
    attempt_count: int = 0
    reasons: Counter = field(default_factory=Counter)

    def to_dict(self) -> Dict:
        return {
            "claimed_peer": str(self.claimed_peer),
            "attempt_count": self.attempt_count,
            "reasons": {reason.value: count for reason, count in sorted(self.reasons.items())},
        }


class HandshakeAuditLog:
    """Append-only store of incomplete-handshake records for one node."""

    def __init__(self, owner: Optional[NetAddress] = None):
        self.owner = owner
        self._records: List[HandshakeAuditRecord] = []
        self._peers: Dict[NetAddress, PeerAuditSummary] = {}

    def __len__(self) -> int:
        return len(self._records)

    def record(self, time: int, claimed_peer: NetAddress, reason: AuditReason) -> HandshakeAuditRecord:
        summary = self._peers.get(claimed_peer)
        if summary is None:
            summary = self._peers[claimed_peer] = PeerAuditSummary(claimed_peer)
        summary.attempt_count += 1
        summary.reasons[reason] += 1
        entry = HandshakeAuditRecord(time, claimed_peer, reason, summary.attempt_count)
        self._records.append(entry)

        if summary.attempt_count == SUSPICION_THRESHOLD:
            logger.warning("Repeated handshake failures, possible spoofed connection",
                           node=str(self.owner), claimed_peer=str(claimed_peer),
                           attempts=summary.attempt_count, reason=reason.value)
        return entry

    def audit_report(self) -> List[HandshakeAuditRecord]:
        """All records in time order."""
        return sorted(self._records, key=lambda r: r.time)

    def peer_summary(self) -> Dict[NetAddress, PeerAuditSummary]:
        return {peer: self._peers[peer] for peer in sorted(self._peers)}

    def count(self, reason: Optional[AuditReason] = None) -> int:
        if reason is None:
            return len(self._records)
        return sum(summary.reasons[reason] for summary in self._peers.values())


def verify_echo(
    expected: int,
    received: Optional[int],
    audit: Optional[HandshakeAuditLog] = None,
    *,
    time: int = 0,
    claimed_peer: Optional[NetAddress] = None,
) -> bool:
    """
    Check an echoed nonce.

    Returns True iff ``received`` is present and equal to ``expected``.
    Failures are appended to ``audit`` when one is given.
    """
    if received is not None and received == expected:
        return True
    if audit is not None and claimed_peer is not None:
        reason = AuditReason.MISSING_NONCE if received is None else AuditReason.WRONG_NONCE
        audit.record(time, claimed_peer, reason)
    return False
