"""
Adversarial and measurement endpoints: the spoofing attacker and the GETADDR crawler.
"""

from collections import Counter
from typing import Dict, Iterable, List, Optional, Set, Tuple

import structlog

from ..netsim.network import Envelope, Network, Outgoing
from ..node.hardened import NonceGen
from ..node.session import DEFAULT_MIN_ACCEPTED_VERSION, DEFAULT_PROTO_VERSION
from ..wire.types import Addr, GetAddr, Message, NetAddress, Verack, Version

logger = structlog.get_logger(__name__)

GUESS_BATCH = 10_000


class SpoofingAttacker:
    """
    Endpoint able to forge its source address.

    Off-path it only ever sees traffic addressed to itself. When the network
    taps it on-path, ``observe`` records handshake nonces sent to the victim
    so a later echo can use the real value.
    """

    def __init__(self, address: NetAddress, nonce_gen: Optional[NonceGen] = None):
        self.address = address
        self.nonce_gen = nonce_gen or NonceGen()
        self.received: List[Envelope] = []
        self.observed_nonces: Dict[Tuple[NetAddress, NetAddress], int] = {}
        self.guesses_made = 0
        self.used_observed_nonce = False

    def receive(self, envelope: Envelope, now: int) -> Iterable[Outgoing]:
        self.received.append(envelope)
        return ()

    def observe(self, envelope: Envelope, now: int) -> List[Envelope]:
        msg = envelope.msg
        if isinstance(msg, Verack) and msg.nonce is not None:
            self.observed_nonces[(envelope.actual_src, envelope.dst)] = msg.nonce
            logger.debug("Handshake nonce observed on path", reflector=str(envelope.actual_src),
                         victim=str(envelope.dst))
        return []

    def forge(self, claimed: NetAddress, dst: NetAddress, msg: Message, at: int = 0) -> Envelope:
        return Envelope(actual_src=self.address, claimed_src=claimed, dst=dst, msg=msg, deliver_at=at)

    def blind_reflection(self, net: Network, reflector: NetAddress, victim: NetAddress, request: Message) -> int:
        """
        Queue the spoofed VERSION, bare VERACK and ``request``, each timed to land
        after the reflector has processed the previous one. Returns how many passed the gate.
        """
        step = net.latency(self.address, reflector)
        script = (Version(proto_version=DEFAULT_PROTO_VERSION), Verack(), request)
        accepted = 0
        for i, msg in enumerate(script, start=1):
            if net.send(self.forge(victim, reflector, msg, at=net.now + i * step)):
                accepted += 1
        logger.info("Spoofed reflection script queued", reflector=str(reflector), victim=str(victim),
                    request=request.COMMAND, accepted=accepted)
        return accepted

    def schedule_guesses(
        self,
        net: Network,
        reflector: NetAddress,
        victim: NetAddress,
        guesses: int,
        *,
        start: int,
        batch: int = GUESS_BATCH,
    ) -> None:
        """
        Send ``guesses`` forged VERACK echoes in batches of ``batch`` per tick.

        If the nonce for (reflector, victim) has been observed by then, a single
        echo with the real value is sent instead.
        """
        remaining = guesses

        def fire(now: int) -> List[Envelope]:
            nonlocal remaining
            known = self.observed_nonces.get((reflector, victim))
            if known is not None:
                remaining = 0
                self.guesses_made += 1
                self.used_observed_nonce = True
                return [self.forge(victim, reflector, Verack(nonce=known))]

            count = min(batch, remaining)
            remaining -= count
            self.guesses_made += count
            draws = self.nonce_gen.draw_many(count).tolist()
            if remaining > 0:
                net.call_at(now + 1, self.address, fire)
            return [self.forge(victim, reflector, Verack(nonce=g)) for g in draws]

        if guesses > 0:
            net.call_at(start, self.address, fire)


class Crawler:
    """Breadth-first GETADDR crawler recording each responder's advertised version."""

    def __init__(
        self,
        address: NetAddress,
        proto_version: int = DEFAULT_PROTO_VERSION,
        census_threshold: int = DEFAULT_MIN_ACCEPTED_VERSION,
    ):
        self.address = address
        self.proto_version = proto_version
        self.census_threshold = census_threshold
        self.discovered: Set[NetAddress] = set()
        self.versions: Dict[NetAddress, Optional[int]] = {}

    def start(self, entry: NetAddress) -> List[Outgoing]:
        self.discovered.add(entry)
        return [(entry, Version(proto_version=self.proto_version))]

    def receive(self, envelope: Envelope, now: int) -> List[Outgoing]:
        peer, msg = envelope.claimed_src, envelope.msg

        if isinstance(msg, Verack):
            if peer in self.versions:
                return []
            self.versions[peer] = msg.proto_version
            # Echo whatever nonce came back so hardened nodes accept us too.
            return [
                (peer, Verack(proto_version=self.proto_version, nonce=msg.nonce)),
                (peer, GetAddr()),
            ]

        if isinstance(msg, Addr):
            replies: List[Outgoing] = []
            for addr in msg.peers:
                if addr != self.address and addr not in self.discovered:
                    self.discovered.add(addr)
                    replies.append((addr, Version(proto_version=self.proto_version)))
            return replies

        return []

    def census(self) -> Dict[int, int]:
        counts = Counter(v for v in self.versions.values() if v is not None)
        return {version: counts[version] for version in sorted(counts)}

    def vulnerable(self) -> List[NetAddress]:
        return sorted(
            addr for addr, version in self.versions.items()
            if version is not None and version < self.census_threshold
        )
