"""
Honest Node State Machine

Implements the handshake (legacy three-message form and the nonce-hardened
variant), peer discovery, the INV/GETDATA gossip flood, headers sync and
mempool serving. A node never touches the transport directly: every handler
returns the ``(destination, message)`` pairs the simulator should send.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import structlog

from ..wire.types import (
    ADDR_CAP,
    HEADERS_CAP,
    INV_CAP,
    Addr,
    Block,
    GetAddr,
    GetData,
    GetHeaders,
    Headers,
    Inv,
    InvItem,
    InvKind,
    Mempool,
    Message,
    NetAddress,
    Tx,
    Verack,
    Version,
)
from .chain import ChainStore, KnownPeers, MempoolSet
from .hardened import AuditReason, HandshakeAuditLog, NonceGen, verify_echo
from .session import MID_HANDSHAKE, NodeConfig, PeerSession, SessionState

logger = structlog.get_logger(__name__)

Outgoing = Tuple[NetAddress, Message]


@dataclass
class SyncProgress:
    rounds: int = 1
    complete: bool = False


class Node:
    """A single honest peer. Single-owner: driven only by the simulator loop."""

    def __init__(self, address: NetAddress, config: Optional[NodeConfig] = None, chain: Optional[ChainStore] = None):
        self.address = address
        self.config = config or NodeConfig()
        self.chain = chain or ChainStore()
        self.mempool = MempoolSet()
        self.known_peers = KnownPeers(address)
        self.sessions: Dict[NetAddress, PeerSession] = {}
        self.audit = HandshakeAuditLog(owner=address)

        node_seq, nonce_seq = np.random.SeedSequence(self.config.rng_seed).spawn(2)
        self.rng = np.random.default_rng(node_seq)
        self.nonce_gen = NonceGen(nonce_seq, nonce_bits=self.config.nonce_bits)

        self.sync: Dict[NetAddress, SyncProgress] = {}
        self.announcements: Counter = Counter()
        self.getdata_sent = 0
        self._in_flight: Dict[InvItem, int] = {}

        self._handlers: Dict[type, Callable[[PeerSession, Message, int], List[Outgoing]]] = {
            GetHeaders: self._on_getheaders,
            Headers: self.handle_headers,
            Mempool: self._on_mempool,
            Inv: self._on_inv,
            GetData: self._on_getdata,
            GetAddr: self._on_getaddr,
            Addr: self.handle_addr,
            Tx: self.handle_tx,
            Block: self.handle_block,
        }
        self.log = logger.bind(node=str(address))

    def __repr__(self) -> str:
        return f"Node({self.address}, v{self.config.proto_version}, hardened={self.config.hardened})"

    # Session bookkeeping

    def session_for(self, peer: NetAddress) -> PeerSession:
        session = self.sessions.get(peer)
        if session is None:
            session = self.sessions[peer] = PeerSession(peer=peer)
        return session

    def established_peers(self) -> List[NetAddress]:
        return sorted(peer for peer, s in self.sessions.items() if s.state is SessionState.ESTABLISHED)

    def holds(self, item: InvItem) -> bool:
        if item.kind is InvKind.TX:
            return item.id in self.mempool or self.chain.is_confirmed(item.id)
        return item.id in self.chain

    # Transport entry points

    def receive(self, envelope, now: int) -> List[Outgoing]:
        """Deliver one envelope; the session is keyed by the claimed source."""
        return self.on_message(self.session_for(envelope.claimed_src), envelope.msg, now)

    def on_message(self, session: PeerSession, msg: Message, now: int) -> List[Outgoing]:
        if isinstance(msg, Version):
            return self.handle_version(session, msg, now)
        if isinstance(msg, Verack):
            return self.handle_verack(session, msg, now)
        if not session.established:
            self._drop_premature(session, msg, now)
            return []
        return self._handlers[type(msg)](session, msg, now)

    def on_quiescent(self, now: int) -> None:
        """Audit every handshake left mid-way that has no record for its current attempt."""
        for session in self.sessions.values():
            if session.state in MID_HANDSHAKE and not session.attempt_audited:
                self.audit.record(now, session.peer, AuditReason.INCOMPLETE)
                session.attempt_audited = True

    # Handshake

    def connect(self, peer: NetAddress) -> List[Outgoing]:
        """Open an outbound connection by sending VERSION."""
        session = self.session_for(peer)
        if session.state is not SessionState.DISCONNECTED:
            return []
        session.state = SessionState.VERSION_SENT
        session.inbound = False
        session.attempt_audited = False
        return [(peer, Version(proto_version=self.config.proto_version))]

    def handle_version(self, session: PeerSession, msg: Version, now: int) -> List[Outgoing]:
        """
        Answer an inbound VERSION with VERACK.

        Hardened nodes put a fresh nonce in the VERACK and wait for it to be
        echoed; legacy nodes wait for a bare VERACK.

        Args:
            session: Session for the claimed sender
            msg: The VERSION message
            now: Current tick

        Returns:
            The VERACK reply, or nothing when the message is dropped or the version rejected
        """
        if session.state is SessionState.ESTABLISHED:
            self.log.info("Duplicate VERSION on live session dropped", peer=str(session.peer))
            return []
        if session.state is SessionState.VERSION_SENT:
            self.log.info("VERSION received while own VERSION outstanding, dropped", peer=str(session.peer))
            return []

        if msg.proto_version < self.config.min_accepted_version:
            session.reset()
            self.audit.record(now, session.peer, AuditReason.VERSION_REJECTED)
            self.log.info("Rejected outdated peer version",
                          peer=str(session.peer),
                          peer_version=msg.proto_version,
                          min_accepted=self.config.min_accepted_version)
            return []

        # A VERSION on a half-open session restarts the handshake with a fresh nonce.
        session.inbound = True
        session.peer_version = msg.proto_version
        session.attempt_audited = False
        if self.config.hardened:
            session.expected_nonce = self.nonce_gen.next()
            session.state = SessionState.AWAITING_NONCE_ECHO
            reply = Verack(proto_version=self.config.proto_version, nonce=session.expected_nonce)
        else:
            session.expected_nonce = None
            session.state = SessionState.VERSION_RECEIVED
            reply = Verack(proto_version=self.config.proto_version)
        return [(session.peer, reply)]

    def handle_verack(self, session: PeerSession, msg: Verack, now: int) -> List[Outgoing]:
        """
        Complete a handshake.

        Args:
            session: Session for the claimed sender
            msg: The VERACK, possibly carrying a nonce
            now: Current tick

        Returns:
            The initiator's echo VERACK when this node opened the connection, otherwise nothing
        """
        state = session.state

        if state is SessionState.VERSION_SENT:
            if msg.proto_version is not None and msg.proto_version < self.config.min_accepted_version:
                session.reset()
                self.audit.record(now, session.peer, AuditReason.VERSION_REJECTED)
                self.log.info("Outbound peer below minimum version", peer=str(session.peer),
                              peer_version=msg.proto_version)
                return []
            session.peer_version = msg.proto_version
            self._establish(session)
            return [(session.peer, Verack(proto_version=self.config.proto_version, nonce=msg.nonce))]

        if state is SessionState.VERSION_RECEIVED:
            self._establish(session)
            return []

        if state is SessionState.AWAITING_NONCE_ECHO:
            if verify_echo(session.expected_nonce, msg.nonce, self.audit, time=now, claimed_peer=session.peer):
                self._establish(session)
            else:
                session.attempt_audited = True
            return []

        self.log.info("Unsolicited VERACK dropped", peer=str(session.peer), state=state.value)
        return []

    def _establish(self, session: PeerSession) -> None:
        session.state = SessionState.ESTABLISHED
        if not session.inbound:
            self.known_peers.add(session.peer)
        self.log.debug("Handshake completed", peer=str(session.peer), inbound=session.inbound,
                       peer_version=session.peer_version)

    def _drop_premature(self, session: PeerSession, msg: Message, now: int) -> None:
        if self.config.hardened:
            self.audit.record(now, session.peer, AuditReason.PREMATURE_MESSAGE)
            session.attempt_audited = True
        self.log.info("Message before completed handshake dropped",
                      peer=str(session.peer), command=msg.COMMAND, state=session.state.value)

    # Serving requests

    def handle_getheaders(self, session: PeerSession, msg: GetHeaders) -> Headers:
        return Headers(entries=tuple(self.chain.headers_after(msg.locator, HEADERS_CAP)))

    def handle_mempool(self, session: PeerSession, msg: Mempool) -> List[Inv]:
        ids = self.mempool.sorted_ids()
        if not ids:
            return [Inv()]
        return [
            Inv(items=tuple(InvItem(InvKind.TX, tx_id) for tx_id in ids[start:start + INV_CAP]))
            for start in range(0, len(ids), INV_CAP)
        ]

    def handle_inv(self, session: PeerSession, msg: Inv, now: int = 0) -> Optional[GetData]:
        """
        Request the advertised items this node lacks.

        Args:
            session: Session the announcement arrived on
            msg: The announcement
            now: Current tick

        Returns:
            GetData for the missing items, or None when nothing is wanted
        """
        timeout = self.config.getdata_timeout_ticks
        wanted = []
        for item in msg.items:
            if self.holds(item):
                continue
            requested_at = self._in_flight.get(item)
            if requested_at is not None and now - requested_at <= timeout:
                continue
            self._in_flight[item] = now
            wanted.append(item)
        if not wanted:
            return None
        self.getdata_sent += 1
        return GetData(items=tuple(wanted))

    def handle_getdata(self, session: PeerSession, msg: GetData) -> List[Message]:
        """Reply with each requested item held, in request order. Unknown items are skipped."""
        replies: List[Message] = []
        for item in msg.items:
            if item.kind is InvKind.TX:
                tx = self.mempool.get(item.id)
                if tx is not None:
                    replies.append(tx)
            else:
                block = self.chain.block(item.id)
                if block is not None:
                    replies.append(block)
        return replies

    def handle_getaddr(self, session: PeerSession, msg: GetAddr) -> Addr:
        candidates = [addr for addr in self.known_peers if addr != session.peer]
        k = min(ADDR_CAP, len(candidates))
        if k == 0:
            return Addr()
        picked = sorted(self.rng.choice(len(candidates), size=k, replace=False))
        return Addr(peers=tuple(candidates[i] for i in picked))

    def handle_addr(self, session: PeerSession, msg: Addr, now: int) -> List[Outgoing]:
        self.known_peers.update(msg.peers)
        return []

    def _on_getheaders(self, session, msg, now):
        return [(session.peer, self.handle_getheaders(session, msg))]

    def _on_mempool(self, session, msg, now):
        return [(session.peer, inv) for inv in self.handle_mempool(session, msg)]

    def _on_inv(self, session, msg, now):
        request = self.handle_inv(session, msg, now)
        return [] if request is None else [(session.peer, request)]

    def _on_getdata(self, session, msg, now):
        return [(session.peer, reply) for reply in self.handle_getdata(session, msg)]

    def _on_getaddr(self, session, msg, now):
        return [(session.peer, self.handle_getaddr(session, msg))]

    # Gossip

    def _announce(self, item: InvItem, exclude: Optional[NetAddress]) -> List[Outgoing]:
        self.announcements[item.id] += 1
        inv = Inv(items=(item,))
        return [(peer, inv) for peer in self.established_peers() if peer != exclude]

    def accept_transaction(self, tx: Tx, from_: Optional[NetAddress] = None) -> List[Outgoing]:
        """
        Add an unconfirmed transaction and advertise it to every neighbour except the sender.

        Args:
            tx: The transaction
            from_: Peer it arrived from, if any

        Returns:
            One INV per established neighbour; empty when the transaction is already known
        """
        if tx.id in self.mempool or self.chain.is_confirmed(tx.id):
            return []
        self.mempool.add(tx)
        return self._announce(InvItem(InvKind.TX, tx.id), from_)

    def accept_block(self, block: Block, from_: Optional[NetAddress] = None) -> List[Outgoing]:
        """Append a block extending the tip, drop its transactions from the mempool and advertise it."""
        if block.header.id in self.chain:
            return []
        if not self.chain.append(block):
            self.log.warning("Non-extending block dropped",
                             block=block.header.id.short(),
                             height=block.header.height,
                             tip_height=self.chain.height)
            return []
        self.mempool.remove_many(block.tx_ids)
        return self._announce(InvItem(InvKind.BLOCK, block.header.id), from_)

    def handle_tx(self, session: PeerSession, msg: Tx, now: int) -> List[Outgoing]:
        self._in_flight.pop(InvItem(InvKind.TX, msg.id), None)
        return self.accept_transaction(msg, session.peer)

    def handle_block(self, session: PeerSession, msg: Block, now: int) -> List[Outgoing]:
        self._in_flight.pop(InvItem(InvKind.BLOCK, msg.header.id), None)
        return self.accept_block(msg, session.peer)

    # Headers sync

    def start_sync(self, peer: NetAddress) -> List[Outgoing]:
        """
        Ask ``peer`` for the headers after our tip.

        Args:
            peer: An established neighbour

        Returns:
            The GETHEADERS request

        Raises:
            ValueError: If there is no established session with ``peer``
        """
        session = self.sessions.get(peer)
        if session is None or not session.established:
            raise ValueError(f"No established session with {peer}")
        self.sync[peer] = SyncProgress()
        return [(peer, GetHeaders(locator=self.chain.tip.id))]

    def handle_headers(self, session: PeerSession, msg: Headers, now: int) -> List[Outgoing]:
        progress = self.sync.get(session.peer)
        if progress is None or progress.complete:
            self.log.info("Unrequested HEADERS dropped", peer=str(session.peer), entries=len(msg.entries))
            return []

        replies: List[Outgoing] = []
        request = self.handle_inv(session, Inv(items=tuple(InvItem(InvKind.BLOCK, e.id) for e in msg.entries)), now)
        if request is not None:
            replies.append((session.peer, request))

        if len(msg.entries) == HEADERS_CAP:
            progress.rounds += 1
            replies.append((session.peer, GetHeaders(locator=msg.entries[-1].id)))
        else:
            progress.complete = True
            self.log.info("Headers sync complete", peer=str(session.peer), rounds=progress.rounds)
        return replies
