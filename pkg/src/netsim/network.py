"""
Deterministic Discrete-Event Transport

Endpoints exchange ``Envelope`` objects through a ``simpy.Environment``. Each
delivery and timer is a timeout event, so events fire in (delivery tick,
insertion sequence) order. Forged source addresses pass the
spoof gate only when the attacker model allows it. Every delivery is charged
to the byte ledger and, when enabled, appended to the trace.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Iterator, List, NamedTuple, Optional, Protocol, Set, Tuple, Union

import numpy as np
import simpy
import structlog

from ..exceptions import MaxTicksExceeded, SpoofNotPermitted, UnknownDestination
from ..wire.sizing import message_size
from ..wire.types import Message, NetAddress
from .config import SimConfig
from .ledger import ByteLedger

logger = structlog.get_logger(__name__)

Outgoing = Tuple[NetAddress, Message]


@dataclass(frozen=True, slots=True)
class Envelope:
    actual_src: NetAddress
    claimed_src: NetAddress
    dst: NetAddress
    msg: Message
    deliver_at: int = 0

    @property
    def spoofed(self) -> bool:
        return self.claimed_src != self.actual_src


class Endpoint(Protocol):
    address: NetAddress

    def receive(self, envelope: Envelope, now: int) -> Iterable[Outgoing]:
        ...


class TraceEvent(NamedTuple):
    tick: int
    kind: str
    claimed_src: NetAddress
    actual_src: NetAddress
    dst: NetAddress
    command: str
    payload_bytes: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tick": self.tick,
            "event": self.kind,
            "claimed_src": str(self.claimed_src),
            "actual_src": str(self.actual_src),
            "dst": str(self.dst),
            "command": self.command,
            "payload_bytes": self.payload_bytes,
        }


@dataclass
class SimTrace:
    events: List[TraceEvent] = field(default_factory=list)
    truncated: bool = False
    final_tick: int = 0

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[TraceEvent]:
        return iter(self.events)

    def deliveries(self) -> List[TraceEvent]:
        return [e for e in self.events if e.kind == "deliver"]

    def rejections(self) -> List[TraceEvent]:
        return [e for e in self.events if e.kind == "reject"]

    def count(self, command: Optional[str] = None, dst: Optional[NetAddress] = None, kind: str = "deliver") -> int:
        return sum(
            1 for e in self.events
            if e.kind == kind and (command is None or e.command == command) and (dst is None or e.dst == dst)
        )

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_dict()) + "\n" for e in self.events)

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")


class Sink:
    """Passive endpoint that accepts traffic and never answers (a reflection victim)."""

    def __init__(self, address: NetAddress):
        self.address = address
        self.received: List[Envelope] = []

    def receive(self, envelope: Envelope, now: int) -> Iterable[Outgoing]:
        self.received.append(envelope)
        return ()


class Network:
    """Single-threaded event loop owning every registered endpoint."""

    def __init__(self, config: Optional[SimConfig] = None):
        self.config = config or SimConfig()
        self.env = simpy.Environment()
        self.rng = np.random.default_rng(self.config.seed)
        self.ledger = ByteLedger(self.config.size_model.framing_overhead_per_message)
        self.trace = SimTrace()
        self.rejected_spoofs = 0
        self.unroutable = 0

        self._endpoints: Dict[NetAddress, Endpoint] = {}
        self._attackers: Set[NetAddress] = set()
        self._taps: List[Tuple[Any, Set[NetAddress]]] = []
        self._link_latency: Dict[Tuple[NetAddress, NetAddress], int] = {}
        self._pending = 0

        self._latency = self.config.latency_ticks
        self._gate_open = self.config.spoof_gate_open
        self._on_path = self.config.attacker_on_path
        self._size_model = self.config.size_model
        self._record = self.config.record_trace

    # Registration

    def register(self, endpoint: Endpoint, *, attacker: bool = False) -> Endpoint:
        self._endpoints[endpoint.address] = endpoint
        if attacker:
            self._attackers.add(endpoint.address)
        return endpoint

    def endpoint(self, address: NetAddress) -> Endpoint:
        try:
            return self._endpoints[address]
        except KeyError:
            raise UnknownDestination(address) from None

    def endpoints(self) -> List[Endpoint]:
        return [self._endpoints[a] for a in sorted(self._endpoints)]

    def is_attacker(self, address: NetAddress) -> bool:
        return address in self._attackers

    def add_tap(self, observer, watched: Iterable[NetAddress]) -> None:
        """Give ``observer`` copies of envelopes to or from ``watched`` when the attacker is on-path."""
        self._taps.append((observer, set(watched)))

    def set_link_latency(self, a: NetAddress, b: NetAddress, ticks: int) -> None:
        if ticks < 1:
            raise ValueError("Link latency must be at least one tick")
        self._link_latency[(a, b)] = ticks
        self._link_latency[(b, a)] = ticks

    def latency(self, src: NetAddress, dst: NetAddress) -> int:
        return self._link_latency.get((src, dst), self._latency)

    # Sending

    def send(self, env: Envelope) -> bool:
        """
        Queue an envelope for delivery.

        Returns False when a forged source is stopped by the spoof gate.
        Delivery never happens earlier than now + link latency.
        """
        if env.dst not in self._endpoints:
            raise UnknownDestination(env.dst)
        if env.claimed_src != env.actual_src:
            if env.actual_src not in self._attackers:
                raise SpoofNotPermitted(f"{env.actual_src} may not claim to be {env.claimed_src}")
            if not self._gate_open:
                self.rejected_spoofs += 1
                if self._record:
                    self.trace.events.append(self._event("reject", env, self.now))
                logger.debug("Spoofed envelope rejected", actual_src=str(env.actual_src),
                             claimed_src=str(env.claimed_src), dst=str(env.dst), command=env.msg.COMMAND)
                return False

        earliest = self.now + self.latency(env.actual_src, env.dst)
        deliver_at = env.deliver_at if env.deliver_at > earliest else earliest
        self._schedule(deliver_at, lambda: self._deliver(env))
        return True

    def post(
        self,
        src: NetAddress,
        outgoing: Iterable[Outgoing],
        *,
        claimed_src: Optional[NetAddress] = None,
        at: int = 0,
    ) -> int:
        """Send each ``(dst, msg)`` from ``src``. Returns how many passed the spoof gate."""
        claimed = claimed_src or src
        accepted = 0
        for dst, msg in outgoing:
            if self.send(Envelope(actual_src=src, claimed_src=claimed, dst=dst, msg=msg, deliver_at=at)):
                accepted += 1
        return accepted

    def call_at(self, tick: int, owner: NetAddress, callback: Callable[[int], Iterable[Envelope]]) -> None:
        """Run ``callback(now)`` at ``tick``; the envelopes it returns are sent."""

        def fire() -> None:
            for env in callback(self.now):
                self.send(env)

        self._schedule(max(tick, self.now), fire)

    # Event loop

    @property
    def now(self) -> int:
        return self.env.now

    def _schedule(self, tick: int, action: Callable[[], None]) -> None:
        # simpy orders events by (time, priority, creation), so same-tick events keep insertion order
        event = self.env.timeout(tick - self.env.now)
        event.callbacks.append(lambda _event: self._fire(action))
        self._pending += 1

    def _fire(self, action: Callable[[], None]) -> None:
        self._pending -= 1
        action()

    def _event(self, kind: str, env: Envelope, tick: int) -> "TraceEvent":
        return TraceEvent(tick, kind, env.claimed_src, env.actual_src, env.dst, env.msg.COMMAND,
                          message_size(env.msg, self._size_model))

    def _deliver(self, env: Envelope) -> None:
        now = self.now
        size = message_size(env.msg, self._size_model)
        self.ledger.record(env.claimed_src, env.actual_src, env.dst, size)
        if self._record:
            self.trace.events.append(
                TraceEvent(now, "deliver", env.claimed_src, env.actual_src, env.dst, env.msg.COMMAND, size)
            )

        if self._taps and self._on_path:
            for observer, watched in self._taps:
                if observer.address != env.dst and (env.dst in watched or env.actual_src in watched):
                    for spoofed in observer.observe(env, now):
                        self._send_quietly(spoofed)

        replies = self._endpoints[env.dst].receive(env, now)
        for dst, msg in replies:
            self._send_quietly(Envelope(actual_src=env.dst, claimed_src=env.dst, dst=dst, msg=msg))

    def _send_quietly(self, env: Envelope) -> None:
        try:
            self.send(env)
        except UnknownDestination:
            self.unroutable += 1
            logger.debug("Reply to unregistered address discarded", src=str(env.actual_src), dst=str(env.dst))

    def run(self, until_quiescent: bool = True, strict: bool = False) -> SimTrace:
        """
        Process queued events in (tick, insertion) order.

        With ``until_quiescent`` the loop drains the queue; otherwise only the
        next tick's batch is processed. Hitting ``max_ticks`` marks the trace
        truncated (and raises ``MaxTicksExceeded`` when ``strict``).
        """
        if not self._endpoints:
            raise ValueError("No endpoints registered")

        max_ticks = self.config.max_ticks
        env = self.env
        batch_tick = env.peek()

        while self._pending:
            tick = env.peek()
            if tick > max_ticks:
                self.trace.truncated = True
                break
            if not until_quiescent and tick != batch_tick:
                break
            env.step()

        self.trace.final_tick = self.now
        if not self._pending:
            for endpoint in self.endpoints():
                hook = getattr(endpoint, "on_quiescent", None)
                if hook is not None:
                    hook(self.now)

        if self.trace.truncated:
            logger.warning("Simulation stopped at max_ticks", max_ticks=max_ticks, pending=self._pending)
            if strict:
                raise MaxTicksExceeded(max_ticks, self.trace)
        return self.trace

    @property
    def pending(self) -> int:
        return self._pending

    # Accounting

    def bytes_to(self, dst: NetAddress) -> Tuple[int, int]:
        return self.ledger.bytes_to(dst)

    def bytes_from_actual(self, src: NetAddress) -> Tuple[int, int]:
        return self.ledger.bytes_from_actual(src)
