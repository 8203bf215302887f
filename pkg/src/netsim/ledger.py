"""
Per-flow byte accounting.

Flows are keyed by (claimed source, actual source, destination) so reflected
traffic can be measured both from the victim's viewpoint (who it appears to
come from) and the network's (who actually sent it).
"""

from dataclasses import dataclass
from typing import Dict, Iterator, Tuple

from ..wire.types import NetAddress

FlowKey = Tuple[NetAddress, NetAddress, NetAddress]


@dataclass(slots=True)
class FlowCounters:
    message_count: int = 0
    payload_bytes: int = 0
    framed_bytes: int = 0


class ByteLedger:
    """Counts delivered messages only; counters never decrease."""

    def __init__(self, framing_overhead_per_message: int):
        self.framing_overhead = framing_overhead_per_message
        self._flows: Dict[FlowKey, FlowCounters] = {}

    def record(self, claimed_src: NetAddress, actual_src: NetAddress, dst: NetAddress, payload_bytes: int) -> None:
        key = (claimed_src, actual_src, dst)
        flow = self._flows.get(key)
        if flow is None:
            flow = self._flows[key] = FlowCounters()
        flow.message_count += 1
        flow.payload_bytes += payload_bytes
        flow.framed_bytes += payload_bytes + self.framing_overhead

    def flows(self) -> Iterator[Tuple[FlowKey, FlowCounters]]:
        for key in sorted(self._flows):
            yield key, self._flows[key]

    def _sum(self, predicate) -> Tuple[int, int]:
        payload = framed = 0
        for key, flow in self._flows.items():
            if predicate(key):
                payload += flow.payload_bytes
                framed += flow.framed_bytes
        return payload, framed

    def bytes_to(self, dst: NetAddress) -> Tuple[int, int]:
        """(payload_bytes, framed_bytes) delivered to ``dst``."""
        return self._sum(lambda key: key[2] == dst)

    def bytes_from_actual(self, src: NetAddress) -> Tuple[int, int]:
        """(payload_bytes, framed_bytes) delivered from messages ``src`` really sent."""
        return self._sum(lambda key: key[1] == src)

    def bytes_between(self, actual_src: NetAddress, dst: NetAddress) -> Tuple[int, int]:
        return self._sum(lambda key: key[1] == actual_src and key[2] == dst)

    def messages_to(self, dst: NetAddress) -> int:
        return sum(flow.message_count for key, flow in self._flows.items() if key[2] == dst)

    def totals(self) -> Tuple[int, int]:
        return self._sum(lambda key: True)
