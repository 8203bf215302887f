"""
Attack report model and its JSON rendering.
"""

import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..netsim.network import Network
from ..node.hardened import HandshakeAuditLog
from ..wire.types import NetAddress

RATIO_DIGITS = 2

FIELD_ORDER = (
    "scenario",
    "success",
    "attacker_tx_payload_bytes",
    "attacker_tx_framed_bytes",
    "victim_rx_payload_bytes",
    "victim_rx_framed_bytes",
    "amplification_payload",
    "amplification_framed",
    "notes",
    "trace_summary",
    "audit",
)


def _ratio(numerator: int, denominator: int) -> Optional[float]:
    return numerator / denominator if denominator > 0 else None


class AttackReport(BaseModel):
    """Outcome of one scenario run, with byte totals taken from the ledger."""

    model_config = ConfigDict(extra="forbid")

    scenario: str
    success: bool = False
    attacker_tx_payload_bytes: int = Field(default=0, ge=0)
    attacker_tx_framed_bytes: int = Field(default=0, ge=0)
    victim_rx_payload_bytes: int = Field(default=0, ge=0)
    victim_rx_framed_bytes: int = Field(default=0, ge=0)
    amplification_payload: Optional[float] = None
    amplification_framed: Optional[float] = None
    notes: Dict[str, Any] = Field(default_factory=dict)
    trace_summary: Dict[str, Any] = Field(default_factory=dict)
    audit: Optional[Dict[str, Any]] = None

    @classmethod
    def from_ledger(
        cls,
        scenario: str,
        network: Network,
        attacker: Optional[NetAddress],
        victim: Optional[NetAddress],
        *,
        success: bool,
        notes: Optional[Dict[str, Any]] = None,
        audit: Optional[HandshakeAuditLog] = None,
    ) -> "AttackReport":
        tx_payload, tx_framed = network.bytes_from_actual(attacker) if attacker else (0, 0)
        rx_payload, rx_framed = network.bytes_to(victim) if victim else (0, 0)
        return cls(
            scenario=scenario,
            success=success,
            attacker_tx_payload_bytes=tx_payload,
            attacker_tx_framed_bytes=tx_framed,
            victim_rx_payload_bytes=rx_payload,
            victim_rx_framed_bytes=rx_framed,
            amplification_payload=_ratio(rx_payload, tx_payload),
            amplification_framed=_ratio(rx_framed, tx_framed),
            notes=notes or {},
            trace_summary=trace_summary(network),
            audit=audit_summary(audit) if audit is not None else None,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Stable-ordered dict; ratios rounded, absent ratios omitted."""
        data = self.model_dump()
        out: Dict[str, Any] = {}
        for key in FIELD_ORDER:
            value = data[key]
            if value is None:
                continue
            if key.startswith("amplification_"):
                value = round(value, RATIO_DIGITS)
            elif key == "notes":
                value = {k: value[k] for k in sorted(value)}
            out[key] = value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def trace_summary(network: Network) -> Dict[str, Any]:
    messages = sum(flow.message_count for _, flow in network.ledger.flows())
    return {
        "delivered_messages": messages,
        "rejected_spoofs": network.rejected_spoofs,
        "final_tick": network.now,
        "truncated": network.trace.truncated,
    }


def audit_summary(audit: HandshakeAuditLog) -> Dict[str, Any]:
    peers: List[Dict[str, Any]] = [summary.to_dict() for summary in audit.peer_summary().values()]
    return {"records": len(audit), "peers": peers}
