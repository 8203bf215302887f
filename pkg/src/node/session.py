"""
Per-peer handshake state and node configuration.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..wire.types import NetAddress

DEFAULT_PROTO_VERSION = 70015
DEFAULT_MIN_ACCEPTED_VERSION = 70001


class NodeConfig(BaseModel):
    """Protocol parameters of a single node."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    proto_version: int = Field(default=DEFAULT_PROTO_VERSION, ge=0)
    min_accepted_version: int = Field(default=DEFAULT_MIN_ACCEPTED_VERSION, ge=0)
    hardened: bool = False
    max_outbound: int = Field(default=8, ge=1)
    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    nonce_bits: int = Field(default=64, ge=32, le=64)
    # An unanswered GETDATA item may be asked of another peer once it is older than this.
    getdata_timeout_ticks: int = Field(default=10, ge=1)

    @model_validator(mode="after")
    def check_version_floor(self):
        if self.min_accepted_version > self.proto_version:
            raise ValueError(
                f"min_accepted_version ({self.min_accepted_version}) exceeds "
                f"proto_version ({self.proto_version})"
            )
        return self


class SessionState(str, Enum):
    DISCONNECTED = "disconnected"
    # Initiator side: VERSION sent, waiting for the responder's VERACK.
    VERSION_SENT = "version_sent"
    VERSION_RECEIVED = "version_received"
    AWAITING_NONCE_ECHO = "awaiting_nonce_echo"
    ESTABLISHED = "established"


MID_HANDSHAKE = frozenset(
    {SessionState.VERSION_SENT, SessionState.VERSION_RECEIVED, SessionState.AWAITING_NONCE_ECHO}
)


@dataclass
class PeerSession:
    peer: NetAddress
    state: SessionState = SessionState.DISCONNECTED
    peer_version: Optional[int] = None
    expected_nonce: Optional[int] = None
    inbound: bool = True
    # Whether the current handshake attempt already has an audit record.
    attempt_audited: bool = False

    @property
    def established(self) -> bool:
        return self.state is SessionState.ESTABLISHED

    def reset(self) -> None:
        self.state = SessionState.DISCONNECTED
        self.expected_nonce = None
        self.peer_version = None
        self.attempt_audited = False
