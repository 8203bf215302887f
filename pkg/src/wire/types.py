"""
Wire-level domain types.

Every message kind is an immutable dataclass carrying its command name in
``COMMAND``. List fields are tuples so messages are hashable and compare
element-wise.
"""

import hashlib
import ipaddress
from dataclasses import dataclass, field
from enum import IntEnum
from typing import ClassVar, Optional, Tuple, Union

HASH_LEN = 32
HEADER_ENTRY_LEN = 81

ADDR_CAP = 1000
INV_CAP = 50_000
HEADERS_CAP = 2000


@dataclass(frozen=True, order=True)
class Hash256:
    """32-byte transaction or block identifier, ordered byte-wise."""

    value: bytes

    def __post_init__(self):
        if len(self.value) != HASH_LEN:
            raise ValueError(f"Hash256 requires {HASH_LEN} bytes, got {len(self.value)}")

    @classmethod
    def of(cls, data: bytes) -> "Hash256":
        return cls(hashlib.sha256(data).digest())

    @classmethod
    def from_int(cls, n: int) -> "Hash256":
        """Big-endian identifier for a small label, e.g. ``from_int(101)`` for "#101"."""
        return cls(n.to_bytes(HASH_LEN, "big"))

    def hex(self) -> str:
        return self.value.hex()

    def short(self) -> str:
        return self.value.hex()[:12]

    def __repr__(self) -> str:
        return f"Hash256({self.short()})"


ZERO_HASH = Hash256(bytes(HASH_LEN))


@dataclass(frozen=True, order=True)
class NetAddress:
    """Routable endpoint address: dotted-quad host plus TCP port."""

    host: str
    port: int = 8333

    def __post_init__(self):
        if not self.host:
            raise ValueError("NetAddress host must be non-empty")
        ipaddress.IPv4Address(self.host)
        if not 1 <= self.port <= 65535:
            raise ValueError(f"NetAddress port out of range: {self.port}")

    def __str__(self) -> str:
        return f"{self.host}:{self.port}"


class InvKind(IntEnum):
    TX = 1
    BLOCK = 2


@dataclass(frozen=True, order=True)
class InvItem:
    kind: InvKind
    id: Hash256


@dataclass(frozen=True)
class HeaderEntry:
    id: Hash256
    prev_id: Hash256
    height: int

    def __post_init__(self):
        if self.height < 0:
            raise ValueError("HeaderEntry height must be non-negative")


@dataclass(frozen=True)
class Version:
    COMMAND: ClassVar[str] = "version"
    proto_version: int


@dataclass(frozen=True)
class Verack:
    """Handshake acknowledgment. ``nonce`` present means the hardened variant."""

    COMMAND: ClassVar[str] = "verack"
    proto_version: Optional[int] = None
    nonce: Optional[int] = None


@dataclass(frozen=True)
class GetAddr:
    COMMAND: ClassVar[str] = "getaddr"


@dataclass(frozen=True)
class Addr:
    COMMAND: ClassVar[str] = "addr"
    peers: Tuple[NetAddress, ...] = ()


@dataclass(frozen=True)
class Inv:
    COMMAND: ClassVar[str] = "inv"
    items: Tuple[InvItem, ...] = ()


@dataclass(frozen=True)
class GetData:
    COMMAND: ClassVar[str] = "getdata"
    items: Tuple[InvItem, ...] = ()


@dataclass(frozen=True)
class Tx:
    COMMAND: ClassVar[str] = "tx"
    id: Hash256
    payload_len: int = 0


@dataclass(frozen=True)
class Block:
    COMMAND: ClassVar[str] = "block"
    header: HeaderEntry
    tx_ids: Tuple[Hash256, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class GetHeaders:
    COMMAND: ClassVar[str] = "getheaders"
    locator: Hash256


@dataclass(frozen=True)
class Headers:
    COMMAND: ClassVar[str] = "headers"
    entries: Tuple[HeaderEntry, ...] = ()


@dataclass(frozen=True)
class Mempool:
    COMMAND: ClassVar[str] = "mempool"


Message = Union[Version, Verack, GetAddr, Addr, Inv, GetData, Tx, Block, GetHeaders, Headers, Mempool]

MESSAGE_TYPES = (Version, Verack, GetAddr, Addr, Inv, GetData, Tx, Block, GetHeaders, Headers, Mempool)

HANDSHAKE_TYPES = (Version, Verack)
