"""
Binary frame codec for the simulator's protocol subset.

Frame layout (little-endian integers)::

    magic      4 bytes   MAGIC
    command   12 bytes   ASCII name, NUL padded
    length     4 bytes   payload length
    checksum   4 bytes   first 4 bytes of SHA256(SHA256(payload))
    payload    length bytes

List payloads start with a compact count: 1 byte below 253, ``0xFD`` plus
uint16 up to 65535, ``0xFE`` plus uint32 beyond that.
"""

import hashlib
import ipaddress
import struct
from typing import Callable, Dict, List, Tuple, Type

from ..exceptions import (
    BadChecksum,
    BadMagic,
    CapExceeded,
    MalformedPayload,
    TrailingBytes,
    TruncatedPayload,
    UnknownCommand,
)
from .types import (
    ADDR_CAP,
    HASH_LEN,
    HEADER_ENTRY_LEN,
    HEADERS_CAP,
    INV_CAP,
    Addr,
    Block,
    GetAddr,
    GetData,
    GetHeaders,
    Hash256,
    HeaderEntry,
    Headers,
    Inv,
    InvItem,
    InvKind,
    Mempool,
    Message,
    MESSAGE_TYPES,
    NetAddress,
    Tx,
    Verack,
    Version,
)

# Simulator-only network magic; deliberately not the mainnet value.
MAGIC = bytes.fromhex("5e1f0a7d")
HEADER_LEN = 24
COMMAND_LEN = 12

_HEADER_RESERVED = bytes(HEADER_ENTRY_LEN - 2 * HASH_LEN - 8)

COMMANDS: Dict[str, Type] = {cls.COMMAND: cls for cls in MESSAGE_TYPES}


def checksum(payload: bytes) -> bytes:
    """First four bytes of the double SHA-256 of ``payload``."""
    return hashlib.sha256(hashlib.sha256(payload).digest()).digest()[:4]


def compact_size(n: int) -> bytes:
    if n < 0xFD:
        return bytes((n,))
    if n <= 0xFFFF:
        return b"\xfd" + struct.pack("<H", n)
    return b"\xfe" + struct.pack("<I", n)


def _check_cap(name: str, count: int, cap: int) -> None:
    if count > cap:
        raise CapExceeded(f"{name} carries {count} entries, cap is {cap}", count=count, cap=cap)


def _encode_header_entry(entry: HeaderEntry) -> bytes:
    return entry.id.value + entry.prev_id.value + struct.pack("<Q", entry.height) + _HEADER_RESERVED


def _encode_inv_items(items) -> bytes:
    return compact_size(len(items)) + b"".join(
        struct.pack("<I", int(item.kind)) + item.id.value for item in items
    )


def _encode_payload(msg: Message) -> bytes:
    if isinstance(msg, Version):
        return struct.pack("<I", msg.proto_version)
    if isinstance(msg, Verack):
        out = b""
        if msg.proto_version is not None:
            out += struct.pack("<I", msg.proto_version)
        if msg.nonce is not None:
            out += struct.pack("<Q", msg.nonce)
        return out
    if isinstance(msg, (GetAddr, Mempool)):
        return b""
    if isinstance(msg, Addr):
        _check_cap("addr", len(msg.peers), ADDR_CAP)
        return compact_size(len(msg.peers)) + b"".join(
            ipaddress.IPv4Address(peer.host).packed + struct.pack(">H", peer.port) for peer in msg.peers
        )
    if isinstance(msg, (Inv, GetData)):
        _check_cap(msg.COMMAND, len(msg.items), INV_CAP)
        return _encode_inv_items(msg.items)
    if isinstance(msg, Tx):
        return msg.id.value + compact_size(msg.payload_len) + bytes(msg.payload_len)
    if isinstance(msg, Block):
        return (
            _encode_header_entry(msg.header)
            + compact_size(len(msg.tx_ids))
            + b"".join(tx_id.value for tx_id in msg.tx_ids)
        )
    if isinstance(msg, GetHeaders):
        return msg.locator.value
    if isinstance(msg, Headers):
        _check_cap("headers", len(msg.entries), HEADERS_CAP)
        return compact_size(len(msg.entries)) + b"".join(_encode_header_entry(e) for e in msg.entries)
    raise TypeError(f"Not a wire message: {type(msg).__name__}")


def encode(msg: Message) -> bytes:
    """Serialize ``msg`` into a complete frame."""
    payload = _encode_payload(msg)
    command = msg.COMMAND.encode("ascii").ljust(COMMAND_LEN, b"\x00")
    return MAGIC + command + struct.pack("<I", len(payload)) + checksum(payload) + payload


class _PayloadReader:
    """Cursor over a payload that reports faults at absolute frame offsets."""

    def __init__(self, payload: bytes, base: int):
        self.payload = payload
        self.base = base
        self.pos = 0

    @property
    def offset(self) -> int:
        return self.base + self.pos

    def read(self, n: int) -> bytes:
        if self.pos + n > len(self.payload):
            raise MalformedPayload(
                f"payload needs {n} more bytes, {len(self.payload) - self.pos} left", self.offset
            )
        chunk = self.payload[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def read_count(self, name: str, cap: int = None) -> int:
        at = self.offset
        prefix = self.read(1)[0]
        if prefix < 0xFD:
            count = prefix
        elif prefix == 0xFD:
            count = struct.unpack("<H", self.read(2))[0]
        elif prefix == 0xFE:
            count = struct.unpack("<I", self.read(4))[0]
        else:
            raise MalformedPayload(f"unsupported compact-size prefix 0x{prefix:02x}", at)
        if cap is not None and count > cap:
            raise CapExceeded(f"{name} claims {count} entries, cap is {cap}", at, count=count, cap=cap)
        return count

    def read_hash(self) -> Hash256:
        return Hash256(self.read(HASH_LEN))

    def read_header_entry(self) -> HeaderEntry:
        raw = self.read(HEADER_ENTRY_LEN)
        height = struct.unpack("<Q", raw[2 * HASH_LEN:2 * HASH_LEN + 8])[0]
        return HeaderEntry(id=Hash256(raw[:HASH_LEN]), prev_id=Hash256(raw[HASH_LEN:2 * HASH_LEN]), height=height)

    def read_inv_items(self, name: str) -> Tuple[InvItem, ...]:
        count = self.read_count(name, INV_CAP)
        items: List[InvItem] = []
        for _ in range(count):
            at = self.offset
            kind = struct.unpack("<I", self.read(4))[0]
            try:
                inv_kind = InvKind(kind)
            except ValueError:
                raise MalformedPayload(f"unknown inventory kind {kind}", at) from None
            items.append(InvItem(inv_kind, self.read_hash()))
        return tuple(items)

    def finish(self) -> None:
        if self.pos != len(self.payload):
            raise MalformedPayload(f"{len(self.payload) - self.pos} unread payload bytes", self.offset)


def _decode_version(r: _PayloadReader) -> Message:
    return Version(proto_version=struct.unpack("<I", r.read(4))[0])


def _decode_verack(r: _PayloadReader) -> Message:
    size = len(r.payload)
    if size not in (0, 4, 8, 12):
        raise MalformedPayload(f"verack payload of {size} bytes", r.offset)
    proto_version = struct.unpack("<I", r.read(4))[0] if size in (4, 12) else None
    nonce = struct.unpack("<Q", r.read(8))[0] if size in (8, 12) else None
    return Verack(proto_version=proto_version, nonce=nonce)


def _decode_addr(r: _PayloadReader) -> Message:
    count = r.read_count("addr", ADDR_CAP)
    peers = []
    for _ in range(count):
        host = str(ipaddress.IPv4Address(r.read(4)))
        at = r.offset
        port = struct.unpack(">H", r.read(2))[0]
        try:
            peers.append(NetAddress(host, port))
        except ValueError as e:
            raise MalformedPayload(str(e), at) from None
    return Addr(peers=tuple(peers))


def _decode_tx(r: _PayloadReader) -> Message:
    tx_id = r.read_hash()
    payload_len = r.read_count("tx")
    r.read(payload_len)
    return Tx(id=tx_id, payload_len=payload_len)


def _decode_block(r: _PayloadReader) -> Message:
    header = r.read_header_entry()
    count = r.read_count("block")
    return Block(header=header, tx_ids=tuple(r.read_hash() for _ in range(count)))


def _decode_headers(r: _PayloadReader) -> Message:
    count = r.read_count("headers", HEADERS_CAP)
    return Headers(entries=tuple(r.read_header_entry() for _ in range(count)))


_DECODERS: Dict[str, Callable[[_PayloadReader], Message]] = {
    "version": _decode_version,
    "verack": _decode_verack,
    "getaddr": lambda r: GetAddr(),
    "addr": _decode_addr,
    "inv": lambda r: Inv(items=r.read_inv_items("inv")),
    "getdata": lambda r: GetData(items=r.read_inv_items("getdata")),
    "tx": _decode_tx,
    "block": _decode_block,
    "getheaders": lambda r: GetHeaders(locator=r.read_hash()),
    "headers": _decode_headers,
    "mempool": lambda r: Mempool(),
}


def decode(data: bytes) -> Message:
    """Parse exactly one frame. Raises a ``WireError`` subclass on any fault."""
    if len(data) < HEADER_LEN:
        raise TruncatedPayload(f"frame header needs {HEADER_LEN} bytes, got {len(data)}", len(data))
    if data[:4] != MAGIC:
        raise BadMagic(f"magic {data[:4].hex()} != {MAGIC.hex()}", 0)

    raw_command = data[4:4 + COMMAND_LEN]
    name = raw_command.rstrip(b"\x00")
    try:
        command = name.decode("ascii")
    except UnicodeDecodeError:
        raise UnknownCommand(f"non-ascii command {raw_command.hex()}", 4) from None
    if command not in _DECODERS or b"\x00" in name:
        raise UnknownCommand(f"unknown command {command!r}", 4)

    length = struct.unpack("<I", data[16:20])[0]
    end = HEADER_LEN + length
    if len(data) < end:
        raise TruncatedPayload(f"payload declares {length} bytes, {len(data) - HEADER_LEN} present", len(data))
    if len(data) > end:
        raise TrailingBytes(f"{len(data) - end} bytes after payload", end)

    payload = data[HEADER_LEN:end]
    if checksum(payload) != data[20:24]:
        raise BadChecksum(f"checksum {data[20:24].hex()} != {checksum(payload).hex()}", 20)

    reader = _PayloadReader(payload, HEADER_LEN)
    msg = _DECODERS[command](reader)
    reader.finish()
    return msg
