"""
Wire Module

Binary encoding and decoding of the protocol message subset plus the size
models used for attack cost arithmetic.
"""

from .types import (
    ADDR_CAP,
    HEADERS_CAP,
    INV_CAP,
    ZERO_HASH,
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
    NetAddress,
    Tx,
    Verack,
    Version,
)
from .codec import MAGIC, checksum, compact_size, decode, encode
from .sizing import FRAMING_PRESETS, SizeMode, SizeModel, message_size

__all__ = [
    "ADDR_CAP",
    "HEADERS_CAP",
    "INV_CAP",
    "ZERO_HASH",
    "Addr",
    "Block",
    "GetAddr",
    "GetData",
    "GetHeaders",
    "Hash256",
    "HeaderEntry",
    "Headers",
    "Inv",
    "InvItem",
    "InvKind",
    "Mempool",
    "Message",
    "NetAddress",
    "Tx",
    "Verack",
    "Version",
    "MAGIC",
    "checksum",
    "compact_size",
    "decode",
    "encode",
    "FRAMING_PRESETS",
    "SizeMode",
    "SizeModel",
    "message_size",
]
