"""
Unit tests for the wire codec.

Covers frame layout, checksum fixtures, cap enforcement, error offsets and
seeded property checks over randomly generated messages.
"""

import struct

import numpy as np
import pytest

from src.exceptions import (
    BadChecksum,
    BadMagic,
    CapExceeded,
    MalformedPayload,
    TrailingBytes,
    TruncatedPayload,
    UnknownCommand,
)
from src.wire.codec import HEADER_LEN, MAGIC, checksum, compact_size, decode, encode
from src.wire.types import (
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
    NetAddress,
    Tx,
    Verack,
    Version,
)

pytestmark = pytest.mark.unit


def _hash(rng: np.random.Generator) -> Hash256:
    return Hash256(rng.bytes(32))


def _entry(rng: np.random.Generator) -> HeaderEntry:
    return HeaderEntry(id=_hash(rng), prev_id=_hash(rng), height=int(rng.integers(0, 2**40)))


def _items(rng: np.random.Generator, n: int):
    return tuple(InvItem(InvKind(int(rng.integers(1, 3))), _hash(rng)) for _ in range(n))


def random_message(rng: np.random.Generator):
    kind = int(rng.integers(0, 11))
    if kind == 0:
        return Version(proto_version=int(rng.integers(0, 2**32)))
    if kind == 1:
        version = int(rng.integers(0, 2**32)) if rng.random() < 0.5 else None
        nonce = int(rng.integers(0, 2**63)) * 2 + int(rng.integers(0, 2)) if rng.random() < 0.5 else None
        return Verack(proto_version=version, nonce=nonce)
    if kind == 2:
        return GetAddr()
    if kind == 3:
        peers = tuple(
            NetAddress(f"10.{int(rng.integers(0, 256))}.{int(rng.integers(0, 256))}.{int(rng.integers(1, 255))}",
                       int(rng.integers(1, 65536)))
            for _ in range(int(rng.integers(0, 6)))
        )
        return Addr(peers=peers)
    if kind == 4:
        return Inv(items=_items(rng, int(rng.integers(0, 6))))
    if kind == 5:
        return GetData(items=_items(rng, int(rng.integers(0, 6))))
    if kind == 6:
        return Tx(id=_hash(rng), payload_len=int(rng.integers(0, 300)))
    if kind == 7:
        return Block(header=_entry(rng), tx_ids=tuple(_hash(rng) for _ in range(int(rng.integers(0, 4)))))
    if kind == 8:
        return GetHeaders(locator=_hash(rng))
    if kind == 9:
        return Headers(entries=tuple(_entry(rng) for _ in range(int(rng.integers(0, 4)))))
    return Mempool()


class TestFraming:
    """Frame header layout and checksum fixtures."""

    def test_empty_payload_frame_is_24_bytes(self):
        frame = encode(Mempool())

        assert len(frame) == HEADER_LEN == 24
        assert frame[:4] == MAGIC
        assert frame[4:16] == b"mempool" + bytes(5)
        assert struct.unpack("<I", frame[16:20])[0] == 0
        assert frame[20:24] == bytes.fromhex("5df6e0e2")

    def test_checksum_fixtures(self):
        assert checksum(b"") == bytes.fromhex("5df6e0e2")
        assert checksum(struct.pack("<I", 70015)) == bytes.fromhex("89f57b59")
        assert checksum(bytes(32)) == bytes.fromhex("2b32db6c")

    def test_distinct_fixture_payloads_have_distinct_checksums(self):
        assert checksum(struct.pack("<I", 70015)) != checksum(struct.pack("<IQ", 70015, 1))

    def test_version_frame(self):
        frame = encode(Version(proto_version=70015))

        assert frame[4:11] == b"version"
        assert frame[16:20] == struct.pack("<I", 4)
        assert frame[20:24] == bytes.fromhex("89f57b59")
        assert frame[24:] == bytes.fromhex("7f110100")

    def test_hardened_verack_carries_version_and_nonce(self):
        frame = encode(Verack(proto_version=70015, nonce=1))

        assert len(frame) == 24 + 12
        assert frame[20:24] == bytes.fromhex("132b67d9")
        assert decode(frame) == Verack(proto_version=70015, nonce=1)

    def test_bare_verack_encodes_to_header_only(self):
        assert len(encode(Verack())) == 24
        assert decode(encode(Verack())) == Verack()

    @pytest.mark.parametrize("n,expected", [
        (0, "00"),
        (0xFC, "fc"),
        (0xFD, "fdfd00"),
        (0xFFFF, "fdffff"),
        (0x10000, "fe00000100"),
    ])
    def test_compact_size(self, n, expected):
        assert compact_size(n).hex() == expected

    def test_getheaders_payload_is_locator(self):
        frame = encode(GetHeaders(locator=ZERO_HASH))

        assert frame[24:] == bytes(32)
        assert frame[20:24] == bytes.fromhex("2b32db6c")

    def test_headers_entry_is_81_bytes(self):
        entry = HeaderEntry(id=Hash256.from_int(2), prev_id=Hash256.from_int(1), height=1)
        frame = encode(Headers(entries=(entry,)))

        assert len(frame) == 24 + 1 + 81


class TestCaps:
    """List caps are enforced on encode and on decode before entries are read."""

    def test_encode_rejects_oversized_headers(self):
        entry = HeaderEntry(id=ZERO_HASH, prev_id=ZERO_HASH, height=0)
        with pytest.raises(CapExceeded) as exc:
            encode(Headers(entries=(entry,) * (HEADERS_CAP + 1)))
        assert exc.value.count == HEADERS_CAP + 1
        assert exc.value.cap == HEADERS_CAP

    def test_encode_rejects_oversized_inv(self):
        item = InvItem(InvKind.TX, ZERO_HASH)
        with pytest.raises(CapExceeded):
            encode(Inv(items=(item,) * (INV_CAP + 1)))

    def test_encode_rejects_oversized_addr(self):
        with pytest.raises(CapExceeded):
            encode(Addr(peers=(NetAddress("10.0.0.1"),) * (ADDR_CAP + 1)))

    def test_inv_at_cap_is_accepted(self):
        item = InvItem(InvKind.TX, ZERO_HASH)
        assert len(encode(Inv(items=(item,) * INV_CAP))) == 24 + 3 + 36 * INV_CAP

    def test_decode_rejects_claimed_count_above_cap(self):
        payload = compact_size(HEADERS_CAP + 1)
        frame = MAGIC + b"headers".ljust(12, b"\x00") + struct.pack("<I", len(payload)) + checksum(payload) + payload

        with pytest.raises(CapExceeded) as exc:
            decode(frame)
        assert exc.value.offset == 24


class TestDecodeErrors:
    """Each malformed frame maps to one error type with a byte offset."""

    def test_short_frame_is_truncated(self):
        with pytest.raises(TruncatedPayload):
            decode(encode(Mempool())[:23])

    def test_bad_magic(self):
        frame = bytearray(encode(Mempool()))
        frame[0] ^= 0xFF
        with pytest.raises(BadMagic) as exc:
            decode(bytes(frame))
        assert exc.value.offset == 0

    def test_unknown_command(self):
        frame = MAGIC + b"sendcmpct".ljust(12, b"\x00") + struct.pack("<I", 0) + checksum(b"")
        with pytest.raises(UnknownCommand) as exc:
            decode(frame)
        assert exc.value.offset == 4

    def test_missing_payload_bytes(self):
        with pytest.raises(TruncatedPayload):
            decode(encode(Version(proto_version=70015))[:-1])

    def test_trailing_bytes(self):
        frame = encode(Mempool()) + b"\x00"
        with pytest.raises(TrailingBytes) as exc:
            decode(frame)
        assert exc.value.offset == 24

    def test_payload_inconsistent_with_command(self):
        payload = b"\x01\x02\x03"
        frame = MAGIC + b"verack".ljust(12, b"\x00") + struct.pack("<I", 3) + checksum(payload) + payload
        with pytest.raises(MalformedPayload):
            decode(frame)

    def test_unknown_inventory_kind(self):
        payload = compact_size(1) + struct.pack("<I", 9) + bytes(32)
        frame = MAGIC + b"inv".ljust(12, b"\x00") + struct.pack("<I", len(payload)) + checksum(payload) + payload
        with pytest.raises(MalformedPayload) as exc:
            decode(frame)
        assert exc.value.offset == 25


class TestCodecProperties:
    """Seeded property checks over generated messages."""

    CASES = 10_000

    def test_round_trip_identity(self, rng):
        for _ in range(self.CASES):
            msg = random_message(rng)
            frame = encode(msg)
            assert decode(frame) == msg
            assert frame[20:24] == checksum(frame[24:])

    def test_single_bit_payload_flip_is_bad_checksum(self, rng):
        checked = 0
        while checked < self.CASES:
            frame = bytearray(encode(random_message(rng)))
            if len(frame) == HEADER_LEN:
                continue
            bit = int(rng.integers(0, (len(frame) - HEADER_LEN) * 8))
            frame[HEADER_LEN + bit // 8] ^= 1 << (bit % 8)
            with pytest.raises(BadChecksum):
                decode(bytes(frame))
            checked += 1
