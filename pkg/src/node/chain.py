"""
Local node state: header chain, unconfirmed-transaction pool and the
database of known peers.
"""

import struct
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set

import structlog

from ..wire.types import HEADERS_CAP, ZERO_HASH, Block, Hash256, HeaderEntry, NetAddress, Tx

logger = structlog.get_logger(__name__)


def make_block(prev: Optional[HeaderEntry], tx_ids: Sequence[Hash256] = (), tag: bytes = b"") -> Block:
    """Build the block following ``prev`` (or a genesis block when ``prev`` is None)."""
    height = 0 if prev is None else prev.height + 1
    prev_id = ZERO_HASH if prev is None else prev.id
    body = prev_id.value + struct.pack("<Q", height) + tag + b"".join(t.value for t in tx_ids)
    header = HeaderEntry(id=Hash256.of(body), prev_id=prev_id, height=height)
    return Block(header=header, tx_ids=tuple(tx_ids))


GENESIS = make_block(None, tag=b"reflectsim-genesis")


class ChainStore:
    """Linear header chain from genesis, with the blocks it was built from."""

    def __init__(self, genesis: Block = GENESIS):
        if genesis.header.prev_id != ZERO_HASH or genesis.header.height != 0:
            raise ValueError("Genesis block must have height 0 and an all-zero prev_id")
        self.entries: List[HeaderEntry] = [genesis.header]
        self.index: Dict[Hash256, int] = {genesis.header.id: 0}
        self._blocks: Dict[Hash256, Block] = {genesis.header.id: genesis}
        self._confirmed: Set[Hash256] = set(genesis.tx_ids)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Block]) -> "ChainStore":
        it = iter(blocks)
        chain = cls(next(it))
        for block in it:
            if not chain.append(block):
                raise ValueError(f"Block at height {block.header.height} does not extend the chain")
        return chain

    @classmethod
    def generate(cls, length: int, tag: bytes = b"") -> "ChainStore":
        """A deterministic chain holding ``length`` blocks after genesis."""
        chain = cls()
        for _ in range(length):
            chain.append(make_block(chain.tip, tag=tag))
        return chain

    @property
    def tip(self) -> HeaderEntry:
        return self.entries[-1]

    @property
    def height(self) -> int:
        return self.tip.height

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, block_id: Hash256) -> bool:
        return block_id in self.index

    def blocks(self) -> Iterator[Block]:
        for entry in self.entries:
            yield self._blocks[entry.id]

    def block(self, block_id: Hash256) -> Optional[Block]:
        return self._blocks.get(block_id)

    def entry_at(self, height: int) -> HeaderEntry:
        return self.entries[height]

    def is_confirmed(self, tx_id: Hash256) -> bool:
        return tx_id in self._confirmed

    def extends_tip(self, block: Block) -> bool:
        return block.header.prev_id == self.tip.id and block.header.height == self.tip.height + 1

    def append(self, block: Block) -> bool:
        """Append ``block`` if it extends the tip. Returns False otherwise."""
        if not self.extends_tip(block):
            return False
        header = block.header
        self.entries.append(header)
        self.index[header.id] = header.height
        self._blocks[header.id] = block
        self._confirmed.update(block.tx_ids)
        return True

    def headers_after(self, locator: Hash256, limit: int = HEADERS_CAP) -> List[HeaderEntry]:
        """
        Entries strictly after ``locator`` in chain order, at most ``limit``.

        An unknown locator is served from genesis.
        """
        height = self.index.get(locator)
        start = 0 if height is None else height + 1
        return self.entries[start:start + limit]


class MempoolSet:
    """Unconfirmed transactions keyed by transaction ID."""

    def __init__(self):
        self.txs: Dict[Hash256, Tx] = {}

    def __len__(self) -> int:
        return len(self.txs)

    def __contains__(self, tx_id: Hash256) -> bool:
        return tx_id in self.txs

    def add(self, tx: Tx) -> bool:
        if tx.id in self.txs:
            return False
        self.txs[tx.id] = tx
        return True

    def get(self, tx_id: Hash256) -> Optional[Tx]:
        return self.txs.get(tx_id)

    def remove_many(self, tx_ids: Iterable[Hash256]) -> int:
        removed = 0
        for tx_id in tx_ids:
            if self.txs.pop(tx_id, None) is not None:
                removed += 1
        return removed

    def sorted_ids(self) -> List[Hash256]:
        return sorted(self.txs)


class KnownPeers:
    """Addresses a node has learnt of. Never contains the owner's address."""

    def __init__(self, owner: NetAddress, addrs: Iterable[NetAddress] = ()):
        self.owner = owner
        self.addrs: Set[NetAddress] = set()
        self.update(addrs)

    def __len__(self) -> int:
        return len(self.addrs)

    def __contains__(self, addr: NetAddress) -> bool:
        return addr in self.addrs

    def __iter__(self) -> Iterator[NetAddress]:
        return iter(sorted(self.addrs))

    def add(self, addr: NetAddress) -> None:
        if addr != self.owner:
            self.addrs.add(addr)

    def update(self, addrs: Iterable[NetAddress]) -> None:
        for addr in addrs:
            self.add(addr)
