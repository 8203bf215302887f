"""
Message size accounting.

Two models are supported: the fixed per-message figures used in the
published attack arithmetic (``PAPER_TABLE``) and the true encoded frame
length (``ENCODED``). Framing overhead (link, IP and TCP headers) is not
added here; the byte ledger applies it per delivered message.
"""

from enum import Enum
from typing import Callable, Dict, Type

from pydantic import BaseModel, ConfigDict, Field

from .codec import encode
from .types import Addr, GetData, GetHeaders, Headers, Inv, Mempool, Message, Tx, Verack, Version

# Component sum of ethernet (20) + IP (36) + TCP (20) headers.
FRAMING_COMPONENTS = 76
# Per-message total as stated alongside the components.
FRAMING_STATED_TOTAL = 145

FRAMING_PRESETS: Dict[str, int] = {
    "components": FRAMING_COMPONENTS,
    "paper_total": FRAMING_STATED_TOTAL,
}

HEADERS_ENTRY_BYTES = 81
INV_ITEM_BYTES = 36
ADDR_ENTRY_BYTES = 30


class SizeMode(str, Enum):
    PAPER_TABLE = "paper_table"
    ENCODED = "encoded"


class SizeModel(BaseModel):
    """How message sizes are counted and what framing each message adds."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: SizeMode = SizeMode.PAPER_TABLE
    framing_overhead_per_message: int = Field(default=FRAMING_COMPONENTS, ge=0)


_PAPER_TABLE: Dict[Type, Callable[[Message], int]] = {
    Version: lambda m: 85,
    Verack: lambda m: 24,
    GetHeaders: lambda m: 69,
    Mempool: lambda m: 24,
    Headers: lambda m: HEADERS_ENTRY_BYTES * len(m.entries),
    Inv: lambda m: INV_ITEM_BYTES * len(m.items),
    GetData: lambda m: INV_ITEM_BYTES * len(m.items),
    Addr: lambda m: ADDR_ENTRY_BYTES * len(m.peers),
    Tx: lambda m: m.payload_len,
}


def message_size(msg: Message, model: SizeModel) -> int:
    """Size of ``msg`` in bytes under ``model``, excluding framing overhead."""
    if model.mode is SizeMode.PAPER_TABLE:
        sizer = _PAPER_TABLE.get(type(msg))
        if sizer is not None:
            return sizer(msg)
    return len(encode(msg))
