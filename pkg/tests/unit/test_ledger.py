"""
Unit tests for per-flow byte accounting.
"""

import pytest

from src.netsim.config import SimConfig
from src.netsim.ledger import ByteLedger
from src.netsim.network import Network, Sink
from src.wire.sizing import SizeModel
from src.wire.types import Mempool, NetAddress

pytestmark = pytest.mark.unit

ALICE = NetAddress("10.0.0.1")
BOB = NetAddress("10.0.0.2")
MALLORY = NetAddress("203.0.113.66")


class TestByteLedger:
    """Counters keyed by (claimed, actual, destination)."""

    def test_framing_is_added_per_message(self):
        ledger = ByteLedger(76)
        ledger.record(ALICE, ALICE, BOB, 24)
        ledger.record(ALICE, ALICE, BOB, 85)

        assert ledger.bytes_to(BOB) == (109, 109 + 2 * 76)
        assert ledger.messages_to(BOB) == 2

    def test_claimed_and_actual_are_separate_views(self):
        ledger = ByteLedger(0)
        ledger.record(ALICE, MALLORY, BOB, 100)

        assert ledger.bytes_from_actual(MALLORY) == (100, 100)
        assert ledger.bytes_from_actual(ALICE) == (0, 0)
        assert ledger.bytes_between(MALLORY, BOB) == (100, 100)

    def test_totals_are_conserved(self):
        ledger = ByteLedger(10)
        ledger.record(ALICE, MALLORY, BOB, 24)
        ledger.record(BOB, BOB, ALICE, 162_000)
        ledger.record(ALICE, ALICE, BOB, 85)

        by_dst = [ledger.bytes_to(a) for a in (ALICE, BOB, MALLORY)]
        by_src = [ledger.bytes_from_actual(a) for a in (ALICE, BOB, MALLORY)]

        assert tuple(map(sum, zip(*by_dst))) == ledger.totals()
        assert tuple(map(sum, zip(*by_src))) == ledger.totals()

    def test_flows_are_sorted(self):
        ledger = ByteLedger(0)
        ledger.record(BOB, BOB, ALICE, 1)
        ledger.record(ALICE, ALICE, BOB, 1)

        assert [key for key, _ in ledger.flows()] == [(ALICE, ALICE, BOB), (BOB, BOB, ALICE)]


class TestLedgerThroughNetwork:
    """Delivered messages are charged with the configured size model."""

    def test_mempool_delivery(self):
        net = Network(SimConfig())
        net.register(Sink(ALICE))
        net.register(Sink(BOB))

        net.post(ALICE, [(BOB, Mempool())])
        net.run()

        assert net.bytes_to(BOB) == (24, 100)

    def test_custom_overhead(self):
        net = Network(SimConfig(size_model=SizeModel(framing_overhead_per_message=145)))
        net.register(Sink(ALICE))
        net.register(Sink(BOB))

        net.post(ALICE, [(BOB, Mempool())])
        net.run()

        assert net.bytes_to(BOB) == (24, 169)

    def test_undelivered_messages_are_not_counted(self):
        net = Network(SimConfig(max_ticks=1))
        net.register(Sink(ALICE))
        net.register(Sink(BOB))

        net.post(ALICE, [(BOB, Mempool())], at=5)
        net.run()

        assert net.bytes_to(BOB) == (0, 0)
