from fractions import Fraction

import pytest

from aqtwireless.policies import (
    Fragment,
    PolicyKind,
    QueueState,
    SelectorHistory,
    SelectorKind,
    order_queue,
    parse_assignments,
    select_link,
)


def frag(pid, arrival=0, injected=0, hop=1, length=1, size=1):
    return Fragment(pid, Fraction(size), arrival, injected, hop, length)


def queue_of(policy, *frags, peer=1):
    q = QueueState(0, peer, policy)
    for f in frags:
        q.push(f)
    return q


def ids(order):
    return [f.packet for f in order]


def test_fifo_orders_by_arrival_here():
    q = queue_of(PolicyKind.FIFO, frag(3, arrival=3), frag(1, arrival=1), frag(2, arrival=2))
    assert ids(order_queue(PolicyKind.FIFO, q)) == [1, 2, 3]


def test_lis_prefers_oldest_injection():
    q = queue_of(PolicyKind.LIS, frag(0, injected=5), frag(1, injected=2))
    assert ids(order_queue(PolicyKind.LIS, q)) == [1, 0]


def test_sis_prefers_newest_injection():
    q = queue_of(PolicyKind.SIS, frag(0, injected=5), frag(1, injected=2))
    assert ids(order_queue(PolicyKind.SIS, q)) == [0, 1]


def test_ftg_prefers_most_remaining_hops():
    q = queue_of(PolicyKind.FTG, frag(0, hop=1, length=1), frag(1, hop=1, length=4))
    assert ids(order_queue(PolicyKind.FTG, q)) == [1, 0]


def test_nts_prefers_fewest_hops_done():
    q = queue_of(PolicyKind.NTS, frag(0, hop=3, length=3), frag(1, hop=1, length=3))
    assert ids(order_queue(PolicyKind.NTS, q)) == [1, 0]


@pytest.mark.parametrize("policy", list(PolicyKind))
def test_ties_broken_by_packet_id(policy):
    q = queue_of(policy, frag(7), frag(2), frag(5))
    assert ids(order_queue(policy, q)) == [2, 5, 7]


def test_partly_sent_packet_stays_first():
    q = queue_of(PolicyKind.LIS, frag(0, injected=4), frag(1, injected=9))
    head = q.start_first()
    head.remaining = Fraction(1, 2)
    q.push(frag(2, injected=0))
    assert ids(order_queue(PolicyKind.LIS, q)) == [0, 2, 1]


def test_select_none_when_all_empty():
    assert select_link(SelectorKind.LOWEST_NEIGHBOR_ID, [QueueState(0, 1), QueueState(0, 2)]) is None


@pytest.mark.parametrize("selector", list(SelectorKind))
def test_single_nonempty_queue_is_forced(selector):
    qs = [QueueState(0, 1), queue_of(PolicyKind.FIFO, frag(0), peer=2), QueueState(0, 3)]
    assert select_link(selector, qs, SelectorHistory()) == (0, 2)


def test_lowest_neighbor_id():
    qs = [queue_of(PolicyKind.FIFO, frag(0), peer=5), queue_of(PolicyKind.FIFO, frag(1), peer=2)]
    assert select_link(SelectorKind.LOWEST_NEIGHBOR_ID, qs) == (0, 2)


def test_oldest_head_of_line_with_tie_on_neighbor():
    qs = [queue_of(PolicyKind.FIFO, frag(0, injected=4), peer=1),
          queue_of(PolicyKind.FIFO, frag(1, injected=2), peer=3),
          queue_of(PolicyKind.FIFO, frag(2, injected=2), peer=2)]
    assert select_link(SelectorKind.OLDEST_HEAD_OF_LINE, qs) == (0, 2)


def test_round_robin_cycles_over_nonempty_queues():
    qs = [queue_of(PolicyKind.FIFO, frag(k), peer=p) for k, p in enumerate((1, 2, 4))]
    hist = SelectorHistory()
    picks = [select_link(SelectorKind.ROUND_ROBIN_NON_EMPTY, qs, hist)[1] for _ in range(5)]
    assert picks == [1, 2, 4, 1, 2]


def test_round_robin_skips_empty_queue():
    qs = [queue_of(PolicyKind.FIFO, frag(0), peer=1), QueueState(0, 2),
          queue_of(PolicyKind.FIFO, frag(1), peer=3)]
    hist = SelectorHistory(last_peer=1)
    assert select_link(SelectorKind.ROUND_ROBIN_NON_EMPTY, qs, hist) == (0, 3)


def test_parse_assignments_default_and_override():
    items = [("policy.default", "LIS"), ("policy.2", "FTG"), ("selector.0", "LowestNeighborId")]
    assert parse_assignments(items, 3, "policy", PolicyKind, "FIFO") == [
        PolicyKind.LIS, PolicyKind.LIS, PolicyKind.FTG]
    sel = parse_assignments(items, 2, "selector", SelectorKind, "OldestHeadOfLine")
    assert sel == [SelectorKind.LOWEST_NEIGHBOR_ID, SelectorKind.OLDEST_HEAD_OF_LINE]
    with pytest.raises(ValueError):
        parse_assignments([("policy.0", "EDF")], 1, "policy", PolicyKind, "FIFO")
