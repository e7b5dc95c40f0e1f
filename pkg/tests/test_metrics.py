import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from aqtwireless.adversary import (
    AdversaryBudget,
    InjectionEvent,
    InjectionTrace,
    generate_rate_schedule,
)
from aqtwireless.core import Path, line_network, star_network
from aqtwireless.engine import HOP_DONE, INJECT, SimConfig, run
from aqtwireless.metrics import (
    BoundError,
    BoundReport,
    busy_period_start,
    delay_stats,
    epsilon_gap,
    latencies,
    max_queueing,
    per_hop_delay,
    queue_occupancy,
    stability_report,
    theorem_bounds,
)
from aqtwireless.scenarios import random_scenario

F = Fraction


def simulate(net, events, T, **kw):
    trace = InjectionTrace(events, T)
    log, _ = run(SimConfig(net, generate_rate_schedule(net, 0, T), trace, T, **kw))
    return log


def inject(t, nodes, size=1):
    return InjectionEvent(t, Path.from_nodes(nodes), F(size))


def brute_q(log):
    """Max hop delay straight from INJECT/HOP_DONE rows."""
    arrive, done, length = {}, {}, {}
    for rec in log.records:
        if rec.kind == INJECT:
            arrive[(rec.packet, 1)] = rec.slot
            length[rec.packet] = rec.hop
        elif rec.kind == HOP_DONE:
            done[(rec.packet, rec.hop)] = rec.slot
            if rec.hop < length[rec.packet]:
                arrive[(rec.packet, rec.hop + 1)] = rec.slot
    best = 0
    for key, a in arrive.items():
        f = done.get(key)
        if f is None and a < log.horizon:
            best = max(best, log.horizon - a)
        elif f is not None:
            best = max(best, f - a)
    return best


# ------------------------------------------------------------ hop delays

def test_unloaded_queue_has_zero_delay():
    log = simulate(line_network(2), [inject(0, [0, 1])], 3)
    assert per_hop_delay(log, 0, 1).delay == 0


def test_packet_behind_another_waits_three_slots():
    log = simulate(line_network(2), [inject(0, [0, 1], 3), inject(0, [0, 1], 1)], 6)
    hd = per_hop_delay(log, 1, 1)
    assert hd.delay == 3 and not hd.open


def test_incomplete_hop_is_open():
    log = simulate(line_network(2), [inject(1, [0, 1], 5)], 4)
    hd = per_hop_delay(log, 0, 1)
    assert hd.open and hd.delay == 3


def test_hop_never_reached_raises():
    log = simulate(line_network(3, 2), [inject(0, [0, 1, 2], 4)], 2)
    with pytest.raises(ValueError):
        per_hop_delay(log, 0, 2)


def test_max_queueing_empty_and_free():
    assert max_queueing(simulate(line_network(2), [], 4)) == (0, None)
    q, arg = max_queueing(simulate(line_network(3, 2), [inject(0, [0, 1, 2])], 4))
    assert q == 1 and arg.hop == 2  # one slot of forwarding gate at the relay


def test_three_packet_contention():
    net = star_network(2, 2)
    events = [inject(0, [1, 0, 2], 2), inject(0, [2, 0, 1], 1), inject(1, [0, 1], 2)]
    log = simulate(net, events, 10)
    q, arg = max_queueing(log)
    assert q == brute_q(log)
    assert per_hop_delay(log, arg.packet, arg.hop).delay == q


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_max_queueing_matches_raw_recount(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 4)
    sc = random_scenario(rng.randint(2, 7), d, 0.5, AdversaryBudget(rng.randint(1, 4), F(1, 2 * d)),
                         seed, rng.randint(1, 50))
    log, _ = run(sc.config())
    assert max_queueing(log)[0] == brute_q(log)
    stats = delay_stats(log)
    assert stats.q == brute_q(log)
    assert stats.max_latency == max(latencies(log).values(), default=0)


def test_prefix_evaluation():
    log = simulate(line_network(2), [inject(0, [0, 1], 6)], 8)
    assert max_queueing(log, upto=3)[0] == 3
    assert max_queueing(log)[0] == 5


def test_latency_is_last_departure_minus_injection():
    log = simulate(line_network(4, 3), [inject(2, [0, 1, 2, 3])], 8)
    assert latencies(log) == {0: 2}


# ----------------------------------------------------------- busy periods

def _backlog_log():
    # queue 0->1 holds data through slots 6..12, empty at 5
    return simulate(line_network(2), [inject(6, [0, 1], 7)], 16)


def test_busy_period_start_definitions():
    log = _backlog_log()
    occ = queue_occupancy(log, 0, 1)
    assert [t for t, v in enumerate(occ) if v] == list(range(6, 13))
    assert busy_period_start(log, 0, 1, 12) == 5
    assert busy_period_start(log, 0, 1, 6) == 5


def test_busy_period_first_slot():
    log = simulate(line_network(2), [inject(3, [0, 1], 1)], 6)
    assert busy_period_start(log, 0, 1, 3) == 2


def test_busy_period_since_start():
    log = simulate(line_network(2), [inject(0, [0, 1], 10)], 12)
    assert busy_period_start(log, 0, 1, 7) == -1


def test_busy_period_rejects_empty_queue():
    with pytest.raises(ValueError):
        busy_period_start(_backlog_log(), 0, 1, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_busy_period_conditions_hold(seed):
    sc = random_scenario(5, 3, 0.5, AdversaryBudget(3, F(1, 6)), seed, 40)
    log, _ = run(sc.config())
    for (i, j) in sc.network.links():
        occ = queue_occupancy(log, i, j)
        for t, busy in enumerate(occ):
            if not busy:
                continue
            tb = busy_period_start(log, i, j, t)
            assert tb < t
            assert all(occ[s] for s in range(tb + 1, t + 1))
            assert tb == -1 or not occ[tb]


# ----------------------------------------------------------------- bounds

def test_theorem_bounds_values():
    assert theorem_bounds(3, 2, 4, F(1, 5)) == (F(39, 2), F(60))
    assert theorem_bounds(4, 3, 5, 0) == (15, 60)


def test_theorem_bounds_boundary_rejected():
    with pytest.raises(BoundError):
        theorem_bounds(2, 1, 1, F(1, 2))
    with pytest.raises(BoundError):
        theorem_bounds(3, 1, 1, F(2, 5))


@pytest.mark.parametrize("d, expected", [(2, F(1, 2)), (10, F(1, 90))])
def test_epsilon_gap(d, expected):
    assert epsilon_gap(d) == expected


def test_epsilon_gap_limit_and_domain():
    # d^2 * gap = d / (d - 1): approaches 1 from above
    values = [d * d * epsilon_gap(d) for d in range(2, 60)]
    assert all(v == F(d, d - 1) for d, v in zip(range(2, 60), values))
    assert all(a > b > 1 for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        epsilon_gap(1)


# ---------------------------------------------------------------- reports

def test_empty_trace_report():
    net = line_network(3, 2)
    log = simulate(net, [], 10)
    rep = stability_report(log, net, AdversaryBudget(1, F(1, 4)), 2)
    assert rep.q_emp == 0 and rep.compliant
    assert rep.to_csv_row() == "2,1,2,1/4,7/2,8/1,0,0,true,0"
    assert BoundReport.CSV_HEADER == "d,b,delta,r,q_bound,latency_bound,q_emp,lat_emp,compliant,undelivered"


def test_report_above_threshold_has_growth():
    net = line_network(3, 2)
    log = simulate(net, [inject(t, [0, 1, 2], 1) for t in range(0, 40, 2)], 40)
    rep = stability_report(log, net, AdversaryBudget(1, F(1, 2)), 2)
    assert rep.q_bound is None and rep.compliant is None
    assert [t for t, _ in rep.growth] == [10, 20, 40]
    assert "growth.40" in rep.to_text()


def test_report_flags_violation_and_node_bound():
    net = star_network(3, 1)
    # far beyond any budget: three size-2 packets share one node
    events = [inject(0, [0, j], 2) for j in (1, 2, 3)]
    log = simulate(net, events, 10)
    rep = stability_report(log, net, AdversaryBudget(1, 0), 1)
    assert rep.q_bound == 3 and rep.q_emp == 5
    assert rep.compliant is False
    assert rep.node_q_bound == 3
