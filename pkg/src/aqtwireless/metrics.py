"""Delay metrics read back from an ``EventLog`` and the closed-form bounds.

Per-hop delay of packet ``p`` at hop ``i`` is ``f_i - a_i`` (slots); ``Q`` is
the maximum over every packet and hop, with hops still open at the end of a
run measured up to the horizon.  For ``r < 1/d`` the work-conserving bounds
are

    Q       <= (delta * b - r) / (1 - r * d)
    latency <= d * b * delta / (1 - r * d)

where ``delta`` is the largest node degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from aqtwireless.adversary import AdversaryBudget
from aqtwireless.core import Network, max_degree
from aqtwireless.engine import HOP_DONE, INJECT, QLEN, SEND, EventLog


class BoundError(ValueError):
    """Raised when ``r >= 1/d``: the bounds do not apply."""


def theorem_bounds(d: int, b: int, delta: int, r) -> tuple[Fraction, Fraction]:
    """Return ``(q_bound, latency_bound)`` in exact arithmetic.

    >>> theorem_bounds(3, 2, 4, Fraction(1, 5))
    (Fraction(39, 2), Fraction(60, 1))
    """
    r = Fraction(r)
    if d < 1:
        raise ValueError("d must be >= 1")
    if r * d >= 1:
        raise BoundError(f"bound undefined: stability not guaranteed for r={r} >= 1/d={Fraction(1, d)}")
    slack = 1 - r * d
    return (delta * b - r) / slack, Fraction(d * b * delta) / slack


def epsilon_gap(d: int) -> Fraction:
    """``1/(d-1) - 1/d``, the distance between the optimistic and proven thresholds."""
    if d < 2:
        raise ValueError("epsilon_gap needs d >= 2")
    return Fraction(1, d - 1) - Fraction(1, d)


@dataclass
class Timeline:
    """Hop timestamps of one packet reconstructed from a log."""

    packet: int
    path_length: int
    arrivals: list[int]
    departures: list[int]

    @property
    def delivered(self) -> bool:
        return len(self.departures) == self.path_length


def timelines(log: EventLog) -> dict[int, Timeline]:
    out: dict[int, Timeline] = {}
    for rec in log.records:
        if rec.kind == INJECT:
            out[rec.packet] = Timeline(rec.packet, rec.hop, [rec.slot], [])
        elif rec.kind == HOP_DONE:
            tl = out[rec.packet]
            tl.departures.append(rec.slot)
            if rec.hop < tl.path_length:
                tl.arrivals.append(rec.slot)
    return out


@dataclass(frozen=True)
class HopDelay:
    packet: int
    hop: int
    delay: int
    open: bool = False


def _hop_delay(tl: Timeline, hop: int, now: int) -> Optional[HopDelay]:
    if hop > len(tl.arrivals):
        return None
    a = tl.arrivals[hop - 1]
    if hop <= len(tl.departures) and tl.departures[hop - 1] < now:
        return HopDelay(tl.packet, hop, tl.departures[hop - 1] - a)
    if a >= now:
        return None
    return HopDelay(tl.packet, hop, now - a, open=True)


def per_hop_delay(log: EventLog, packet: int, hop: int,
                  lines: Optional[dict[int, Timeline]] = None) -> HopDelay:
    """``f_i - a_i`` for hop ``hop`` (1-based) of ``packet``.

    A hop that has not finished by the end of the log is reported with
    ``open=True`` and delay ``horizon - a_i``.
    """
    lines = lines if lines is not None else timelines(log)
    result = _hop_delay(lines[packet], hop, log.horizon)
    if result is None:
        raise ValueError(f"packet {packet} never reached hop {hop}")
    return result


def max_queueing(log: EventLog, upto: Optional[int] = None,
                 lines: Optional[dict[int, Timeline]] = None) -> tuple[int, Optional[HopDelay]]:
    """``Q`` over completed and open hops, with the arg-max hop.

    ``upto`` evaluates the log as if the run had stopped after ``upto`` slots.
    """
    now = log.horizon if upto is None else upto
    lines = lines if lines is not None else timelines(log)
    best: Optional[HopDelay] = None
    for tl in lines.values():
        for hop in range(1, len(tl.arrivals) + 1):
            hd = _hop_delay(tl, hop, now)
            if hd is not None and (best is None or hd.delay > best.delay):
                best = hd
    return (best.delay if best else 0), best


def latencies(log: EventLog, lines: Optional[dict[int, Timeline]] = None) -> dict[int, int]:
    """``f_{d_p} - a_1`` for every delivered packet."""
    lines = lines if lines is not None else timelines(log)
    return {p: tl.departures[-1] - tl.arrivals[0] for p, tl in lines.items() if tl.delivered}


@dataclass
class DelayStats:
    hop_delays: dict[tuple[int, int], HopDelay]
    q: int
    latencies: dict[int, int]
    max_latency: int

    def to_text(self) -> str:
        out = [f"Q = {self.q}", f"max_latency = {self.max_latency}"]
        for (p, i), hd in sorted(self.hop_delays.items()):
            out.append(f"hop {p} {i} {hd.delay}" + (" open" if hd.open else ""))
        for p, v in sorted(self.latencies.items()):
            out.append(f"latency {p} {v}")
        return "\n".join(out) + "\n"


def delay_stats(log: EventLog, lines: Optional[dict[int, Timeline]] = None) -> DelayStats:
    lines = lines if lines is not None else timelines(log)
    hops = {}
    for tl in lines.values():
        for hop in range(1, len(tl.arrivals) + 1):
            hd = _hop_delay(tl, hop, log.horizon)
            if hd is not None:
                hops[(tl.packet, hop)] = hd
    lats = latencies(log, lines)
    return DelayStats(hops, max((h.delay for h in hops.values()), default=0), lats,
                      max(lats.values(), default=0))


def queue_occupancy(log: EventLog, node: int, peer: int) -> list[bool]:
    """Whether queue ``node -> peer`` held data at any point of each slot."""
    busy = [False] * log.horizon
    ended = [False] * log.horizon
    for rec in log.records:
        if rec.node != node or rec.peer != peer:
            continue
        if rec.kind == QLEN and rec.amount > 0:
            ended[rec.slot] = True
            busy[rec.slot] = True
        elif rec.kind in (INJECT, SEND):
            busy[rec.slot] = True
    for t in range(1, log.horizon):
        if ended[t - 1]:
            busy[t] = True
    return busy


def busy_period_start(log: EventLog, node: int, peer: int, t: int) -> int:
    """Oldest ``t_B < t`` with the queue non-empty throughout ``(t_B, t]``.

    Returns -1 when the queue has been backlogged since the first slot.
    """
    occ = queue_occupancy(log, node, peer)
    if not 0 <= t < len(occ) or not occ[t]:
        raise ValueError(f"queue {node}->{peer} is empty at slot {t}")
    s = t - 1
    while s >= 0 and occ[s]:
        s -= 1
    return s


@dataclass
class BoundReport:
    d: int
    b: int
    delta: int
    r: Fraction
    q_bound: Optional[Fraction]
    latency_bound: Optional[Fraction]
    q_emp: int
    lat_emp: int
    compliant: Optional[bool]
    undelivered: int
    argmax: Optional[HopDelay] = None
    node_q_bound: Optional[Fraction] = None
    growth: list[tuple[int, int]] = field(default_factory=list)
    latency_violations: int = 0

    CSV_HEADER = "d,b,delta,r,q_bound,latency_bound,q_emp,lat_emp,compliant,undelivered"

    def to_csv_row(self) -> str:
        def fmt(v):
            if v is None:
                return "na"
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            if isinstance(v, bool):
                return "true" if v else "false"
            return str(v)

        return ",".join(fmt(v) for v in (
            self.d, self.b, self.delta, self.r, self.q_bound, self.latency_bound,
            self.q_emp, self.lat_emp, self.compliant, self.undelivered))

    def to_text(self) -> str:
        lines = [f"{k} = {v}" for k, v in zip(self.CSV_HEADER.split(","), self.to_csv_row().split(","))]
        if self.argmax is not None:
            lines.append(f"argmax = packet {self.argmax.packet} hop {self.argmax.hop}"
                         + (" (open)" if self.argmax.open else ""))
        if self.node_q_bound is not None:
            lines.append(f"node_q_bound = {self.node_q_bound}")
        for upto, q in self.growth:
            lines.append(f"growth.{upto} = {q}")
        return "\n".join(lines) + "\n"


def stability_report(log: EventLog, network: Network, budget: AdversaryBudget,
                     d: Optional[int] = None) -> BoundReport:
    """Compare empirical ``Q`` and latencies against the bounds.

    When ``r >= 1/d`` no bound applies; instead ``growth`` records ``Q`` on
    the prefixes of length T/4, T/2 and T.
    """
    d = network.max_path_hops if d is None else d
    delta = max_degree(network)
    lines = timelines(log)
    q, arg = max_queueing(log, lines=lines)
    lats = latencies(log, lines)
    lat = max(lats.values(), default=0)
    undelivered = sum(1 for tl in lines.values() if not tl.delivered)
    r, b = budget.r, budget.b
    try:
        q_bound, lat_bound = theorem_bounds(d, b, delta, r)
    except BoundError:
        T = log.horizon
        growth = [(T // 4, max_queueing(log, T // 4, lines)[0]),
                  (T // 2, max_queueing(log, T // 2, lines)[0]),
                  (T, q)]
        return BoundReport(d, b, delta, r, None, None, q, lat, None, undelivered, arg,
                           growth=growth)
    late = sum(1 for v in lats.values() if v > lat_bound)
    node_bound = None
    if arg is not None:
        node = _hop_node(log, arg)
        node_bound = (len(network.neighbors[node]) * b - r) / (1 - r * d)
    return BoundReport(d, b, delta, r, q_bound, lat_bound, q, lat,
                       q <= q_bound and late == 0, undelivered, arg, node_bound,
                       latency_violations=late)


def _hop_node(log: EventLog, hd: HopDelay) -> int:
    """Node holding the queue of hop ``hd.hop``."""
    for rec in log.records:
        if rec.packet != hd.packet:
            continue
        if hd.hop == 1 and rec.kind == INJECT:
            return rec.node
        if rec.kind == HOP_DONE and rec.hop == hd.hop - 1:
            return rec.peer
    raise LookupError(f"no record for packet {hd.packet} hop {hd.hop}")
