"""Slot-stepped, deterministic simulation of the adversary/scheduler game.

Each slot runs five phases:

1. the adversary's rates for the slot become effective;
2. injections are recorded (``a_1 = t``) and, under same-slot eligibility,
   enqueued at their source;
3. every node with backlog picks one outgoing queue (wireless) or all of
   them (wireline) and sends up to the link rate, in policy order;
4. packets whose hop finished are handed downstream with ``f_i = a_{i+1} = t``
   but only become servable from ``t + 1``; next-slot injections join here;
5. the end-of-slot backlog of every non-empty queue is logged.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Optional, Sequence, Union

from aqtwireless.adversary import InjectionTrace, RateSchedule
from aqtwireless.core import HopRecord, Network, Packet, ParseError
from aqtwireless.policies import (
    Fragment,
    PolicyKind,
    QueueState,
    SelectorHistory,
    SelectorKind,
    select_link,
)

WIRELESS = "wireless"
WIRELINE = "wireline"
SAME_SLOT = "same-slot"
NEXT_SLOT = "next-slot"

INJECT = "INJECT"
SEND = "SEND"
HOP_DONE = "HOP_DONE"
QLEN = "QLEN"

_ZERO = Fraction(0)


class Record(NamedTuple):
    """One log row.

    INJECT rows carry the path length in ``hop``; SEND and HOP_DONE rows
    carry the 1-based hop index; QLEN rows use ``packet = hop = -1``.
    """

    slot: int
    kind: str
    node: int
    peer: int
    packet: int
    amount: Fraction
    hop: int

    def to_csv(self) -> str:
        a = self.amount
        return f"{self.slot},{self.kind},{self.node},{self.peer},{self.packet}," \
               f"{a.numerator}/{a.denominator},{self.hop}"


@dataclass
class EventLog:
    horizon: int = 0
    records: list[Record] = field(default_factory=list)

    def append(self, rec: Record) -> None:
        self.records.append(rec)

    def by_slot(self) -> list[list[Record]]:
        slots: list[list[Record]] = [[] for _ in range(self.horizon)]
        for rec in self.records:
            slots[rec.slot].append(rec)
        return slots

    def of_kind(self, kind: str) -> Iterator[Record]:
        return (r for r in self.records if r.kind == kind)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("slot,kind,node,peer,packet,amount,hop\n")
        for rec in self.records:
            buf.write(rec.to_csv())
            buf.write("\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, horizon: Optional[int] = None) -> "EventLog":
        log = cls()
        last = -1
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("slot,"):
                continue
            parts = line.split(",")
            if len(parts) != 7:
                raise ParseError(lineno, "expected 7 comma-separated fields")
            try:
                rec = Record(int(parts[0]), parts[1], int(parts[2]), int(parts[3]),
                             int(parts[4]), Fraction(parts[5]), int(parts[6]))
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(lineno, str(exc)) from None
            log.records.append(rec)
            last = max(last, rec.slot)
        log.horizon = horizon if horizon is not None else last + 1
        return log


PerNode = Union[str, Sequence[str]]


@dataclass
class SimConfig:
    network: Network
    schedule: RateSchedule
    trace: InjectionTrace
    horizon: int
    policies: PerNode = PolicyKind.FIFO
    selectors: PerNode = SelectorKind.OLDEST_HEAD_OF_LINE
    mode: str = WIRELESS
    eligibility: str = SAME_SLOT
    seed: int = 0

    def __post_init__(self):
        n = self.network.num_nodes
        if isinstance(self.policies, (str, PolicyKind)):
            self.policies = [self.policies] * n
        if isinstance(self.selectors, (str, SelectorKind)):
            self.selectors = [self.selectors] * n
        self.policies = [PolicyKind(p) for p in self.policies]
        self.selectors = [SelectorKind(s) for s in self.selectors]

    def validate(self) -> None:
        n = self.network.num_nodes
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if self.trace.events and self.trace.events[-1].slot >= self.horizon:
            raise ValueError("trace injects past the simulation horizon")
        if len(self.policies) != n or len(self.selectors) != n:
            raise ValueError("need one policy and one selector per node")
        if self.mode not in (WIRELESS, WIRELINE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.eligibility not in (SAME_SLOT, NEXT_SLOT):
            raise ValueError(f"unknown eligibility {self.eligibility!r}")
        self.trace.validate(self.network)


@dataclass
class SimState:
    slot: int = 0
    queues: dict[tuple[int, int], QueueState] = field(default_factory=dict)
    packets: dict[int, Packet] = field(default_factory=dict)
    history: dict[int, SelectorHistory] = field(default_factory=dict)
    busy: dict[int, set[int]] = field(default_factory=dict)
    log: EventLog = field(default_factory=EventLog)
    next_packet: int = 0
    # injections grouped by slot, filled on first step
    pending: Optional[dict[int, list]] = None

    def queue(self, config: SimConfig, i: int, j: int) -> QueueState:
        q = self.queues.get((i, j))
        if q is None:
            q = self.queues[(i, j)] = QueueState(i, j, config.policies[i])
        return q

    def backlog(self) -> Fraction:
        return sum((q.backlog for q in self.queues.values()), _ZERO)


def _enqueue(state: SimState, config: SimConfig, pkt: Packet, hop: int, arrival: int) -> None:
    i, j = pkt.path.links[hop - 1]
    frag = Fragment(pkt.id, pkt.size, arrival, pkt.injected_at, hop, pkt.path.length)
    state.queue(config, i, j).push(frag)
    state.busy.setdefault(i, set()).add(j)


def step(state: SimState, config: SimConfig) -> SimState:
    """Advance ``state`` by one slot (mutates and returns it)."""
    t = state.slot
    if t >= config.horizon:
        raise ValueError("simulation already reached its horizon")
    log = state.log
    if state.pending is None:
        state.pending = config.trace.by_slot()

    # (1) rates are looked up from config.schedule at slot t below.
    rate = config.schedule.rate

    # (2) injections
    late: list[Packet] = []
    for ev in state.pending.pop(t, ()):
        pid = state.next_packet
        state.next_packet += 1
        pkt = Packet(pid, ev.path, ev.size, t, [HopRecord(t)])
        state.packets[pid] = pkt
        src, nxt = ev.path.links[0]
        log.append(Record(t, INJECT, src, nxt, pid, ev.size, ev.path.length))
        if config.eligibility == SAME_SLOT:
            _enqueue(state, config, pkt, 1, t)
        else:
            late.append(pkt)

    # (3) transmissions
    forwarded: list[tuple[Packet, int]] = []
    for i in sorted(state.busy):
        peers = state.busy[i]
        if not peers:
            continue
        if config.mode == WIRELESS:
            hist = state.history.setdefault(i, SelectorHistory())
            link = select_link(config.selectors[i], [state.queues[(i, j)] for j in peers], hist)
            served = [link[1]]
        else:
            served = sorted(peers)
        for j in served:
            q = state.queues[(i, j)]
            cap = rate(i, j, t)
            if cap == 0:
                f = q.first()
                log.append(Record(t, SEND, i, j, f.packet, _ZERO, f.hop))
            while cap > 0 and q:
                f = q.start_first()
                amt = f.remaining if f.remaining <= cap else cap
                f.remaining -= amt
                q.backlog -= amt
                cap -= amt
                log.append(Record(t, SEND, i, j, f.packet, amt, f.hop))
                if f.remaining == 0:
                    q.head = None
                    pkt = state.packets[f.packet]
                    pkt.hops[f.hop - 1].departure = t
                    log.append(Record(t, HOP_DONE, i, j, f.packet, pkt.size, f.hop))
                    if f.hop < pkt.path.length:
                        forwarded.append((pkt, f.hop + 1))
            if not q:
                peers.discard(j)

    # (4) hand-offs and deferred injections
    for pkt, hop in forwarded:
        pkt.hops.append(HopRecord(t))
        _enqueue(state, config, pkt, hop, t)
    for pkt in late:
        _enqueue(state, config, pkt, 1, t)

    # (5) backlog snapshot
    for i in sorted(state.busy):
        for j in sorted(state.busy[i]):
            log.append(Record(t, QLEN, i, j, -1, state.queues[(i, j)].backlog, -1))

    state.slot = t + 1
    log.horizon = state.slot
    return state


def run(config: SimConfig) -> tuple[EventLog, SimState]:
    config.validate()
    state = SimState()
    for _ in range(config.horizon):
        step(state, config)
    state.log.horizon = config.horizon
    return state.log, state


@dataclass(frozen=True)
class LogDiff:
    slot: int
    left: tuple
    right: tuple

    def __str__(self):
        return f"logs diverge at slot {self.slot}"


def compare_logs(a: EventLog, b: EventLog) -> Optional[LogDiff]:
    """First slot at which two logs differ, or ``None`` when identical."""
    sa, sb = a.by_slot(), b.by_slot()
    for t in range(max(len(sa), len(sb))):
        ra = tuple(sa[t]) if t < len(sa) else ()
        rb = tuple(sb[t]) if t < len(sb) else ()
        if ra != rb:
            return LogDiff(t, ra, rb)
    return None
