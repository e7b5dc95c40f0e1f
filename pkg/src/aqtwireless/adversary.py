"""The (b, r)-bounded adversary: link rates, injections and admissibility.

An injection trace is admissible for ``(b, r)`` when there are fractions
``x[i, j, t]`` in [0, 1], summing to one over the neighbours of every node at
every slot, such that on every link ``ij`` and every window of consecutive
slots the injected load is at most ``r * sum(rate * x) + b``.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from aqtwireless.core import Link, Network, ParseError, Path, validate_path
from aqtwireless.lp import feasible_point

Slot = int
_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class AdversaryBudget:
    b: int
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        if int(self.b) != self.b or self.b < 1:
            raise ValueError(f"burstiness must be an integer >= 1, got {self.b}")
        if not 0 <= self.r < 1:
            raise ValueError(f"injection rate must satisfy 0 <= r < 1, got {self.r}")


class _SlotTable:
    """Time-varying value per directed pair with a time-invariant baseline."""

    def __init__(self, horizon: int, baseline: Optional[Mapping[Link, Fraction]] = None,
                 table: Optional[Mapping[tuple[int, int, Slot], Fraction]] = None):
        self.horizon = horizon
        self.baseline: dict[Link, Fraction] = {k: Fraction(v) for k, v in (baseline or {}).items()}
        self.table: dict[tuple[int, int, Slot], Fraction] = {
            k: Fraction(v) for k, v in (table or {}).items()}

    def get(self, i: int, j: int, t: Slot) -> Fraction:
        v = self.table.get((i, j, t))
        if v is None:
            return self.baseline.get((i, j), _ZERO)
        return v

    def values(self) -> Iterable[Fraction]:
        yield from self.baseline.values()
        yield from self.table.values()

    def __eq__(self, other):
        return (type(self) is type(other) and self.horizon == other.horizon
                and self.baseline == other.baseline and self.table == other.table)


class RateSchedule(_SlotTable):
    """Per-slot transmission rates ``r_ij(t)``; missing entries are 0."""

    def __init__(self, horizon, baseline=None, table=None):
        super().__init__(horizon, baseline, table)
        for v in self.values():
            if not 0 <= v <= 1:
                raise ValueError(f"rate {v} outside [0, 1]")

    def rate(self, i: int, j: int, t: Slot) -> Fraction:
        return self.get(i, j, t)


class Witness(_SlotTable):
    """Fractions ``x_ij(t)`` certifying admissibility.

    ``baseline`` holds time-invariant fractions, ``table`` per-slot overrides.
    """

    def frac(self, i: int, j: int, t: Slot) -> Fraction:
        return self.get(i, j, t)


def uniform_witness(network: Network, horizon: int) -> Witness:
    base = {}
    for i in range(network.num_nodes):
        nbrs = network.neighbors[i]
        for j in nbrs:
            base[(i, j)] = Fraction(1, len(nbrs))
    return Witness(horizon, base)


@dataclass(frozen=True)
class InjectionEvent:
    slot: Slot
    path: Path
    size: Fraction


@dataclass
class InjectionTrace:
    events: list[InjectionEvent]
    horizon: int

    def __post_init__(self):
        self.events = sorted(self.events, key=lambda e: e.slot)
        for e in self.events:
            if not 0 <= e.slot < self.horizon:
                raise ValueError(f"event slot {e.slot} outside horizon {self.horizon}")
            if e.size <= 0:
                raise ValueError("injected size must be positive")

    def by_slot(self) -> dict[Slot, list[InjectionEvent]]:
        out: dict[Slot, list[InjectionEvent]] = defaultdict(list)
        for e in self.events:
            out[e.slot].append(e)
        return out

    def validate(self, network: Network) -> None:
        for k, e in enumerate(self.events):
            verdict = validate_path(network, e.path)
            if not verdict:
                raise ValueError(f"event {k}: invalid path ({verdict.reason}, link {verdict.index})")


@dataclass(frozen=True)
class Violation:
    """Either an Eq.-(1)-style witness failure at ``(node, slot)`` (kind
    ``"fractions"``) or a window overload on ``link`` (kind ``"window"``)."""

    kind: str
    slot: Slot
    node: Optional[int] = None
    link: Optional[Link] = None
    start: Optional[Slot] = None
    length: Optional[int] = None
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    detail: str = ""

    def __str__(self):
        if self.kind == "window":
            i, j = self.link
            return (f"link {i}->{j} window start {self.start} length {self.length}: "
                    f"load {self.lhs} > {self.rhs}")
        return f"node {self.node} slot {self.slot}: {self.detail}"


@dataclass(frozen=True)
class Verdict:
    admissible: bool
    violation: Optional[Violation] = None
    witness: Optional[Witness] = field(default=None, compare=False)

    def __bool__(self) -> bool:
        return self.admissible


def link_loads(trace: InjectionTrace) -> dict[Link, dict[Slot, Fraction]]:
    loads: dict[Link, dict[Slot, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    for e in trace.events:
        for link in e.path.links:
            loads[link][e.slot] += e.size
    return {k: dict(v) for k, v in loads.items()}


def aggregate_link_load(trace: InjectionTrace, link: Link, t: Slot) -> Fraction:
    """``I_ij(t)``: total size injected at ``t`` with ``link`` on its path."""
    return sum((e.size for e in trace.events if e.slot == t and link in e.path.links), _ZERO)


def _fraction_violation(network: Network, witness: Witness, horizon: int) -> Optional[Violation]:
    """First (slot, node) whose fractions are out of range or do not sum to 1."""
    candidates: list[tuple] = []

    def bad(i, j, v):
        return v < 0 or v > 1 or (v and j not in network.neighbors[i])

    for (i, j, t), v in witness.table.items():
        if t < horizon and bad(i, j, v):
            candidates.append((t, i, 0, j, v))
    for (i, j), v in witness.baseline.items():
        if bad(i, j, v):
            t = next((t for t in range(horizon) if (i, j, t) not in witness.table), None)
            if t is not None:
                candidates.append((t, i, 0, j, v))

    overridden: dict[tuple[int, Slot], set[int]] = defaultdict(set)
    for (i, j, t) in witness.table:
        if t < horizon:
            overridden[(i, t)].add(j)
    for (i, t) in overridden:
        if network.neighbors[i]:
            s = sum((witness.frac(i, j, t) for j in network.neighbors[i]), _ZERO)
            if s != 1:
                candidates.append((t, i, 1, -1, s))
    for i in range(network.num_nodes):
        if not network.neighbors[i]:
            continue
        s = sum((witness.baseline.get((i, j), _ZERO) for j in network.neighbors[i]), _ZERO)
        if s != 1:
            t = next((t for t in range(horizon) if (i, t) not in overridden), None)
            if t is not None:
                candidates.append((t, i, 1, -1, s))
    if not candidates:
        return None
    t, i, kind, j, v = min(candidates)
    if kind == 0:
        return Violation("fractions", t, node=i, detail=f"x[{i},{j}]={v} invalid")
    return Violation("fractions", t, node=i, detail="fractions do not sum to 1")


def verify_witness(network: Network, trace: InjectionTrace, schedule: RateSchedule,
                   budget: AdversaryBudget, witness: Witness) -> Verdict:
    """Check the witness with one O(T) deficit recursion per loaded link.

    ``D(t) = max(0, D(t-1) + I(t) - r * rate(t) * x(t))`` is the worst window
    excess ending at ``t``; the trace is admissible iff ``D(t) <= b`` always.
    The reported window is the shortest one attaining the maximal excess at
    the first violating slot.
    """
    horizon = trace.horizon
    bad = _fraction_violation(network, witness, horizon)
    if bad is not None:
        return Verdict(False, bad)

    r, b = budget.r, budget.b
    first: Optional[tuple[Slot, Link, Violation]] = None
    for link, per_slot in sorted(link_loads(trace).items()):
        i, j = link
        deficit = _ZERO
        start = 0
        lhs = rhs = _ZERO
        for t in range(min(per_slot), horizon):
            if first is not None and t >= first[0]:
                break
            load = per_slot.get(t, _ZERO)
            service = r * schedule.rate(i, j, t) * witness.frac(i, j, t)
            if deficit <= 0:
                start, lhs, rhs = t, _ZERO, _ZERO
            lhs += load
            rhs += service
            deficit = deficit + load - service
            if deficit > b:
                v = Violation("window", t, node=i, link=link, start=start,
                              length=t - start + 1, lhs=lhs, rhs=rhs + b)
                first = (t, link, v)
                break
            if deficit < 0:
                deficit = _ZERO
    if first is not None:
        return Verdict(False, first[2])
    return Verdict(True, witness=witness)


def verify_witness_bruteforce(network: Network, trace: InjectionTrace, schedule: RateSchedule,
                              budget: AdversaryBudget, witness: Witness) -> Verdict:
    """Enumerate every (link, window) pair directly; O(T^2) per link."""
    T = trace.horizon
    n = network.num_nodes
    for t in range(T):
        for i in range(n):
            total = _ZERO
            for j in range(n):
                x = witness.frac(i, j, t)
                if x < 0 or x > 1 or (x and j not in network.neighbors[i]):
                    return Verdict(False, Violation("fractions", t, node=i,
                                                    detail=f"x[{i},{j}]={x} invalid"))
                total += x
            if network.neighbors[i] and total != 1:
                return Verdict(False, Violation("fractions", t, node=i,
                                                detail="fractions do not sum to 1"))

    inj = [[_ZERO] * T for _ in range(n * n)]
    for e in trace.events:
        for (i, j) in e.path.links:
            inj[i * n + j][e.slot] += e.size
    r, b = budget.r, budget.b
    links = [(i, j) for i in range(n) for j in sorted(network.neighbors[i])]
    for end in range(T):
        for (i, j) in links:
            loads = inj[i * n + j]
            best = None
            lhs = rhs = _ZERO
            for s in range(end, -1, -1):
                lhs += loads[s]
                rhs += r * schedule.rate(i, j, s) * witness.frac(i, j, s)
                excess = lhs - (rhs + b)
                if excess > 0 and (best is None or excess > best[0]):
                    best = (excess, s, lhs, rhs + b)
            if best is not None:
                _, s, lhs_v, rhs_v = best
                return Verdict(False, Violation("window", end, node=i, link=(i, j), start=s,
                                                length=end - s + 1, lhs=lhs_v, rhs=rhs_v))
    return Verdict(True, witness=witness)


def find_witness(network: Network, trace: InjectionTrace, schedule: RateSchedule,
                 budget: AdversaryBudget) -> Optional[Witness]:
    """Search for fractions certifying admissibility, exactly.

    The constraints separate by node.  For each node with loaded outgoing
    links we solve, in exact arithmetic, the compact system

        sum_j x[j, t] = 1
        D[l, t] >= D[l, t-1] + I[l, t] - r * rate[l, t] * x[l, t],  D >= 0
        D[l, t] <= b

    whose feasibility is equivalent to every window constraint.  Per link only
    the slots between its first and last load matter.
    """
    T = trace.horizon
    witness = uniform_witness(network, T)
    loads = link_loads(trace)
    by_node: dict[int, list[Link]] = defaultdict(list)
    for link in loads:
        by_node[link[0]].append(link)
    for i in sorted(by_node):
        table = _solve_node(network, i, sorted(by_node[i]), loads, schedule, budget)
        if table is None:
            return None
        witness.table.update(table)
    return witness


def _solve_node(network, i, links, loads, schedule, budget):
    nbrs = sorted(network.neighbors[i])
    if not nbrs:
        return None
    r, b = budget.r, budget.b
    spans = {link: (min(loads[link]), max(loads[link])) for link in links}
    slots = sorted({t for lo, hi in spans.values() for t in range(lo, hi + 1)})

    col = {}

    def var(key):
        if key not in col:
            col[key] = len(col)
        return col[key]

    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for t in slots:
        rows.append({var(("x", j, t)): _ONE for j in nbrs})
        rhs.append(_ONE)
    for link in links:
        j = link[1]
        lo, hi = spans[link]
        for t in range(lo, hi + 1):
            row = {var(("D", j, t)): _ONE, var(("e", j, t)): -_ONE}
            if t > lo:
                row[var(("D", j, t - 1))] = -_ONE
            s = r * schedule.rate(i, j, t)
            if s:
                row[var(("x", j, t))] = s
            rows.append(row)
            rhs.append(loads[link].get(t, _ZERO))
            rows.append({var(("D", j, t)): _ONE, var(("u", j, t)): _ONE})
            rhs.append(Fraction(b))
    x = feasible_point(rows, rhs, len(col))
    if x is None:
        return None
    return {(i, key[1], key[2]): x[c] for key, c in col.items() if key[0] == "x"}


# ---------------------------------------------------------------- generation

def _random_simplex_point(rng: random.Random, nbrs: Sequence[int]) -> dict[int, Fraction]:
    weights = [rng.randint(0, 4) for _ in nbrs]
    total = sum(weights)
    if total == 0:
        return {j: Fraction(1, len(nbrs)) for j in nbrs}
    return {j: Fraction(w, total) for j, w in zip(nbrs, weights)}


def generate_admissible_trace(network: Network, schedule: RateSchedule, budget: AdversaryBudget,
                              seed: int, horizon: int, path_pool: Sequence[Path],
                              intensity: float = 0.5, granularity: int = 8,
                              inject_until: Optional[int] = None
                              ) -> tuple[InjectionTrace, Witness]:
    """Draw a witness, then inject greedily against per-link token buckets.

    Each link ``ij`` on a pooled path holds ``tokens <= b``; at slot ``t`` a
    packet may use at most ``tokens + r * rate * x`` on every link it crosses,
    which is exactly the deficit recursion read backwards, so the emitted
    trace always verifies against the emitted witness.  Sizes are multiples of
    ``1/granularity``.  ``inject_until`` stops injecting after that slot (the
    run can then drain).
    """
    if not path_pool:
        raise ValueError("path_pool is empty")
    for p in path_pool:
        verdict = validate_path(network, p)
        if not verdict:
            raise ValueError(f"invalid pooled path {p.nodes()}: {verdict.reason}")
    rng = random.Random(seed)
    r, b = budget.r, Fraction(budget.b)
    tails = sorted({i for p in path_pool for i, _ in p.links})
    witness = uniform_witness(network, horizon)
    for t in range(horizon):
        for i in tails:
            for j, x in _random_simplex_point(rng, sorted(network.neighbors[i])).items():
                witness.table[(i, j, t)] = x

    links = sorted({l for p in path_pool for l in p.links})
    tokens = {l: b for l in links}
    events: list[InjectionEvent] = []
    last = horizon if inject_until is None else min(horizon, inject_until)
    pool = list(path_pool)
    for t in range(horizon):
        avail = {l: tokens[l] + r * schedule.rate(l[0], l[1], t) * witness.frac(l[0], l[1], t)
                 for l in links}
        if t < last:
            rng.shuffle(pool)
            for path in pool:
                if rng.random() >= intensity:
                    continue
                room = min(avail[l] for l in path.links)
                share = Fraction(rng.randint(1, 4), 4)
                size = Fraction(int(room * share * granularity), granularity)
                if size <= 0:
                    continue
                events.append(InjectionEvent(t, path, size))
                for l in path.links:
                    avail[l] -= size
        for l in links:
            tokens[l] = min(b, avail[l])
    return InjectionTrace(events, horizon), witness


RATE_MODES = ("constant-one", "uniform-random", "on-off", "from-file")


def generate_rate_schedule(network: Network, seed: int, horizon: int, mode: str = "constant-one",
                           period: int = 2, path: Optional[str] = None,
                           levels: int = 8) -> RateSchedule:
    """Rates on usable links only; everything else is 0.

    ``on-off`` keeps a link at rate 1 for the first half of each period and 0
    for the rest; ``uniform-random`` draws multiples of ``1/levels``.
    """
    links = network.links()
    if mode == "constant-one":
        return RateSchedule(horizon, {l: _ONE for l in links})
    if mode == "uniform-random":
        rng = random.Random(seed)
        return RateSchedule(horizon, table={(i, j, t): Fraction(rng.randint(0, levels), levels)
                                            for t in range(horizon) for (i, j) in links})
    if mode == "on-off":
        if period < 2:
            raise ValueError("on-off period must be >= 2")
        on = (period + 1) // 2
        return RateSchedule(horizon, {l: _ONE for l in links},
                            {(i, j, t): _ZERO for t in range(horizon) if t % period >= on
                             for (i, j) in links})
    if mode == "from-file":
        if path is None:
            raise ValueError("from-file mode needs a path")
        with open(path) as fh:
            return read_schedule(fh.read(), horizon)
    raise ValueError(f"unknown rate mode {mode!r}; expected one of {RATE_MODES}")


# ------------------------------------------------------------------- text I/O

def write_trace(trace: InjectionTrace) -> str:
    lines = [f"horizon {trace.horizon}"]
    for e in trace.events:
        nodes = " ".join(str(v) for v in e.path.nodes())
        lines.append(f"inject {e.slot} {e.size.numerator}/{e.size.denominator} {nodes}")
    return "\n".join(lines) + "\n"


def read_trace(text: str, horizon: Optional[int] = None) -> InjectionTrace:
    """Parse ``inject <slot> <num>/<den> <node0> ... <nodek>`` lines.

    An optional ``horizon <T>`` line fixes the horizon; otherwise it is the
    ``horizon`` argument, or one past the last event slot.
    """
    events = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "horizon" and len(parts) == 2:
                declared = int(parts[1])
            elif parts[0] == "inject" and len(parts) >= 5:
                slot = int(parts[1])
                size = Fraction(parts[2])
                if slot < 0 or size <= 0:
                    raise ParseError(lineno, "slot must be >= 0 and size > 0")
                nodes = [int(v) for v in parts[3:]]
                events.append(InjectionEvent(slot, Path.from_nodes(nodes), size))
            else:
                raise ParseError(lineno, f"unrecognised line {line!r}")
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(lineno, str(exc)) from None
    T = horizon if horizon is not None else declared
    if T is None:
        T = max((e.slot for e in events), default=-1) + 1
    return InjectionTrace(events, T)


def _write_slot_table(keyword: str, tab: _SlotTable) -> str:
    lines = [f"{keyword} * {i} {j} {v.numerator}/{v.denominator}"
             for (i, j), v in sorted(tab.baseline.items())]
    lines += [f"{keyword} {t} {i} {j} {v.numerator}/{v.denominator}"
              for (i, j, t), v in sorted(tab.table.items(), key=lambda kv: (kv[0][2], kv[0][:2]))]
    return "\n".join(lines) + "\n"


def _read_slot_table(keyword: str, text: str):
    baseline, table = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != keyword or len(parts) != 5:
            raise ParseError(lineno, f"expected '{keyword} <slot> <i> <j> <num>/<den>'")
        try:
            i, j, v = int(parts[2]), int(parts[3]), Fraction(parts[4])
            if parts[1] == "*":
                baseline[(i, j)] = v
            else:
                table[(i, j, int(parts[1]))] = v
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(lineno, str(exc)) from None
    return baseline, table


def write_schedule(schedule: RateSchedule) -> str:
    """``rate <slot> <i> <j> <num>/<den>``; slot ``*`` means every slot."""
    return _write_slot_table("rate", schedule)


def read_schedule(text: str, horizon: int) -> RateSchedule:
    baseline, table = _read_slot_table("rate", text)
    return RateSchedule(horizon, baseline, table)


def write_witness(witness: Witness) -> str:
    return _write_slot_table("frac", witness)


def read_witness(text: str, horizon: int) -> Witness:
    baseline, table = _read_slot_table("frac", text)
    return Witness(horizon, baseline, table)
