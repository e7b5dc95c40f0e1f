"""Experiment inputs: the building-block gadget, random scenarios and a small
worst-case search.

Gadget layout
-------------
A block holds ``h - 1`` nodes chained ``v0 -> v1 -> ... -> v_{h-2}``.  Every
node has ``k*h`` external inputs; in a non-leaf block each input is the
output (last node) of a child block, so a block has ``(h-1)*k*h`` children.
Blocks form a tree of depth ``J``; leaf-level inputs are adversary injection
points and the root block's last node absorbs what reaches it.  Blocks are
numbered breadth-first and node ``m`` of block ``B`` gets id
``B*(h-1) + m``.

Traffic follows two templates:

* transit: enters at ``v0`` of a block, crosses all its nodes, leaves through
  the block output and dies after one more hop in the parent block
  (at most ``h`` hops);
* block input at a leaf: injected at ``v_m`` and absorbed at its successor.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from aqtwireless.adversary import (
    AdversaryBudget,
    InjectionEvent,
    InjectionTrace,
    RateSchedule,
    Witness,
    find_witness,
    generate_admissible_trace,
    generate_rate_schedule,
    verify_witness,
)
from aqtwireless.core import Link, Network, Path
from aqtwireless.engine import WIRELESS, WIRELINE, EventLog, LogDiff, SimConfig, compare_logs, run
from aqtwireless.metrics import max_queueing
from aqtwireless.policies import PolicyKind, SelectorKind


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class GadgetParams:
    h: int
    k: int
    J: int

    def __post_init__(self):
        if self.h < 3:
            raise ValueError("h must be >= 3")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.J < 0:
            raise ValueError("J must be >= 0")

    @property
    def children_per_block(self) -> int:
        return (self.h - 1) * self.k * self.h

    @property
    def expected_blocks(self) -> int:
        return sum(self.children_per_block ** j for j in range(self.J + 1))


@dataclass
class Block:
    id: int
    level: int
    nodes: list[int]
    parent: Optional[int] = None
    # node of the parent block this block's output feeds
    target: Optional[int] = None
    children: list[int] = field(default_factory=list)


@dataclass
class GadgetNetwork:
    params: GadgetParams
    network: Network
    blocks: list[Block]

    @property
    def d(self) -> int:
        return self.params.h

    def block_of(self, node: int) -> Block:
        return self.blocks[node // (self.params.h - 1)]

    def successor(self, node: int) -> Optional[int]:
        out = self.network.out_neighbors(node)
        return out[0] if out else None

    def injection_points(self) -> dict[int, int]:
        """External inputs fed straight by the adversary, per node."""
        kh = self.params.k * self.params.h
        return {v: kh for b in self.blocks if b.level == self.params.J for v in b.nodes}

    def manifest(self) -> str:
        return "".join(f"block {b.id} level {b.level} nodes {' '.join(map(str, b.nodes))}\n"
                       for b in self.blocks)

    def paths(self) -> list[Path]:
        """Every path allowed by the two traffic templates, in canonical order."""
        out = []
        for b in self.blocks:
            nodes = list(b.nodes)
            if b.target is not None:
                nodes.append(b.target)
                nxt = self.successor(b.target)
                if nxt is not None:
                    nodes.append(nxt)
            if len(nodes) >= 2:
                out.append(Path.from_nodes(nodes))
        for b in self.blocks:
            if b.level != self.params.J:
                continue
            for v in b.nodes:
                nxt = self.successor(v)
                if nxt is not None:
                    out.append(Path.from_nodes([v, nxt]))
        return out


def build_gadget(params: GadgetParams) -> GadgetNetwork:
    h, k, J = params.h, params.k, params.J
    per = h - 1
    blocks = [Block(0, 0, list(range(per)))]
    arcs: list[Link] = []
    frontier = [0]
    for level in range(1, J + 1):
        nxt = []
        for bid in frontier:
            parent = blocks[bid]
            for m in range(per):
                for _ in range(k * h):
                    cid = len(blocks)
                    child = Block(cid, level, list(range(cid * per, cid * per + per)),
                                  parent=bid, target=parent.nodes[m])
                    blocks.append(child)
                    parent.children.append(cid)
                    nxt.append(cid)
        frontier = nxt
    for b in blocks:
        arcs += [(b.nodes[m], b.nodes[m + 1]) for m in range(per - 1)]
        if b.target is not None:
            arcs.append((b.nodes[-1], b.target))
    network = Network.from_edges(len(blocks) * per, [], max_path_hops=h, arcs=arcs)
    return GadgetNetwork(params, network, blocks)


def read_manifest(text: str) -> list[tuple[int, int, list[int]]]:
    out = []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] != "block" or parts[2] != "level" or parts[4] != "nodes":
            raise ValueError(f"bad manifest line {line!r}")
        out.append((int(parts[1]), int(parts[3]), [int(v) for v in parts[5:]]))
    return out


@dataclass(frozen=True)
class Fact1Verdict:
    holds: bool
    offenders: tuple[int, ...] = ()

    def __bool__(self):
        return self.holds


def fact1_check(network: Network) -> Fact1Verdict:
    """Every node forwards to at most one node (none only for a terminal sink).

    Unoriented networks count each edge in both directions.
    """
    bad = tuple(i for i in range(network.num_nodes) if len(network.out_neighbors(i)) > 1)
    return Fact1Verdict(not bad, bad)


@dataclass
class ScenarioBundle:
    network: Network
    schedule: RateSchedule
    trace: InjectionTrace
    witness: Witness
    budget: AdversaryBudget
    d: int
    policies: list = field(default_factory=list)
    selectors: list = field(default_factory=list)
    seed: int = 0
    horizon: Optional[int] = None

    def config(self, horizon: Optional[int] = None, mode: str = WIRELESS,
               eligibility: str = "same-slot") -> SimConfig:
        T = horizon if horizon is not None else (self.horizon or self.trace.horizon)
        return SimConfig(self.network, self.schedule, self.trace, T,
                         self.policies or PolicyKind.FIFO,
                         self.selectors or SelectorKind.OLDEST_HEAD_OF_LINE,
                         mode, eligibility, self.seed)


def gadget_trace(gadget: GadgetNetwork, budget: AdversaryBudget, seed: int, horizon: int,
                 paths: int = 12, intensity: float = 0.5,
                 inject_until: Optional[int] = None) -> tuple[InjectionTrace, Witness]:
    """Admissible trace over a random subset of the gadget's traffic templates."""
    rng = random.Random(seed)
    pool = gadget.paths()
    if len(pool) > paths:
        pool = rng.sample(pool, paths)
    schedule = generate_rate_schedule(gadget.network, seed, horizon, "constant-one")
    return generate_admissible_trace(gadget.network, schedule, budget, rng.getrandbits(63),
                                     horizon, pool, intensity=intensity, inject_until=inject_until)


def wireless_simulation_bundle(gadget: GadgetNetwork, budget: AdversaryBudget,
                               trace: InjectionTrace, witness: Optional[Witness] = None
                               ) -> ScenarioBundle:
    """All-FIFO nodes, rate 1 on every link forever, traffic on template paths."""
    allowed = set(gadget.paths())
    for k, ev in enumerate(trace.events):
        if ev.path not in allowed:
            raise ScenarioError(f"event {k}: path {ev.path.nodes()} is not a gadget traffic path")
    schedule = generate_rate_schedule(gadget.network, 0, trace.horizon, "constant-one")
    if witness is None:
        witness = find_witness(gadget.network, trace, schedule, budget)
        if witness is None:
            raise ScenarioError("trace is not admissible for the given budget")
    elif not verify_witness(gadget.network, trace, schedule, budget, witness):
        raise ScenarioError("supplied witness does not certify the trace")
    n = gadget.network.num_nodes
    return ScenarioBundle(gadget.network, schedule, trace, witness, budget, gadget.d,
                          [PolicyKind.FIFO] * n, [SelectorKind.OLDEST_HEAD_OF_LINE] * n)


@dataclass(frozen=True)
class EquivalenceVerdict:
    equal: bool
    diff: Optional[LogDiff] = None
    wireless: Optional[EventLog] = field(default=None, compare=False, repr=False)
    wireline: Optional[EventLog] = field(default=None, compare=False, repr=False)

    def __bool__(self):
        return self.equal


def equivalence_check(bundle: ScenarioBundle, horizon: int) -> EquivalenceVerdict:
    """Run the bundle in wireless and wireline mode and compare the logs."""
    a, _ = run(bundle.config(horizon, WIRELESS))
    b, _ = run(bundle.config(horizon, WIRELINE))
    diff = compare_logs(a, b)
    return EquivalenceVerdict(diff is None, diff, a, b)


def random_connected_network(n: int, d: int, edge_density: float, rng: random.Random,
                             max_degree: Optional[int] = None, attempts: int = 200) -> Network:
    """G(n, p) conditioned on connectivity (and an optional degree cap)."""
    if not 0 <= edge_density <= 1:
        raise ValueError("edge_density must lie in [0, 1]")
    for _ in range(attempts):
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_density]
        net = Network.from_edges(n, edges, d)
        if max_degree is not None and any(len(x) > max_degree for x in net.neighbors):
            continue
        if _connected(net):
            return net
    raise ScenarioError(f"no connected graph with n={n} at density {edge_density} "
                        f"after {attempts} attempts")


def _connected(net: Network) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in net.neighbors[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == net.num_nodes


def random_paths(network: Network, rng: random.Random, count: int,
                 d: Optional[int] = None) -> list[Path]:
    """Random node-simple paths with 1..d hops (a target length is drawn first)."""
    d = network.max_path_hops if d is None else d
    out = []
    for _ in range(count * 4):
        if len(out) >= count:
            break
        want = rng.randint(1, d)
        node = rng.randrange(network.num_nodes)
        nodes = [node]
        while len(nodes) - 1 < want:
            options = [j for j in network.out_neighbors(nodes[-1]) if j not in nodes]
            if not options:
                break
            nodes.append(rng.choice(options))
        if len(nodes) >= 2:
            out.append(Path.from_nodes(nodes))
    return out


def random_scenario(n: int, d: int, edge_density: float, budget: AdversaryBudget, seed: int,
                    horizon: int, rate_mode: str = "constant-one", max_degree: Optional[int] = None,
                    num_paths: Optional[int] = None, intensity: float = 0.5,
                    inject_until: Optional[int] = None, granularity: int = 8,
                    selectors: Optional[Sequence[SelectorKind]] = None) -> ScenarioBundle:
    """Connected random network, random paths of <= d hops, admissible trace,
    and one policy and selector per node drawn from all kinds."""
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    rng = random.Random(seed)
    net = random_connected_network(n, d, edge_density, rng, max_degree)
    pool = random_paths(net, rng, num_paths or max(2, 2 * n), d)
    schedule = generate_rate_schedule(net, rng.getrandbits(63), horizon, rate_mode)
    trace, witness = generate_admissible_trace(net, schedule, budget, rng.getrandbits(63), horizon,
                                               pool, intensity=intensity, inject_until=inject_until,
                                               granularity=granularity)
    policies = [rng.choice(list(PolicyKind)) for _ in range(n)]
    kinds = list(selectors) if selectors else list(SelectorKind)
    selectors = [rng.choice(kinds) for _ in range(n)]
    return ScenarioBundle(net, schedule, trace, witness, budget, d, policies, selectors,
                          seed, horizon)


def search_adversary(network: Network, budget: AdversaryBudget, d: int, horizon: int,
                     search_budget: int, seed: int, path_pool: Optional[Sequence[Path]] = None,
                     schedule: Optional[RateSchedule] = None, policies=PolicyKind.FIFO,
                     selectors=SelectorKind.OLDEST_HEAD_OF_LINE,
                     ) -> tuple[InjectionTrace, int]:
    """Randomised hill climbing over admissible traces, maximising ``Q``.

    Starts from a generated trace and its witness; each step mutates one event
    (add, drop, grow, shift or reroute) and keeps the candidate only if it
    still verifies against the witness and does not lower ``Q``.
    """
    rng = random.Random(seed)
    network = network.with_max_hops(d)
    if schedule is None:
        schedule = generate_rate_schedule(network, seed, horizon, "constant-one")
    pool = list(path_pool) if path_pool else random_paths(network, rng, 2 * network.num_nodes, d)
    trace, witness = generate_admissible_trace(network, schedule, budget, rng.getrandbits(63),
                                               horizon, pool)

    def score(tr: InjectionTrace) -> int:
        log, _ = run(SimConfig(network, schedule, tr, horizon, policies, selectors))
        return max_queueing(log)[0]

    best = score(trace)
    grid = Fraction(1, 8)
    for _ in range(search_budget):
        events = list(trace.events)
        op = rng.randrange(5)
        if op == 0 or not events:
            size = grid * rng.randint(1, 8 * budget.b)
            events.append(InjectionEvent(rng.randrange(horizon), rng.choice(pool), size))
        else:
            k = rng.randrange(len(events))
            ev = events[k]
            if op == 1:
                events.pop(k)
            elif op == 2:
                events[k] = InjectionEvent(ev.slot, ev.path, ev.size + grid * rng.randint(1, 4))
            elif op == 3:
                slot = min(horizon - 1, max(0, ev.slot + rng.randint(-3, 3)))
                events[k] = InjectionEvent(slot, ev.path, ev.size)
            else:
                events[k] = InjectionEvent(ev.slot, rng.choice(pool), ev.size)
        candidate = InjectionTrace(events, horizon)
        if not verify_witness(network, candidate, schedule, budget, witness):
            continue
        q = score(candidate)
        if q >= best:
            trace, best = candidate, q
    return trace, best
