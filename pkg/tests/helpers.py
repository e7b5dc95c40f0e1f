"""Random instance builders shared by the property and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from aqtwireless.adversary import (
    AdversaryBudget,
    InjectionEvent,
    InjectionTrace,
    RateSchedule,
    Witness,
)
from aqtwireless.core import Network, Path
from aqtwireless.engine import INJECT, QLEN, SEND, EventLog
from aqtwireless.scenarios import random_connected_network, random_paths


def random_simplex(rng: random.Random, nbrs) -> dict[int, Fraction]:
    weights = [rng.randint(0, 3) for _ in nbrs]
    if not any(weights):
        weights[rng.randrange(len(weights))] = 1
    total = sum(weights)
    return {j: Fraction(w, total) for j, w in zip(nbrs, weights)}


def random_tuple(seed: int):
    """(network, trace, schedule, budget, witness) with T <= 30.

    Loads are scaled so that roughly half the instances are admissible.
    """
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    net = random_connected_network(n, 3, 0.6, rng)
    T = rng.randint(1, 30)
    rates = {}
    for i, j in net.links():
        for t in range(T):
            rates[(i, j, t)] = Fraction(rng.randint(0, 4), 4)
    schedule = RateSchedule(T, {}, rates)
    fracs = {}
    for i in range(n):
        nbrs = sorted(net.neighbors[i])
        for t in range(T):
            for j, v in random_simplex(rng, nbrs).items():
                fracs[(i, j, t)] = v
    # occasionally break the fractions to exercise that branch
    if rng.random() < 0.05:
        i, j = rng.choice(list(net.links()))
        fracs[(i, j, rng.randrange(T))] = Fraction(rng.choice([-1, 3, 1]), 2)
    witness = Witness(T, {}, fracs)
    budget = AdversaryBudget(rng.randint(1, 3), Fraction(rng.randint(0, 9), 10))
    pool = random_paths(net, rng, 4, 3)
    events = []
    scale = rng.choice([Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)])
    for t in range(T):
        for _ in range(rng.randint(0, 2)):
            events.append(InjectionEvent(t, rng.choice(pool), scale * rng.randint(1, 4)))
    return net, InjectionTrace(events, T), schedule, budget, witness


def audit_work_conservation(log: EventLog, wireless: bool = True) -> tuple[int, int]:
    """Count (idle-with-backlog, multi-link) slot/node pairs, from the log alone.

    Backlog available to node ``i`` at slot ``t`` is its end-of-slot backlog
    at ``t - 1`` plus whatever was injected at ``i`` during ``t``.
    """
    backlog: dict[tuple[int, int], Fraction] = {}
    injected: dict[tuple[int, int], Fraction] = {}
    sent: dict[tuple[int, int], set[int]] = {}
    positive: dict[tuple[int, int], set[int]] = {}
    for rec in log.records:
        key = (rec.slot, rec.node)
        if rec.kind == QLEN:
            backlog[key] = backlog.get(key, Fraction(0)) + rec.amount
        elif rec.kind == INJECT:
            injected[key] = injected.get(key, Fraction(0)) + rec.amount
        elif rec.kind == SEND:
            sent.setdefault(key, set()).add(rec.peer)
            if rec.amount > 0:
                positive.setdefault(key, set()).add(rec.peer)
    idle = 0
    nodes = {node for _, node in backlog} | {node for _, node in injected}
    for t in range(log.horizon):
        for i in nodes:
            have = backlog.get((t - 1, i), Fraction(0)) + injected.get((t, i), Fraction(0))
            if have > 0 and not sent.get((t, i)):
                idle += 1
    multi = sum(1 for peers in positive.values() if len(peers) > 1) if wireless else 0
    return idle, multi


def chain(nodes) -> Path:
    return Path.from_nodes(list(nodes))


def two_node() -> Network:
    return Network.from_edges(2, [(0, 1)], 1)
