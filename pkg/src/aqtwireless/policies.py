"""Work-conserving queue disciplines and the per-node outgoing-link selector.

Nothing here sees link rates: a node decides which queue to serve and in
what order using queue contents and its own history only.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence


class PolicyKind(str, enum.Enum):
    FIFO = "FIFO"
    LIS = "LIS"
    SIS = "SIS"
    FTG = "FTG"
    NTS = "NTS"


class SelectorKind(str, enum.Enum):
    OLDEST_HEAD_OF_LINE = "OldestHeadOfLine"
    ROUND_ROBIN_NON_EMPTY = "RoundRobinNonEmpty"
    LOWEST_NEIGHBOR_ID = "LowestNeighborId"


class Fragment:
    """The not-yet-sent part of one packet sitting in one queue.

    ``hop`` is the 1-based position of the queue's link on the packet path,
    ``arrival`` the slot the packet reached this queue.
    """

    __slots__ = ("packet", "remaining", "arrival", "injected_at", "hop", "path_length")

    def __init__(self, packet: int, remaining: Fraction, arrival: int, injected_at: int,
                 hop: int, path_length: int):
        self.packet = packet
        self.remaining = remaining
        self.arrival = arrival
        self.injected_at = injected_at
        self.hop = hop
        self.path_length = path_length

    @property
    def remaining_hops(self) -> int:
        return self.path_length - self.hop + 1

    @property
    def hops_done(self) -> int:
        return self.hop - 1

    def __repr__(self):
        return (f"Fragment(packet={self.packet}, remaining={self.remaining}, "
                f"arrival={self.arrival}, hop={self.hop}/{self.path_length})")


_KEYS: dict[PolicyKind, Callable[[Fragment], tuple]] = {
    PolicyKind.FIFO: lambda f: (f.arrival, f.packet),
    PolicyKind.LIS: lambda f: (f.injected_at, f.packet),
    PolicyKind.SIS: lambda f: (-f.injected_at, f.packet),
    PolicyKind.FTG: lambda f: (-f.remaining_hops, f.packet),
    PolicyKind.NTS: lambda f: (f.hops_done, f.packet),
}


def policy_key(policy: PolicyKind) -> Callable[[Fragment], tuple]:
    return _KEYS[PolicyKind(policy)]


class QueueState:
    """Queue kept by node ``owner`` for link ``owner -> peer``.

    Fragments wait in a heap ordered by the owner's policy key.  ``head`` is
    a packet already partly sent on this link; it is finished before anything
    else regardless of policy.
    """

    __slots__ = ("owner", "peer", "policy", "_key", "_heap", "head", "backlog")

    def __init__(self, owner: int, peer: int, policy: PolicyKind = PolicyKind.FIFO):
        self.owner = owner
        self.peer = peer
        self.policy = PolicyKind(policy)
        self._key = policy_key(self.policy)
        self._heap: list[tuple[tuple, Fragment]] = []
        self.head: Optional[Fragment] = None
        self.backlog = Fraction(0)

    @property
    def link(self) -> tuple[int, int]:
        return self.owner, self.peer

    def push(self, frag: Fragment) -> None:
        heapq.heappush(self._heap, (self._key(frag), frag))
        self.backlog += frag.remaining

    def first(self) -> Optional[Fragment]:
        if self.head is not None:
            return self.head
        return self._heap[0][1] if self._heap else None

    def start_first(self) -> Fragment:
        """Move the policy-first fragment into ``head`` (no-op if one is there)."""
        if self.head is None:
            self.head = heapq.heappop(self._heap)[1]
        return self.head

    def fragments(self) -> list[Fragment]:
        rest = [f for _, f in self._heap]
        return ([self.head] if self.head is not None else []) + rest

    def __bool__(self) -> bool:
        return self.head is not None or bool(self._heap)

    def __repr__(self):
        return f"QueueState({self.owner}->{self.peer}, backlog={self.backlog})"


def order_queue(policy: PolicyKind, queue: QueueState, now: int = 0) -> list[Fragment]:
    """Service order of a queue's fragments under ``policy``; ties by packet id.

    A partly sent packet stays first.  ``now`` is accepted for interface
    symmetry; none of the disciplines depends on the current slot.
    """
    key = policy_key(policy)
    rest = sorted((f for f in queue.fragments() if f is not queue.head), key=key)
    return ([queue.head] if queue.head is not None else []) + rest


@dataclass
class SelectorHistory:
    """Per-node memory of the selector (last neighbour served)."""

    last_peer: Optional[int] = None


def select_link(selector: SelectorKind, queues: Sequence[QueueState],
                history: Optional[SelectorHistory] = None,
                ) -> Optional[tuple[int, int]]:
    """Pick the single outgoing link a node serves this slot.

    Returns ``None`` only when every queue is empty.  OldestHeadOfLine
    compares the injection slots of each queue's policy-first fragment.
    """
    busy = sorted((q for q in queues if q), key=lambda q: q.peer)
    if not busy:
        return None
    if len(busy) == 1:
        chosen = busy[0]
    else:
        selector = SelectorKind(selector)
        if selector is SelectorKind.LOWEST_NEIGHBOR_ID:
            chosen = busy[0]
        elif selector is SelectorKind.OLDEST_HEAD_OF_LINE:
            chosen = min(busy, key=lambda q: (q.first().injected_at, q.peer))
        else:
            last = history.last_peer if history is not None else None
            chosen = busy[0]
            if last is not None:
                chosen = next((q for q in busy if q.peer > last), busy[0])
    if history is not None:
        history.last_peer = chosen.peer
    return chosen.owner, chosen.peer


def parse_assignments(items: Iterable[tuple[str, str]], num_nodes: int, prefix: str,
                      kind, default) -> list:
    """Resolve ``<prefix>.<node>`` / ``<prefix>.default`` keys to one value per node."""
    chosen = {}
    fallback = kind(default)
    for key, value in items:
        if not key.startswith(prefix + "."):
            continue
        target = key[len(prefix) + 1:]
        if target == "default":
            fallback = kind(value)
        else:
            chosen[int(target)] = kind(value)
    return [chosen.get(i, fallback) for i in range(num_nodes)]
