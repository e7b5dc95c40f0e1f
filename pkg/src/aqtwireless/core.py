"""Network topology, paths and fluid data units shared by every other module."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Link = tuple[int, int]


class ParseError(ValueError):
    """Malformed text input; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Network:
    """Undirected multihop network.

    ``arcs`` optionally orients the topology: when set, only those directed
    links may carry traffic (used by gadget topologies where every node feeds
    a single successor).  Without it every edge is usable in both directions.
    """

    num_nodes: int
    neighbors: tuple[frozenset[int], ...]
    max_path_hops: int = 1
    arcs: Optional[frozenset[Link]] = None

    def __post_init__(self):
        if self.num_nodes < 1:
            raise ValueError("network needs at least one node")
        if len(self.neighbors) != self.num_nodes:
            raise ValueError("adjacency size does not match num_nodes")
        if self.max_path_hops < 1:
            raise ValueError("max_path_hops must be >= 1")
        for i, nbrs in enumerate(self.neighbors):
            if i in nbrs:
                raise ValueError(f"self-loop at node {i}")
            for j in nbrs:
                if not 0 <= j < self.num_nodes or i not in self.neighbors[j]:
                    raise ValueError(f"adjacency not symmetric at {i}-{j}")
        if self.arcs is not None:
            for i, j in self.arcs:
                if j not in self.neighbors[i]:
                    raise ValueError(f"arc {i}->{j} is not an edge")

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Iterable[Link], max_path_hops: int = 1,
                   arcs: Optional[Iterable[Link]] = None) -> "Network":
        adj: list[set[int]] = [set() for _ in range(num_nodes)]
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            adj[i].add(j)
            adj[j].add(i)
        arc_set = None
        if arcs is not None:
            arc_set = frozenset((int(i), int(j)) for i, j in arcs)
            for i, j in arc_set:
                adj[i].add(j)
                adj[j].add(i)
        return cls(num_nodes, tuple(frozenset(a) for a in adj), max_path_hops, arc_set)

    @property
    def edges(self) -> list[Link]:
        return sorted((i, j) for i in range(self.num_nodes) for j in self.neighbors[i] if i < j)

    def has_link(self, i: int, j: int) -> bool:
        if not (0 <= i < self.num_nodes) or j not in self.neighbors[i]:
            return False
        return self.arcs is None or (i, j) in self.arcs

    def out_neighbors(self, i: int) -> list[int]:
        if self.arcs is None:
            return sorted(self.neighbors[i])
        return sorted(j for j in self.neighbors[i] if (i, j) in self.arcs)

    def links(self) -> list[Link]:
        """All usable directed links, sorted."""
        return [(i, j) for i in range(self.num_nodes) for j in self.out_neighbors(i)]

    def with_max_hops(self, d: int) -> "Network":
        return Network(self.num_nodes, self.neighbors, d, self.arcs)


def line_network(n: int, max_path_hops: int = 1, oriented: bool = False) -> Network:
    edges = [(i, i + 1) for i in range(n - 1)]
    return Network.from_edges(n, edges, max_path_hops, arcs=edges if oriented else None)


def star_network(leaves: int, max_path_hops: int = 2) -> Network:
    return Network.from_edges(leaves + 1, [(0, k) for k in range(1, leaves + 1)], max_path_hops)


def max_degree(network: Network) -> int:
    """Largest neighbourhood size; 0 when there are no edges."""
    return max((len(n) for n in network.neighbors), default=0)


@dataclass(frozen=True)
class Path:
    links: tuple[Link, ...]

    @classmethod
    def from_nodes(cls, nodes: Sequence[int]) -> "Path":
        return cls(tuple((nodes[k], nodes[k + 1]) for k in range(len(nodes) - 1)))

    @property
    def length(self) -> int:
        return len(self.links)

    def nodes(self) -> list[int]:
        if not self.links:
            return []
        return [self.links[0][0]] + [j for _, j in self.links]

    def __len__(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class PathVerdict:
    valid: bool
    index: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


def validate_path(network: Network, path: Path) -> PathVerdict:
    """Check chaining, adjacency, no repeated link and 1 <= length <= d.

    On failure ``index`` is the first offending link position (for the length
    check it is the first link past the cap, or 0 for an empty path).
    """
    if path.length == 0:
        return PathVerdict(False, 0, "empty path")
    seen: set[Link] = set()
    for k, (i, j) in enumerate(path.links):
        if k > 0 and path.links[k - 1][1] != i:
            return PathVerdict(False, k, "broken chain")
        if not network.has_link(i, j):
            return PathVerdict(False, k, f"{i}->{j} is not a link")
        if (i, j) in seen:
            return PathVerdict(False, k, f"link {i}->{j} repeated")
        seen.add((i, j))
        if k >= network.max_path_hops:
            return PathVerdict(False, k, f"path longer than d={network.max_path_hops}")
    return PathVerdict(True)


@dataclass
class HopRecord:
    arrival: int
    departure: Optional[int] = None


@dataclass
class Packet:
    id: int
    path: Path
    size: Fraction
    injected_at: int
    hops: list[HopRecord] = field(default_factory=list)

    @property
    def delivered(self) -> bool:
        return len(self.hops) == self.path.length and self.hops[-1].departure is not None

    @property
    def latency(self) -> Optional[int]:
        if not self.delivered:
            return None
        return self.hops[-1].departure - self.hops[0].arrival


def write_network(network: Network) -> str:
    lines = [f"nodes {network.num_nodes}", f"maxhops {network.max_path_hops}"]
    if network.arcs is None:
        lines += [f"edge {i} {j}" for i, j in network.edges]
    else:
        oriented = set()
        for i, j in sorted(network.arcs):
            lines.append(f"arc {i} {j}")
            oriented.add((min(i, j), max(i, j)))
        lines += [f"edge {i} {j}" for i, j in network.edges if (i, j) not in oriented]
    return "\n".join(lines) + "\n"


def read_network(text: str) -> Network:
    """Parse ``nodes <n>`` / ``edge <i> <j>`` text.

    Also accepts ``maxhops <d>`` and ``arc <i> <j>`` (oriented link) lines;
    ``#`` starts a comment.
    """
    n = None
    d = 1
    edges: list[Link] = []
    arcs: list[Link] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "nodes" and len(parts) == 2:
                n = int(parts[1])
            elif parts[0] == "maxhops" and len(parts) == 2:
                d = int(parts[1])
            elif parts[0] in ("edge", "arc") and len(parts) == 3:
                i, j = int(parts[1]), int(parts[2])
                if n is None:
                    raise ParseError(lineno, "edge before 'nodes' header")
                if not (0 <= i < n and 0 <= j < n) or i == j:
                    raise ParseError(lineno, f"bad endpoints {i} {j}")
                (edges if parts[0] == "edge" else arcs).append((i, j))
            else:
                raise ParseError(lineno, f"unrecognised line {line!r}")
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(lineno, str(exc)) from None
    if n is None:
        raise ParseError(1, "missing 'nodes <n>' header")
    return Network.from_edges(n, edges, d, arcs if arcs else None)
