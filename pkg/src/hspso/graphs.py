"""Undirected communication topologies for swarm information exchange.

Three generators are provided: a regular ring lattice, a preferential-attachment
(scale-free) growth model and a rewired ring (small-world) model. All graphs are
simple (no self-loops, no parallel edges) and stored as per-node sorted adjacency
tuples, so the neighbor order consumed by the optimizer is well defined.

Randomized generators are deterministic given a seed: the same
(generator, parameters, seed) triple always yields the same adjacency lists.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Graph",
    "ring",
    "scale_free",
    "small_world",
    "neighbors",
    "validate_graph",
    "is_connected",
    "to_edge_list",
    "from_edge_list",
]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph over nodes 0..n-1 with sorted adjacency lists."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (i, j) pairs with i < j, in ascending order."""
        return [(i, j) for i in range(self.n) for j in self.adjacency[i] if i < j]


def _as_generator(seed: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _freeze(n: int, adj: list[set[int]]) -> Graph:
    g = Graph(n=n, adjacency=tuple(tuple(sorted(a)) for a in adj))
    validate_graph(g)
    return g


def validate_graph(g: Graph) -> None:
    """Raise ValueError unless g is a simple, symmetric, in-range graph."""
    if g.n < 1 or len(g.adjacency) != g.n:
        raise ValueError(f"adjacency length {len(g.adjacency)} != n={g.n}")
    for i, row in enumerate(g.adjacency):
        if list(row) != sorted(set(row)):
            raise ValueError(f"adjacency[{i}] is not sorted and duplicate-free")
        for j in row:
            if not 0 <= j < g.n:
                raise ValueError(f"neighbor {j} of node {i} out of range [0, {g.n})")
            if j == i:
                raise ValueError(f"self-loop at node {i}")
            if i not in g.adjacency[j]:
                raise ValueError(f"asymmetric edge ({i}, {j})")


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(w)
    return count == g.n


def _check_ring_params(n: int, k: int) -> None:
    if n < 3:
        raise ValueError(f"need at least 3 nodes, got n={n}")
    if k % 2 != 0:
        raise ValueError(f"degree k must be even, got k={k}")
    if not 2 <= k <= n - 1:
        raise ValueError(f"degree k must satisfy 2 <= k <= n-1, got k={k}, n={n}")


def ring(n: int, k: int) -> Graph:
    """Regular ring lattice: node i is adjacent to i +/- 1 .. i +/- k/2 (mod n).

    Every node has degree exactly k; with k = n-1 the lattice is the complete
    graph. Deterministic, no randomness involved.
    """
    _check_ring_params(n, k)
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for off in range(1, k // 2 + 1):
            j = (i + off) % n
            adj[i].add(j)
            adj[j].add(i)
    return _freeze(n, adj)


def scale_free(n: int, m: int, seed: int | np.random.Generator | None = None) -> Graph:
    """Preferential-attachment growth graph.

    Starts from a complete graph on m+1 nodes (guarantees connectivity and
    well-defined attachment probabilities), then adds one node at a time, each
    attaching m edges to distinct existing nodes chosen with probability
    proportional to current degree. The result is connected with min degree >= m
    and mean degree approaching 2m.

    Parameters
    ----------
    n : total node count
    m : edges attached by each new node, 1 <= m < n
    seed : int seed or numpy Generator for the attachment draws
    """
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = _as_generator(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    # Attachment pool: node index repeated once per incident edge, so a uniform
    # draw from the pool is a degree-proportional draw over nodes.
    pool: list[int] = []
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            adj[i].add(j)
            adj[j].add(i)
            pool.extend((i, j))
    for t in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(pool[int(rng.integers(len(pool)))])
        for u in sorted(targets):
            adj[t].add(u)
            adj[u].add(t)
            pool.extend((t, u))
    return _freeze(n, adj)


def small_world(
    n: int, k: int, beta: float, seed: int | np.random.Generator | None = None
) -> Graph:
    """Rewired ring lattice (small-world model).

    Starts from ring(n, k); every edge of the original clockwise half-lattice is
    rewired with probability beta by replacing its far endpoint with a uniformly
    random node. Candidate endpoints that would create a self-loop or duplicate
    edge are redrawn; after n consecutive rejections the original edge is kept,
    so the edge count is always exactly n*k/2.
    """
    _check_ring_params(n, k)
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"rewire probability must be in [0, 1], got {beta}")
    rng = _as_generator(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for off in range(1, k // 2 + 1):
            j = (i + off) % n
            adj[i].add(j)
            adj[j].add(i)
    for off in range(1, k // 2 + 1):
        for i in range(n):
            if rng.random() >= beta:
                continue
            old = (i + off) % n
            for _ in range(n):
                t = int(rng.integers(n))
                if t == i or t in adj[i]:
                    continue
                adj[i].discard(old)
                adj[old].discard(i)
                adj[i].add(t)
                adj[t].add(i)
                break
    return _freeze(n, adj)


def neighbors(g: Graph, i: int) -> list[int]:
    """Neighbors of node i in ascending index order.

    The ascending order is a contract: the fully-informed velocity update draws
    one random factor per neighbor in exactly this order.
    """
    if not 0 <= i < g.n:
        raise ValueError(f"node index {i} out of range [0, {g.n})")
    return list(g.adjacency[i])


def to_edge_list(g: Graph) -> str:
    """Serialize as text: header 'n=<count>', then one 'i j' line per edge, i < j, ascending."""
    lines = [f"n={g.n}"]
    lines.extend(f"{i} {j}" for i, j in g.edges())
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> Graph:
    """Parse the edge-list format produced by to_edge_list."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("edge list must start with a 'n=<count>' header line")
    try:
        n = int(lines[0][2:])
    except ValueError as exc:
        raise ValueError(f"bad node count in header {lines[0]!r}") from exc
    if n < 1:
        raise ValueError(f"node count must be positive, got {n}")
    adj: list[set[int]] = [set() for _ in range(n)]
    prev: tuple[int, int] | None = None
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        i, j = int(parts[0]), int(parts[1])
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
        if i >= j:
            raise ValueError(f"edge lines must have i < j, got {ln!r}")
        if prev is not None and (i, j) <= prev:
            raise ValueError(f"edge lines must be in ascending order, got {ln!r}")
        if j in adj[i]:
            raise ValueError(f"duplicate edge ({i}, {j})")
        prev = (i, j)
        adj[i].add(j)
        adj[j].add(i)
    return _freeze(n, adj)
