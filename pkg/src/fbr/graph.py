"""Robot configurations, communication/repair graphs and block-cut trees.

Robots are indexed ``0..n-1``; an index is the robot's identity everywhere
in the package.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

# Absolute slack on the radius test so that solver outputs landing exactly
# on the radius still count as connected.
GEO_TOL = 1e-9

Edge = tuple[int, int]


class GraphError(ValueError):
    """Raised when a graph does not meet an operation's precondition."""


def _key(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class RobotConfig:
    """An FBR instance: ``n`` planar robot positions and a radius ``h``."""

    positions: np.ndarray
    h: float

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must have shape (n, 2), got {pos.shape}")
        if pos.shape[0] < 3:
            raise ValueError("at least 3 robots are required")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"radius must be positive, got {self.h}")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "h", float(self.h))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def moved(self, positions: np.ndarray) -> RobotConfig:
        return RobotConfig(positions, self.h)

    def diameter(self) -> float:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return float(np.sqrt((diff**2).sum(-1)).max())


@dataclass(frozen=True)
class CommGraph:
    """Undirected simple graph on vertices ``0..n-1``."""

    n: int
    edges: frozenset[Edge]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> CommGraph:
        keyed = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            keyed.add(_key(int(i), int(j)))
        return cls(n, frozenset(keyed))

    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(tuple(sorted(a)) for a in nbrs)

    def has_edge(self, i: int, j: int) -> bool:
        return _key(i, j) in self.edges

    def union(self, extra: Iterable[Sequence[int]]) -> CommGraph:
        return CommGraph.from_edges(self.n, [*self.edges, *extra])


@dataclass(frozen=True)
class RepairGraph:
    """Complete graph weighted by the slack ``max(|xi - xj| - h, 0)``."""

    n: int
    weight: dict[Edge, float]

    def __getitem__(self, pair: Edge) -> float:
        return self.weight[_key(*pair)]


def distance_matrix(positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    return np.sqrt((diff**2).sum(-1))


def edge_weight(p: Sequence[float], q: Sequence[float], h: float) -> float:
    return max(math.dist(p, q) - h, 0.0)


def comm_graph(config: RobotConfig) -> CommGraph:
    dist = distance_matrix(config.positions)
    ii, jj = np.nonzero(np.triu(dist <= config.h + GEO_TOL, k=1))
    return CommGraph(config.n, frozenset(zip(ii.tolist(), jj.tolist())))


def slack_matrix(config: RobotConfig) -> np.ndarray:
    """Dense matrix of repair weights, zero on communication-graph edges."""
    dist = distance_matrix(config.positions)
    w = np.maximum(dist - config.h, 0.0)
    w[dist <= config.h + GEO_TOL] = 0.0
    return w


def repair_graph(config: RobotConfig) -> RepairGraph:
    w = slack_matrix(config)
    ii, jj = np.triu_indices(config.n, k=1)
    weight = dict(zip(zip(ii.tolist(), jj.tolist()), w[ii, jj].tolist()))
    return RepairGraph(config.n, weight)


def is_connected(g: CommGraph) -> bool:
    if g.n == 0:
        return True
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in g.adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == g.n


def _require_connected(g: CommGraph) -> None:
    if not is_connected(g):
        raise GraphError("graph is disconnected")


def _lowpoint_dfs(g: CommGraph) -> tuple[set[int], list[frozenset[int]]]:
    """Iterative Hopcroft-Tarjan: articulation points and blocks (by edge stack)."""
    disc = [-1] * g.n
    low = [0] * g.n
    cuts: set[int] = set()
    blocks: list[frozenset[int]] = []
    clock = 0
    for start in range(g.n):
        if disc[start] != -1:
            continue
        disc[start] = low[start] = clock
        clock += 1
        root_children = 0
        edge_stack: list[Edge] = []
        # frames: (vertex, parent, next neighbour position)
        stack = [[start, -1, 0]]
        while stack:
            frame = stack[-1]
            u, parent, pos = frame
            nbrs = g.adj[u]
            if pos < len(nbrs):
                frame[2] += 1
                v = nbrs[pos]
                if disc[v] == -1:
                    disc[v] = low[v] = clock
                    clock += 1
                    edge_stack.append((u, v))
                    if u == start:
                        root_children += 1
                    stack.append([v, u, 0])
                elif v != parent and disc[v] < disc[u]:
                    edge_stack.append((u, v))
                    low[u] = min(low[u], disc[v])
                continue
            stack.pop()
            if parent == -1:
                continue
            low[parent] = min(low[parent], low[u])
            if low[u] >= disc[parent]:
                if parent != start:
                    cuts.add(parent)
                members: set[int] = set()
                while True:
                    a, b = edge_stack.pop()
                    members.update((a, b))
                    if (a, b) == (parent, u):
                        break
                blocks.append(frozenset(members))
        if root_children > 1:
            cuts.add(start)
    return cuts, blocks


def articulation_points(g: CommGraph) -> set[int]:
    """Vertices whose removal disconnects ``g`` (lowpoint DFS, O(V + E))."""
    _require_connected(g)
    return _lowpoint_dfs(g)[0]


def is_biconnected(g: CommGraph) -> bool:
    if g.n < 3:
        raise GraphError("biconnectivity needs at least 3 vertices")
    if not is_connected(g):
        return False
    return not _lowpoint_dfs(g)[0]


@dataclass(frozen=True)
class BlockCutTree:
    """Block-cut tree of a connected graph.

    Node ids: ``0..len(blocks)-1`` are blocks, ``len(blocks)+k`` is the cut
    vertex ``cuts[k]``. ``tree_edges`` holds ``(block_node, cut_node)`` pairs.
    """

    blocks: list[frozenset[int]]
    cuts: list[int]
    tree_edges: frozenset[tuple[int, int]]
    vertex_node: tuple[int, ...] = field(repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.blocks) + len(self.cuts)

    def is_block(self, node: int) -> bool:
        return node < len(self.blocks)

    def cut_node(self, vertex: int) -> int:
        return len(self.blocks) + self.cuts.index(vertex)

    def node_of(self, vertex: int) -> int:
        """Tree node representing a graph vertex (its cut node, or its only block)."""
        return self.vertex_node[vertex]

    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for b, c in self.tree_edges:
            nbrs[b].append(c)
            nbrs[c].append(b)
        return tuple(tuple(sorted(a)) for a in nbrs)

    def leaves(self) -> list[int]:
        return [v for v in range(self.num_nodes) if len(self.adj[v]) == 1]


def block_cut_tree(g: CommGraph) -> BlockCutTree:
    if g.n < 2:
        raise GraphError("block-cut tree needs at least 2 vertices")
    _require_connected(g)
    cut_set, raw_blocks = _lowpoint_dfs(g)
    blocks = sorted(raw_blocks, key=lambda b: sorted(b))
    cuts = sorted(cut_set)
    nb = len(blocks)
    cut_index = {c: nb + k for k, c in enumerate(cuts)}
    tree_edges = set()
    vertex_node = [-1] * g.n
    for b, members in enumerate(blocks):
        for v in members:
            if v in cut_index:
                tree_edges.add((b, cut_index[v]))
            else:
                vertex_node[v] = b
    for c, node in cut_index.items():
        vertex_node[c] = node
    return BlockCutTree(blocks, cuts, frozenset(tree_edges), tuple(vertex_node))
