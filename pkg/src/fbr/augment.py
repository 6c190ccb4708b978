"""Graph topology optimization: bottleneck biconnectivity augmentation.

The edge-augmentation (EA) pipeline works on the block-cut tree of the
communication graph. Non-edges are mapped onto tree nodes, the tree is
directed toward a leaf root, every mapped edge contributes its *image arcs*,
and a minimum bottleneck spanning arborescence picks the edges to add.
"""

from __future__ import annotations

import bisect
import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .graph import (
    GEO_TOL,
    BlockCutTree,
    GraphError,
    RobotConfig,
    block_cut_tree,
    comm_graph,
    distance_matrix,
    is_biconnected,
    is_connected,
)


@dataclass(frozen=True, order=True)
class CandidateEdge:
    """A non-edge ``(i, j)``, ``i < j``, weighted by its repair slack."""

    i: int
    j: int
    cost: float

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.i, self.j)


@dataclass(frozen=True)
class SuperimposedEdge:
    u: int
    v: int
    cost: float
    origin: CandidateEdge


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    cost: float
    origin: Optional[CandidateEdge] = None


@dataclass(frozen=True)
class DirectedRepairGraph:
    nodes: int
    arcs: tuple[Arc, ...]

    def reversed(self) -> DirectedRepairGraph:
        return DirectedRepairGraph(
            self.nodes, tuple(Arc(a.head, a.tail, a.cost, a.origin) for a in self.arcs)
        )


@dataclass(frozen=True)
class RootedTree:
    """A tree with every edge directed child -> parent toward ``root``."""

    root: int
    parent: tuple[int, ...]
    depth: tuple[int, ...]

    def arcs(self) -> list[Arc]:
        return [Arc(v, p, 0.0) for v, p in enumerate(self.parent) if p != -1]

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when ``a`` lies on the path from ``b`` to the root (``a != b``)."""
        if self.depth[a] >= self.depth[b]:
            return False
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
        return a == b

    def step_toward(self, a: int, b: int) -> int:
        """Neighbour of ``a`` on the tree path from ``a`` to ``b`` (``a != b``)."""
        if self.is_ancestor(a, b):
            while self.parent[b] != a:
                b = self.parent[b]
            return b
        return self.parent[a]

    def lca(self, a: int, b: int) -> int:
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return a


@dataclass(frozen=True)
class Arborescence:
    root: int
    parent_arc: dict[int, Arc]

    @property
    def bottleneck(self) -> float:
        return max((a.cost for a in self.parent_arc.values()), default=0.0)


@dataclass(frozen=True)
class AugmentationSet:
    edges: frozenset[CandidateEdge]

    @property
    def bottleneck(self) -> float:
        return max((e.cost for e in self.edges), default=0.0)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(e.endpoints for e in self.edges)

    def __len__(self) -> int:
        return len(self.edges)


def _candidate_arrays(config: RobotConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    dist = distance_matrix(config.positions)
    ii, jj = np.triu_indices(config.n, k=1)
    d = dist[ii, jj]
    keep = d > config.h + GEO_TOL
    return ii[keep], jj[keep], d[keep] - config.h


def candidate_edges(config: RobotConfig) -> list[CandidateEdge]:
    """All non-edges of the communication graph, sorted by endpoint pair."""
    ii, jj, w = _candidate_arrays(config)
    return [CandidateEdge(i, j, c) for i, j, c in zip(ii.tolist(), jj.tolist(), w.tolist())]


def superimpose(t: BlockCutTree, candidates: Iterable[CandidateEdge]) -> list[SuperimposedEdge]:
    """Map candidates onto block nodes, drop self-loops, keep the cheapest per node pair.

    Ties go to the candidate with the lowest endpoint pair.
    """
    cands = list(candidates)
    ii = np.array([c.i for c in cands], dtype=np.int64)
    jj = np.array([c.j for c in cands], dtype=np.int64)
    w = np.array([c.cost for c in cands], dtype=float)
    return _superimpose_arrays(t, ii, jj, w)


def _superimpose_arrays(
    t: BlockCutTree, ii: np.ndarray, jj: np.ndarray, w: np.ndarray
) -> list[SuperimposedEdge]:
    node = np.asarray(t.vertex_node, dtype=np.int64)
    u, v = node[ii], node[jj]
    nb = len(t.blocks)
    touches_cut = np.flatnonzero((u >= nb) | (v >= nb))
    if touches_cut.size:
        # a cut-vertex endpoint stands for the block next to it on the tree
        # path toward the other endpoint: the edge bypasses every cut vertex
        # strictly inside that path but never the cut vertex it touches
        anchor = _rooted(t, 0)
        memo: dict[tuple[int, int], int] = {}

        def step(a: int, b: int) -> int:
            if (a, b) not in memo:
                memo[(a, b)] = anchor.step_toward(a, b)
            return memo[(a, b)]

        u, v = u.copy(), v.copy()
        for k in touches_cut.tolist():
            a, b = int(u[k]), int(v[k])
            if a >= nb:
                u[k] = step(a, b)
            if b >= nb:
                v[k] = step(b, a)
    keep = u != v
    ii, jj, w, u, v = ii[keep], jj[keep], w[keep], u[keep], v[keep]
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    order = np.lexsort((jj, ii, w, hi, lo))
    lo, hi = lo[order], hi[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
    out = []
    for k in np.flatnonzero(first).tolist():
        src = order[k]
        cand = CandidateEdge(int(ii[src]), int(jj[src]), float(w[src]))
        out.append(SuperimposedEdge(int(lo[k]), int(hi[k]), cand.cost, cand))
    return out


def _rooted(t: BlockCutTree, root: int) -> RootedTree:
    parent = [-1] * t.num_nodes
    depth = [0] * t.num_nodes
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in t.adj[u]:
            if v not in seen:
                seen.add(v)
                parent[v] = u
                depth[v] = depth[u] + 1
                queue.append(v)
    return RootedTree(root, tuple(parent), tuple(depth))


def root_and_direct(t: BlockCutTree) -> RootedTree:
    """Root the tree at its smallest-id leaf; arcs point child -> parent."""
    if t.num_nodes < 2:
        raise GraphError("already biconnected: block-cut tree has a single node")
    return _rooted(t, min(t.leaves()))


def image_edges(e: SuperimposedEdge, t: RootedTree) -> list[Arc]:
    u, v, c = e.u, e.v, e.cost
    if t.is_ancestor(u, v):
        return [Arc(u, v, c, e.origin)]
    if t.is_ancestor(v, u):
        return [Arc(v, u, c, e.origin)]
    top = t.lca(u, v)
    return [
        Arc(top, u, c, e.origin),
        Arc(top, v, c, e.origin),
        Arc(u, v, c, e.origin),
        Arc(v, u, c, e.origin),
    ]


def _reaches_root(gd: DirectedRepairGraph, root: int, limit: float) -> bool:
    incoming: list[list[int]] = [[] for _ in range(gd.nodes)]
    for a in gd.arcs:
        if a.cost <= limit:
            incoming[a.head].append(a.tail)
    seen = [False] * gd.nodes
    seen[root] = True
    stack = [root]
    count = 1
    while stack:
        u = stack.pop()
        for w in incoming[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == gd.nodes


def mbsa(gd: DirectedRepairGraph, root: int) -> Arborescence:
    """Minimum bottleneck spanning in-arborescence toward ``root``.

    Binary-searches the smallest arc-cost threshold under which every node
    still reaches the root, then grows parent arcs outward from the root,
    preferring cheaper arcs and then lower arc ids.
    """
    costs = sorted({a.cost for a in gd.arcs} | {0.0})
    if not _reaches_root(gd, root, costs[-1]):
        raise GraphError("some node cannot reach the root")
    lo, hi = 0, len(costs) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _reaches_root(gd, root, costs[mid]):
            hi = mid
        else:
            lo = mid + 1
    limit = costs[lo]

    incoming: list[list[int]] = [[] for _ in range(gd.nodes)]
    for k, a in enumerate(gd.arcs):
        if a.cost <= limit:
            incoming[a.head].append(k)
    parent_arc: dict[int, Arc] = {}
    done = [False] * gd.nodes
    done[root] = True
    heap = [(gd.arcs[k].cost, k) for k in incoming[root]]
    heapq.heapify(heap)
    while heap:
        _, k = heapq.heappop(heap)
        tail = gd.arcs[k].tail
        if done[tail]:
            continue
        done[tail] = True
        parent_arc[tail] = gd.arcs[k]
        for k2 in incoming[tail]:
            if not done[gd.arcs[k2].tail]:
                heapq.heappush(heap, (gd.arcs[k2].cost, k2))
    return Arborescence(root, parent_arc)


def build_directed_graph(
    tree: RootedTree, superimposed: Sequence[SuperimposedEdge]
) -> DirectedRepairGraph:
    arcs = tree.arcs()
    for e in superimposed:
        arcs.extend(image_edges(e, tree))
    return DirectedRepairGraph(len(tree.parent), tuple(arcs))


def edge_augmentation(config: RobotConfig) -> AugmentationSet:
    """EA: a set of non-edges whose addition biconnects the communication graph."""
    g = comm_graph(config)
    if not is_connected(g):
        raise GraphError("communication graph is disconnected")
    if is_biconnected(g):
        return AugmentationSet(frozenset())
    t = block_cut_tree(g)
    sup = _superimpose_arrays(t, *_candidate_arrays(config))
    tree = root_and_direct(t)
    gd = build_directed_graph(tree, sup)
    # tree arcs point at the root, so the spanning structure that needs the
    # image arcs is an out-arborescence from the root, i.e. an in-arborescence
    # of the reversed graph
    arb = mbsa(gd.reversed(), tree.root)
    chosen = {a.origin for a in arb.parent_arc.values() if a.origin is not None}
    return AugmentationSet(frozenset(chosen))


def gto_bottleneck_oracle(config: RobotConfig) -> tuple[float, AugmentationSet]:
    """Exact optimal bottleneck for the augmentation problem by threshold search.

    Returns ``(c_star, witness)`` where the witness holds every non-edge of
    cost ``<= c_star``.
    """
    g = comm_graph(config)
    if not is_connected(g):
        raise GraphError("communication graph is disconnected")
    cands = sorted(candidate_edges(config), key=lambda e: (e.cost, e.endpoints))
    if is_biconnected(g):
        return 0.0, AugmentationSet(frozenset())
    costs = [e.cost for e in cands]
    thresholds = sorted(set(costs))

    def admits(c: float) -> list[CandidateEdge] | None:
        chosen = cands[: bisect.bisect_right(costs, c)]
        aug = g.union(e.endpoints for e in chosen)
        return chosen if is_biconnected(aug) else None

    lo, hi = 0, len(thresholds) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if admits(thresholds[mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    c_star = thresholds[lo]
    return c_star, AugmentationSet(frozenset(admits(c_star)))
