"""Competing restoration heuristics: block translation (BT) and cascaded relocation (CR)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .augment import _rooted
from .graph import (
    GraphError,
    RobotConfig,
    block_cut_tree,
    comm_graph,
    is_biconnected,
    is_connected,
)
from .relocate import (
    MAX_REPAIR_PASSES,
    MoveSolution,
    RelocationError,
    _adjacency,
    _realize_pair,
    _solution,
    _violated,
    cascaded_relocation,
)

BT_STEPS_PER_H = 20
BT_REFINE_STEPS = 10


class BaselineFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class RemovedVertexInfo:
    """Where a failed robot was and which robots it used to reach."""

    position: tuple[float, float]
    neighbor_indices: tuple[int, ...]


def _merged(pos: np.ndarray, h: float, leaf: frozenset[int], parent: frozenset[int]) -> bool:
    g = comm_graph(RobotConfig(pos, h))
    if not is_connected(g):
        return False
    t = block_cut_tree(g)
    return any(leaf | parent <= b for b in t.blocks)


def _translate_leaf(
    pos: np.ndarray, h: float, movers: list[int], direction: np.ndarray, reach: float,
    leaf: frozenset[int], parent: frozenset[int],
) -> np.ndarray | None:
    """Slide ``movers`` along ``direction`` until leaf and parent blocks merge."""
    step = h / BT_STEPS_PER_H
    n_steps = max(1, math.ceil(reach / step))

    def at(t: float) -> np.ndarray:
        out = pos.copy()
        out[movers] += t * direction
        return out

    prev = 0.0
    for k in range(1, n_steps + 1):
        t = k * step
        if _merged(at(t), h, leaf, parent):
            lo, hi = prev, t
            for _ in range(BT_REFINE_STEPS):
                mid = 0.5 * (lo + hi)
                if _merged(at(mid), h, leaf, parent):
                    hi = mid
                else:
                    lo = mid
            return at(hi)
        prev = t
    return None


def bt(config: RobotConfig) -> MoveSolution:
    """Block translation.

    Each round roots the block-cut tree at the largest block and slides the
    non-cut members of every leaf block rigidly toward the leaf's parent cut
    vertex until the leaf merges with the block above that cut vertex.
    """
    h = config.h
    pos = np.array(config.positions, dtype=float)
    rounds = 0
    while True:
        g = comm_graph(RobotConfig(pos, h))
        if not is_connected(g):
            raise BaselineFailure("block translation disconnected the network")
        if is_biconnected(g):
            break
        if rounds == config.n:
            raise BaselineFailure(f"block translation exceeded {config.n} rounds")
        rounds += 1
        t = block_cut_tree(g)
        root = max(range(len(t.blocks)), key=lambda b: (len(t.blocks[b]), -b))
        tree = _rooted(t, root)
        leaves = [b for b in range(len(t.blocks)) if b != root and len(t.adj[b]) == 1]
        for b in leaves:
            cut_node = tree.parent[b]
            cut = t.cuts[cut_node - len(t.blocks)]
            leaf = t.blocks[b]
            parent = t.blocks[tree.parent[cut_node]]
            if _merged(pos, h, leaf, parent):
                continue
            movers = sorted(leaf - {cut})
            centre = pos[movers].mean(axis=0)
            offset = pos[cut] - centre
            gap = float(np.hypot(*offset))
            if gap == 0.0:
                raise BaselineFailure("leaf block centred on its cut vertex")
            moved = _translate_leaf(
                pos, h, movers, offset / gap, gap + 2 * h, leaf, parent
            )
            if moved is None:
                raise BaselineFailure(f"leaf block {sorted(leaf)} never merged")
            pos = moved
    return _solution(config, pos, iterations=rounds)


def _earliest_cover(
    start: np.ndarray, goal: np.ndarray, targets: np.ndarray, h: float
) -> np.ndarray:
    """First point on segment ``start -> goal`` within ``h`` of every target.

    Falls back to ``goal`` when the per-target intervals do not intersect.
    """
    seg = goal - start
    length = float(np.hypot(*seg))
    if length == 0.0:
        return goal.copy()
    u = seg / length
    lo, hi = 0.0, length
    for p in targets:
        # |start + s u - p| <= h  <=>  s^2 + 2 b s + c <= 0
        rel = start - p
        b = float(rel @ u)
        c = float(rel @ rel) - h * h
        disc = b * b - c
        if disc < 0:
            return goal.copy()
        root = math.sqrt(disc)
        lo, hi = max(lo, -b - root), min(hi, -b + root)
    if lo > hi:
        return goal.copy()
    return start + lo * u


def cr(config: RobotConfig, removed: RemovedVertexInfo) -> MoveSolution:
    """Cascaded relocation of the removed robot's nearest former neighbour."""
    h = config.h
    hole = np.asarray(removed.position, dtype=float)
    nbrs = list(removed.neighbor_indices)
    if not nbrs:
        raise ValueError("removed vertex has no recorded neighbours")
    pos = np.array(config.positions, dtype=float)
    best = min(nbrs, key=lambda k: (math.dist(pos[k], hole), k))
    others = [k for k in nbrs if k != best]
    g = comm_graph(config)
    target = _earliest_cover(pos[best], hole, pos[others], h)
    adj = _adjacency(config.n, g.edges)
    pos = cascaded_relocation(pos, adj, best, target, h)

    constraints = set(g.edges)
    constraints.update(
        (min(best, k), max(best, k)) for k in others if math.dist(pos[best], pos[k]) <= h
    )
    for i, j in constraints:
        if j not in adj[i]:
            adj[i].append(j)
            adj[j].append(i)
    passes = 0
    broken = _violated(pos, constraints, h)
    while broken:
        if passes == MAX_REPAIR_PASSES:
            raise RelocationError("cascaded relocation repair did not converge", broken)
        passes += 1
        for i, j in broken:
            pos = _realize_pair(pos, adj, i, j, h)
        broken = _violated(pos, constraints, h)
    try:
        ok = is_biconnected(comm_graph(RobotConfig(pos, h)))
    except GraphError:
        ok = False
    if not ok:
        raise BaselineFailure("cascaded relocation did not restore biconnectivity")
    return _solution(config, pos, iterations=1, repair_passes=passes)


def removed_info(position: Sequence[float], neighbors: Sequence[int]) -> RemovedVertexInfo:
    return RemovedVertexInfo((float(position[0]), float(position[1])), tuple(int(k) for k in neighbors))
