"""Movement minimization: realize a constraint edge set with minimal max movement.

Two solvers:

* :func:`scr` - sequential cascaded relocation, a fast heuristic.
* :func:`mm_opt` - bisection on the movement budget with a cyclic-projection
  feasibility test, converging to the convex optimum.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .augment import AugmentationSet
from .graph import CommGraph, RobotConfig, comm_graph

TAU_FEAS = 1e-6
# bisection decides feasibility below GEO_TOL so that its output passes the
# radius test of the communication graph
OPT_FEAS_TOL = 1e-10
BISECTION_REL_TOL = 1e-6
MAX_SWEEPS = 10_000
MAX_REPAIR_PASSES = 50
# distances this close above h are treated as satisfied while repairing
_REPAIR_SLACK = 1e-12


class RelocationError(RuntimeError):
    """A relocation heuristic failed to restore every constraint edge."""

    def __init__(self, message: str, violated: Sequence[tuple[int, int]] = ()):
        super().__init__(message)
        self.violated = list(violated)


@dataclass
class MoveSolution:
    new_positions: np.ndarray
    minmax: float
    iterations: int = 0
    repair_passes: int = 0
    augmentation: AugmentationSet | None = field(default=None, repr=False)


def max_displacement(old: np.ndarray, new: np.ndarray) -> float:
    if len(old) == 0:
        return 0.0
    return float(np.sqrt(((np.asarray(new) - np.asarray(old)) ** 2).sum(axis=1)).max())


def _solution(config: RobotConfig, positions: np.ndarray, **kw) -> MoveSolution:
    return MoveSolution(positions, max_displacement(config.positions, positions), **kw)


def constraint_set(g: CommGraph, extra: Iterable[Sequence[int]] = ()) -> frozenset[tuple[int, int]]:
    """Pairs that must stay within range: the current edges plus ``extra``."""
    return g.union(extra).edges


def _adjacency(n: int, pairs: Iterable[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in pairs:
        adj[i].append(j)
        adj[j].append(i)
    for a in adj:
        a.sort()
    return adj


def _pull_within(point: np.ndarray, anchor: np.ndarray, h: float) -> np.ndarray:
    """Closest point to ``point`` within distance ``h`` of ``anchor``."""
    diff = point - anchor
    d = math.hypot(diff[0], diff[1])
    if d <= h:
        return point
    return anchor + diff * (h / d)


def cascaded_relocation(
    positions: np.ndarray,
    graph: CommGraph | Sequence[Sequence[int]],
    r: int,
    target: Sequence[float],
    h: float,
) -> np.ndarray:
    """Move robot ``r`` to ``target`` and drag followers along in BFS order.

    ``graph`` is the current constraint graph (a :class:`CommGraph` or an
    adjacency list). Every robot visited after ``r`` whose BFS parent has
    drifted out of range moves straight toward the parent until the distance
    is exactly ``h``. Returns a new position array.
    """
    adj = graph.adj if isinstance(graph, CommGraph) else graph
    pos = np.array(positions, dtype=float)
    pos[r] = target
    seen = [False] * len(pos)
    seen[r] = True
    queue = deque([r])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if seen[v]:
                continue
            seen[v] = True
            pos[v] = _pull_within(pos[v], pos[u], h)
            queue.append(v)
    return pos


def _toward(src: np.ndarray, dst: np.ndarray, step: float) -> np.ndarray:
    diff = dst - src
    d = math.hypot(diff[0], diff[1])
    if d == 0.0:
        return src.copy()
    return src + diff * (min(step, d) / d)


def _realize_pair(pos: np.ndarray, adj: list[list[int]], i: int, j: int, h: float) -> np.ndarray:
    """Bring ``i`` and ``j`` within range: ``i`` covers half the slack, ``j`` the rest."""
    slack = math.dist(pos[i], pos[j]) - h
    if slack > 0:
        pos = cascaded_relocation(pos, adj, i, _toward(pos[i], pos[j], slack / 2), h)
    if j not in adj[i]:
        adj[i].append(j)
        adj[j].append(i)
        adj[i].sort()
        adj[j].sort()
    slack = math.dist(pos[i], pos[j]) - h
    if slack > 0:
        pos = cascaded_relocation(pos, adj, j, _toward(pos[j], pos[i], slack), h)
    return pos


def _violated(pos: np.ndarray, pairs: Iterable[tuple[int, int]], h: float) -> list[tuple[int, int]]:
    return [(i, j) for i, j in sorted(pairs) if math.dist(pos[i], pos[j]) > h + _REPAIR_SLACK]


def scr(config: RobotConfig, ea: AugmentationSet | Iterable[Sequence[int]]) -> MoveSolution:
    """Sequential cascaded relocation realizing ``ea`` while keeping current edges.

    Augmentation edges are processed largest current slack first. A bounded
    repair loop then re-realizes any constraint edge broken by cross-edge
    effects of the cascades.
    """
    h = config.h
    g = comm_graph(config)
    pending = {tuple(sorted(p)) for p in (ea.pairs() if isinstance(ea, AugmentationSet) else ea)}
    constraints = sorted(g.edges | pending)
    adj = _adjacency(config.n, g.edges)
    pos = np.array(config.positions, dtype=float)

    while pending:
        i, j = min(pending, key=lambda p: (-math.dist(pos[p[0]], pos[p[1]]), p))
        pending.discard((i, j))
        pos = _realize_pair(pos, adj, i, j, h)

    passes = 0
    broken = _violated(pos, constraints, h)
    while broken:
        if passes == MAX_REPAIR_PASSES:
            raise RelocationError(
                f"repair did not converge in {MAX_REPAIR_PASSES} passes", broken
            )
        passes += 1
        for i, j in broken:
            pos = _realize_pair(pos, adj, i, j, h)
        broken = _violated(pos, constraints, h)

    aug = ea if isinstance(ea, AugmentationSet) else None
    return _solution(config, pos, iterations=len(constraints), repair_passes=passes, augmentation=aug)


def mm_lower_bound(config: RobotConfig, constraints: Iterable[Sequence[int]]) -> float:
    """Half the largest constraint slack; no feasible movement can do better."""
    pos, h = config.positions, config.h
    return max((max(math.dist(pos[i], pos[j]) - h, 0.0) / 2 for i, j in constraints), default=0.0)


@njit(cache=True)
def _cyclic_projection(anchor, pos, pi, pj, h, rho, max_sweeps, tol):  # pragma: no cover - jitted
    n = anchor.shape[0]
    m = pi.shape[0]
    for sweep in range(max_sweeps):
        for k in range(m):
            a = pi[k]
            b = pj[k]
            dx = pos[b, 0] - pos[a, 0]
            dy = pos[b, 1] - pos[a, 1]
            d = math.sqrt(dx * dx + dy * dy)
            if d > h:
                s = 0.5 * (d - h) / d
                pos[a, 0] += s * dx
                pos[a, 1] += s * dy
                pos[b, 0] -= s * dx
                pos[b, 1] -= s * dy
        for i in range(n):
            dx = pos[i, 0] - anchor[i, 0]
            dy = pos[i, 1] - anchor[i, 1]
            d = math.sqrt(dx * dx + dy * dy)
            if d > rho:
                s = rho / d
                pos[i, 0] = anchor[i, 0] + s * dx
                pos[i, 1] = anchor[i, 1] + s * dy
        worst = 0.0
        for k in range(m):
            a = pi[k]
            b = pj[k]
            dx = pos[b, 0] - pos[a, 0]
            dy = pos[b, 1] - pos[a, 1]
            excess = math.sqrt(dx * dx + dy * dy) - h
            if excess > worst:
                worst = excess
        if worst <= tol:
            return sweep + 1, True
    return max_sweeps, False


def _pair_arrays(constraints: Iterable[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    pairs = sorted(tuple(sorted(p)) for p in constraints)
    if not pairs:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    arr = np.asarray(pairs, dtype=np.int64)
    return arr[:, 0].copy(), arr[:, 1].copy()


def mm_feasible(
    config: RobotConfig,
    constraints: Iterable[Sequence[int]],
    rho: float,
    start: np.ndarray | None = None,
    tol: float = TAU_FEAS,
    max_sweeps: int = MAX_SWEEPS,
) -> tuple[bool, np.ndarray]:
    """Can every robot stay within ``rho`` of home while all pairs come within ``h``?

    Cyclic projections onto the pair sets and the movement balls. ``False``
    means the sweeps did not converge, which includes true infeasibility.
    """
    if rho < 0:
        raise ValueError("rho must be non-negative")
    pi, pj = _pair_arrays(constraints)
    anchor = np.ascontiguousarray(config.positions, dtype=float)
    pos = anchor.copy() if start is None else np.array(start, dtype=float)
    _, ok = _cyclic_projection(anchor, pos, pi, pj, config.h, float(rho), max_sweeps, tol)
    return bool(ok), pos


def mm_opt(
    config: RobotConfig,
    constraints: Iterable[Sequence[int]],
    upper: MoveSolution | None = None,
    tol: float = OPT_FEAS_TOL,
) -> MoveSolution:
    """Optimal movement for a fixed constraint set, by bisection on the budget.

    ``upper`` is a known feasible solution used as the initial upper bracket
    (defaults to :func:`scr` on the constraint set).
    """
    pairs = sorted({tuple(sorted(p)) for p in constraints})
    lo = mm_lower_bound(config, pairs)
    anchor = config.positions
    if lo == 0.0:
        return MoveSolution(np.array(anchor, dtype=float), 0.0)
    if upper is None:
        upper = _feasible_start(config, pairs)
    best = np.array(upper.new_positions, dtype=float)
    hi = max_displacement(anchor, best)
    width = BISECTION_REL_TOL * max(config.diameter(), 1.0)
    pi, pj = _pair_arrays(pairs)
    anchor_c = np.ascontiguousarray(anchor, dtype=float)
    steps = 0
    sweeps_total = 0
    while hi - lo > width:
        steps += 1
        mid = 0.5 * (lo + hi)
        trial = best.copy()
        sweeps, ok = _cyclic_projection(anchor_c, trial, pi, pj, config.h, mid, MAX_SWEEPS, tol)
        sweeps_total += sweeps
        if ok:
            best = trial
            hi = min(mid, max_displacement(anchor, best))
        else:
            lo = mid
    return MoveSolution(best, max_displacement(anchor, best), iterations=sweeps_total)


def _feasible_start(config: RobotConfig, pairs: list[tuple[int, int]]) -> MoveSolution:
    """Upper bracket: the better of SCR and gathering everyone at the centroid.

    SCR keeps every current edge as well, a superset of ``pairs``, so its
    output is feasible for ``pairs``.
    """
    c = config.positions.mean(axis=0)
    best = _solution(config, np.tile(c, (config.n, 1)))
    g = comm_graph(config)
    try:
        cand = scr(config, [p for p in pairs if p not in g.edges])
    except RelocationError:
        return best
    return cand if cand.minmax < best.minmax else best
