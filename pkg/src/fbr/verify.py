"""Independent checks of solver output and an exact optimum for tiny instances."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .graph import GEO_TOL, CommGraph, RobotConfig, comm_graph, is_biconnected
from .relocate import MoveSolution, mm_lower_bound, mm_opt

ORACLE_MAX_N = 6


@dataclass(frozen=True)
class FlowWitness:
    """Two ``source -> dest`` paths sharing no internal vertex."""

    source: int
    dest: int
    path_a: tuple[int, ...]
    path_b: tuple[int, ...]


@dataclass
class VerificationReport:
    biconnected: bool
    minmax: float
    violated_pairs: list[tuple[int, int]] = field(default_factory=list)
    witness_samples: list[FlowWitness] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.biconnected and not self.violated_pairs


def vertex_disjoint_two_paths(g: CommGraph, s: int, d: int) -> Optional[FlowWitness]:
    """Two internally vertex-disjoint ``s``-``d`` paths, or ``None``.

    Unit vertex capacities via vertex splitting (``v`` becomes ``2v -> 2v+1``)
    and two rounds of BFS augmentation.
    """
    if s == d:
        raise ValueError("source and destination must differ")
    cap: dict[tuple[int, int], int] = {}
    out: list[list[int]] = [[] for _ in range(2 * g.n)]

    def arc(a: int, b: int, c: int) -> None:
        if (a, b) not in cap:
            out[a].append(b)
            out[b].append(a)
            cap.setdefault((b, a), 0)
        cap[(a, b)] = cap.get((a, b), 0) + c

    for v in range(g.n):
        arc(2 * v, 2 * v + 1, 2 if v in (s, d) else 1)
    for u, v in sorted(g.edges):
        arc(2 * u + 1, 2 * v, 1)
        arc(2 * v + 1, 2 * u, 1)

    src, sink = 2 * s + 1, 2 * d
    flow = 0
    while flow < 2:
        prev = {src: src}
        queue = deque([src])
        while queue and sink not in prev:
            a = queue.popleft()
            for b in out[a]:
                if b not in prev and cap[(a, b)] > 0:
                    prev[b] = a
                    queue.append(b)
        if sink not in prev:
            return None
        b = sink
        while b != src:
            a = prev[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1

    # an original arc u_out -> v_in carries flow when its reverse gained capacity
    used = {
        (a // 2, b // 2)
        for (a, b), c in cap.items()
        if a % 2 == 1 and b % 2 == 0 and a // 2 != b // 2 and cap[(b, a)] > 0 and c == 0
    }
    paths = []
    for _ in range(2):
        path = [s]
        while path[-1] != d:
            nxt = min(b for a, b in used if a == path[-1])
            used.discard((path[-1], nxt))
            path.append(nxt)
        paths.append(tuple(path))
    return FlowWitness(s, d, paths[0], paths[1])


def _distances(positions: np.ndarray) -> np.ndarray:
    return np.linalg.norm(positions[:, None, :] - positions[None, :, :], axis=-1)


def verify_solution(
    config: RobotConfig,
    solution: MoveSolution | np.ndarray,
    constraints: Optional[Iterable[Sequence[int]]] = None,
    samples: int = 3,
) -> VerificationReport:
    """Recompute biconnectivity, max displacement and constraint violations of a placement."""
    new = np.asarray(
        solution.new_positions if isinstance(solution, MoveSolution) else solution, dtype=float
    )
    if new.shape != config.positions.shape:
        raise ValueError(
            f"solution has shape {new.shape}, instance has {config.positions.shape}"
        )
    moved = np.linalg.norm(new - config.positions, axis=1)
    dist = _distances(new)
    ii, jj = np.nonzero(np.triu(dist <= config.h + GEO_TOL, k=1))
    g = CommGraph(config.n, frozenset(zip(ii.tolist(), jj.tolist())))
    ok = is_biconnected(g)
    violated = []
    if constraints is not None:
        violated = sorted(
            (min(i, j), max(i, j))
            for i, j in constraints
            if dist[i, j] > config.h + GEO_TOL
        )
    witnesses = []
    if ok:
        for k in range(min(samples, config.n - 1)):
            w = vertex_disjoint_two_paths(g, 0, config.n - 1 - k)
            if w is not None:
                witnesses.append(w)
    return VerificationReport(ok, float(moved.max()), violated, witnesses)


@lru_cache(maxsize=None)
def minimally_biconnected_graphs(n: int) -> tuple[frozenset[tuple[int, int]], ...]:
    """Every spanning subgraph of ``K_n`` that is biconnected but loses it on any edge removal."""
    if not 3 <= n <= ORACLE_MAX_N:
        raise ValueError(f"enumeration supported for 3 <= n <= {ORACLE_MAX_N}")
    pairs = list(itertools.combinations(range(n), 2))
    found = []
    for m in range(n, 2 * n - 2):
        for subset in itertools.combinations(pairs, m):
            deg = [0] * n
            for i, j in subset:
                deg[i] += 1
                deg[j] += 1
            if min(deg) < 2:
                continue
            g = CommGraph(n, frozenset(subset))
            if not is_biconnected(g):
                continue
            if all(not is_biconnected(CommGraph(n, g.edges - {e})) for e in subset):
                found.append(g.edges)
    return tuple(found)


def opt_oracle_small_n(config: RobotConfig) -> MoveSolution:
    """Exact optimum of the full restoration problem for ``n <= 6``.

    Minimizes the optimal movement over every minimally biconnected target
    topology; topologies whose movement lower bound cannot beat the incumbent
    are skipped.
    """
    if config.n > ORACLE_MAX_N:
        raise ValueError(f"exact oracle supports n <= {ORACLE_MAX_N}, got {config.n}")
    if is_biconnected(comm_graph(config)):
        return MoveSolution(np.array(config.positions, dtype=float), 0.0)
    ranked = sorted(
        (mm_lower_bound(config, h), len(h), sorted(h), h)
        for h in minimally_biconnected_graphs(config.n)
    )
    best: MoveSolution | None = None
    examined = 0
    for bound, _, _, topology in ranked:
        if best is not None and bound >= best.minmax:
            break
        examined += 1
        sol = mm_opt(config, topology)
        if best is None or sol.minmax < best.minmax:
            best = sol
    assert best is not None
    best.iterations = examined
    return best
