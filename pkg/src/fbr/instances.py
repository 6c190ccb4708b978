"""Seeded generation of barely connected instances and their JSON file format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .baselines import RemovedVertexInfo
from .graph import GEO_TOL, RobotConfig, comm_graph, is_biconnected, is_connected

MAX_REJECTIONS = 10_000


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Instance:
    n: int
    h: float
    positions: np.ndarray
    removed: Optional[RemovedVertexInfo]
    seed: int

    @property
    def config(self) -> RobotConfig:
        return RobotConfig(self.positions, self.h)

    def to_dict(self) -> dict:
        data = {
            "n": self.n,
            "h": self.h,
            "positions": self.positions.tolist(),
            "removed": None,
            "seed": self.seed,
        }
        if self.removed is not None:
            data["removed"] = {
                "position": list(self.removed.position),
                "neighbors": list(self.removed.neighbor_indices),
            }
        return data

    @classmethod
    def from_dict(cls, data: dict) -> Instance:
        positions = np.asarray(data["positions"], dtype=float)
        if positions.ndim != 2 or positions.shape[1] != 2:
            raise ValueError("positions must be a list of [x, y] pairs")
        if int(data["n"]) != len(positions):
            raise ValueError(f"n={data['n']} but {len(positions)} positions given")
        removed = None
        if data.get("removed"):
            rem = data["removed"]
            removed = RemovedVertexInfo(
                (float(rem["position"][0]), float(rem["position"][1])),
                tuple(int(k) for k in rem["neighbors"]),
            )
        inst = cls(len(positions), float(data["h"]), positions, removed, int(data.get("seed", 0)))
        inst.config  # validates n >= 3, finite coordinates, h > 0
        return inst


def default_side(n: int, h: float) -> float:
    return 0.5 * h * math.sqrt(n + 1)


def gen_instance(n: int, h: float = 1.0, seed: int = 0, side: Optional[float] = None) -> Instance:
    """Remove one robot from a random biconnected cloud of ``n + 1`` robots.

    Clouds are drawn uniformly in a square of side ``side`` (default
    ``0.5 * h * sqrt(n + 1)``). The result is connected but not biconnected.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    if h <= 0:
        raise ValueError("h must be positive")
    side = default_side(n, h) if side is None else side
    rng = np.random.default_rng(seed)
    for _ in range(MAX_REJECTIONS):
        cloud = rng.uniform(0.0, side, size=(n + 1, 2))
        if not is_biconnected(comm_graph(RobotConfig(cloud, h))):
            continue
        for _ in range(n):
            k = int(rng.integers(n + 1))
            rest = np.delete(cloud, k, axis=0)
            g = comm_graph(RobotConfig(rest, h))
            if is_connected(g) and not is_biconnected(g):
                dist = np.hypot(*(rest - cloud[k]).T)
                nbrs = tuple(int(i) for i in np.flatnonzero(dist <= h + GEO_TOL))
                removed = RemovedVertexInfo((float(cloud[k, 0]), float(cloud[k, 1])), nbrs)
                return Instance(n, float(h), rest, removed, seed)
    raise GenerationError(
        f"no barely connected instance after {MAX_REJECTIONS} clouds; "
        "try a different sampling side length"
    )


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict(), indent=2) + "\n")


def load_instance(path: str | Path) -> Instance:
    return Instance.from_dict(json.loads(Path(path).read_text()))
