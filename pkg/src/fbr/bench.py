"""Algorithm registry, seeded benchmark runs and CSV output."""

from __future__ import annotations

import csv
import io
import logging
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .augment import edge_augmentation
from .baselines import bt, cr
from .graph import comm_graph
from .instances import Instance, gen_instance
from .relocate import MoveSolution, RelocationError, mm_opt, scr
from .verify import ORACLE_MAX_N, opt_oracle_small_n, verify_solution

log = logging.getLogger(__name__)

CSV_HEADER = ("algorithm", "n", "seed", "minmax", "runtime_s", "succeeded", "repair_passes")


def solve_ea_scr(inst: Instance) -> MoveSolution:
    cfg = inst.config
    return scr(cfg, edge_augmentation(cfg))


def solve_ea_opt(inst: Instance) -> MoveSolution:
    cfg = inst.config
    ea = edge_augmentation(cfg)
    constraints = comm_graph(cfg).union(ea.pairs()).edges
    try:
        upper = scr(cfg, ea)
    except RelocationError:
        upper = None
    sol = mm_opt(cfg, constraints, upper=upper)
    sol.augmentation = ea
    return sol


def solve_bt(inst: Instance) -> MoveSolution:
    return bt(inst.config)


def solve_cr(inst: Instance) -> MoveSolution:
    if inst.removed is None:
        raise ValueError("cascaded relocation needs the removed robot's position and neighbours")
    return cr(inst.config, inst.removed)


def solve_opt(inst: Instance) -> MoveSolution:
    return opt_oracle_small_n(inst.config)


ALGORITHMS: dict[str, Callable[[Instance], MoveSolution]] = {
    "ea-scr": solve_ea_scr,
    "ea-opt": solve_ea_opt,
    "bt": solve_bt,
    "cr": solve_cr,
    "opt": solve_opt,
}


def solve(algorithm: str, inst: Instance) -> MoveSolution:
    try:
        fn = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}") from None
    return fn(inst)


@dataclass(frozen=True)
class BenchRecord:
    algorithm: str
    n: int
    seed: int
    minmax: Optional[float]
    runtime_s: float
    succeeded: bool
    repair_passes: int = 0

    def row(self) -> list[str]:
        return [
            self.algorithm,
            str(self.n),
            str(self.seed),
            "" if self.minmax is None else repr(self.minmax),
            f"{self.runtime_s:.6f}",
            "true" if self.succeeded else "false",
            str(self.repair_passes),
        ]


def run_one(algorithm: str, inst: Instance) -> BenchRecord:
    """Solve, time and independently verify one instance."""
    start = time.perf_counter()
    try:
        sol = solve(algorithm, inst)
    except Exception as exc:  # failures are data points, not crashes
        runtime = time.perf_counter() - start
        log.info("%s failed on n=%d seed=%d: %s", algorithm, inst.n, inst.seed, exc)
        return BenchRecord(algorithm, inst.n, inst.seed, None, runtime, False)
    runtime = time.perf_counter() - start
    constraints = None
    if sol.augmentation is not None:
        constraints = comm_graph(inst.config).union(sol.augmentation.pairs()).edges
    report = verify_solution(inst.config, sol, constraints)
    if not report.ok:
        return BenchRecord(algorithm, inst.n, inst.seed, None, runtime, False, sol.repair_passes)
    return BenchRecord(algorithm, inst.n, inst.seed, report.minmax, runtime, True, sol.repair_passes)


def run_benchmark(
    algorithms: Sequence[str],
    n_values: Iterable[int],
    trials: int,
    seed0: int = 0,
    h: float = 1.0,
    side: Optional[float] = None,
) -> list[BenchRecord]:
    """Run every algorithm on the same seeded instances; rows sorted by (n, seed, algorithm)."""
    algorithms = sorted(set(algorithms))
    n_values = sorted(set(n_values))
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    if "opt" in algorithms and any(n > ORACLE_MAX_N for n in n_values):
        raise ValueError(f"'opt' is limited to n <= {ORACLE_MAX_N}")
    records = []
    for n in n_values:
        for trial in range(trials):
            inst = gen_instance(n, h, seed0 + trial, side)
            for a in algorithms:
                records.append(run_one(a, inst))
    records.sort(key=lambda r: (r.n, r.seed, r.algorithm))
    return records


def records_to_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()


def summarize(records: Iterable[BenchRecord]) -> dict[tuple[str, int], dict[str, float]]:
    """Mean minmax, median runtime and success rate per (algorithm, n)."""
    groups: dict[tuple[str, int], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.algorithm, r.n), []).append(r)
    out = {}
    for key, rows in sorted(groups.items()):
        ok = [r.minmax for r in rows if r.succeeded and r.minmax is not None]
        out[key] = {
            "mean_minmax": statistics.fmean(ok) if ok else float("nan"),
            "median_runtime_s": statistics.median(r.runtime_s for r in rows),
            "success_rate": len(ok) / len(rows),
        }
    return out
