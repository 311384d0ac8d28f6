"""Benchmark harness: planted-instance grids, method sweeps, JSONL records.

Grid cells run in parallel (bounded by VORPCA_THREADS); records are keyed
and sorted deterministically, so two runs of the same config agree on
everything except wall-clock fields.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import jsonfmt
from .core import LOSS_RTOL
from .data import generate_planted_instance
from .grassmann import SeededRng
from .parallel import max_workers
from .randomized import randomized_solve
from .voronoi import brute_force_solve, voronoi_solve_2d, voronoi_solve_sampled

KNOWN_METHODS = ("brute", "voronoi2d", "voronoi-sampled", "randomized")
SAMPLED_METHODS = ("voronoi-sampled", "randomized")


@dataclass(frozen=True)
class PlantedSpec:
    """One cell of the instance grid."""

    n: int
    d: int
    r: int
    k: int
    noise_sigma: float
    gap_gamma: float

    @property
    def tag(self) -> str:
        return (
            f"n{self.n}-d{self.d}-r{self.r}-k{self.k}"
            f"-s{self.noise_sigma:g}-g{self.gap_gamma:g}"
        )


@dataclass(frozen=True)
class BenchConfig:
    instances: tuple[PlantedSpec, ...]
    methods: tuple[str, ...]
    t_grid: tuple[int, ...]
    trials: int
    seed: int
    oracle_budget: int = 2_000_000

    def __post_init__(self):
        if not self.instances:
            raise ValueError("config needs at least one instance spec")
        for m in self.methods:
            if m not in KNOWN_METHODS:
                raise ValueError(f"unknown method {m!r}; expected one of {KNOWN_METHODS}")
        if "voronoi2d" in self.methods:
            bad = [s.tag for s in self.instances if s.d != 2 or s.r != 1]
            if bad:
                raise ValueError(f"voronoi2d requires d=2, r=1; incompatible specs: {bad}")
        if any(m in SAMPLED_METHODS for m in self.methods) and not self.t_grid:
            raise ValueError("sampled methods need a nonempty t_grid")
        if any(t < 1 for t in self.t_grid):
            raise ValueError(f"sample counts must be >= 1, got {self.t_grid}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    method: str
    T: int | None
    loss: float
    match_oracle: bool | None
    wall_time_s: float
    seed: int


def losses_match(a: float, b: float, rtol: float = LOSS_RTOL) -> bool:
    """Relative loss comparison used for oracle agreement."""
    return abs(a - b) <= rtol * max(abs(a), abs(b)) or a == b


def _run_cell(config: BenchConfig, spec_idx: int, spec: PlantedSpec, trial: int) -> list[BenchRecord]:
    rng = SeededRng(config.seed, stream=spec_idx * config.trials + trial)
    instance = generate_planted_instance(
        spec.n, spec.d, spec.r, spec.k, spec.noise_sigma, spec.gap_gamma, rng
    )
    instance_id = f"{spec.tag}-t{trial}"
    x = instance.data

    oracle_loss = None
    oracle_time = None
    if math.comb(spec.n, spec.k) <= config.oracle_budget:
        t0 = time.perf_counter()
        oracle_loss = brute_force_solve(x, spec.r, spec.k, budget=config.oracle_budget).loss
        oracle_time = time.perf_counter() - t0

    records = []

    def emit(method: str, t_value: int | None, loss: float, wall: float) -> None:
        match = None if oracle_loss is None else losses_match(loss, oracle_loss)
        records.append(
            BenchRecord(
                instance_id=instance_id,
                method=method,
                T=t_value,
                loss=loss,
                match_oracle=match,
                wall_time_s=wall,
                seed=rng.seed,
            )
        )

    for method in config.methods:
        if method == "brute":
            if oracle_loss is None:
                continue  # over budget: nothing to report for the oracle itself
            emit("brute", None, oracle_loss, oracle_time)
        elif method == "voronoi2d":
            t0 = time.perf_counter()
            res = voronoi_solve_2d(x, spec.k)
            emit("voronoi2d", None, res.loss, time.perf_counter() - t0)
        else:
            solver = voronoi_solve_sampled if method == "voronoi-sampled" else randomized_solve
            for t_value in config.t_grid:
                t0 = time.perf_counter()
                res = solver(x, spec.r, spec.k, t_value, rng)
                emit(method, t_value, res.loss, time.perf_counter() - t0)
    return records


def run_benchmark(config: BenchConfig) -> list[BenchRecord]:
    """Run every (instance, trial, method, T) combination of the config.

    Fully deterministic from ``config.seed`` except for wall-clock fields.
    """
    cells = [
        (idx, spec, trial)
        for idx, spec in enumerate(config.instances)
        for trial in range(config.trials)
    ]
    if not config.methods:
        return []
    workers = min(max_workers(), len(cells))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = pool.map(lambda c: _run_cell(config, *c), cells)
            records = [rec for chunk in chunks for rec in chunk]
    else:
        records = [rec for cell in cells for rec in _run_cell(config, *cell)]
    records.sort(key=lambda r: (r.instance_id, r.method, r.T if r.T is not None else -1))
    return records


def record_to_dict(record: BenchRecord) -> dict:
    return {
        "instance_id": record.instance_id,
        "method": record.method,
        "T": record.T,
        "loss": record.loss,
        "match_oracle": record.match_oracle,
        "wall_time_s": record.wall_time_s,
        "seed": record.seed,
    }


def write_records_jsonl(records, path) -> None:
    """One JSON object per line; losses carry 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(jsonfmt.dumps(record_to_dict(rec)) + "\n")


def success_rate_table(records) -> list[dict]:
    """Aggregate oracle agreement per (instance grid tag, method, T) over trials."""
    groups: dict[tuple, list[BenchRecord]] = {}
    for rec in records:
        if rec.match_oracle is None:
            continue
        tag = rec.instance_id.rsplit("-t", 1)[0]
        groups.setdefault((tag, rec.method, rec.T), []).append(rec)
    table = []
    for (tag, method, t_value), recs in sorted(
        groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] if kv[0][2] is not None else -1)
    ):
        wins = sum(r.match_oracle for r in recs)
        table.append(
            {
                "instance": tag,
                "method": method,
                "T": t_value,
                "trials": len(recs),
                "successes": wins,
                "success_rate": wins / len(recs),
            }
        )
    return table


def runtime_table(records) -> list[dict]:
    """Mean wall time per (method, T)."""
    groups: dict[tuple, list[float]] = {}
    for rec in records:
        groups.setdefault((rec.method, rec.T), []).append(rec.wall_time_s)
    return [
        {
            "method": method,
            "T": t_value,
            "solves": len(times),
            "mean_wall_time_s": sum(times) / len(times),
        }
        for (method, t_value), times in sorted(
            groups.items(), key=lambda kv: (kv[0][0], kv[0][1] if kv[0][1] is not None else -1)
        )
    ]
