"""Percolation sweeps: many seeded runs over a grid of p, aggregated to CSV/JSON.

Trial seeds are ``derive_seed(base_seed, p_index, trial_index)`` (SplitMix64
chained over the indices), so every row can be reproduced on its own and
the table is identical for any number of workers.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

from .analysis import (SUBCRITICAL, SUPERCRITICAL, exact, subcritical_component_bound,
                       supercritical_targets)
from .exploration import run_dfs_percolation
from .generators import GeneratorSpec
from .graph import Graph, GraphInputError, read_edge_list
from .rng import derive_seed
from .spectral import SpectralReport, spectral_report

log = logging.getLogger(__name__)

CSV_COLUMNS = ("family", "n", "d", "lambda", "ratio", "p", "epsilon", "trial", "seed", "r_size",
               "num_epochs", "largest_component", "second_component", "max_stack", "runtime_ms")


@dataclass
class SweepConfig:
    graph: GeneratorSpec | str
    p_grid: list[float] | None = None
    epsilons: list[float] | None = None
    trials: int = 20
    base_seed: int = 0
    sigma_mode: str = "identity"
    csv_path: str | None = None
    json_path: str | None = None
    workers: int = 1
    whp_bar: float = 0.95
    giant_fraction: float = 0.1
    spectral_tolerance: float = 1e-2
    compute_spectrum: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise GraphInputError("trials must be at least 1")
        if (self.p_grid is None) == (self.epsilons is None):
            raise GraphInputError("give exactly one of p_grid or epsilons")
        if self.workers < 1:
            raise GraphInputError("workers must be at least 1")
        if not 0 < self.whp_bar <= 1:
            raise GraphInputError("whp_bar must lie in (0, 1]")

    @classmethod
    def from_dict(cls, obj: dict) -> "SweepConfig":
        obj = dict(obj)
        g = obj.get("graph")
        if isinstance(g, dict):
            obj["graph"] = GeneratorSpec.from_dict(g)
        elif not isinstance(g, str):
            raise GraphInputError("config 'graph' must be a generator object or an edge-list path")
        grid = obj.pop("p_grid", None)
        if isinstance(grid, dict):
            if grid.get("center", "1/d") != "1/d":
                raise GraphInputError("only center '1/d' is supported for epsilon grids")
            obj["epsilons"] = [float(e) for e in grid["epsilons"]]
        elif grid is not None:
            obj["p_grid"] = [float(p) for p in grid]
        outputs = obj.pop("outputs", None) or {}
        obj.setdefault("csv_path", outputs.get("csv"))
        obj.setdefault("json_path", outputs.get("json"))
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise GraphInputError(f"unknown sweep config fields: {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        return cls.from_dict(json.loads(text))

    def load_graph(self) -> Graph:
        if isinstance(self.graph, GeneratorSpec):
            return self.graph.build()
        return read_edge_list(self.graph)

    def grid(self, d: int) -> list[tuple[Fraction, float]]:
        """``(p, epsilon)`` pairs, with ``epsilon = p d - 1`` for explicit grids."""
        if self.epsilons is not None:
            pts = [((1 + exact(e)) / d, float(e)) for e in self.epsilons]
        else:
            pts = [(exact(p), float(exact(p) * d - 1)) for p in self.p_grid]
        for p, _ in pts:
            if not 0 <= p <= 1:
                raise GraphInputError(f"grid point p = {float(p)} outside [0, 1]")
        return pts


@dataclass
class SweepRow:
    family: str
    n: int
    d: int
    lam: float
    ratio: float
    p: float
    epsilon: float
    trial: int
    seed: int
    r_size: int
    num_epochs: int
    largest_component: int
    second_component: int
    max_stack: int
    runtime_ms: float

    def as_csv(self) -> list:
        vals = asdict(self)
        vals["lambda"] = vals.pop("lam")
        return [_fmt(vals[c]) for c in CSV_COLUMNS]


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else "nan"
    return str(x)


@dataclass
class SweepTable:
    n: int
    d: int
    rows: list[SweepRow] = field(default_factory=list)

    def to_csv(self, dest=None, include_runtime: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = CSV_COLUMNS if include_runtime else CSV_COLUMNS[:-1]
        w.writerow(cols)
        for r in self.rows:
            vals = r.as_csv()
            w.writerow(vals if include_runtime else vals[:-1])
        text = buf.getvalue()
        if dest is not None:
            with open(dest, "w", newline="") as fh:
                fh.write(text)
        return text

    def digest(self) -> str:
        """Hash of the CSV content without the runtime column."""
        return hashlib.sha256(self.to_csv(include_runtime=False).encode()).hexdigest()

    def by_p(self) -> dict[float, list[SweepRow]]:
        out: dict[float, list[SweepRow]] = {}
        for r in self.rows:
            out.setdefault(r.p, []).append(r)
        return out


# worker state, populated once per process
_GRAPH: Graph | None = None


def _init_worker(g: Graph) -> None:
    global _GRAPH
    _GRAPH = g


def _trial(task: tuple) -> tuple:
    p, seed, sigma_mode = task
    t0 = time.perf_counter()
    rep = run_dfs_percolation(_GRAPH, p, seed, sigma_mode=sigma_mode)
    ms = (time.perf_counter() - t0) * 1e3
    return (rep.r_size, len(rep.epochs), rep.largest_component, rep.second_component,
            rep.max_stack_global, ms)


def run_sweep(config: SweepConfig, graph: Graph | None = None) -> tuple[SweepTable, dict]:
    """Run every (p, trial) of the grid and aggregate.

    The graph is built once; ``lambda`` is computed once and stamped on every
    row (``nan`` when ``compute_spectrum`` is off or the graph is irregular).
    """
    g = graph if graph is not None else config.load_graph()
    spec: SpectralReport | None = None
    if config.compute_spectrum and g.regular and g.degree_bound > 0:
        spec = spectral_report(g, tolerance=config.spectral_tolerance)
    lam = spec.lam if spec else float("nan")
    ratio = spec.ratio if spec else float("nan")
    grid = config.grid(g.degree_bound)
    tasks, keys = [], []
    for i, (p, eps) in enumerate(grid):
        for t in range(config.trials):
            seed = derive_seed(config.base_seed, i, t)
            tasks.append((p, seed, config.sigma_mode))
            keys.append((p, eps, t, seed))
    log.info("sweep: %d grid points x %d trials on %r", len(grid), config.trials, g)
    if config.workers == 1:
        _init_worker(g)
        results = [_trial(task) for task in tasks]
    else:
        with ProcessPoolExecutor(config.workers, initializer=_init_worker, initargs=(g,)) as pool:
            results = list(pool.map(_trial, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))
    table = SweepTable(g.n, g.degree_bound)
    for (p, eps, t, seed), res in zip(keys, results):
        table.rows.append(SweepRow(g.label, g.n, g.degree_bound, lam, ratio, float(p), eps, t, seed, *res))
    summary = summarize(table, config.whp_bar, config.giant_fraction)
    summary["spectral"] = spec.to_dict() if spec else None
    summary["graph"] = {"label": g.label, "n": g.n, "d": g.degree_bound, "digest": g.digest}
    summary["config"] = _config_dict(config)
    if config.csv_path:
        _ensure_dir(config.csv_path)
        table.to_csv(config.csv_path)
    if config.json_path:
        _ensure_dir(config.json_path)
        with open(config.json_path, "w") as fh:
            json.dump(summary, fh, indent=2)
    return table, summary


def _ensure_dir(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def _config_dict(config: SweepConfig) -> dict:
    out = asdict(config)
    if isinstance(config.graph, GeneratorSpec):
        out["graph"] = asdict(config.graph)
    return out


def summarize(table: SweepTable, whp_bar: float = 0.95, giant_fraction: float = 0.1) -> dict:
    n, d = table.n, table.d
    points = []
    for p, rows in sorted(table.by_p().items()):
        eps = rows[0].epsilon
        largest = [r.largest_component for r in rows]
        entry = {
            "p": p, "epsilon": eps, "trials": len(rows),
            "median_largest": statistics.median(largest), "max_largest": max(largest),
            "median_second": statistics.median(r.second_component for r in rows),
            "median_max_stack": statistics.median(r.max_stack for r in rows),
            "side": None, "pass_fraction": None, "whp_verdict": None,
        }
        e = round(abs(eps), 12)
        if eps < 0 and 0 < e <= 1 and n >= 2:
            k = subcritical_component_bound(n, e)
            passed = sum(r.largest_component < k for r in rows)
            entry.update(side=SUBCRITICAL, bound=k)
        elif eps > 0 and 0 < e <= 1:
            tg = supercritical_targets(n, d, e)
            passed = sum(r.largest_component >= tg["giant_min"] and r.max_stack >= tg["path_min"]
                         for r in rows)
            entry.update(side=SUPERCRITICAL, **tg)
        else:
            passed = None
        if passed is not None:
            frac = passed / len(rows)
            entry.update(pass_fraction=frac, whp_verdict=frac >= whp_bar)
        points.append(entry)
    est = estimate_threshold(table, giant_fraction)
    verdicts = [pt["whp_verdict"] for pt in points if pt["whp_verdict"] is not None]
    return {"points": points, "whp_bar": whp_bar, "all_verdicts_pass": all(verdicts),
            "threshold": est}


def estimate_threshold(table: SweepTable, giant_fraction: float) -> dict:
    """Smallest grid p whose median largest component reaches ``giant_fraction * n / d``.

    Returns ``{"p_estimate": p or None, "target": ..., "medians": {p: median}}``.
    """
    target = giant_fraction * table.n / table.d if table.d else giant_fraction * table.n
    medians = {p: statistics.median(r.largest_component for r in rows)
               for p, rows in sorted(table.by_p().items())}
    hit = next((p for p, med in medians.items() if med >= target), None)
    return {"p_estimate": hit, "target": target, "medians": medians}

