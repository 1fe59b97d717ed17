"""Scenario x alpha x run sweeps with resumable CSV output.

Layout of ``output_dir``::

    runs/<scenario>/alpha_<a>.csv      finished cells, one row per run
    runs/<scenario>/alpha_<a>.partial  journal of a cell in progress
    graphs/<scenario>/alpha_<a>/run_<r>.txt   final graphs (optional)
    runs.csv                           all rows in plan order
    summary.csv                        one row per cell

Only the parent process writes files, so output does not depend on the
number of workers or on completion order.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .analysis import AggregateStats, RunMetrics, aggregate, metrics
from .cost import Behaviour
from .engine import ScenarioConfig, Start, run
from .graph import format_edge_list
from .moves import MoveSet

log = logging.getLogger(__name__)

DEFAULT_ALPHAS = (
    (0.5, 0.7, 1, 1.3, 1.5, 1.7, 2, 2.3, 2.5, 2.7, 3, 3.3, 3.5, 3.7)
    + tuple(range(4, 21))
    + tuple(range(30, 201, 10))
    + (300, 400, 500)
)

RUN_HEADER = (
    "scenario,behaviour,start,moves,alpha,run,seed,steps,terminated,edges,"
    "avg_distance,diameter,is_tree,is_star,total_cost"
).split(",")

SUMMARY_HEADER = (
    "scenario,behaviour,start,moves,n,alpha,runs,steps_min,steps_mean,steps_max,"
    "edges_min,edges_mean,edges_max,avg_distance_min,avg_distance_mean,avg_distance_max,"
    "tree_probability,star_probability,step_cap_fraction,invalid_runs"
).split(",")

_START_CODE = {Start.SCRATCH: "fs", Start.COMPLETE: "fc"}


@dataclass(frozen=True)
class Scenario:
    behaviour: Behaviour
    start: Start
    move_set: MoveSet

    @property
    def name(self) -> str:
        return f"{self.behaviour.value}-{_START_CODE[self.start]}-{self.move_set.value}"

    @property
    def id(self) -> int:
        return ALL_SCENARIOS.index(self)

    @classmethod
    def parse(cls, name: str) -> "Scenario":
        for s in ALL_SCENARIOS:
            if s.name == name:
                return s
        raise ValueError(f"unknown scenario {name!r}")


ALL_SCENARIOS = tuple(
    Scenario(b, s, m) for b, s, m in product(Behaviour, Start, MoveSet)
)


def fmt_real(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6g}"


def fmt_alpha(alpha: float) -> str:
    return f"{alpha:.6g}"


def run_seed(base_seed: int, scenario_id: int, alpha_index: int, run_index: int) -> int:
    """Deterministic per-run seed mixed with numpy's SeedSequence."""
    ss = np.random.SeedSequence([base_seed & (2**64 - 1), scenario_id, alpha_index, run_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class SweepPlan:
    n: int
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHAS
    scenarios: tuple[Scenario, ...] = ALL_SCENARIOS
    runs_per_cell: int = 100
    base_seed: int = 0
    output_dir: Path = Path("sweep_out")
    n_overrides: dict[str, int] = field(default_factory=dict)
    max_steps: int = 10000
    tries_per_step: int = 100
    save_graphs: bool = False

    def __post_init__(self):
        self.output_dir = Path(self.output_dir)
        self.alpha_grid = tuple(float(a) for a in self.alpha_grid)
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be >= 1")
        if not self.alpha_grid or not self.scenarios:
            raise ValueError("plan needs at least one alpha and one scenario")

    def n_for(self, scenario: Scenario) -> int:
        return self.n_overrides.get(scenario.name, self.n)

    def cells(self) -> list[tuple[Scenario, int, float]]:
        return [(s, ai, a) for s in self.scenarios for ai, a in enumerate(self.alpha_grid)]

    def config(self, scenario: Scenario, alpha_index: int, run_index: int) -> ScenarioConfig:
        return ScenarioConfig(
            n=self.n_for(scenario),
            alpha=self.alpha_grid[alpha_index],
            behaviour=scenario.behaviour,
            start=scenario.start,
            move_set=scenario.move_set,
            max_steps=self.max_steps,
            tries_per_step=self.tries_per_step,
            seed=run_seed(self.base_seed, scenario.id, alpha_index, run_index),
        )


@dataclass
class SweepReport:
    plan: SweepPlan
    rows: dict[tuple[str, float], list[dict[str, str]]]
    stats: dict[tuple[str, float], AggregateStats]


def _record(scenario: Scenario, alpha: float, run_index: int, seed: int, outcome) -> dict[str, str]:
    m = metrics(outcome.final_graph, alpha, outcome.steps)
    return {
        "scenario": scenario.name,
        "behaviour": scenario.behaviour.value,
        "start": scenario.start.value,
        "moves": scenario.move_set.value,
        "alpha": fmt_alpha(alpha),
        "run": str(run_index),
        "seed": str(seed),
        "steps": str(outcome.steps),
        "terminated": outcome.termination.value,
        "edges": str(m.edges),
        "avg_distance": fmt_real(m.avg_distance),
        "diameter": str(m.diameter),
        "is_tree": str(int(m.is_tree)),
        "is_star": str(int(m.is_star)),
        "total_cost": fmt_real(m.total_cost),
    }


def _run_task(task):
    scenario, alpha, run_index, config, save_graph = task
    outcome = run(config)
    graph_text = format_edge_list(outcome.final_graph) if save_graph else None
    return scenario.name, alpha, run_index, _record(scenario, alpha, run_index, config.seed, outcome), graph_text


def row_metrics(row: dict[str, str]) -> RunMetrics:
    avg = float(row["avg_distance"])
    return RunMetrics(
        edges=int(row["edges"]),
        avg_distance=avg,
        diameter=int(row["diameter"]),
        is_tree=row["is_tree"] == "1",
        is_star=row["is_star"] == "1",
        is_complete=False,
        steps=int(row["steps"]),
        total_cost=float(row["total_cost"]),
        connected=not math.isnan(avg),
    )


def _rows_to_csv(rows: list[dict[str, str]], header: list[str], with_header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    if with_header:
        w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _read_rows(path: Path, header: list[str] | None = None) -> list[dict[str, str]]:
    text = path.read_text()
    if header is None:
        return list(csv.DictReader(io.StringIO(text)))
    return list(csv.DictReader(io.StringIO(text), fieldnames=header))


def _cell_paths(out: Path, scenario: Scenario, alpha: float) -> tuple[Path, Path]:
    d = out / "runs" / scenario.name
    stem = f"alpha_{fmt_alpha(alpha)}"
    return d / f"{stem}.csv", d / f"{stem}.partial"


def summary_row(scenario: Scenario, n: int, alpha: float, rows: list[dict[str, str]]) -> dict[str, str]:
    st = aggregate(row_metrics(r) for r in rows)
    capped = sum(r["terminated"] == "step_cap" for r in rows) / len(rows)
    out = {
        "scenario": scenario.name,
        "behaviour": scenario.behaviour.value,
        "start": scenario.start.value,
        "moves": scenario.move_set.value,
        "n": str(n),
        "alpha": fmt_alpha(alpha),
        "runs": str(st.run_count),
    }
    for metric in ("steps", "edges", "avg_distance"):
        s = getattr(st, metric)
        out[f"{metric}_min"] = fmt_real(s.min)
        out[f"{metric}_mean"] = fmt_real(s.mean)
        out[f"{metric}_max"] = fmt_real(s.max)
    out["tree_probability"] = fmt_real(st.tree_probability)
    out["star_probability"] = fmt_real(st.star_probability)
    out["step_cap_fraction"] = fmt_real(capped)
    out["invalid_runs"] = str(st.invalid_runs)
    return out


def execute(plan: SweepPlan, workers: int = 1) -> SweepReport:
    """Run every (scenario, alpha, run) cell once, resuming finished work."""
    out = plan.output_dir
    out.mkdir(parents=True, exist_ok=True)

    done: dict[tuple[str, float], dict[int, dict[str, str]]] = {}
    tasks = []
    for scenario, ai, alpha in plan.cells():
        final, partial = _cell_paths(out, scenario, alpha)
        final.parent.mkdir(parents=True, exist_ok=True)
        key = (scenario.name, alpha)
        if final.exists():
            done[key] = {int(r["run"]): r for r in _read_rows(final)}
        elif partial.exists():
            done[key] = {int(r["run"]): r for r in _read_rows(partial, RUN_HEADER)}
        else:
            done[key] = {}
        for r in range(plan.runs_per_cell):
            if r not in done[key]:
                tasks.append((scenario, alpha, r, plan.config(scenario, ai, r), plan.save_graphs))
    log.info("sweep: %d runs to do, %d already on disk", len(tasks),
             sum(len(v) for v in done.values()))

    by_name = {s.name: s for s in plan.scenarios}

    def store(result) -> None:
        name, alpha, r, row, graph_text = result
        scenario = by_name[name]
        final, partial = _cell_paths(out, scenario, alpha)
        if graph_text is not None:
            gdir = out / "graphs" / name / f"alpha_{fmt_alpha(alpha)}"
            gdir.mkdir(parents=True, exist_ok=True)
            (gdir / f"run_{r}.txt").write_text(graph_text)
        with partial.open("a") as fh:
            fh.write(_rows_to_csv([row], RUN_HEADER, with_header=False))
        cell = done[(name, alpha)]
        cell[r] = row
        if len(cell) == plan.runs_per_cell:
            final.write_text(_rows_to_csv([cell[i] for i in sorted(cell)], RUN_HEADER))
            partial.unlink()

    if workers <= 1:
        for task in tasks:
            store(_run_task(task))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for result in pool.map(_run_task, tasks, chunksize=1):
                store(result)

    # cells finished in an earlier session may still have their journal only
    for scenario, _, alpha in plan.cells():
        final, partial = _cell_paths(out, scenario, alpha)
        cell = done[(scenario.name, alpha)]
        if not final.exists() and len(cell) >= plan.runs_per_cell:
            final.write_text(_rows_to_csv([cell[i] for i in sorted(cell)], RUN_HEADER))
            partial.unlink(missing_ok=True)

    return _finalize(plan)


def _finalize(plan: SweepPlan) -> SweepReport:
    out = plan.output_dir
    rows: dict[tuple[str, float], list[dict[str, str]]] = {}
    all_rows, summaries = [], []
    stats = {}
    for scenario, _, alpha in plan.cells():
        final, _ = _cell_paths(out, scenario, alpha)
        cell_rows = [r for r in _read_rows(final) if int(r["run"]) < plan.runs_per_cell]
        rows[(scenario.name, alpha)] = cell_rows
        all_rows += cell_rows
        summaries.append(summary_row(scenario, plan.n_for(scenario), alpha, cell_rows))
        stats[(scenario.name, alpha)] = aggregate(row_metrics(r) for r in cell_rows)
    (out / "runs.csv").write_text(_rows_to_csv(all_rows, RUN_HEADER))
    (out / "summary.csv").write_text(_rows_to_csv(summaries, SUMMARY_HEADER))
    return SweepReport(plan, rows, stats)


def load_report(output_dir: str | Path) -> dict[tuple[str, float], list[dict[str, str]]]:
    """Group the rows of a finished sweep's ``runs.csv`` by (scenario, alpha)."""
    grouped: dict[tuple[str, float], list[dict[str, str]]] = {}
    for r in _read_rows(Path(output_dir) / "runs.csv"):
        grouped.setdefault((r["scenario"], float(r["alpha"])), []).append(r)
    return grouped


def emit_figure_tables(rows: dict[tuple[str, float], list[dict[str, str]]],
                       out_dir: str | Path) -> list[Path]:
    """One plot-ready CSV per (scenario, metric), rows ordered by alpha."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_scenario: dict[str, list[tuple[float, AggregateStats]]] = {}
    for (name, alpha), cell in rows.items():
        by_scenario.setdefault(name, []).append((alpha, aggregate(row_metrics(r) for r in cell)))
    written = []
    for name, cells in sorted(by_scenario.items()):
        cells.sort(key=lambda c: c[0])
        for metric in ("steps", "edges", "avg_distance"):
            lines = ["alpha,min,mean,max"]
            for alpha, st in cells:
                s = getattr(st, metric)
                lines.append(",".join([fmt_alpha(alpha), fmt_real(s.min), fmt_real(s.mean), fmt_real(s.max)]))
            path = out_dir / f"{name}__{metric}.csv"
            path.write_text("\n".join(lines) + "\n")
            written.append(path)
        for metric in ("tree_probability", "star_probability"):
            lines = ["alpha,probability"]
            lines += [f"{fmt_alpha(a)},{fmt_real(getattr(st, metric))}" for a, st in cells]
            path = out_dir / f"{name}__{metric}.csv"
            path.write_text("\n".join(lines) + "\n")
            written.append(path)
    return written
