"""Command line interface: ``netcreate {run,sweep,analyze,oracle,tables}``.

Human-readable ``key: value`` lines go to stdout; files are only written
under ``--out``. Exit status is 0 on success, 1 for usage errors and 2 for
runtime failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .analysis import metrics, three_centre_structure_check
from .cost import Behaviour
from .engine import ScenarioConfig, Start, run
from .graph import GraphError, InvalidConfigError, load_edge_list, save_edge_list
from .moves import MoveSet
from .oracle import MAX_ORACLE_N, brute_force_social_optimum, degeneracy_scan, verify_nash
from .sweep import (
    ALL_SCENARIOS,
    DEFAULT_ALPHAS,
    Scenario,
    SweepPlan,
    emit_figure_tables,
    execute,
    fmt_alpha,
    fmt_real,
    load_report,
)

DEFAULT_SEED = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _alpha_grid(text: str) -> tuple[float, ...]:
    if text in ("default", "paper"):
        return DEFAULT_ALPHAS
    try:
        return tuple(float(a) for a in text.split(",") if a.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha grid {text!r}")


def _common(p: argparse.ArgumentParser, n_required: bool = False) -> None:
    p.add_argument("--n", type=int, required=n_required, help="number of nodes")
    p.add_argument("--alpha", type=float, help="edge price")
    p.add_argument("--behaviour", choices=[b.value for b in Behaviour], default="selfish")
    p.add_argument("--moves", choices=[m.value for m in MoveSet], default="bs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netcreate", description="Network creation game simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="single simulation run")
    _common(p, n_required=True)
    p.add_argument("--start", choices=[s.value for s in Start], default="scratch")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--max-steps", type=int, default=10000)
    p.add_argument("--tries-per-step", type=int, default=100)
    p.add_argument("--out", type=Path, help="write the final graph here (edge-list format)")

    p = sub.add_parser("sweep", help="scenario x alpha x run experiment matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha-grid", type=_alpha_grid, default=DEFAULT_ALPHAS,
                   help="comma list of alphas, or 'default' for the 52-value grid")
    p.add_argument("--scenarios", default="all",
                   help="comma list of scenario names, e.g. selfish-fs-bs (default all 8)")
    p.add_argument("--n-override", action="append", default=[], metavar="SCENARIO=N",
                   help="per-scenario node count, repeatable")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--max-steps", type=int, default=10000)
    p.add_argument("--tries-per-step", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--save-graphs", action="store_true")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("analyze", help="metrics of a persisted graph")
    p.add_argument("graph", type=Path)
    p.add_argument("--alpha", type=float, required=True)

    p = sub.add_parser("oracle", help="exact social optimum, or equilibrium check of a graph")
    _common(p)
    p.add_argument("--graph", type=Path, help="check this graph instead of computing the optimum")

    p = sub.add_parser("tables", help="figure tables from a finished sweep")
    p.add_argument("sweep_dir", type=Path)
    p.add_argument("--out", type=Path, required=True)
    return parser


def _emit(**pairs) -> None:
    for k, v in pairs.items():
        print(f"{k}: {v}")


def _cmd_run(args) -> int:
    config = ScenarioConfig(
        n=args.n,
        alpha=args.alpha,
        behaviour=Behaviour(args.behaviour),
        start=Start(args.start),
        move_set=MoveSet(args.moves),
        max_steps=args.max_steps,
        tries_per_step=args.tries_per_step,
        seed=args.seed,
    )
    outcome = run(config)
    m = metrics(outcome.final_graph, config.alpha, outcome.steps)
    _emit(seed=args.seed, n=config.n, alpha=fmt_alpha(config.alpha),
          behaviour=args.behaviour, start=args.start, moves=args.moves,
          steps=outcome.steps, terminated=outcome.termination.value,
          accepted_moves=outcome.accepted_moves, edges=m.edges,
          avg_distance=fmt_real(m.avg_distance), diameter=m.diameter,
          is_tree=int(m.is_tree), is_star=int(m.is_star),
          three_centre=int(three_centre_structure_check(outcome.final_graph)),
          total_cost=fmt_real(m.total_cost))
    if args.out:
        save_edge_list(outcome.final_graph, args.out)
        _emit(graph=args.out)
    return 0


def _cmd_sweep(args) -> int:
    if args.scenarios == "all":
        scenarios = ALL_SCENARIOS
    else:
        try:
            scenarios = tuple(Scenario.parse(s.strip()) for s in args.scenarios.split(","))
        except ValueError as exc:
            raise UsageError(str(exc))
    overrides = {}
    for item in args.n_override:
        name, _, value = item.partition("=")
        try:
            Scenario.parse(name)
            overrides[name] = int(value)
        except ValueError:
            raise UsageError(f"bad --n-override {item!r}")
    plan = SweepPlan(n=args.n, alpha_grid=args.alpha_grid, scenarios=scenarios,
                     runs_per_cell=args.runs, base_seed=args.seed, output_dir=args.out,
                     n_overrides=overrides, max_steps=args.max_steps,
                     tries_per_step=args.tries_per_step, save_graphs=args.save_graphs)
    for s in scenarios:
        if plan.n_for(s) < 2:
            raise InvalidConfigError(f"need at least 2 nodes, got n={plan.n_for(s)}")
    report = execute(plan, workers=args.workers)
    _emit(seed=args.seed, cells=len(report.rows),
          runs=sum(len(r) for r in report.rows.values()),
          runs_csv=args.out / "runs.csv", summary_csv=args.out / "summary.csv")
    return 0


def _cmd_analyze(args) -> int:
    g = load_edge_list(args.graph)
    m = metrics(g, args.alpha)
    _emit(n=g.n, edges=m.edges, connected=int(m.connected),
          avg_distance=fmt_real(m.avg_distance), diameter=m.diameter,
          is_tree=int(m.is_tree), is_star=int(m.is_star), is_complete=int(m.is_complete),
          three_centre=int(three_centre_structure_check(g)),
          total_cost=fmt_real(m.total_cost))
    return 0


def _cmd_oracle(args) -> int:
    if args.alpha is None:
        raise UsageError("--alpha is required")
    behaviour, move_set = Behaviour(args.behaviour), MoveSet(args.moves)
    if args.graph is not None:
        g = load_edge_list(args.graph)
        _emit(n=g.n, alpha=fmt_alpha(args.alpha), behaviour=behaviour.value, moves=move_set.value,
              nash=int(verify_nash(g, args.alpha, behaviour, move_set)),
              zero_delta_moves=degeneracy_scan(g, args.alpha, behaviour, move_set))
        return 0
    if args.n is None:
        raise UsageError("oracle needs --n or --graph")
    if args.n < 2:
        raise InvalidConfigError(f"need at least 2 nodes, got n={args.n}")
    if args.n > MAX_ORACLE_N:
        raise InvalidConfigError(f"exhaustive scan limited to n <= {MAX_ORACLE_N}")
    rep = brute_force_social_optimum(args.n, args.alpha)
    m = metrics(rep.one_optimizer, args.alpha)
    shape = "complete" if m.is_complete else "star" if m.is_star else "tree" if m.is_tree else "other"
    _emit(n=args.n, alpha=fmt_alpha(args.alpha), optimum_cost=fmt_real(rep.optimal_total_cost),
          optimizers=rep.optimizer_count, edges=m.edges, structure=shape)
    return 0


def _cmd_tables(args) -> int:
    written = emit_figure_tables(load_report(args.sweep_dir), args.out)
    _emit(tables=len(written), out=args.out)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "analyze": _cmd_analyze,
    "oracle": _cmd_oracle,
    "tables": _cmd_tables,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if getattr(args, "alpha", None) is None and args.command == "run":
            raise UsageError("--alpha is required")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InvalidConfigError, GraphError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
