"""Command-line front end.

Subcommands mirror the library layers: `optimize` solves the hybrid
split under a power cap, `tag` partitions seeds by estimated exploration
area, `simulate` runs one planner-driven fabric simulation, `bench` runs
a full plan and emits delimited results, `report` renders figures from
emitted files, and `maps` inspects or exports the bundled grids.

Exit codes: 0 on success, 2 when a requested configuration is infeasible
under its power cap, 1 on I/O or validation errors (including bad
arguments). All outputs are deterministic for a given seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import List, Optional

import numpy as np

from .archsim import ARCH_HYBRID, ARCHITECTURES, run_simulation
from .bench import (
    BenchmarkPlan,
    InfeasiblePlan,
    PlannerWork,
    desk_plan,
    emit_results,
    emit_tree_plot,
    paper_plan,
    read_results,
    run_benchmark,
    screen_seeds,
)
from .grid import BUILTIN_MAPS, MapLoadError, resolve_map, write_grid_text
from .optimizer import NoFeasibleSolution, ProblemSpec, solve_split
from .perf_models import DEFAULT_MODELS, ModelConfigError, load_model_config
from .planner import KINEMATIC_KINDS, make_kinematic_model
from .tagging import ConstraintUnmet, area_estimate, assign_tags, seed_nodes

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; here 2 means infeasible, so
    # route usage problems through the validation exit code instead
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2))


def _cmd_optimize(args) -> int:
    models = load_model_config(args.models) if args.models else DEFAULT_MODELS
    problem = ProblemSpec(n_total=args.n, power_cap=args.omega, models=models)
    try:
        solution = solve_split(problem)
    except NoFeasibleSolution as exc:
        _emit(
            {
                "m": None,
                "s_total": None,
                "p_total": None,
                "j": None,
                "feasible": False,
                "min_p_total": exc.min_p_total,
                "argmin_m": exc.argmin_m,
            }
        )
        return EXIT_INFEASIBLE
    _emit(
        {
            "m": solution.m,
            "s_total": solution.s_total,
            "p_total": solution.p_total,
            "j": solution.j,
            "feasible": True,
        }
    )
    return EXIT_OK


def _cmd_tag(args) -> int:
    grid = resolve_map(args.map, args.cell_size)
    seeds = seed_nodes(grid, args.n, args.seed)
    try:
        assignment = assign_tags(grid, seeds, args.m, args.alpha, args.connectivity)
        satisfied = True
    except ConstraintUnmet as exc:
        # still a usable split; the caller learns the area floor was missed
        assignment = exc.assignment
        satisfied = False
    estimates = [area_estimate(grid, s, args.connectivity) for s in seeds]
    _emit(
        {
            "assignment": {
                "combinatorial": list(assignment.combinatorial_ids),
                "hierarchical": list(assignment.hierarchical_ids),
            },
            "areas": [
                {
                    "seed": seed.id,
                    "row": seed.position[0],
                    "col": seed.position[1],
                    "area": est.area,
                }
                for seed, est in zip(seeds, estimates)
            ],
            "mean": assignment.mean_combi_area,
            "eq13_satisfied": satisfied,
        }
    )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    if args.arch == ARCH_HYBRID and args.m is None:
        raise ValueError("hybrid simulation requires --m")
    if args.arch != ARCH_HYBRID and args.m is not None:
        raise ValueError(f"--m only applies to hybrid, not {args.arch}")
    grid = resolve_map(args.map, args.cell_size)
    model = make_kinematic_model(args.kin)
    seeds = screen_seeds(
        grid,
        seed_nodes(grid, args.n, np.random.SeedSequence((args.seed, 1))),
        [model],
        np.random.SeedSequence((args.seed, 9)),
    )
    work = PlannerWork(
        grid,
        model,
        [s.position for s in seeds],
        np.random.SeedSequence((args.seed, 2)),
    )
    if args.arch == ARCH_HYBRID:
        tags = assign_tags(grid, seeds, args.m, alpha=0.0)
        order: List[int] = list(tags.combinatorial_ids) + list(tags.hierarchical_ids)
        labels = ["combinatorial"] * args.m + ["hierarchical"] * (args.n - args.m)
    else:
        order = list(range(args.n))
        labels = [args.arch] * args.n
    trace = run_simulation(
        args.arch,
        args.n,
        args.nodes,
        work.view(order),
        m=args.m,
        state_dims=model.dof,
        record_events=args.events_out is not None,
    )
    if args.trees_out:
        emit_tree_plot(
            [work.trees[i] for i in order], labels, args.trees_out, grid=grid
        )
    if args.events_out:
        with open(args.events_out, "w") as fh:
            fh.write("cycle,component,event,rrt_id\n")
            for cycle, component, event, rrt_id in trace.events:
                fh.write(f"{cycle},{component},{event},{rrt_id}\n")
    _emit(
        {
            "architecture": args.arch,
            "n": args.n,
            "m": args.m,
            "map": str(args.map),
            "kinematics": args.kin,
            "target_nodes": args.nodes,
            "seed": args.seed,
            "total_cycles": trace.total_cycles,
            "committed_nodes": trace.committed_nodes,
            "bank_occupancy": list(trace.bank_occupancy),
        }
    )
    return EXIT_OK


def _cmd_bench(args) -> int:
    base = desk_plan() if args.desk else paper_plan()
    if args.plan:
        with open(args.plan) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"{args.plan}: plan must be a JSON object")
        plan = BenchmarkPlan.from_dict({**dataclasses.asdict(base), **data})
    else:
        plan = base
    on_progress = None
    if args.progress:
        on_progress = lambda message: print(message, file=sys.stderr)
    rows = run_benchmark(plan, on_progress=on_progress)
    emit_results(rows, args.out, fmt=args.format)
    if args.figures:
        from .report import render_results_figures

        os.makedirs(args.figures, exist_ok=True)
        for path in render_results_figures(rows, args.figures):
            print(path)
    print(args.out)
    return EXIT_OK


def _cmd_report(args) -> int:
    from .report import render_results_figures, render_tree_figure

    rows = read_results(args.results)
    os.makedirs(args.out_dir, exist_ok=True)
    written = render_results_figures(rows, args.out_dir, stem=args.stem)
    if args.trees:
        grid = resolve_map(args.map, args.cell_size) if args.map else None
        tree_path = os.path.join(args.out_dir, f"{args.stem}_trees.png")
        render_tree_figure(args.trees, tree_path, grid=grid)
        written.append(tree_path)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_maps(args) -> int:
    if args.export:
        name, path = args.export
        builder = BUILTIN_MAPS.get(name)
        if builder is None:
            raise ValueError(
                f"unknown map {name!r}; builtins: {', '.join(sorted(BUILTIN_MAPS))}"
            )
        write_grid_text(builder(), path)
        print(path)
        return EXIT_OK
    for name in sorted(BUILTIN_MAPS):
        grid = BUILTIN_MAPS[name]()
        rows, cols = grid.cells.shape
        blocked = grid.cells.sum() / grid.cells.size
        print(f"{name}: {rows}x{cols} cells, {blocked:.1%} obstacles")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="rrtarch",
        description="Parallel RRT arbitration fabrics: model, optimize, simulate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="solve the hybrid split under a power cap")
    p.add_argument("--n", type=int, required=True, help="total generator count")
    p.add_argument("--omega", type=float, required=True, help="power cap in watts")
    p.add_argument("--models", help="coefficient config file overriding defaults")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("tag", help="partition seeds by estimated exploration area")
    p.add_argument("--map", required=True, help="builtin map name or grid file")
    p.add_argument("--n", type=int, required=True, help="seed count")
    p.add_argument("--m", type=int, required=True, help="combinatorial block size")
    p.add_argument("--alpha", type=float, required=True, help="mean-area floor")
    p.add_argument("--seed", type=int, required=True, help="seed placement RNG seed")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=4)
    p.add_argument("--cell-size", type=float, default=1.0)
    p.set_defaults(func=_cmd_tag)

    p = sub.add_parser("simulate", help="run one planner-driven fabric simulation")
    p.add_argument("--arch", required=True, choices=ARCHITECTURES)
    p.add_argument("--n", type=int, required=True, help="generator count")
    p.add_argument("--m", type=int, help="hybrid split (hybrid only)")
    p.add_argument("--map", required=True, help="builtin map name or grid file")
    p.add_argument("--kin", required=True, choices=KINEMATIC_KINDS)
    p.add_argument("--nodes", type=int, required=True, help="nodes to commit")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--cell-size", type=float, default=1.0)
    p.add_argument("--trees-out", help="write explored trees as plot data")
    p.add_argument("--events-out", help="write the event log as CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="run a benchmark plan and emit results")
    p.add_argument("--plan", help="JSON plan file; fields override the scale defaults")
    p.add_argument("--out", required=True, help="results file to write")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    scale = p.add_mutually_exclusive_group()
    scale.add_argument("--desk", action="store_true",
                       help="desk-scale defaults (n in {4,8,16}, K=1000, R=30)")
    scale.add_argument("--paper-scale", action="store_true",
                       help="full-scale defaults (n up to 64, K=10000, R=1000)")
    p.add_argument("--figures", help="also render metric figures into this directory")
    p.add_argument("--progress", action="store_true", help="progress lines on stderr")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("report", help="render figures from emitted files")
    p.add_argument("--results", required=True, help="results file (csv or json)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--stem", default="bench", help="figure filename prefix")
    p.add_argument("--trees", help="plot-data file to render as a map overlay")
    p.add_argument("--map", help="builtin map name or grid file for the overlay")
    p.add_argument("--cell-size", type=float, default=1.0)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("maps", help="list or export the bundled maps")
    p.add_argument("--export", nargs=2, metavar=("NAME", "PATH"),
                   help="write a builtin map as a text grid file")
    p.set_defaults(func=_cmd_maps)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (InfeasiblePlan,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoFeasibleSolution as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (MapLoadError, ModelConfigError, ConstraintUnmet) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
