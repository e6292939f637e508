"""Models, optimizer, planner, and cycle-level simulator for parallel-RRT
write-arbitration architectures."""

from .archsim import (
    ARCH_COMBINATORIAL,
    ARCH_HIERARCHICAL,
    ARCH_HYBRID,
    ARCHITECTURES,
    ArchConfig,
    DeadlockDetected,
    DeterministicWork,
    MemoryOverflow,
    MultiPortMemory,
    SimTrace,
    UniformWork,
    measure_speedup,
    run_simulation,
)
from .bench import (
    BenchmarkPlan,
    BenchmarkRow,
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
from .fixedpoint import FixedAngle, FixedCoord, wrap_angle
from .grid import (
    BUILTIN_MAPS,
    MapLoadError,
    OccupancyGrid,
    load_grid,
    parse_grid_text,
    resolve_map,
    write_grid_text,
)
from .optimizer import (
    NoFeasibleSolution,
    ProblemSpec,
    SplitSolution,
    enumerate_oracle,
    feasible_region,
    solve_split,
)
from .perf_models import (
    ArchModelSet,
    DEFAULT_MODELS,
    HybridEvaluation,
    PolynomialModel,
    block_contribution,
    efficiency,
    eval_model,
    evaluate_hybrid,
    load_model_config,
)
from .planner import (
    KINEMATIC_KINDS,
    KinematicModel,
    RobotState,
    RrtTree,
    WorldBounds,
    collision_free,
    differential,
    extend,
    fixed_wing,
    make_kinematic_model,
    make_state,
    nearest_box,
    quadcopter,
    read_tree_dump,
    rrt_step,
    sample_state,
    seed_root_state,
    write_tree_dump,
)
from .tagging import (
    ConstraintUnmet,
    SeedNode,
    TagAssignment,
    area_estimate,
    assign_tags,
    bfs_distances,
    seed_nodes,
)

__all__ = [
    "ARCH_COMBINATORIAL",
    "ARCH_HIERARCHICAL",
    "ARCH_HYBRID",
    "ARCHITECTURES",
    "ArchConfig",
    "ArchModelSet",
    "BUILTIN_MAPS",
    "BenchmarkPlan",
    "BenchmarkRow",
    "ConstraintUnmet",
    "DEFAULT_MODELS",
    "DeadlockDetected",
    "DeterministicWork",
    "FixedAngle",
    "FixedCoord",
    "HybridEvaluation",
    "InfeasiblePlan",
    "KINEMATIC_KINDS",
    "KinematicModel",
    "MapLoadError",
    "MemoryOverflow",
    "MultiPortMemory",
    "NoFeasibleSolution",
    "OccupancyGrid",
    "PlannerWork",
    "PolynomialModel",
    "ProblemSpec",
    "RobotState",
    "RrtTree",
    "SeedNode",
    "SimTrace",
    "SplitSolution",
    "TagAssignment",
    "UniformWork",
    "WorldBounds",
    "area_estimate",
    "assign_tags",
    "bfs_distances",
    "block_contribution",
    "collision_free",
    "desk_plan",
    "differential",
    "efficiency",
    "emit_results",
    "emit_tree_plot",
    "enumerate_oracle",
    "eval_model",
    "evaluate_hybrid",
    "extend",
    "feasible_region",
    "fixed_wing",
    "load_grid",
    "load_model_config",
    "make_kinematic_model",
    "make_state",
    "measure_speedup",
    "nearest_box",
    "paper_plan",
    "parse_grid_text",
    "quadcopter",
    "read_results",
    "read_tree_dump",
    "resolve_map",
    "rrt_step",
    "run_benchmark",
    "run_simulation",
    "sample_state",
    "screen_seeds",
    "seed_nodes",
    "seed_root_state",
    "solve_split",
    "wrap_angle",
    "write_grid_text",
    "write_tree_dump",
]

__version__ = "0.1.0"
