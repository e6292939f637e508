"""Split N seed nodes between the combinatorial and hierarchical blocks.

Each seed gets an estimated exploration area: the map's free area divided by
the sum of breadth-first distances from the seed to every reachable free
cell. Seeds promising the largest areas are worth the combinatorial block's
power, so the top m by area are tagged combinatorial and the rest
hierarchical. The mean area of the combinatorial group must clear the
designer threshold alpha; when it cannot, `ConstraintUnmet` still carries the
best assignment so the caller can decide between proceeding and re-seeding.

Distances use 4-connected BFS by default (8-connected available via the
`connectivity` argument). Unreachable cells are left out of the distance sum:
treating them as infinite would zero out every seed in a multi-chamber map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .grid import OccupancyGrid

UNREACHABLE = -1


class DegenerateArea(ValueError):
    """The seed reaches no other cell, so the area estimate divides by zero."""


class ConstraintUnmet(RuntimeError):
    """The combinatorial group's mean area fell below alpha."""

    def __init__(self, assignment: "TagAssignment", alpha: float):
        self.assignment = assignment
        self.alpha = alpha
        super().__init__(
            f"mean combinatorial area {assignment.mean_combi_area:.6g} < alpha {alpha:.6g}"
        )


@dataclass(frozen=True)
class SeedNode:
    """A starting cell for one RRT module."""

    id: int
    position: Tuple[int, int]  # (row, col)


@dataclass(frozen=True)
class AreaEstimate:
    seed_id: int
    distance_sum: float
    area: float


@dataclass(frozen=True)
class TagAssignment:
    combinatorial_ids: Tuple[int, ...]
    hierarchical_ids: Tuple[int, ...]
    mean_combi_area: float


def _check_seed(grid: OccupancyGrid, seed: SeedNode) -> None:
    row, col = seed.position
    if not grid.in_bounds(row, col):
        raise ValueError(f"seed {seed.id} at {seed.position} is outside the grid")
    if not grid.is_free(row, col):
        raise ValueError(f"seed {seed.id} at {seed.position} sits on an obstacle")


def _grow(mask: np.ndarray, connectivity: int) -> np.ndarray:
    out = np.zeros_like(mask)
    out[1:, :] |= mask[:-1, :]
    out[:-1, :] |= mask[1:, :]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    if connectivity == 8:
        out[1:, 1:] |= mask[:-1, :-1]
        out[1:, :-1] |= mask[:-1, 1:]
        out[:-1, 1:] |= mask[1:, :-1]
        out[:-1, :-1] |= mask[1:, 1:]
    return out


def bfs_distances(
    grid: OccupancyGrid, seed: SeedNode, connectivity: int = 4
) -> np.ndarray:
    """Distance in cell steps from the seed to every free cell.

    Obstacles and unreachable free cells hold UNREACHABLE (-1). Implemented
    as a frontier sweep: one vectorized dilation per BFS layer.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    _check_seed(grid, seed)
    free = ~grid.cells
    dist = np.full(grid.cells.shape, UNREACHABLE, dtype=np.int32)
    frontier = np.zeros(grid.cells.shape, dtype=bool)
    frontier[seed.position] = True
    dist[seed.position] = 0
    step = 0
    while frontier.any():
        step += 1
        frontier = _grow(frontier, connectivity) & free & (dist == UNREACHABLE)
        dist[frontier] = step
    return dist


def area_estimate(
    grid: OccupancyGrid, seed: SeedNode, connectivity: int = 4
) -> AreaEstimate:
    """Free map area over total BFS distance (the seed's own cell adds 0)."""
    dist = bfs_distances(grid, seed, connectivity)
    distance_sum = float(dist[dist > 0].sum())
    if distance_sum == 0.0:
        raise DegenerateArea(f"seed {seed.id} at {seed.position} reaches no other cell")
    a_map = grid.free_cell_count * grid.cell_size**2
    return AreaEstimate(seed_id=seed.id, distance_sum=distance_sum, area=a_map / distance_sum)


def assign_tags(
    grid: OccupancyGrid,
    seeds: Sequence[SeedNode],
    m: int,
    alpha: float,
    connectivity: int = 4,
) -> TagAssignment:
    """Tag the top m seeds by area combinatorial, the rest hierarchical.

    Ties in area break toward the smaller seed id, so the partition does not
    depend on input order. Raises ConstraintUnmet (carrying the assignment)
    when the combinatorial group's mean area is below alpha.
    """
    if not seeds:
        raise ValueError("no seeds to assign")
    if not 1 <= m <= len(seeds):
        raise ValueError(f"m must be in [1, {len(seeds)}], got {m}")
    ids = [s.id for s in seeds]
    if len(set(ids)) != len(ids):
        raise ValueError("seed ids are not distinct")
    if len({s.position for s in seeds}) != len(seeds):
        raise ValueError("seed positions are not distinct")
    estimates = [area_estimate(grid, s, connectivity) for s in seeds]
    ranked = sorted(estimates, key=lambda e: (-e.area, e.seed_id))
    assignment = TagAssignment(
        combinatorial_ids=tuple(e.seed_id for e in ranked[:m]),
        hierarchical_ids=tuple(e.seed_id for e in ranked[m:]),
        mean_combi_area=sum(e.area for e in ranked[:m]) / m,
    )
    if assignment.mean_combi_area < alpha:
        raise ConstraintUnmet(assignment, alpha)
    return assignment


def seed_nodes(grid: OccupancyGrid, n: int, rng_seed: int) -> List[SeedNode]:
    """Place n distinct seeds on free cells, stratified over the grid.

    The grid is split into n near-equal rectangles (rows x cols chosen as the
    divisor pair of n closest to square) and one seed is drawn uniformly from
    each stratum's untaken free cells, falling back to a global uniform draw
    when a stratum has none. Deterministic per rng_seed.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > grid.free_cell_count:
        raise ValueError(f"n={n} exceeds {grid.free_cell_count} free cells")
    rows_n = 1
    for d in range(1, int(n**0.5) + 1):
        if n % d == 0:
            rows_n = d
    cols_n = n // rows_n
    row_edges = np.linspace(0, grid.height, rows_n + 1).astype(int)
    col_edges = np.linspace(0, grid.width, cols_n + 1).astype(int)

    available = ~grid.cells.copy()
    rng = np.random.default_rng(rng_seed)
    out: List[SeedNode] = []
    for i in range(n):
        r0, r1 = row_edges[i // cols_n], row_edges[i // cols_n + 1]
        c0, c1 = col_edges[i % cols_n], col_edges[i % cols_n + 1]
        local = np.flatnonzero(available[r0:r1, c0:c1])
        if local.size:
            pick = int(local[rng.integers(local.size)])
            row = r0 + pick // max(c1 - c0, 1)
            col = c0 + pick % max(c1 - c0, 1)
        else:
            flat = np.flatnonzero(available)
            pick = int(flat[rng.integers(flat.size)])
            row, col = divmod(pick, grid.width)
        available[row, col] = False
        out.append(SeedNode(id=i, position=(int(row), int(col))))
    return out
