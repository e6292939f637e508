"""RRT exploration core with hardware-faithful fixed-point state.

A tree grows by sample -> nearest -> extend -> collision-check iterations.
States hold Q24.8 coordinates and a Q3.13 heading; all committed geometry is
quantized, while candidate scoring inside `extend` runs in doubles (the
hardware evaluates trigonometry in dedicated cores; emulating their rounding
adds nothing to the architecture questions this package studies).

Nearest-neighbor lookup is an expanding-box search over a spatial hash of
(x, y) buckets. The box grows ring by ring until every unscanned bucket lies
strictly farther than the best candidate, so the result always equals the
brute-force argmin, ties resolved toward the earlier node index.

Three kinematic models ship: differential drive (unicycle), quadcopter
(decoupled velocity point with bounded climb), and fixed wing (Dubins-style
arcs with a minimum airspeed, so it can never turn in place). Each `extend`
scores a small deterministic control grid, default 11 samples per axis.

Collision checking walks every cell a segment touches (conservative
supercover, exact integer/rational arithmetic) and accepts only free cells.
The traversal requires cell_size * 256 to be an integer so cell boundaries
sit on representable raw coordinates; the shipped maps use cell_size 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .fixedpoint import FixedAngle, FixedCoord, wrap_angle
from .grid import OccupancyGrid

_DIFFERENTIAL = "differential"
_QUADCOPTER = "quadcopter"
_FIXED_WING = "fixed-wing"

KINEMATIC_KINDS = (_DIFFERENTIAL, _QUADCOPTER, _FIXED_WING)


@dataclass(frozen=True)
class RobotState:
    """Quantized pose: (x, y[, z]) coordinates plus heading angles."""

    coordinates: Tuple[FixedCoord, ...]
    angles: Tuple[FixedAngle, ...]

    @property
    def dof(self) -> int:
        return len(self.coordinates) + len(self.angles)

    def coordinate_values(self) -> Tuple[float, ...]:
        return tuple(c.value for c in self.coordinates)

    def coordinate_raws(self) -> Tuple[int, ...]:
        return tuple(c.raw for c in self.coordinates)

    @property
    def heading(self) -> float:
        return self.angles[0].value


def make_state(coords: Sequence[float], angles: Sequence[float]) -> RobotState:
    return RobotState(
        coordinates=tuple(FixedCoord.from_real(v) for v in coords),
        angles=tuple(FixedAngle.from_real(wrap_angle(a)) for a in angles),
    )


@dataclass(frozen=True)
class KinematicModel:
    """A platform's control bounds and integration step.

    `bounds` keys depend on the kind; use the factory functions below rather
    than building instances by hand.
    """

    kind: str
    step_duration: float
    bounds: Tuple[Tuple[str, float], ...]
    candidates_per_axis: int = 11

    def bound(self, key: str) -> float:
        for k, v in self.bounds:
            if k == key:
                return v
        raise KeyError(f"{self.kind} model has no bound {key!r}")

    @property
    def coordinate_count(self) -> int:
        return 2 if self.kind == _DIFFERENTIAL else 3

    @property
    def dof(self) -> int:
        return self.coordinate_count + 1


def _validate_common(kind: str, step_duration: float, candidates: int, bounds: dict):
    if step_duration <= 0.0:
        raise ValueError(f"step_duration must be positive, got {step_duration}")
    if candidates < 1:
        raise ValueError(f"candidates_per_axis must be >= 1, got {candidates}")
    for key, value in bounds.items():
        if value <= 0.0:
            raise ValueError(f"{kind} bound {key} must be strictly positive, got {value}")


def differential(
    wheel_speed_max: float = 4.0,
    wheel_base: float = 2.0,
    step_duration: float = 1.0,
    candidates_per_axis: int = 11,
) -> KinematicModel:
    bounds = {"wheel_speed_max": wheel_speed_max, "wheel_base": wheel_base}
    _validate_common(_DIFFERENTIAL, step_duration, candidates_per_axis, bounds)
    return KinematicModel(
        _DIFFERENTIAL, step_duration, tuple(bounds.items()), candidates_per_axis
    )


def quadcopter(
    speed_max: float = 4.0,
    climb_max: float = 2.0,
    yaw_rate_max: float = 1.5,
    step_duration: float = 1.0,
    candidates_per_axis: int = 11,
) -> KinematicModel:
    bounds = {"speed_max": speed_max, "climb_max": climb_max, "yaw_rate_max": yaw_rate_max}
    _validate_common(_QUADCOPTER, step_duration, candidates_per_axis, bounds)
    return KinematicModel(
        _QUADCOPTER, step_duration, tuple(bounds.items()), candidates_per_axis
    )


def fixed_wing(
    airspeed_min: float = 2.0,
    airspeed_max: float = 6.0,
    turn_radius_min: float = 4.0,
    climb_angle_max: float = 0.35,
    step_duration: float = 1.0,
    candidates_per_axis: int = 11,
) -> KinematicModel:
    bounds = {
        "airspeed_min": airspeed_min,
        "airspeed_max": airspeed_max,
        "turn_radius_min": turn_radius_min,
        "climb_angle_max": climb_angle_max,
    }
    _validate_common(_FIXED_WING, step_duration, candidates_per_axis, bounds)
    if airspeed_min > airspeed_max:
        raise ValueError(
            f"airspeed_min {airspeed_min} exceeds airspeed_max {airspeed_max}"
        )
    return KinematicModel(
        _FIXED_WING, step_duration, tuple(bounds.items()), candidates_per_axis
    )


def make_kinematic_model(kind: str, **overrides) -> KinematicModel:
    factories = {_DIFFERENTIAL: differential, _QUADCOPTER: quadcopter, _FIXED_WING: fixed_wing}
    if kind not in factories:
        raise ValueError(f"unknown kinematic kind {kind!r}, expected one of {KINEMATIC_KINDS}")
    return factories[kind](**overrides)


# ----------------------------------------------------------------------------
# World bounds and sampling
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class WorldBounds:
    """Half-open coordinate extents: lo <= value < hi per axis."""

    extents: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        for lo, hi in self.extents:
            if hi < lo:
                raise ValueError(f"bad extent [{lo}, {hi})")

    @classmethod
    def from_grid(cls, grid: OccupancyGrid, model: KinematicModel, z_extent: float = 64.0):
        xy = (
            (0.0, grid.width * grid.cell_size),
            (0.0, grid.height * grid.cell_size),
        )
        if model.coordinate_count == 3:
            return cls(xy + ((0.0, z_extent),))
        return cls(xy)


def sample_state(model: KinematicModel, bounds: WorldBounds, rng: np.random.Generator) -> RobotState:
    """Uniform state in bounds, quantized; heading uniform over (-pi, pi]."""
    if len(bounds.extents) != model.coordinate_count:
        raise ValueError(
            f"{model.kind} needs {model.coordinate_count} coordinate extents, "
            f"got {len(bounds.extents)}"
        )
    coords = [float(rng.uniform(lo, hi)) if hi > lo else lo for lo, hi in bounds.extents]
    heading = float(rng.uniform(-math.pi, math.pi))
    return make_state(coords, [heading])


# ----------------------------------------------------------------------------
# Tree and nearest-neighbor search
# ----------------------------------------------------------------------------

_BUCKET_SHIFT = 11  # 2048 raw units = 8 map units per bucket side


class RrtTree:
    """Append-only node store with a spatial hash over (x, y)."""

    def __init__(self, root: RobotState):
        self.states: List[RobotState] = []
        self.parents: List[int] = []
        self._xs: List[int] = []
        self._ys: List[int] = []
        self._zs: List[int] = []
        self._buckets: Dict[Tuple[int, int], List[int]] = {}
        self._bucket_lo = (0, 0)
        self._bucket_hi = (0, 0)
        self.add(root, -1)

    def __len__(self) -> int:
        return len(self.states)

    def add(self, state: RobotState, parent: int) -> int:
        index = len(self.states)
        if not -1 <= parent < index:
            raise ValueError(f"parent {parent} invalid for node {index}")
        if index == 0 and parent != -1:
            raise ValueError("root must have parent -1")
        raws = state.coordinate_raws()
        self.states.append(state)
        self.parents.append(parent)
        self._xs.append(raws[0])
        self._ys.append(raws[1])
        self._zs.append(raws[2] if len(raws) > 2 else 0)
        key = (raws[0] >> _BUCKET_SHIFT, raws[1] >> _BUCKET_SHIFT)
        self._buckets.setdefault(key, []).append(index)
        if index == 0:
            self._bucket_lo = self._bucket_hi = key
        else:
            self._bucket_lo = (min(self._bucket_lo[0], key[0]), min(self._bucket_lo[1], key[1]))
            self._bucket_hi = (max(self._bucket_hi[0], key[0]), max(self._bucket_hi[1], key[1]))
        return index


def nearest_box(tree: RrtTree, query: RobotState) -> int:
    """Index of the node nearest to `query` over position components.

    Expanding-box search: scan the query's bucket, then rings of buckets
    around it, until every unscanned bucket is strictly farther than the
    best squared distance found. Integer arithmetic throughout, so the
    answer matches a brute-force scan exactly (ties: lowest index).
    """
    if len(tree) == 0:
        raise ValueError("tree is empty")
    raws = query.coordinate_raws()
    qx, qy = raws[0], raws[1]
    qz = raws[2] if len(raws) > 2 else 0
    bx, by = qx >> _BUCKET_SHIFT, qy >> _BUCKET_SHIFT
    side = 1 << _BUCKET_SHIFT

    best_idx = -1
    best_sq = None
    lo, hi = tree._bucket_lo, tree._bucket_hi
    # rings that cannot touch the occupied bucket bounding box hold nothing,
    # so start at the first radius whose box reaches it and clamp each ring
    r = max(0, lo[0] - bx, bx - hi[0], lo[1] - by, by - hi[1])
    while True:
        if r == 0:
            ring = [(bx, by)]
        else:
            ring = []
            cx_lo, cx_hi = max(bx - r, lo[0]), min(bx + r, hi[0])
            if lo[1] <= by - r <= hi[1]:
                ring.extend((cx, by - r) for cx in range(cx_lo, cx_hi + 1))
            if lo[1] <= by + r <= hi[1]:
                ring.extend((cx, by + r) for cx in range(cx_lo, cx_hi + 1))
            cy_lo, cy_hi = max(by - r + 1, lo[1]), min(by + r - 1, hi[1])
            if lo[0] <= bx - r <= hi[0]:
                ring.extend((bx - r, cy) for cy in range(cy_lo, cy_hi + 1))
            if lo[0] <= bx + r <= hi[0]:
                ring.extend((bx + r, cy) for cy in range(cy_lo, cy_hi + 1))
        for key in ring:
            for idx in tree._buckets.get(key, ()):
                dx = tree._xs[idx] - qx
                dy = tree._ys[idx] - qy
                dz = tree._zs[idx] - qz
                d_sq = dx * dx + dy * dy + dz * dz
                if best_sq is None or d_sq < best_sq or (d_sq == best_sq and idx < best_idx):
                    best_sq = d_sq
                    best_idx = idx
        covers_all = (
            bx - r <= tree._bucket_lo[0]
            and by - r <= tree._bucket_lo[1]
            and bx + r >= tree._bucket_hi[0]
            and by + r >= tree._bucket_hi[1]
        )
        if best_sq is not None:
            # distance from the query to the edge of the scanned box
            edge = min(
                qx - ((bx - r) << _BUCKET_SHIFT),
                ((bx + r + 1) << _BUCKET_SHIFT) - qx,
                qy - ((by - r) << _BUCKET_SHIFT),
                ((by + r + 1) << _BUCKET_SHIFT) - qy,
            )
            if best_sq < edge * edge or covers_all:
                return best_idx
        elif covers_all:
            return best_idx  # unreachable: tree nonempty means some bucket hit
        r += 1


# ----------------------------------------------------------------------------
# Kinematic extension
# ----------------------------------------------------------------------------


class Blocked:
    """Sentinel: no sampled control was admissible for this extension."""

    def __repr__(self):
        return "Blocked()"


BLOCKED = Blocked()


def _sym_linspace(limit: float, n: int) -> np.ndarray:
    # exactly antisymmetric grid: guarantees a true zero candidate and
    # sign-mirrored pairs, which plain linspace loses to rounding
    a = np.linspace(-limit, limit, n)
    return (a - a[::-1]) / 2.0


def _wrap_array(a: np.ndarray) -> np.ndarray:
    return np.pi - np.remainder(np.pi - a, 2.0 * np.pi)


class _ControlGrid:
    """Candidate (v, omega) pairs with the state-independent arc terms baked in.

    Built once per model and shared across every `extend` call, so the arrays
    are frozen read-only.
    """

    __slots__ = ("v", "omega", "straight", "radius", "dtheta", "v_dt")

    def __init__(self, v: np.ndarray, omega: np.ndarray, dt: float):
        self.v = v
        self.omega = omega
        self.straight = np.abs(omega) < 1e-12
        self.radius = v / np.where(self.straight, 1.0, omega)
        self.dtheta = omega * dt
        self.v_dt = v * dt
        for a in (self.v, self.omega, self.straight, self.radius, self.dtheta, self.v_dt):
            a.setflags(write=False)


@lru_cache(maxsize=64)
def _differential_controls(model: KinematicModel) -> _ControlGrid:
    w = model.bound("wheel_speed_max")
    base = model.bound("wheel_base")
    speeds = _sym_linspace(w, model.candidates_per_axis)
    vl, vr = np.meshgrid(speeds, speeds, indexing="ij")
    vl, vr = vl.ravel(), vr.ravel()
    return _ControlGrid((vl + vr) / 2.0, (vr - vl) / base, model.step_duration)


@lru_cache(maxsize=64)
def _fixed_wing_controls(model: KinematicModel) -> _ControlGrid:
    speeds = np.linspace(
        model.bound("airspeed_min"), model.bound("airspeed_max"), model.candidates_per_axis
    )
    fractions = _sym_linspace(1.0, model.candidates_per_axis)
    v, frac = np.meshgrid(speeds, fractions, indexing="ij")
    v, frac = v.ravel(), frac.ravel()
    # |turn rate| capped by airspeed over min radius
    return _ControlGrid(v, frac * v / model.bound("turn_radius_min"), model.step_duration)


@lru_cache(maxsize=64)
def _axis_offsets(model: KinematicModel, vmax: float) -> np.ndarray:
    offsets = _sym_linspace(vmax, model.candidates_per_axis) * model.step_duration
    offsets.setflags(write=False)
    return offsets


def _arc_endpoints(x, y, theta, controls: _ControlGrid):
    cos0, sin0 = math.cos(theta), math.sin(theta)
    ntheta = theta + controls.dtheta
    nx = np.where(
        controls.straight,
        x + controls.v_dt * cos0,
        x + controls.radius * (np.sin(ntheta) - sin0),
    )
    ny = np.where(
        controls.straight,
        y + controls.v_dt * sin0,
        y - controls.radius * (np.cos(ntheta) - cos0),
    )
    return nx, ny, ntheta


def _pick(scores: np.ndarray, ntheta: np.ndarray, toward_heading: float) -> int:
    """Smallest score; among exact score ties, smallest heading error, then first."""
    best = scores.min()
    tied = np.flatnonzero(scores == best)
    if tied.size == 1:
        return int(tied[0])
    err = np.abs(_wrap_array(ntheta[tied] - toward_heading))
    return int(tied[np.argmin(err)])


def _extend_differential(model, state, toward):
    x, y = state.coordinate_values()
    theta = state.heading
    tx, ty = toward.coordinate_values()[:2]

    nx, ny, ntheta = _arc_endpoints(x, y, theta, _differential_controls(model))
    scores = (nx - tx) ** 2 + (ny - ty) ** 2
    k = _pick(scores, ntheta, toward.heading)
    return make_state((float(nx[k]), float(ny[k])), [float(ntheta[k])])


def _extend_quadcopter(model, state, toward):
    s = model.bound("speed_max")
    climb = model.bound("climb_max")
    yaw_rate = model.bound("yaw_rate_max")
    dt = model.step_duration
    x, y, z = state.coordinate_values()
    tx, ty, tz = toward.coordinate_values()

    # per-axis velocity bounds make the position score separable
    def axis_best(start, target, vmax):
        ends = start + _axis_offsets(model, vmax)
        return float(ends[np.argmin((ends - target) ** 2)])

    nx = axis_best(x, tx, s)
    ny = axis_best(y, ty, s)
    nz = axis_best(z, tz, climb)

    # yaw tracks the bearing to the target, rate-limited, unscored
    dx, dy = tx - x, ty - y
    if dx * dx + dy * dy > 1e-18:
        desired = math.atan2(dy, dx)
        step = wrap_angle(desired - state.heading)
        step = min(max(step, -yaw_rate * dt), yaw_rate * dt)
        heading = state.heading + step
    else:
        heading = state.heading
    return make_state((nx, ny, nz), [heading])


def _extend_fixed_wing(model, state, toward):
    gamma = model.bound("climb_angle_max")
    x, y, z = state.coordinate_values()
    theta = state.heading
    tx, ty, tz = toward.coordinate_values()

    controls = _fixed_wing_controls(model)
    nx, ny, ntheta = _arc_endpoints(x, y, theta, controls)
    scores = (nx - tx) ** 2 + (ny - ty) ** 2
    k = _pick(scores, ntheta, toward.heading)

    # the climb grid scales with the chosen airspeed; one grid per candidate
    # speed, so the offset cache covers all of them
    climb_cap = float(controls.v[k]) * math.tan(gamma)
    ends = z + _axis_offsets(model, climb_cap)
    nz = float(ends[np.argmin((ends - tz) ** 2)])
    return make_state((float(nx[k]), float(ny[k]), nz), [float(ntheta[k])])


def extend(
    model: KinematicModel, state: RobotState, toward: RobotState
) -> Union[RobotState, Blocked]:
    """One integration step with controls chosen to best approach `toward`."""
    if len(state.coordinates) != model.coordinate_count:
        raise ValueError(
            f"state has {len(state.coordinates)} coordinates, "
            f"{model.kind} expects {model.coordinate_count}"
        )
    if model.candidates_per_axis < 1:
        return BLOCKED
    if model.kind == _DIFFERENTIAL:
        return _extend_differential(model, state, toward)
    if model.kind == _QUADCOPTER:
        return _extend_quadcopter(model, state, toward)
    return _extend_fixed_wing(model, state, toward)


# ----------------------------------------------------------------------------
# Collision checking
# ----------------------------------------------------------------------------


def _cell_width_raw(grid: OccupancyGrid) -> int:
    width = grid.cell_size * 256.0
    rounded = round(width)
    if abs(width - rounded) > 1e-9 or rounded < 1:
        raise ValueError(
            f"cell_size {grid.cell_size} is not a multiple of the 1/256 coordinate resolution"
        )
    return int(rounded)


def _require_inside(grid: OccupancyGrid, state: RobotState, label: str) -> Tuple[int, int]:
    raws = state.coordinate_raws()
    x, y = raws[0], raws[1]
    w = _cell_width_raw(grid)
    if not (0 <= x < grid.width * w and 0 <= y < grid.height * w):
        raise ValueError(f"{label} endpoint ({x / 256.0}, {y / 256.0}) outside the map")
    return x, y


def _segment_cells(x0: int, y0: int, x1: int, y1: int, w: int):
    """Every (col, row) cell the segment touches, conservatively.

    Walks boundary crossings in exact rational order. A crossing time is
    (k*w - x0)/dx; both axes are scaled onto the common denominator
    |dx|*|dy|, so ordering and corner coincidences compare plain ints.
    When the segment passes exactly through a cell corner, both side
    cells are included before stepping diagonally (supercover).
    """
    col, row = x0 // w, y0 // w
    end_col, end_row = x1 // w, y1 // w
    cells = {(col, row), (end_col, end_row)}
    dx, dy = x1 - x0, y1 - y0

    xs = []
    if dx:
        step = 1 if dx > 0 else -1
        first = col + 1 if dx > 0 else col
        last = end_col + 1 if dx < 0 else end_col
        den, scale = abs(dx), abs(dy) if dy else 1
        for k in range(first, last + step, step):
            num = (k * w - x0) * step  # numerator of t over |dx|
            if 0 < num < den:
                xs.append((num * scale, "x", step))
    ys = []
    if dy:
        step = 1 if dy > 0 else -1
        first = row + 1 if dy > 0 else row
        last = end_row + 1 if dy < 0 else end_row
        den, scale = abs(dy), abs(dx) if dx else 1
        for k in range(first, last + step, step):
            num = (k * w - y0) * step
            if 0 < num < den:
                ys.append((num * scale, "y", step))

    events = sorted(xs + ys, key=lambda e: e[0])
    i = 0
    while i < len(events):
        t = events[i][0]
        group = [events[i]]
        while i + 1 < len(events) and events[i + 1][0] == t:
            i += 1
            group.append(events[i])
        if len(group) == 2:
            # corner hit: include both orthogonal neighbors, then go diagonal
            sx = next(g[2] for g in group if g[1] == "x")
            sy = next(g[2] for g in group if g[1] == "y")
            cells.add((col + sx, row))
            cells.add((col, row + sy))
            col += sx
            row += sy
        elif group[0][1] == "x":
            col += group[0][2]
        else:
            row += group[0][2]
        cells.add((col, row))
        i += 1
    return cells


def collision_free(grid: OccupancyGrid, a: RobotState, b: RobotState) -> bool:
    """True iff the (x, y) segment from a to b touches only free cells."""
    x0, y0 = _require_inside(grid, a, "start")
    x1, y1 = _require_inside(grid, b, "end")
    w = _cell_width_raw(grid)
    for col, row in _segment_cells(x0, y0, x1, y1, w):
        if grid.cells[row, col]:
            return False
    return True


# ----------------------------------------------------------------------------
# One planner iteration
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CommittedNode:
    index: int
    parent: int
    state: RobotState


@dataclass(frozen=True)
class Rejected:
    reason: str  # "blocked" | "out-of-bounds" | "collision"


def rrt_step(
    tree: RrtTree,
    grid: OccupancyGrid,
    model: KinematicModel,
    rng: np.random.Generator,
    bounds: Optional[WorldBounds] = None,
) -> Union[CommittedNode, Rejected]:
    """sample -> nearest -> extend -> collision gate -> append."""
    if bounds is None:
        bounds = WorldBounds.from_grid(grid, model)
    target = sample_state(model, bounds, rng)
    near_idx = nearest_box(tree, target)
    new_state = extend(model, tree.states[near_idx], target)
    if isinstance(new_state, Blocked):
        return Rejected("blocked")
    w = _cell_width_raw(grid)
    raws = new_state.coordinate_raws()
    if not (0 <= raws[0] < grid.width * w and 0 <= raws[1] < grid.height * w):
        return Rejected("out-of-bounds")
    if len(raws) > 2:
        z_lo, z_hi = bounds.extents[2]
        if not z_lo <= new_state.coordinates[2].value < z_hi:
            return Rejected("out-of-bounds")
    if not collision_free(grid, tree.states[near_idx], new_state):
        return Rejected("collision")
    index = tree.add(new_state, near_idx)
    return CommittedNode(index=index, parent=near_idx, state=new_state)


def seed_root_state(
    grid: OccupancyGrid, cell: Tuple[int, int], model: KinematicModel
) -> RobotState:
    """Center-of-cell state for a tagging seed position (row, col)."""
    row, col = cell
    if not grid.in_bounds(row, col) or not grid.is_free(row, col):
        raise ValueError(f"seed cell {cell} is not a free cell")
    x = (col + 0.5) * grid.cell_size
    y = (row + 0.5) * grid.cell_size
    coords = (x, y) if model.coordinate_count == 2 else (x, y, 0.0)
    return make_state(coords, [0.0])


# ----------------------------------------------------------------------------
# Tree dumps
# ----------------------------------------------------------------------------


def write_tree_dump(tree: RrtTree, path) -> None:
    """One node per line: id parent x y [z] [angles...], exact decimals."""
    with open(path, "w") as fh:
        for i, state in enumerate(tree.states):
            coords = " ".join(f"{c.value:.8f}" for c in state.coordinates)
            angles = " ".join(f"{a.value:.13f}" for a in state.angles)
            fh.write(f"{i} {tree.parents[i]} {coords} {angles}\n")


@dataclass(frozen=True)
class TreeDumpNode:
    id: int
    parent: int
    state: RobotState


def read_tree_dump(path) -> List[TreeDumpNode]:
    nodes: List[TreeDumpNode] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh):
            parts = line.split()
            if not parts:
                continue
            if len(parts) not in (5, 6):
                raise ValueError(f"{path}:{lineno + 1}: expected 5 or 6 fields, got {len(parts)}")
            node_id, parent = int(parts[0]), int(parts[1])
            coord_count = len(parts) - 3
            coords = [float(v) for v in parts[2 : 2 + coord_count]]
            angle = float(parts[-1])
            if node_id != len(nodes):
                raise ValueError(f"{path}:{lineno + 1}: ids must be dense, got {node_id}")
            if not -1 <= parent < node_id:
                raise ValueError(f"{path}:{lineno + 1}: parent {parent} not before node {node_id}")
            nodes.append(TreeDumpNode(node_id, parent, make_state(coords, [angle])))
    if not nodes:
        raise ValueError(f"{path}: empty tree dump")
    return nodes
