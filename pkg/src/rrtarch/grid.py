"""Occupancy grids: the map representation shared by tagging and planning.

A grid is a dense boolean array, True marking an obstacle cell. Row-major
indexing with the origin at the top-left corner; positions are (row, col)
pairs. Two on-disk formats load here: plain text with one row per line
('.' free, '#' obstacle) and binary PGM (P5), where a pixel value below 128
reads as an obstacle.

Three synthetic 256x256 maps ship as builders with increasing geometric
constraint: `open_map` (no obstacles), `corridor_map` (serpentine walls), and
`cluttered_map` (seeded scatter of rectangular blocks). They are deterministic
so benchmark output stays reproducible, and `write_grid_text` round-trips any
grid back to the text format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np


class MapLoadError(ValueError):
    """A map file is missing, malformed, or empty."""


@dataclass(frozen=True)
class OccupancyGrid:
    """Boolean obstacle raster plus the physical size of one cell."""

    cells: np.ndarray = field(repr=False)
    cell_size: float = 1.0

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=bool)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise ValueError(f"cells must be a 2-D array, got shape {cells.shape}")
        if not self.cell_size > 0.0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        if cells.all():
            raise ValueError("grid has no free cell")
        cells = cells.copy()
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def free_cell_count(self) -> int:
        return int(self.cells.size - np.count_nonzero(self.cells))

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    def is_free(self, row: int, col: int) -> bool:
        if not self.in_bounds(row, col):
            raise IndexError(f"cell ({row}, {col}) outside {self.height}x{self.width} grid")
        return not bool(self.cells[row, col])


# ----------------------------------------------------------------------------
# Text format
# ----------------------------------------------------------------------------

_FREE_CH = "."
_OBSTACLE_CH = "#"


def parse_grid_text(text: str, cell_size: float = 1.0) -> OccupancyGrid:
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise MapLoadError("empty map text")
    width = len(rows[0])
    cells = np.zeros((len(rows), width), dtype=bool)
    for r, line in enumerate(rows):
        if len(line) != width:
            raise MapLoadError(f"ragged map: row {r} has {len(line)} cells, expected {width}")
        for c, ch in enumerate(line):
            if ch == _OBSTACLE_CH:
                cells[r, c] = True
            elif ch != _FREE_CH:
                raise MapLoadError(f"bad map character {ch!r} at row {r}, col {c}")
    try:
        return OccupancyGrid(cells, cell_size)
    except ValueError as exc:
        raise MapLoadError(str(exc)) from exc


def write_grid_text(grid: OccupancyGrid, path) -> None:
    lines = [
        "".join(_OBSTACLE_CH if grid.cells[r, c] else _FREE_CH for c in range(grid.width))
        for r in range(grid.height)
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ----------------------------------------------------------------------------
# PGM (P5) format
# ----------------------------------------------------------------------------

_PGM_OBSTACLE_BELOW = 128


def _read_pgm_token(data: bytes, pos: int) -> Tuple[bytes, int]:
    # whitespace and '#' comments separate header tokens
    while pos < len(data):
        ch = data[pos : pos + 1]
        if ch == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise MapLoadError("truncated PGM header")
    return data[start:pos], pos


def parse_grid_pgm(data: bytes, cell_size: float = 1.0) -> OccupancyGrid:
    magic, pos = _read_pgm_token(data, 0)
    if magic != b"P5":
        raise MapLoadError(f"not a binary PGM (magic {magic!r})")
    fields = []
    for _ in range(3):
        token, pos = _read_pgm_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError as exc:
            raise MapLoadError(f"bad PGM header token {token!r}") from exc
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MapLoadError(f"bad PGM dimensions {width}x{height}")
    if not 0 < maxval < 256:
        raise MapLoadError(f"unsupported PGM maxval {maxval} (8-bit only)")
    pos += 1  # single whitespace byte after the header
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise MapLoadError(f"truncated PGM raster: {len(raster)} of {width * height} bytes")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    try:
        return OccupancyGrid(pixels < _PGM_OBSTACLE_BELOW, cell_size)
    except ValueError as exc:
        raise MapLoadError(str(exc)) from exc


def load_grid(path, cell_size: float = 1.0) -> OccupancyGrid:
    """Load a map file, sniffing PGM by its magic bytes."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise MapLoadError(f"cannot read map {path}: {exc}") from exc
    if data[:2] == b"P5":
        return parse_grid_pgm(data, cell_size)
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise MapLoadError(f"map {path} is neither PGM nor ASCII text") from exc
    try:
        return parse_grid_text(text, cell_size)
    except MapLoadError as exc:
        raise MapLoadError(f"{path}: {exc}") from exc


# ----------------------------------------------------------------------------
# Builtin maps
# ----------------------------------------------------------------------------

_BUILTIN_SIDE = 256


def open_map() -> OccupancyGrid:
    """256x256, fully free."""
    return OccupancyGrid(np.zeros((_BUILTIN_SIDE, _BUILTIN_SIDE), dtype=bool))


def corridor_map() -> OccupancyGrid:
    """256x256 serpentine: full-width walls with alternating end gaps."""
    cells = np.zeros((_BUILTIN_SIDE, _BUILTIN_SIDE), dtype=bool)
    gap = 24
    for i, row in enumerate(range(42, _BUILTIN_SIDE - 1, 43)):
        cells[row, :] = True
        if i % 2 == 0:
            cells[row, _BUILTIN_SIDE - gap :] = False
        else:
            cells[row, :gap] = False
    return OccupancyGrid(cells)


def cluttered_map() -> OccupancyGrid:
    """256x256 scatter of rectangular blocks, fixed seed, ~15% occupancy."""
    rng = np.random.default_rng(np.random.SeedSequence(20240917))
    cells = np.zeros((_BUILTIN_SIDE, _BUILTIN_SIDE), dtype=bool)
    target = int(0.15 * cells.size)
    while np.count_nonzero(cells) < target:
        h = int(rng.integers(4, 17))
        w = int(rng.integers(4, 17))
        r = int(rng.integers(0, _BUILTIN_SIDE - h))
        c = int(rng.integers(0, _BUILTIN_SIDE - w))
        cells[r : r + h, c : c + w] = True
    return OccupancyGrid(cells)


BUILTIN_MAPS = {
    "open": open_map,
    "corridor": corridor_map,
    "cluttered": cluttered_map,
}


def resolve_map(name_or_path, cell_size: float = 1.0) -> OccupancyGrid:
    """Builtin map name, or a path to a text/PGM map file."""
    builder = BUILTIN_MAPS.get(str(name_or_path))
    if builder is not None:
        grid = builder()
        if cell_size != 1.0:
            grid = OccupancyGrid(grid.cells, cell_size)
        return grid
    return load_grid(name_or_path, cell_size)
