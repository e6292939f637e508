"""Figure rendering for benchmark results and explored trees.

The delimited outputs stay plain data; this module turns them into PNG
files after the fact. Three metric figures (speedup, model power,
efficiency, each versus generator count) come from benchmark rows, and a
map overlay figure comes from a tree plot-data file. Rendering is
headless and reproducible: fixed figure geometry, fixed colors, and a
pinned metadata block so repeated runs write identical bytes.
"""

from __future__ import annotations

from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import BenchmarkRow
from .grid import OccupancyGrid

# stable visual identity per fabric and per tree block
ARCH_COLORS = {
    "combinatorial": "#4c72b0",
    "hierarchical": "#dd8452",
    "hybrid": "#55a868",
}
BLOCK_COLORS = {
    "combinatorial": "#2ca02c",
    "hierarchical": "#e377c2",
}
_FALLBACK_COLORS = ("#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#7f7f7f")

# pinned so the PNG text chunk does not vary with the library version
_PNG_METADATA = {"Software": "rrtarch report"}

_METRICS = (
    ("speedup", "speedup_mean", "speedup T(1)/T(n)"),
    ("power", "power_model_w", "model power [W]"),
    ("efficiency", "efficiency", "efficiency [1/W]"),
)


class TreePlotRecord(NamedTuple):
    rrt: int
    node: int
    parent: int
    coords: Tuple[float, ...]
    block: str


def read_tree_plot(path) -> List[TreePlotRecord]:
    """Parse a plot-data file written by emit_tree_plot."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty plot-data file")
    header = lines[0].split()
    if header[:3] != ["rrt", "id", "parent"] or header[-1] != "block":
        raise ValueError(f"{path}: unrecognized header {lines[0]!r}")
    dims = len(header) - 4
    if dims not in (2, 3):
        raise ValueError(f"{path}: expected 2 or 3 coordinate columns")
    records = []
    for number, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != dims + 4:
            raise ValueError(f"{path}:{number}: expected {dims + 4} fields")
        records.append(
            TreePlotRecord(
                int(fields[0]),
                int(fields[1]),
                int(fields[2]),
                tuple(float(v) for v in fields[3:3 + dims]),
                fields[-1],
            )
        )
    if not records:
        raise ValueError(f"{path}: no nodes")
    return records


def _save(fig, path) -> None:
    fig.savefig(path, metadata=_PNG_METADATA)
    plt.close(fig)


def render_results_figures(
    rows: Sequence[BenchmarkRow],
    out_dir,
    stem: str = "bench",
    dpi: int = 120,
) -> List[str]:
    """Render one figure per metric; returns the written paths.

    Each figure is a grid of panels, kinematic models down and maps
    across, with one line per architecture versus generator count.
    """
    if not rows:
        raise ValueError("no rows to render")
    maps = sorted({r.map for r in rows})
    kins = sorted({r.kinematics for r in rows})
    archs = sorted({r.arch for r in rows})
    written = []
    for name, field, ylabel in _METRICS:
        fig, axes = plt.subplots(
            len(kins),
            len(maps),
            squeeze=False,
            figsize=(4.0 * len(maps), 3.0 * len(kins)),
            dpi=dpi,
        )
        for i, kin in enumerate(kins):
            for j, map_name in enumerate(maps):
                ax = axes[i][j]
                cell = [r for r in rows if r.map == map_name and r.kinematics == kin]
                for arch in archs:
                    series = sorted(
                        (r.n, getattr(r, field)) for r in cell if r.arch == arch
                    )
                    if not series:
                        continue
                    ax.plot(
                        [n for n, _ in series],
                        [v for _, v in series],
                        marker="o",
                        color=ARCH_COLORS.get(arch, "#333333"),
                        label=arch,
                    )
                ns = sorted({r.n for r in cell})
                if len(ns) > 1 and ns[0] > 0:
                    ax.set_xscale("log", base=2)
                ax.set_xticks(ns)
                ax.set_xticklabels(str(n) for n in ns)
                ax.set_title(f"{map_name} / {kin}", fontsize=9)
                ax.set_xlabel("generators n")
                ax.set_ylabel(ylabel)
                ax.grid(True, alpha=0.3)
        handles, labels = axes[0][0].get_legend_handles_labels()
        if handles:
            fig.legend(handles, labels, loc="upper right", fontsize=8)
        fig.tight_layout()
        path = str(out_dir) + f"/{stem}_{name}.png"
        _save(fig, path)
        written.append(path)
    return written


def render_tree_figure(
    source,
    out_path,
    grid: Optional[OccupancyGrid] = None,
    dpi: int = 120,
) -> None:
    """Draw explored trees over an optional occupancy map.

    `source` is a plot-data path or an already-parsed record list.
    Three-dimensional dumps are projected onto the x-y plane. Edges are
    colored by block label so the two fabrics' coverage is visually
    separable.
    """
    records = source if isinstance(source, list) else read_tree_plot(source)
    by_node: Dict[Tuple[int, int], TreePlotRecord] = {
        (r.rrt, r.node): r for r in records
    }
    blocks = []
    for record in records:
        if record.block not in blocks:
            blocks.append(record.block)
    colors = {}
    spare = iter(_FALLBACK_COLORS)
    for block in blocks:
        colors[block] = BLOCK_COLORS.get(block) or next(spare)

    fig, ax = plt.subplots(figsize=(6.0, 6.0), dpi=dpi)
    if grid is not None:
        rows, cols = grid.cells.shape
        ax.imshow(
            grid.cells,
            cmap="gray_r",
            origin="lower",
            extent=(0.0, cols * grid.cell_size, 0.0, rows * grid.cell_size),
            interpolation="none",
        )
    for record in records:
        x, y = record.coords[0], record.coords[1]
        color = colors[record.block]
        if record.parent >= 0:
            parent = by_node[(record.rrt, record.parent)]
            ax.plot(
                [parent.coords[0], x],
                [parent.coords[1], y],
                color=color,
                linewidth=0.6,
            )
        else:
            ax.plot([x], [y], marker="s", color=color, markersize=4)
    handles = [
        plt.Line2D([0], [0], color=colors[b], linewidth=2, label=b) for b in blocks
    ]
    ax.legend(handles=handles, fontsize=8, loc="upper right")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    _save(fig, out_path)
