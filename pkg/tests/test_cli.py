"""CLI tests: JSON contracts, exit codes, file outputs, determinism."""

import json
import subprocess
import sys

import pytest

from rrtarch.bench import read_results
from rrtarch.cli import EXIT_ERROR, EXIT_INFEASIBLE, EXIT_OK, main
from rrtarch.grid import load_grid


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------


def test_optimize_feasible(capsys):
    code, out, _ = run_cli(capsys, "optimize", "--n", "64", "--omega", "20")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["feasible"] is True
    assert payload["m"] == 9
    assert abs(payload["p_total"] - 19.586) < 1e-9
    assert payload["j"] == pytest.approx(payload["s_total"] + 1 / payload["p_total"])


def test_optimize_infeasible_exit_code(capsys):
    code, out, _ = run_cli(capsys, "optimize", "--n", "64", "--omega", "10")
    assert code == EXIT_INFEASIBLE
    payload = json.loads(out)
    assert payload["feasible"] is False
    assert payload["m"] is None
    assert payload["min_p_total"] == pytest.approx(15.070928)


def test_optimize_with_model_config(capsys, tmp_path):
    config = tmp_path / "models.cfg"
    config.write_text(
        "hierarchical.speedup = 2.8, 0.41, 0.0019\n"
        "hierarchical.power = 1.8, 0.17\n"
        "combinatorial.speedup = 3.3, 5.7, 0.0, 0.021\n"
        "combinatorial.power = 1.0, 0.79, -0.0048, 1.6e-5\n"
    )
    code, out, _ = run_cli(
        capsys, "optimize", "--n", "64", "--omega", "20", "--models", str(config)
    )
    assert code == EXIT_OK
    assert json.loads(out)["m"] == 9


def test_optimize_missing_argument(capsys):
    code, out, err = run_cli(capsys, "optimize", "--n", "64")
    assert code == EXIT_ERROR
    assert not out
    assert "omega" in err


def test_unknown_subcommand(capsys):
    code, _, err = run_cli(capsys, "fabricate")
    assert code == EXIT_ERROR
    assert "error" in err


# ---------------------------------------------------------------------------
# tag
# ---------------------------------------------------------------------------


def test_tag_emits_assignment(capsys):
    code, out, _ = run_cli(
        capsys, "tag", "--map", "open", "--n", "4", "--m", "2",
        "--alpha", "0", "--seed", "7",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["eq13_satisfied"] is True
    combi = payload["assignment"]["combinatorial"]
    hier = payload["assignment"]["hierarchical"]
    assert len(combi) == 2 and len(hier) == 2
    assert sorted(combi + hier) == [0, 1, 2, 3]
    areas = {entry["seed"]: entry["area"] for entry in payload["areas"]}
    assert len(areas) == 4
    # the block with direct slots takes the largest estimated areas
    assert min(areas[i] for i in combi) >= max(areas[i] for i in hier)
    assert payload["mean"] == pytest.approx(
        sum(areas[i] for i in combi) / len(combi)
    )


def test_tag_reports_unmet_constraint(capsys):
    code, out, _ = run_cli(
        capsys, "tag", "--map", "open", "--n", "4", "--m", "2",
        "--alpha", "1e9", "--seed", "7",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["eq13_satisfied"] is False
    assert len(payload["assignment"]["combinatorial"]) == 2


def test_tag_bad_map_path(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "tag", "--map", str(tmp_path / "void.txt"), "--n", "2",
        "--m", "1", "--alpha", "0", "--seed", "1",
    )
    assert code == EXIT_ERROR
    assert "error" in err


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def test_simulate_summary(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--arch", "combinatorial", "--n", "2",
        "--map", "open", "--kin", "differential", "--nodes", "30", "--seed", "5",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["architecture"] == "combinatorial"
    assert payload["committed_nodes"] >= 30
    assert payload["total_cycles"] > 30
    assert len(payload["bank_occupancy"]) == 2
    assert sum(payload["bank_occupancy"]) == payload["committed_nodes"]


def test_simulate_hybrid_requires_m(capsys):
    code, _, err = run_cli(
        capsys, "simulate", "--arch", "hybrid", "--n", "4",
        "--map", "open", "--kin", "differential", "--nodes", "10", "--seed", "5",
    )
    assert code == EXIT_ERROR
    assert "--m" in err


def test_simulate_m_rejected_for_flat(capsys):
    code, _, err = run_cli(
        capsys, "simulate", "--arch", "combinatorial", "--n", "4", "--m", "2",
        "--map", "open", "--kin", "differential", "--nodes", "10", "--seed", "5",
    )
    assert code == EXIT_ERROR
    assert "hybrid" in err


def test_simulate_writes_trees_and_events(capsys, tmp_path):
    trees = tmp_path / "trees.txt"
    events = tmp_path / "events.csv"
    code, out, _ = run_cli(
        capsys, "simulate", "--arch", "hybrid", "--n", "2", "--m", "1",
        "--map", "open", "--kin", "differential", "--nodes", "12", "--seed", "3",
        "--trees-out", str(trees), "--events-out", str(events),
    )
    assert code == EXIT_OK
    tree_lines = trees.read_text().splitlines()
    assert tree_lines[0] == "rrt id parent x y block"
    labels = {line.rsplit(" ", 1)[1] for line in tree_lines[1:]}
    assert labels == {"combinatorial", "hierarchical"}
    event_lines = events.read_text().splitlines()
    assert event_lines[0] == "cycle,component,event,rrt_id"
    assert any(",memory,commit," in line for line in event_lines[1:])
    assert json.loads(out)["committed_nodes"] >= 12


def test_simulate_repeat_is_byte_identical(capsys, tmp_path):
    outputs = []
    for tag in ("a", "b"):
        trees = tmp_path / f"trees_{tag}.txt"
        events = tmp_path / f"events_{tag}.csv"
        code, out, _ = run_cli(
            capsys, "simulate", "--arch", "hierarchical", "--n", "4",
            "--map", "corridor", "--kin", "quadcopter", "--nodes", "20",
            "--seed", "11", "--trees-out", str(trees), "--events-out", str(events),
        )
        assert code == EXIT_OK
        outputs.append((out, trees.read_bytes(), events.read_bytes()))
    assert outputs[0] == outputs[1]


# ---------------------------------------------------------------------------
# bench / report
# ---------------------------------------------------------------------------

TINY_PLAN = {
    "architectures": ["combinatorial", "hierarchical", "hybrid"],
    "n_values": [1, 2],
    "maps": ["open"],
    "kinematics": ["differential"],
    "target_nodes": 25,
    "repetitions": 1,
    "omega": 20.0,
    "alpha": 0.0,
    "rng_seed": 5,
}


def _write_plan(tmp_path, **overrides):
    path = tmp_path / "plan.json"
    path.write_text(json.dumps({**TINY_PLAN, **overrides}))
    return path


def test_bench_writes_csv(capsys, tmp_path):
    plan = _write_plan(tmp_path)
    out_file = tmp_path / "rows.csv"
    code, out, _ = run_cli(
        capsys, "bench", "--plan", str(plan), "--out", str(out_file)
    )
    assert code == EXIT_OK
    assert str(out_file) in out
    lines = out_file.read_text().splitlines()
    assert lines[0] == "arch,n,map,kinematics,speedup_mean,speedup_stddev,power_model_w,efficiency,m_chosen"
    assert len(lines) == 7  # 3 architectures x 2 n values


def test_bench_json_round_trip(capsys, tmp_path):
    plan = _write_plan(tmp_path)
    out_file = tmp_path / "rows.json"
    code, _, _ = run_cli(
        capsys, "bench", "--plan", str(plan), "--out", str(out_file),
        "--format", "json",
    )
    assert code == EXIT_OK
    rows = read_results(out_file)
    assert len(rows) == 6
    assert {r.arch for r in rows} == {"combinatorial", "hierarchical", "hybrid"}


def test_bench_repeat_is_byte_identical(capsys, tmp_path):
    plan = _write_plan(tmp_path)
    blobs = []
    for tag in ("a", "b"):
        out_file = tmp_path / f"rows_{tag}.csv"
        code, _, _ = run_cli(
            capsys, "bench", "--plan", str(plan), "--out", str(out_file)
        )
        assert code == EXIT_OK
        blobs.append(out_file.read_bytes())
    assert blobs[0] == blobs[1]


def test_bench_infeasible_plan_exit_code(capsys, tmp_path):
    plan = _write_plan(tmp_path, omega=0.5, n_values=[4])
    code, _, err = run_cli(
        capsys, "bench", "--plan", str(plan), "--out", str(tmp_path / "x.csv")
    )
    assert code == EXIT_INFEASIBLE
    assert "power cap" in err


def test_bench_desk_flag_merges_plan(capsys, tmp_path):
    # scale defaults come from --desk, the file overrides the rest
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({
        "n_values": [2], "maps": ["open"], "kinematics": ["differential"],
        "target_nodes": 25, "repetitions": 1, "rng_seed": 5,
    }))
    out_file = tmp_path / "rows.csv"
    code, _, _ = run_cli(
        capsys, "bench", "--desk", "--plan", str(plan), "--out", str(out_file)
    )
    assert code == EXIT_OK
    assert len(out_file.read_text().splitlines()) == 4


def test_bench_with_figures(capsys, tmp_path):
    plan = _write_plan(tmp_path)
    fig_dir = tmp_path / "figs"
    code, out, _ = run_cli(
        capsys, "bench", "--plan", str(plan), "--out", str(tmp_path / "r.csv"),
        "--figures", str(fig_dir),
    )
    assert code == EXIT_OK
    names = sorted(p.name for p in fig_dir.iterdir())
    assert names == ["bench_efficiency.png", "bench_power.png", "bench_speedup.png"]


def test_report_renders_figures(capsys, tmp_path):
    plan = _write_plan(tmp_path)
    results = tmp_path / "rows.csv"
    run_cli(capsys, "bench", "--plan", str(plan), "--out", str(results))
    trees = tmp_path / "trees.txt"
    run_cli(
        capsys, "simulate", "--arch", "hybrid", "--n", "2", "--m", "1",
        "--map", "open", "--kin", "differential", "--nodes", "10", "--seed", "3",
        "--trees-out", str(trees),
    )
    out_dir = tmp_path / "report"
    code, out, _ = run_cli(
        capsys, "report", "--results", str(results), "--out-dir", str(out_dir),
        "--trees", str(trees), "--map", "open",
    )
    assert code == EXIT_OK
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == [
        "bench_efficiency.png",
        "bench_power.png",
        "bench_speedup.png",
        "bench_trees.png",
    ]
    assert len(out.splitlines()) == 4


def test_report_missing_results_file(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "report", "--results", str(tmp_path / "void.csv"),
        "--out-dir", str(tmp_path),
    )
    assert code == EXIT_ERROR
    assert "error" in err


# ---------------------------------------------------------------------------
# maps
# ---------------------------------------------------------------------------


def test_maps_listing(capsys):
    code, out, _ = run_cli(capsys, "maps")
    assert code == EXIT_OK
    for name in ("open", "corridor", "cluttered"):
        assert name in out
    assert "256x256" in out


def test_maps_export_round_trip(capsys, tmp_path):
    path = tmp_path / "corridor.txt"
    code, out, _ = run_cli(capsys, "maps", "--export", "corridor", str(path))
    assert code == EXIT_OK
    grid = load_grid(path)
    assert grid.cells.shape == (256, 256)
    assert grid.cells.any()


def test_maps_export_unknown_name(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "maps", "--export", "labyrinth", str(tmp_path / "x.txt")
    )
    assert code == EXIT_ERROR
    assert "labyrinth" in err


# ---------------------------------------------------------------------------
# process-level entry point
# ---------------------------------------------------------------------------


def test_module_invocation_round_trip(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "rrtarch.cli", "optimize", "--n", "4", "--omega", "100"],
        capture_output=True, text=True,
    )
    assert result.returncode == EXIT_OK
    payload = json.loads(result.stdout)
    assert payload["m"] == 4
    assert payload["feasible"] is True
