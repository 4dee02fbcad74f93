import json
import os

import numpy as np
import pytest
from scipy import integrate

from protmeas.cli import main
from protmeas.svgplot import emit_plot
from protmeas.tables import ResultTable


def read(path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


# ------------------------------------------------------------------- tables

def test_table_round_trip(tmp_path):
    t = ResultTable(["n", "value"], ["", "s"], int_columns=frozenset(["n"]))
    t.add_row(1, 0.5)
    t.add_row(2, 0.25)
    path = tmp_path / "t.csv"
    t.write_csv(path)
    text = read(path).decode()
    assert text == "n,value [s]\n1,0.5\n2,0.25\n"
    assert t.column("value") == [0.5, 0.25]
    with pytest.raises(KeyError, match="nope"):
        t.column("nope")


def test_table_rejects_ragged_rows():
    t = ResultTable(["a", "b"], ["", ""])
    with pytest.raises(ValueError):
        t.add_row(1.0)


def test_no_partial_files_left(tmp_path):
    t = ResultTable(["a"], [""])
    t.add_row(1.0)
    t.write_csv(tmp_path / "out.csv")
    assert sorted(p.name for p in tmp_path.iterdir()) == ["out.csv"]


# --------------------------------------------------------------------- svg

def test_svg_single_series(tmp_path):
    t = ResultTable(["x", "y"], ["", ""])
    for i in range(10):
        t.add_row(float(i), float(i * i))
    data = emit_plot(t, "x", ["y"], tmp_path / "p.svg")
    assert data.startswith(b"<svg")
    assert data.count(b"<polyline") == 1
    assert b"Date" not in data


def test_svg_missing_column_named(tmp_path):
    t = ResultTable(["x"], [""])
    t.add_row(1.0)
    with pytest.raises(KeyError, match="ghost"):
        emit_plot(t, "x", ["ghost"], tmp_path / "p.svg")


def test_svg_deterministic_bytes(tmp_path):
    t = ResultTable(["x", "y", "z"], ["s", "", ""])
    for i in range(50):
        t.add_row(i * 0.1, np.sin(i * 0.1), np.cos(i * 0.1))
    a = emit_plot(t, "x", ["y", "z"], tmp_path / "a.svg")
    b = emit_plot(t, "x", ["y", "z"], tmp_path / "b.svg")
    assert a == b


# ------------------------------------------------------------ CLI behaviors

def test_unknown_experiment_is_usage_error(capsys):
    with pytest.raises(SystemExit) as err:
        main(["definitely-not-real"])
    assert err.value.code == 2


def test_ergodic_requires_seed(tmp_path, capsys):
    code = main(["ergodic", "--out", str(tmp_path)])
    assert code == 2
    assert "seed" in capsys.readouterr().err


def test_pointer_trace_columns_and_determinism(tmp_path, capsys):
    args = ["pointer-trace", "--T", "20", "--steps", "256", "--plot"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    csv_a = read(tmp_path / "a" / "pointer_trace.csv")
    assert csv_a == read(tmp_path / "b" / "pointer_trace.csv")
    assert read(tmp_path / "a" / "fig1.svg") == read(tmp_path / "b" / "fig1.svg")
    header = csv_a.decode().splitlines()[0].split(",")
    assert header[0] == "t [s]"
    assert "reading_trivial" in header and "reading_alpha" in header


def test_pointer_trace_fig2_overlay(tmp_path):
    assert main(["pointer-trace", "--T", "20", "--steps", "128", "--alpha", "2.5",
                 "--alpha2", "1.0", "--plot", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig2.svg").exists()
    svg = read(tmp_path / "fig2.svg").decode()
    assert svg.count("<polyline") == 2
    assert "#1f77b4" in svg and "#d62728" in svg   # blue + red analogues


def test_sketch_matches_quadrature_oracle(tmp_path):
    assert main(["sketch", "--bin-width", "0.1", "--L", "4", "--out", str(tmp_path)]) == 0
    lines = read(tmp_path / "sketch.csv").decode().splitlines()
    assert lines[0] == "bin_center,probability"
    rows = [tuple(map(float, ln.split(","))) for ln in lines[1:]]
    assert len(rows) == 80
    for center, prob in rows[::13]:
        oracle, _ = integrate.quad(lambda x: np.exp(-x * x) / np.sqrt(np.pi),
                                   center - 0.05, center + 0.05)
        assert prob == pytest.approx(oracle, abs=1e-8)
    total = sum(p for _, p in rows)
    assert total == pytest.approx(1.0, abs=1e-4)   # [-4, 4] misses only the tails


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"beta": 1.0, "dim": 32}))
    assert main(["thermal", "--config", str(config), "--beta", "2.0",
                 "--out", str(tmp_path)]) == 0
    lines = read(tmp_path / "thermal.csv").decode().splitlines()
    w0 = float(lines[1].split(",")[1])
    w1 = float(lines[2].split(",")[1])
    assert w1 / w0 == pytest.approx(np.exp(-2.0), abs=1e-12)   # flag wins over config


def test_config_unknown_key_rejected(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"bogus": 1}))
    assert main(["thermal", "--config", str(config), "--out", str(tmp_path)]) == 2
    assert "bogus" in capsys.readouterr().err


def test_config_invalid_json_rejected(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text("{not json")
    assert main(["thermal", "--config", str(config), "--out", str(tmp_path)]) == 2


def test_module_precondition_maps_to_usage_exit(tmp_path, capsys):
    # thermal tail too fat for the truncation: named precondition, exit 2
    code = main(["thermal", "--beta", "0.1", "--dim", "64", "--out", str(tmp_path)])
    assert code == 2
    assert "thermal tail" in capsys.readouterr().err


def test_numerical_failure_exit_code(tmp_path):
    code = main(["bipartite", "--T", "2", "--steps", "64", "--dim", "16",
                 "--pointer-points", "64", "--shift-tol", "0",
                 "--out", str(tmp_path)])
    assert code == 3


def test_io_failure_exit_code(tmp_path):
    blocker = tmp_path / "blocked"
    blocker.write_text("a file, not a directory")
    code = main(["thermal", "--out", str(blocker / "sub")])
    assert code == 4


def test_zeno_experiment_runs(tmp_path):
    assert main(["zeno", "--dim", "16", "--T", str(np.pi), "--n-list", "4,8",
                 "--out", str(tmp_path)]) == 0
    lines = read(tmp_path / "zeno.csv").decode().splitlines()
    assert lines[0] == "n_protections,survival,max_op_jump"
    s4 = float(lines[1].split(",")[1])
    assert s4 == pytest.approx(np.cos(np.pi / 8) ** 8, abs=1e-12)


def test_sweep_runs_per_value(tmp_path, monkeypatch):
    monkeypatch.setenv("PROTMEAS_THREADS", "2")
    assert main(["thermal", "--dim", "32", "--sweep", "beta=1,2",
                 "--out", str(tmp_path)]) == 0
    assert (tmp_path / "beta=1" / "thermal.csv").exists()
    assert (tmp_path / "beta=2" / "thermal.csv").exists()


def test_two_state_experiment_consistency(tmp_path):
    assert main(["two-state", "--T", "10", "--steps", "32",
                 "--out", str(tmp_path)]) == 0
    lines = read(tmp_path / "two_state.csv").decode().splitlines()
    cols = lines[0].split(",")
    i_direct = cols.index("wv_direct_re")
    i_trace = cols.index("wv_trace_re")
    for ln in lines[1:]:
        cells = [float(v) for v in ln.split(",")]
        assert cells[i_direct] == pytest.approx(cells[i_trace], abs=1e-12)


def test_heisenberg_experiment_bound_column(tmp_path):
    assert main(["heisenberg-projector", "--T", "100", "--dim", "32",
                 "--out", str(tmp_path)]) == 0
    lines = read(tmp_path / "heisenberg_projector.csv").decode().splitlines()
    cols = lines[0].split(",")
    ia, ib = cols.index("avg_re"), cols.index("avg_im")
    ibound = cols.index("bound")
    im, _in = cols.index("m"), cols.index("n")
    for ln in lines[1:]:
        cells = [float(v) for v in ln.split(",")]
        if cells[im] != cells[_in]:
            assert np.hypot(cells[ia], cells[ib]) <= cells[ibound] + 1e-15
