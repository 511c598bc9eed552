import numpy as np
import pytest

from gprfill import io
from gprfill.errors import CsvFormatError
from gprfill.grid import ObservationMask


def test_grid_round_trip_lossless(tmp_path):
    rng = np.random.default_rng(0)
    grid = rng.normal(5, 2, size=(6, 9))
    path = tmp_path / "grid.csv"
    io.write_grid_csv(path, grid)
    back = io.read_grid_csv(path)
    assert np.array_equal(back, grid)
    # byte-identical rewrite
    second = tmp_path / "grid2.csv"
    io.write_grid_csv(second, back)
    assert path.read_bytes() == second.read_bytes()


def test_grid_parse_error_names_position(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0,oops\n")
    with pytest.raises(CsvFormatError) as err:
        io.read_grid_csv(path)
    msg = str(err.value)
    assert "row 2" in msg and "column 2" in msg and "bad.csv" in msg


def test_grid_ragged_rows_rejected(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,3\n4,5\n")
    with pytest.raises(CsvFormatError):
        io.read_grid_csv(path)


def test_empty_grid_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(CsvFormatError):
        io.read_grid_csv(path)


def test_mask_round_trip_and_validation(tmp_path):
    mask = ObservationMask(observed=np.array([[1, 0], [0, 1]], dtype=bool))
    path = tmp_path / "mask.csv"
    io.write_mask_csv(path, mask)
    assert path.read_text() == "1,0\n0,1\n"
    back = io.read_mask_csv(path)
    assert np.array_equal(back.observed, mask.observed)

    bad = tmp_path / "bad_mask.csv"
    bad.write_text("1,0\n2,1\n")
    with pytest.raises(CsvFormatError) as err:
        io.read_mask_csv(bad)
    assert "0 or 1" in str(err.value)


def test_predictions_csv(tmp_path):
    grid = np.full((3, 3), np.nan)
    grid[1, 2] = 7.25
    grid[2, 0] = -1.5
    path = tmp_path / "pred.csv"
    io.write_predictions_csv(path, grid)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "x,y,value"
    assert "2,1,7.25" in lines
    assert "0,2,-1.5" in lines
    assert len(lines) == 3

    empty = tmp_path / "none.csv"
    io.write_predictions_csv(empty, np.full((2, 2), np.nan))
    assert empty.read_text() == "x,y,value\n"


def test_trace_csv(tmp_path):
    path = tmp_path / "trace.csv"
    io.write_trace_csv(path, [-0.5, -0.75])
    assert path.read_text() == "sweep,specific_energy\n0,-0.5\n1,-0.75\n"


def test_sweep_csv_format(tmp_path):
    path = tmp_path / "sweep.csv"
    rows = [({"T": 0.001, "J_nn": 0.1}, 1.5, -0.01, 0.02, 2.5),
            ({"T": 0.001, "J_nn": 0.5}, 2.5, 0.01, 0.03, 3.5)]
    io.write_sweep_csv(path, ["T", "J_nn"], rows, n_configs=10, master_seed=42)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "T,J_nn,MAAE,MARE,MAARE,MRASE,n_configs,seed"
    assert lines[1] == "0.001,0.1,1.5,-0.01,0.02,2.5,10,42"


def test_json_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    io.dump_json(a, {"z": 1, "a": [1.5, 2.25]})
    io.dump_json(b, {"a": [1.5, 2.25], "z": 1})
    assert a.read_bytes() == b.read_bytes()
    assert io.config_hash({"x": 1}) == io.config_hash({"x": 1})
    assert io.config_hash({"x": 1}) != io.config_hash({"x": 2})


def test_histogram_csv(tmp_path):
    path = tmp_path / "hist.csv"
    io.write_histogram_csv(path, [0.0, 0.5, 1.0], [3, 4])
    assert path.read_text() == "bin_low,bin_high,count\n0.0,0.5,3\n0.5,1.0,4\n"
