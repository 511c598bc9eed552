"""File formats: grid and mask CSV, prediction/trace tables, sweep outputs.

Grids are written as ``ny`` rows of ``nx`` comma-separated values using
shortest round-trip float formatting, so write -> read is lossless and
repeated runs produce byte-identical files. Parse failures name the file, row
and column.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import CsvFormatError
from .grid import ObservationMask


def _fmt(value: float) -> str:
    return repr(float(value))


def read_grid_csv(path) -> np.ndarray:
    """Read a numeric grid; 'nan' entries mark sites without a value."""
    path = Path(path)
    rows: list[list[float]] = []
    with path.open(newline="") as fh:
        for r, record in enumerate(csv.reader(fh)):
            if not record:
                continue
            parsed = []
            for c, cell in enumerate(record):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise CsvFormatError(
                        f"{path}: row {r + 1}, column {c + 1}: not a number: {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise CsvFormatError(f"{path}: empty grid file")
    width = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != width:
            raise CsvFormatError(
                f"{path}: row {r + 1} has {len(row)} columns, expected {width}")
    return np.asarray(rows, dtype=float)


def write_grid_csv(path, grid: np.ndarray) -> None:
    grid = np.asarray(grid, dtype=float)
    with Path(path).open("w", newline="") as fh:
        for row in grid:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_mask_csv(path) -> ObservationMask:
    """Read a 0/1 grid; 1 marks an observed site."""
    path = Path(path)
    grid = read_grid_csv(path)
    if not np.isin(grid, (0.0, 1.0)).all():
        bad = np.argwhere(~np.isin(grid, (0.0, 1.0)))[0]
        raise CsvFormatError(
            f"{path}: row {bad[0] + 1}, column {bad[1] + 1}: mask values must be 0 or 1")
    return ObservationMask(observed=grid.astype(bool))


def write_mask_csv(path, mask: ObservationMask) -> None:
    with Path(path).open("w", newline="") as fh:
        for row in mask.observed.astype(int):
            fh.write(",".join(str(int(v)) for v in row) + "\n")


def write_predictions_csv(path, predicted: np.ndarray) -> None:
    """One ``x,y,value`` row per predicted (non-NaN) site; header always present."""
    predicted = np.asarray(predicted, dtype=float)
    with Path(path).open("w", newline="") as fh:
        fh.write("x,y,value\n")
        for y, x in np.argwhere(np.isfinite(predicted)):
            fh.write(f"{x},{y},{_fmt(predicted[y, x])}\n")


def write_trace_csv(path, trace) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write("sweep,specific_energy\n")
        for k, e in enumerate(np.asarray(trace, dtype=float)):
            fh.write(f"{k},{_fmt(e)}\n")


def write_histogram_csv(path, edges, counts) -> None:
    edges = np.asarray(edges, dtype=float)
    counts = np.asarray(counts)
    with Path(path).open("w", newline="") as fh:
        fh.write("bin_low,bin_high,count\n")
        for k in range(counts.size):
            fh.write(f"{_fmt(edges[k])},{_fmt(edges[k + 1])},{int(counts[k])}\n")


def dump_json(path, payload: dict) -> None:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    with Path(path).open("w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def config_hash(payload: dict) -> str:
    """Stable digest of a JSON-serializable configuration."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_sweep_csv(path, axis_names, rows, n_configs: int, master_seed: int) -> None:
    """Result table: one row per cell with the four aggregated measures.

    ``rows`` yield (axis_values dict, maae, mare, maare, mrase). Execution
    details (timings, worker counts) are deliberately absent so repeated runs
    are byte-identical.
    """
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join([*axis_names, "MAAE", "MARE", "MAARE", "MRASE",
                           "n_configs", "seed"]) + "\n")
        for axis_values, maae, mare, maare, mrase in rows:
            cells = [_fmt(axis_values[a]) for a in axis_names]
            cells += [_fmt(maae), _fmt(mare), _fmt(maare), _fmt(mrase)]
            cells += [str(n_configs), str(master_seed)]
            fh.write(",".join(cells) + "\n")
