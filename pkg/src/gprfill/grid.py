"""Lattice geometry: site indexing, observation masks, checkerboard parity
and neighbor tables for the three interaction classes.

Sites are indexed row-major: site ``i`` sits at ``(x, y) = (i % nx, i // nx)``,
so a ``(ny, nx)`` array raveled in C order is already in site order. All
interaction offsets have odd coordinate sum, hence every stored pair connects
the two checkerboard sublattices and the two half-sweeps of a Monte Carlo
update are free of same-parity conflicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionError, EmptySampleError

# Axis-aligned nearest neighbors and the eight knight's-move further neighbors.
# Order is fixed; adjacency columns and pair lists follow it for reproducibility.
NN_X_OFFSETS = ((1, 0), (-1, 0))
NN_Y_OFFSETS = ((0, 1), (0, -1))
FN_OFFSETS = ((1, 2), (-1, 2), (2, 1), (-2, 1), (1, -2), (-1, -2), (2, -1), (-2, -1))

# Positive half of each offset set; enumerating these once per site yields each
# unordered pair exactly once, in lexicographic (site, offset) order.
_PAIR_OFFSETS = {
    "nn_x": ((1, 0),),
    "nn_y": ((0, 1),),
    "fn": ((1, 2), (-1, 2), (2, 1), (-2, 1)),
}


@dataclass(frozen=True)
class GridDims:
    """Rectangular grid extent: ``nx`` columns (x) by ``ny`` rows (y)."""

    nx: int
    ny: int

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise DimensionError(f"grid must be at least 2x2, got {self.nx}x{self.ny}")

    @property
    def n_sites(self) -> int:
        return self.nx * self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    def site_xy(self, site: int) -> tuple[int, int]:
        return site % self.nx, site // self.nx


@dataclass(frozen=True)
class ObservationMask:
    """Boolean per-site mask, True where a value was observed."""

    observed: np.ndarray  # (ny, nx) bool

    def __post_init__(self) -> None:
        obs = np.asarray(self.observed, dtype=bool)
        obs.setflags(write=False)
        object.__setattr__(self, "observed", obs)

    @property
    def n_observed(self) -> int:
        return int(self.observed.sum())

    @property
    def n_missing(self) -> int:
        return int(self.observed.size - self.observed.sum())

    @property
    def observed_flat(self) -> np.ndarray:
        return self.observed.ravel()

    @property
    def missing_sites(self) -> np.ndarray:
        return np.flatnonzero(~self.observed.ravel())

    @property
    def observed_sites(self) -> np.ndarray:
        return np.flatnonzero(self.observed.ravel())


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class NeighborTables:
    """Pair lists and padded per-site adjacency for nn_x, nn_y and fn classes.

    ``pairs_*`` hold each interacting pair exactly once. ``adj_*_idx`` is an
    ``(n_sites, degree)`` index matrix padded with the site's own index where a
    neighbor falls off the grid; ``adj_*_valid`` marks real entries. Free
    boundaries: off-grid neighbors are simply absent.
    """

    dims: GridDims
    pairs_x: np.ndarray
    pairs_y: np.ndarray
    pairs_fn: np.ndarray
    adj_x_idx: np.ndarray
    adj_x_valid: np.ndarray
    adj_y_idx: np.ndarray
    adj_y_valid: np.ndarray
    adj_fn_idx: np.ndarray
    adj_fn_valid: np.ndarray

    def pairs(self, kind: str) -> np.ndarray:
        return {"nn_x": self.pairs_x, "nn_y": self.pairs_y, "fn": self.pairs_fn}[kind]

    def adjacency(self, kind: str) -> tuple[np.ndarray, np.ndarray]:
        return {
            "nn_x": (self.adj_x_idx, self.adj_x_valid),
            "nn_y": (self.adj_y_idx, self.adj_y_valid),
            "fn": (self.adj_fn_idx, self.adj_fn_valid),
        }[kind]

    def neighbors(self, site: int, kind: str) -> np.ndarray:
        """Neighbor site ids of ``site`` in interaction class ``kind``."""
        idx, valid = self.adjacency(kind)
        return idx[site][valid[site]]

    def degrees(self, kind: str) -> np.ndarray:
        _, valid = self.adjacency(kind)
        return valid.sum(axis=1)


def _adjacency(dims: GridDims, offsets) -> tuple[np.ndarray, np.ndarray]:
    n = dims.n_sites
    sites = np.arange(n)
    xs, ys = sites % dims.nx, sites // dims.nx
    idx = np.empty((n, len(offsets)), dtype=np.int64)
    valid = np.empty((n, len(offsets)), dtype=bool)
    for col, (dx, dy) in enumerate(offsets):
        tx, ty = xs + dx, ys + dy
        ok = (tx >= 0) & (tx < dims.nx) & (ty >= 0) & (ty < dims.ny)
        idx[:, col] = np.where(ok, ty * dims.nx + tx, sites)
        valid[:, col] = ok
    return _freeze(idx), _freeze(valid)


def _pair_list(dims: GridDims, offsets) -> np.ndarray:
    rows = []
    for site in range(dims.n_sites):
        x, y = site % dims.nx, site // dims.nx
        for dx, dy in offsets:
            tx, ty = x + dx, y + dy
            if 0 <= tx < dims.nx and 0 <= ty < dims.ny:
                rows.append((site, ty * dims.nx + tx))
    out = np.asarray(rows, dtype=np.int64).reshape(-1, 2)
    return _freeze(out)


# Tables are immutable and repeatedly rebuilt for the same grid inside sweep
# workers; a small cache removes that cost.
@lru_cache(maxsize=8)
def build_neighbor_tables(dims: GridDims) -> NeighborTables:
    """Build pair lists and adjacency views for all three interaction classes."""
    adj_x = _adjacency(dims, NN_X_OFFSETS)
    adj_y = _adjacency(dims, NN_Y_OFFSETS)
    adj_fn = _adjacency(dims, FN_OFFSETS)
    return NeighborTables(
        dims=dims,
        pairs_x=_pair_list(dims, _PAIR_OFFSETS["nn_x"]),
        pairs_y=_pair_list(dims, _PAIR_OFFSETS["nn_y"]),
        pairs_fn=_pair_list(dims, _PAIR_OFFSETS["fn"]),
        adj_x_idx=adj_x[0],
        adj_x_valid=adj_x[1],
        adj_y_idx=adj_y[0],
        adj_y_valid=adj_y[1],
        adj_fn_idx=adj_fn[0],
        adj_fn_valid=adj_fn[1],
    )


@dataclass(frozen=True)
class CheckerboardPartition:
    """Two interpenetrating sublattices: parity(x, y) = (x + y) mod 2."""

    dims: GridDims
    parity: np.ndarray = field(init=False)  # flat (n_sites,), values 0/1

    def __post_init__(self) -> None:
        sites = np.arange(self.dims.n_sites)
        par = ((sites % self.dims.nx) + (sites // self.dims.nx)) % 2
        object.__setattr__(self, "parity", _freeze(par.astype(np.uint8)))

    def sites_of(self, parity: int) -> np.ndarray:
        return np.flatnonzero(self.parity == parity)


def checkerboard_partition(dims: GridDims) -> CheckerboardPartition:
    return CheckerboardPartition(dims)


def validate_mask(mask: ObservationMask, dims: GridDims) -> tuple[int, int]:
    """Check mask shape against ``dims`` and return ``(n_observed, n_missing)``.

    Rejects all-missing masks: conditional simulation needs at least one
    observed site.
    """
    if mask.observed.shape != dims.shape:
        raise DimensionError(
            f"mask shape {mask.observed.shape} does not match grid {dims.shape}"
        )
    n_obs = mask.n_observed
    if n_obs == 0:
        raise EmptySampleError("mask marks every site missing; nothing to condition on")
    return n_obs, mask.n_missing
