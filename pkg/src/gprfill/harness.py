"""Experiment orchestration: parameter-plane sweeps over self-generated data.

One experiment = one synthetic truth field, ``n_configs`` independent mask
draws, and a 1D or 2D grid of model-parameter values. Every (config, cell)
simulation gets its own RNG stream derived from the master seed and its
coordinates, so results are reproducible cell-by-cell and independent of
worker count or execution order.
"""

from __future__ import annotations

import itertools
import multiprocessing
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bias import get_provider
from .energy import BiasField, ModelParams
from .errors import ConfigurationError
from .grid import GridDims, ObservationMask
from .metrics import MetricSet, aggregate, compute_metrics
from .sampler import McSchedule, conditional_predict
from .synthdata import DEFAULT_N_MODES, MaskSpec, WmSpec, generate_field, make_mask
from .transform import to_spin_angles

AXIS_NAMES = ("T", "n", "alpha_inv", "J_nn", "J_fn", "K", "K_prime")
METRIC_NAMES = ("maae", "mare", "maare", "mrase")

# Stream tags keep field, mask and cell seeds in disjoint families.
_FIELD_TAG, _MASK_TAG, _CELL_TAG = 0, 1, 2


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter and its value grid."""

    name: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ConfigurationError(f"unknown sweep axis {self.name!r}; use one of {AXIS_NAMES}")
        if len(self.values) == 0:
            raise ConfigurationError(f"axis {self.name!r} has no values")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass(frozen=True)
class SweepConfig:
    """Everything needed to reproduce a sweep, except execution details."""

    dims: GridDims
    field_spec: WmSpec
    mask_spec: MaskSpec
    n_configs: int
    base_params: ModelParams
    axes: tuple[SweepAxis, ...]
    schedule: McSchedule
    master_seed: int
    n_modes: int = DEFAULT_N_MODES
    redraw_field: bool = False
    bias_method: str = "smooth_inpaint"

    def __post_init__(self) -> None:
        get_provider(self.bias_method)
        if self.n_configs < 1:
            raise ConfigurationError("n_configs must be >= 1")
        if not 1 <= len(self.axes) <= 2:
            raise ConfigurationError("sweeps take one or two axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"sweep axes must be disjoint, got {names}")
        if self.master_seed < 0:
            raise ConfigurationError("master_seed must be non-negative")
        # Surface bad axis values now, with their coordinates, not mid-run.
        for idx, values in self.iter_cells():
            try:
                self.cell_params(values)
            except ConfigurationError as exc:
                raise ConfigurationError(f"cell {idx} ({values}): {exc}") from exc

    def iter_cells(self):
        """Yield ((i, j), {axis: value}) over the axis-grid product, row-major."""
        if len(self.axes) == 1:
            for i, v in enumerate(self.axes[0].values):
                yield (i, 0), {self.axes[0].name: v}
        else:
            a0, a1 = self.axes
            for (i, v0), (j, v1) in itertools.product(
                    enumerate(a0.values), enumerate(a1.values)):
                yield (i, j), {a0.name: v0, a1.name: v1}

    def cell_params(self, axis_values: dict[str, float]) -> ModelParams:
        params = self.base_params
        for name, value in axis_values.items():
            params = apply_axis_value(params, name, value)
        return params

    @property
    def n_cells(self) -> int:
        return int(np.prod([len(a.values) for a in self.axes]))


def apply_axis_value(params: ModelParams, name: str, value: float) -> ModelParams:
    """Return ``params`` with one swept parameter replaced."""
    if name == "T":
        return replace(params, temperature=float(value))
    if name == "n":
        return replace(params, potential=replace(params.potential, n=value))
    if name == "alpha_inv":
        if not 0.0 <= value < 1.0:
            raise ConfigurationError(f"alpha_inv must lie in [0, 1), got {value}")
        alpha = float("inf") if value == 0.0 else 1.0 / value
        return replace(params, potential=replace(params.potential, alpha=alpha))
    if name == "J_nn":
        return replace(params, j_nn=float(value))
    if name == "J_fn":
        return replace(params, j_fn=float(value))
    if name == "K":
        return replace(params, field_mode="bias", field_coupling=float(value))
    if name == "K_prime":
        return replace(params, field_mode="uniform", field_coupling=float(value))
    raise ConfigurationError(f"unknown sweep axis {name!r}")


def _derive_seed(*words: int) -> int:
    return int(np.random.SeedSequence(list(words)).generate_state(1, np.uint64)[0])


def cell_seed(master_seed: int, s: int, i: int, j: int) -> int:
    """Seed of the simulation at configuration ``s``, cell ``(i, j)``."""
    return _derive_seed(master_seed, _CELL_TAG, s, i, j)


def experiment_field(config: SweepConfig, s: int) -> np.ndarray:
    """The truth field used for configuration ``s`` (shared unless redrawing)."""
    tag = s if config.redraw_field else 0
    rng = np.random.default_rng(_derive_seed(config.master_seed, _FIELD_TAG, tag))
    return generate_field(config.dims, config.field_spec, config.n_modes, rng)


def experiment_mask(config: SweepConfig, s: int) -> ObservationMask:
    """The observation mask drawn for configuration ``s``."""
    rng = np.random.default_rng(_derive_seed(config.master_seed, _MASK_TAG, s))
    return make_mask(config.dims, config.mask_spec, rng)


@dataclass(frozen=True)
class SweepRow:
    """Aggregated result of one cell: mean metrics plus full per-config detail."""

    index: tuple[int, int]
    axis_values: dict[str, float]
    mean: MetricSet
    per_config: tuple[MetricSet, ...]
    seeds: tuple[int, ...]
    elapsed: float  # execution detail; excluded from serialized outputs


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    rows: tuple[SweepRow, ...]

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.config.axes)


def _run_one(task) -> tuple[tuple[int, int], int, MetricSet, int, float]:
    """Worker body: one conditional simulation plus its validation metrics."""
    (index, s, field, observed, params, schedule, bias_h) = task
    mask = ObservationMask(observed=observed)
    provider = None
    if bias_h is not None:
        precomputed = BiasField(h=bias_h)
        provider = lambda _spins: precomputed  # noqa: E731
    start = time.perf_counter()
    result = conditional_predict(field, mask, params, schedule, bias_provider=provider)
    elapsed = time.perf_counter() - start
    missing = ~mask.observed
    metrics = compute_metrics(field[missing], result.predicted[missing])
    return index, s, metrics, schedule.seed, elapsed


def run_sweep(config: SweepConfig, workers: int | None = None) -> SweepResult:
    """Run every (configuration, cell) simulation and aggregate per cell.

    ``workers`` > 1 fans the independent simulations out to a process pool;
    the reduction is ordered by cell index, so results are identical for any
    worker count. Deterministic given ``config.master_seed``.
    """
    if workers is None:
        workers = os.cpu_count() or 1

    cells = list(config.iter_cells())
    fields = {}
    masks = {}
    bias_fields = {}
    needs_bias = any(config.cell_params(v).field_mode == "bias" for _, v in cells)
    shared_field = None if config.redraw_field else experiment_field(config, 0)
    for s in range(config.n_configs):
        fields[s] = experiment_field(config, s) if config.redraw_field else shared_field
        masks[s] = experiment_mask(config, s)
        if needs_bias:
            spins, _ = to_spin_angles(fields[s], masks[s])
            bias_fields[s] = get_provider(config.bias_method)(spins).h

    tasks = []
    for (index, axis_values) in cells:
        params = config.cell_params(axis_values)
        for s in range(config.n_configs):
            schedule = replace(config.schedule,
                               seed=cell_seed(config.master_seed, s, index[0], index[1]))
            bias_h = bias_fields.get(s) if params.field_mode == "bias" else None
            tasks.append((index, s, fields[s], masks[s].observed, params, schedule, bias_h))

    if workers > 1 and len(tasks) > 1:
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            outcomes = list(pool.map(_run_one, tasks, chunksize=4))
    else:
        outcomes = [_run_one(t) for t in tasks]

    by_cell: dict[tuple[int, int], dict[int, tuple[MetricSet, int, float]]] = {}
    for index, s, metrics, seed, elapsed in outcomes:
        by_cell.setdefault(index, {})[s] = (metrics, seed, elapsed)

    rows = []
    for (index, axis_values) in cells:
        entries = [by_cell[index][s] for s in range(config.n_configs)]
        per_config = tuple(e[0] for e in entries)
        rows.append(SweepRow(
            index=index,
            axis_values=axis_values,
            mean=aggregate(per_config),
            per_config=per_config,
            seeds=tuple(e[1] for e in entries),
            elapsed=sum(e[2] for e in entries),
        ))
    return SweepResult(config=config, rows=tuple(rows))


def find_optima(result: SweepResult, metric: str) -> tuple[dict[str, float], float]:
    """Locate the best cell for one aggregated measure.

    The signed relative error is optimized in absolute value (its ideal is
    zero); the others are plain minima. Ties resolve to the lowest temperature
    and then the lowest remaining axis value.
    """
    name = metric.lower()
    if name not in METRIC_NAMES:
        raise ConfigurationError(f"metric must be one of {METRIC_NAMES}, got {metric!r}")
    attr = name[1:]  # strip the configuration-mean prefix

    def key(row: SweepRow):
        value = getattr(row.mean, attr)
        score = abs(value) if name == "mare" else value
        t = row.axis_values.get("T", 0.0)
        others = tuple(v for k, v in row.axis_values.items() if k != "T")
        return (score, t, others)

    best = min(result.rows, key=key)
    return dict(best.axis_values), float(getattr(best.mean, attr))
