"""Metropolis Monte Carlo over the spin field.

Conditional mode freezes observed spins and samples the missing ones to fill
gaps; unconditional mode updates every site and is used to study the angle
distribution itself. Sweeps use the checkerboard two-step: all updated sites of
one parity see only fixed opposite-parity neighbors, so each half-sweep is a
valid simultaneous update.

Proposals are symmetric uniform steps ``phi' = phi + U(-w, w)`` rejected
outright outside [0, 2*pi] (the angle space is deliberately non-periodic), so
``min(1, exp(-dH/T))`` acceptance targets the Boltzmann-Gibbs distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bias as bias_module
from .energy import BiasField, LocalEnergy, ModelParams, total_energy
from .errors import ConfigurationError, EmptySampleError
from .grid import (
    GridDims,
    NeighborTables,
    ObservationMask,
    build_neighbor_tables,
    checkerboard_partition,
    validate_mask,
)
from .transform import TWO_PI, SpinField, TransformSpec, from_spin_angles, to_spin_angles


INIT_MODES = ("uniform", "empirical")


@dataclass(frozen=True)
class McSchedule:
    """Sweep counts, proposal window, missing-spin initializer and RNG seed.

    ``init`` picks how missing spins start: "uniform" draws anywhere in
    [0, 2*pi] (distribution-agnostic; lets multi-well potentials express their
    full state space), "empirical" resamples observed angles (warm start,
    faster equilibration at low temperature for single-well potentials).
    """

    burn_in: int = 200
    averaging: int = 300
    proposal_width: float = math.pi / 2
    seed: int = 0
    init: str = "uniform"

    def __post_init__(self) -> None:
        if self.burn_in < 0:
            raise ConfigurationError("burn_in must be >= 0")
        if self.averaging < 1:
            raise ConfigurationError("averaging must be >= 1")
        if not 0.0 < self.proposal_width <= TWO_PI:
            raise ConfigurationError("proposal_width must lie in (0, 2*pi]")
        if self.init not in INIT_MODES:
            raise ConfigurationError(f"init must be one of {INIT_MODES}, got {self.init!r}")


@dataclass
class PredictionResult:
    """Gap-filling output: data-unit predictions at missing sites (NaN at
    observed ones), the equilibrium mean angles, the value transform used, and
    the per-sweep specific energy trace."""

    predicted: np.ndarray
    mean_angles: SpinField
    transform: TransformSpec
    energy_trace: np.ndarray


def initialize_missing(spins: SpinField, rng: np.random.Generator) -> SpinField:
    """Draw each missing angle from the empirical distribution of observed
    angles (resampling with replacement). In-place; returns ``spins``."""
    obs_vals = spins.angles[spins.mask.observed]
    if obs_vals.size == 0:
        raise EmptySampleError("cannot initialize from an empty observed set")
    missing = spins.mask.missing_sites
    flat = spins.angles.ravel()
    flat[missing] = rng.choice(obs_vals, size=missing.size, replace=True)
    return spins


def initialize_missing_uniform(spins: SpinField, rng: np.random.Generator) -> SpinField:
    """Draw each missing angle uniformly from [0, 2*pi). In-place."""
    missing = spins.mask.missing_sites
    flat = spins.angles.ravel()
    flat[missing] = rng.uniform(0.0, TWO_PI, size=missing.size)
    return spins


def _update_sites(spins: SpinField, parity: int, dims: GridDims) -> np.ndarray:
    part = checkerboard_partition(dims)
    sites = part.sites_of(parity)
    if spins.mask.observed.any():
        return sites[~spins.mask.observed_flat[sites]]
    return sites


def _half_sweep(angles_flat: np.ndarray, sites: np.ndarray, kernel: LocalEnergy,
                width: float, temperature: float, rng: np.random.Generator) -> None:
    if sites.size == 0:
        return
    current = angles_flat[sites]
    proposed = current + rng.uniform(-width, width, size=sites.size)
    d_h = (kernel.at(sites, proposed, angles_flat)
           - kernel.at(sites, current, angles_flat))
    u = rng.random(sites.size)
    with np.errstate(over="ignore"):
        accept = ((proposed >= 0.0) & (proposed <= TWO_PI)
                  & ((d_h <= 0.0) | (u < np.exp(-d_h / temperature))))
    angles_flat[sites[accept]] = proposed[accept]


def metropolis_half_sweep(spins: SpinField, parity: int, params: ModelParams,
                          tables: NeighborTables, bias: BiasField | None,
                          schedule: McSchedule, rng: np.random.Generator) -> SpinField:
    """One checkerboard half-sweep over the given parity, in place.

    Visits missing sites only when the mask marks anything observed
    (conditional mode), otherwise every site of the parity.
    """
    if parity not in (0, 1):
        raise ConfigurationError(f"parity must be 0 or 1, got {parity}")
    sites = _update_sites(spins, parity, tables.dims)
    kernel = LocalEnergy(params, tables, bias)
    _half_sweep(spins.angles.ravel(), sites, kernel,
                schedule.proposal_width, params.temperature, rng)
    return spins


def _run_chain(spins: SpinField, params: ModelParams, tables: NeighborTables,
               bias: BiasField | None, schedule: McSchedule,
               rng: np.random.Generator, on_sweep) -> np.ndarray:
    """Drive burn-in plus averaging sweeps; calls ``on_sweep(k, angles_flat)``
    after each post-burn-in sweep. Returns the specific-energy trace."""
    kernel = LocalEnergy(params, tables, bias)
    sites = [_update_sites(spins, p, tables.dims) for p in (0, 1)]
    flat = spins.angles.ravel()
    n_sites = tables.dims.n_sites
    total = schedule.burn_in + schedule.averaging
    trace = np.empty(total)
    for sweep in range(total):
        for parity in (0, 1):
            _half_sweep(flat, sites[parity], kernel,
                        schedule.proposal_width, params.temperature, rng)
        trace[sweep] = total_energy(flat, params, tables, bias) / n_sites
        if sweep >= schedule.burn_in:
            on_sweep(sweep - schedule.burn_in, flat)
    return trace


def conditional_predict(sample: np.ndarray, mask: ObservationMask, params: ModelParams,
                        schedule: McSchedule, bias_provider=None,
                        tables: NeighborTables | None = None) -> PredictionResult:
    """Fill the gaps of ``sample`` by conditional simulation.

    Pipeline: map observed values to angles, resample-initialize the missing
    sites, burn in, then average the missing-site angles over the averaging
    sweeps and map the means back to data units. Observed spins are never
    touched. Deterministic given ``schedule.seed``.

    ``bias_provider`` builds the attractor field when ``params.field_mode`` is
    "bias"; it defaults to smooth inpainting of the observed angles.
    """
    sample = np.asarray(sample, dtype=float)
    dims = GridDims(nx=sample.shape[1], ny=sample.shape[0])
    validate_mask(mask, dims)
    if tables is None:
        tables = build_neighbor_tables(dims)

    spins, spec = to_spin_angles(sample, mask)
    bias_field = None
    if params.field_mode == "bias":
        provider = bias_provider or bias_module.interpolate_bias
        bias_field = provider(spins)

    rng = np.random.default_rng(schedule.seed)
    work = spins.copy()
    if schedule.init == "empirical":
        initialize_missing(work, rng)
    else:
        initialize_missing_uniform(work, rng)

    missing = mask.missing_sites
    angle_sum = np.zeros(missing.size)

    def accumulate(_k: int, flat: np.ndarray) -> None:
        angle_sum[:] += flat[missing]

    trace = _run_chain(work, params, tables, bias_field, schedule, rng, accumulate)

    mean = spins.angles.copy()
    mean.ravel()[missing] = angle_sum / schedule.averaging
    mean_field = SpinField(angles=mean, mask=mask)
    values = from_spin_angles(mean, spec)
    predicted = np.where(mask.observed, np.nan, values)
    return PredictionResult(predicted=predicted, mean_angles=mean_field,
                            transform=spec, energy_trace=trace)


def unconditional_simulate(dims: GridDims, params: ModelParams,
                           schedule: McSchedule,
                           tables: NeighborTables | None = None) -> np.ndarray:
    """Sample free-running spin configurations for distribution studies.

    Starts from uniform random angles, burns in, then snapshots the full field
    after each averaging sweep. Returns an (averaging, ny, nx) array. Only
    "none" and "uniform" field modes make sense without data to interpolate.
    """
    if params.field_mode == "bias":
        raise ConfigurationError("unconditional simulation cannot build a bias field; "
                                 "use field_mode 'uniform' or 'none'")
    if tables is None:
        tables = build_neighbor_tables(dims)
    rng = np.random.default_rng(schedule.seed)
    mask = ObservationMask(observed=np.zeros(dims.shape, dtype=bool))
    angles = rng.uniform(0.0, TWO_PI, size=dims.shape)
    spins = SpinField(angles=angles, mask=mask)

    snapshots = np.empty((schedule.averaging, dims.ny, dims.nx))

    def record(k: int, flat: np.ndarray) -> None:
        snapshots[k] = flat.reshape(dims.shape)

    _run_chain(spins, params, tables, None, schedule, rng, record)
    return snapshots
