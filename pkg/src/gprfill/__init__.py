"""gprfill: gap filling of 2D gridded data by conditional Monte Carlo of a
planar-rotator Gibbs random field, plus the synthetic-data and sweep machinery
to map its parameter-error landscapes."""

from .bias import get_provider, interpolate_bias, interpolate_bias_cubic, pure_bias_predict
from .energy import (
    BiasField,
    LocalEnergy,
    ModelParams,
    bias_term,
    boltzmann_factor,
    local_energy,
    total_energy,
)
from .errors import GprFillError
from .grid import (
    CheckerboardPartition,
    GridDims,
    NeighborTables,
    ObservationMask,
    build_neighbor_tables,
    checkerboard_partition,
    validate_mask,
)
from .harness import (
    SweepAxis,
    SweepConfig,
    SweepResult,
    SweepRow,
    apply_axis_value,
    cell_seed,
    experiment_field,
    experiment_mask,
    find_optima,
    run_sweep,
)
from .metrics import MetricSet, aggregate, compute_metrics
from .potential import PotentialParams, normalization, pair_potential, series_oracle
from .sampler import (
    McSchedule,
    PredictionResult,
    conditional_predict,
    initialize_missing,
    initialize_missing_uniform,
    metropolis_half_sweep,
    unconditional_simulate,
)
from .synthdata import MaskSpec, WmSpec, generate_field, make_mask, wm_covariance
from .transform import SpinField, TransformSpec, from_spin_angles, to_spin_angles

__all__ = [
    "BiasField",
    "CheckerboardPartition",
    "GprFillError",
    "GridDims",
    "LocalEnergy",
    "MaskSpec",
    "McSchedule",
    "MetricSet",
    "ModelParams",
    "NeighborTables",
    "ObservationMask",
    "PotentialParams",
    "PredictionResult",
    "SpinField",
    "SweepAxis",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "TransformSpec",
    "WmSpec",
    "aggregate",
    "apply_axis_value",
    "bias_term",
    "boltzmann_factor",
    "build_neighbor_tables",
    "cell_seed",
    "checkerboard_partition",
    "compute_metrics",
    "conditional_predict",
    "experiment_field",
    "experiment_mask",
    "find_optima",
    "from_spin_angles",
    "generate_field",
    "get_provider",
    "initialize_missing",
    "initialize_missing_uniform",
    "interpolate_bias",
    "interpolate_bias_cubic",
    "local_energy",
    "make_mask",
    "metropolis_half_sweep",
    "normalization",
    "pair_potential",
    "pure_bias_predict",
    "run_sweep",
    "series_oracle",
    "to_spin_angles",
    "total_energy",
    "unconditional_simulate",
    "validate_mask",
    "wm_covariance",
]
