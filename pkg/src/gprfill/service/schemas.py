"""Pydantic request/response models for the HTTP API.

Wire conventions: JSON cannot carry IEEE infinities, so an infinite harmonic
count or decay rate is encoded as ``null`` (``n: null`` means the full series,
``alpha: null`` means the plain-cosine limit). Grid payloads are row lists
(``ny`` rows of ``nx`` values); ``null`` cells mark sites without a value.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ..energy import ModelParams
from ..errors import DimensionError
from ..grid import GridDims, ObservationMask
from ..harness import SweepAxis, SweepConfig
from ..potential import PotentialParams
from ..sampler import McSchedule
from ..synthdata import DEFAULT_N_MODES, MaskSpec, WmSpec


class DimsModel(BaseModel):
    nx: int = Field(ge=2)
    ny: int = Field(ge=2)

    def to_core(self) -> GridDims:
        return GridDims(nx=self.nx, ny=self.ny)


class FieldSpecModel(DimsModel):
    mean: float
    sigma: float = Field(gt=0)
    nu: float = Field(gt=0)
    xi_x: float = Field(gt=0)
    xi_y: float = Field(gt=0)
    law: Literal["gaussian", "lognormal"] = "gaussian"
    n_modes: int = Field(default=DEFAULT_N_MODES, ge=100)

    def to_wm_spec(self) -> WmSpec:
        return WmSpec(mean=self.mean, sigma=self.sigma, nu=self.nu,
                      xi_x=self.xi_x, xi_y=self.xi_y, law=self.law)


class MaskSpecModel(BaseModel):
    kind: Literal["thinning", "block"]
    p: Optional[float] = None
    block_side: Optional[int] = None

    def to_core(self) -> MaskSpec:
        return MaskSpec(kind=self.kind, p=self.p, block_side=self.block_side)


class ModelParamsModel(BaseModel):
    temperature: float = Field(gt=0)
    n: Optional[int] = 1  # null = infinite series
    alpha: Optional[float] = None  # null = infinite decay rate (plain cosine)
    j_nn: float = Field(default=0.5, ge=0, le=1)
    j_fn: float = 0.0
    field_mode: Literal["none", "bias", "uniform"] = "none"
    field_coupling: float = 0.0

    def to_core(self) -> ModelParams:
        potential = PotentialParams(
            n=math.inf if self.n is None else self.n,
            alpha=math.inf if self.alpha is None else self.alpha,
        )
        return ModelParams(temperature=self.temperature, potential=potential,
                           j_nn=self.j_nn, j_fn=self.j_fn,
                           field_mode=self.field_mode,
                           field_coupling=self.field_coupling)


class ScheduleModel(BaseModel):
    burn_in: int = Field(default=200, ge=0)
    averaging: int = Field(default=300, ge=1)
    proposal_width: float = Field(default=math.pi / 2, gt=0, le=2 * math.pi)
    seed: int = 0
    init: Literal["uniform", "empirical"] = "uniform"

    def to_core(self) -> McSchedule:
        return McSchedule(burn_in=self.burn_in, averaging=self.averaging,
                          proposal_width=self.proposal_width, seed=self.seed,
                          init=self.init)


class GenerateRequest(FieldSpecModel):
    seed: int = 0


class GenerateResponse(BaseModel):
    values: list[list[float]]
    provenance: dict


class MaskRequest(MaskSpecModel):
    nx: int = Field(ge=2)
    ny: int = Field(ge=2)
    seed: int = 0

    def to_dims(self) -> GridDims:
        return GridDims(nx=self.nx, ny=self.ny)


class MaskResponse(BaseModel):
    mask: list[list[int]]
    n_observed: int
    n_missing: int


class PredictRequest(BaseModel):
    sample: list[list[Optional[float]]]
    mask: list[list[int]]
    params: ModelParamsModel
    schedule: ScheduleModel = ScheduleModel()
    bias_method: Literal["smooth_inpaint", "cubic"] = "smooth_inpaint"

    @field_validator("mask")
    @classmethod
    def _mask_binary(cls, v):
        for row in v:
            for cell in row:
                if cell not in (0, 1):
                    raise ValueError("mask entries must be 0 or 1")
        return v


class PredictResponse(BaseModel):
    predicted: list[list[Optional[float]]]
    z_min: float
    z_max: float
    energy_trace: list[float]
    n_predicted: int


class BaselineRequest(BaseModel):
    sample: list[list[Optional[float]]]
    mask: list[list[int]]
    bias_method: Literal["smooth_inpaint", "cubic"] = "smooth_inpaint"


class BaselineResponse(BaseModel):
    predicted: list[list[Optional[float]]]
    z_min: float
    z_max: float
    n_clamped: int


class HistogramRequest(DimsModel):
    params: ModelParamsModel
    schedule: ScheduleModel = ScheduleModel()
    bins: int = Field(default=60, ge=2)


class HistogramResponse(BaseModel):
    bin_edges: list[float]
    counts: list[int]
    mean_angle: float
    std_angle: float
    n_snapshots: int


class SweepAxisModel(BaseModel):
    name: Literal["T", "n", "alpha_inv", "J_nn", "J_fn", "K", "K_prime"]
    values: list[float] = Field(min_length=1)


class SweepConfigModel(BaseModel):
    """The sweep configuration document; also the CLI config-file schema."""

    data: FieldSpecModel
    mask: MaskSpecModel
    S: int = Field(ge=1)
    fixed_params: ModelParamsModel
    sweep_axes: list[SweepAxisModel] = Field(min_length=1, max_length=2)
    schedule: ScheduleModel = ScheduleModel()
    master_seed: int = Field(ge=0)
    redraw_field: bool = False
    bias_method: Literal["smooth_inpaint", "cubic"] = "smooth_inpaint"

    def to_core(self) -> SweepConfig:
        return SweepConfig(
            dims=self.data.to_core(),
            field_spec=self.data.to_wm_spec(),
            mask_spec=self.mask.to_core(),
            n_configs=self.S,
            base_params=self.fixed_params.to_core(),
            axes=tuple(SweepAxis(name=a.name, values=tuple(a.values))
                       for a in self.sweep_axes),
            schedule=self.schedule.to_core(),
            master_seed=self.master_seed,
            n_modes=self.data.n_modes,
            redraw_field=self.redraw_field,
            bias_method=self.bias_method,
        )


class SweepRequest(SweepConfigModel):
    workers: Optional[int] = None  # execution detail; not part of the experiment


class SweepRowModel(BaseModel):
    axes: dict[str, float]
    maae: float
    mare: float
    maare: float
    mrase: float
    config_metrics: list[list[float]]
    seeds: list[int]


class SweepResponse(BaseModel):
    axis_names: list[str]
    rows: list[SweepRowModel]
    n_configs: int
    master_seed: int
    config: dict
    config_hash: str
    elapsed_seconds: float


class MetricsRequest(BaseModel):
    truth: list[float] = Field(min_length=1)
    predicted: list[float] = Field(min_length=1)


class MetricsResponse(BaseModel):
    aae: float
    are: float
    aare: float
    rase: float


class HealthResponse(BaseModel):
    status: str
    version: str


def grid_from_rows(rows: list[list[Optional[float]]]) -> np.ndarray:
    """Nested lists (null allowed) -> float array with NaN at nulls."""
    if not rows or not rows[0]:
        raise ValueError("grid payload is empty")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("grid payload rows have inconsistent lengths")
    arr = np.asarray([[np.nan if c is None else float(c) for c in r] for r in rows])
    return arr


def grid_to_rows(arr: np.ndarray) -> list[list[Optional[float]]]:
    """Float array -> nested lists with null at NaN."""
    out: list[list[Optional[float]]] = []
    for row in np.asarray(arr, dtype=float):
        out.append([None if not np.isfinite(v) else float(v) for v in row])
    return out


def mask_from_rows(rows: list[list[int]]) -> ObservationMask:
    arr = np.asarray(rows, dtype=float)
    return ObservationMask(observed=arr.astype(bool))
