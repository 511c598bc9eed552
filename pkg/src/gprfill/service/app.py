"""FastAPI application exposing the gap-filling pipeline.

Every endpoint is a stateless wrapper over the core package; nothing persists
between requests, so the service scales horizontally and a request is fully
described by its JSON body. Package errors map to HTTP 400 with the message in
``detail``.
"""

from __future__ import annotations

import time
from importlib.metadata import PackageNotFoundError, version

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..bias import get_provider, pure_bias_predict
from ..errors import GprFillError
from ..grid import GridDims, validate_mask
from ..harness import run_sweep
from ..io import config_hash
from ..metrics import compute_metrics
from ..sampler import conditional_predict, unconditional_simulate
from ..synthdata import generate_field, make_mask
from ..transform import to_spin_angles
from . import schemas as s

try:
    _VERSION = version("gprfill")
except PackageNotFoundError:  # running from a source tree
    _VERSION = "0.0.0+src"


def create_app() -> FastAPI:
    app = FastAPI(title="gprfill", version=_VERSION,
                  description="Gap filling of gridded data by conditional "
                              "Monte Carlo of a planar-rotator Gibbs random field")

    @app.exception_handler(GprFillError)
    async def _package_error(_request: Request, exc: GprFillError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=s.HealthResponse)
    def health():
        return s.HealthResponse(status="ok", version=_VERSION)

    @app.post("/generate", response_model=s.GenerateResponse)
    def generate(req: s.GenerateRequest):
        rng = np.random.default_rng(req.seed)
        field = generate_field(req.to_core(), req.to_wm_spec(), req.n_modes, rng)
        provenance = req.model_dump()
        return s.GenerateResponse(values=[[float(v) for v in row] for row in field],
                                  provenance=provenance)

    @app.post("/mask", response_model=s.MaskResponse)
    def mask(req: s.MaskRequest):
        rng = np.random.default_rng(req.seed)
        m = make_mask(req.to_dims(), req.to_core(), rng)
        return s.MaskResponse(mask=[[int(v) for v in row] for row in m.observed],
                              n_observed=m.n_observed, n_missing=m.n_missing)

    @app.post("/predict", response_model=s.PredictResponse)
    def predict(req: s.PredictRequest):
        sample = s.grid_from_rows(req.sample)
        m = s.mask_from_rows(req.mask)
        result = conditional_predict(sample, m, req.params.to_core(),
                                     req.schedule.to_core(),
                                     bias_provider=get_provider(req.bias_method))
        return s.PredictResponse(
            predicted=s.grid_to_rows(result.predicted),
            z_min=result.transform.z_min,
            z_max=result.transform.z_max,
            energy_trace=[float(e) for e in result.energy_trace],
            n_predicted=m.n_missing,
        )

    @app.post("/baseline-bc", response_model=s.BaselineResponse)
    def baseline(req: s.BaselineRequest):
        sample = s.grid_from_rows(req.sample)
        m = s.mask_from_rows(req.mask)
        dims = GridDims(nx=sample.shape[1], ny=sample.shape[0])
        validate_mask(m, dims)
        spins, spec = to_spin_angles(sample, m)
        field = get_provider(req.bias_method)(spins)
        predicted = pure_bias_predict(sample, m, provider=lambda _spins: field)
        return s.BaselineResponse(predicted=s.grid_to_rows(predicted),
                                  z_min=spec.z_min, z_max=spec.z_max,
                                  n_clamped=field.n_clamped)

    @app.post("/histogram", response_model=s.HistogramResponse)
    def histogram(req: s.HistogramRequest):
        snapshots = unconditional_simulate(req.to_core(), req.params.to_core(),
                                           req.schedule.to_core())
        angles = snapshots.ravel()
        counts, edges = np.histogram(angles, bins=req.bins, range=(0.0, 2 * np.pi))
        return s.HistogramResponse(
            bin_edges=[float(e) for e in edges],
            counts=[int(c) for c in counts],
            mean_angle=float(angles.mean()),
            std_angle=float(angles.std()),
            n_snapshots=snapshots.shape[0],
        )

    @app.post("/sweep", response_model=s.SweepResponse)
    def sweep(req: s.SweepRequest):
        config_doc = req.model_dump(exclude={"workers"})
        started = time.perf_counter()
        result = run_sweep(req.to_core(), workers=req.workers)
        elapsed = time.perf_counter() - started
        rows = [
            s.SweepRowModel(
                axes=row.axis_values,
                maae=row.mean.aae, mare=row.mean.are,
                maare=row.mean.aare, mrase=row.mean.rase,
                config_metrics=[list(m.as_tuple()) for m in row.per_config],
                seeds=list(row.seeds),
            )
            for row in result.rows
        ]
        return s.SweepResponse(
            axis_names=list(result.axis_names),
            rows=rows,
            n_configs=req.S,
            master_seed=req.master_seed,
            config=config_doc,
            config_hash=config_hash(config_doc),
            elapsed_seconds=elapsed,
        )

    @app.post("/metrics", response_model=s.MetricsResponse)
    def metrics(req: s.MetricsRequest):
        m = compute_metrics(req.truth, req.predicted)
        return s.MetricsResponse(**m.as_dict())

    return app


app = create_app()
