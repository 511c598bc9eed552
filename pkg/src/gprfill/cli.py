"""Command-line interface.

The CLI is a thin client of the HTTP API: it parses and writes local CSV/JSON
files and ships the numbers to the service (an in-process instance by default,
or a remote one via ``--url``). Global flags come before the subcommand, e.g.
``gprfill --seed 7 generate --nx 64 --ny 64 --sigma 2 --mean 5``.
"""

from __future__ import annotations

import functools
import json
import math
import sys
from pathlib import Path

import click
import numpy as np
import pydantic

from . import io
from .errors import GprFillError
from .grid import ObservationMask
from .service import schemas
from .service.client import ServiceClient


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="RNG seed for commands that draw randomness.")
@click.option("--threads", type=int, default=None,
              help="Worker processes for sweep execution (default: CPU count).")
@click.option("--out", type=click.Path(), default=None,
              help="Output path (or prefix for multi-file commands).")
@click.option("--url", type=str, default=None,
              help="Base URL of a running gprfill service; in-process if omitted.")
@click.pass_context
def main(ctx, seed, threads, out, url):
    """Gap filling of 2D gridded data by conditional Monte Carlo simulation."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, threads=threads, out=out, url=url)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except pydantic.ValidationError as exc:
            lines = [f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}"
                     for e in exc.errors()]
            _fail("invalid configuration: " + "; ".join(lines))
        except GprFillError as exc:
            _fail(str(exc))
    return wrapper


def _client(ctx) -> ServiceClient:
    return ServiceClient(base_url=ctx.obj["url"])


def _out_path(ctx, default: str) -> Path:
    return Path(ctx.obj["out"] or default)


def _model_options(fn):
    decorators = [
        click.option("--temperature", "-t", type=float, default=0.001, show_default=True),
        click.option("--n", type=int, default=1, show_default=True,
                     help="Harmonic count; 0 means the infinite series."),
        click.option("--alpha", type=float, default=None,
                     help="Harmonic decay rate > 1; omit for the plain-cosine limit."),
        click.option("--j-nn", type=float, default=0.5, show_default=True,
                     help="Anisotropy weight: x pairs couple with 1-j_nn, y pairs with j_nn."),
        click.option("--j-fn", type=float, default=0.0, show_default=True,
                     help="Knight's-move neighbor coupling (may be negative)."),
        click.option("--field-mode", type=click.Choice(["none", "bias", "uniform"]),
                     default="none", show_default=True),
        click.option("--field-coupling", "-k", type=float, default=0.0, show_default=True,
                     help="Bias weight K (bias mode) or uniform field K' (uniform mode)."),
        click.option("--bias-method", type=click.Choice(["smooth_inpaint", "cubic"]),
                     default="smooth_inpaint", show_default=True,
                     help="Interpolator behind the bias field."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _schedule_options(fn):
    decorators = [
        click.option("--burn-in", type=int, default=200, show_default=True),
        click.option("--averaging", type=int, default=300, show_default=True),
        click.option("--proposal-width", type=float, default=math.pi / 2,
                     help="Half-width of the uniform angle proposal (radians)."),
        click.option("--init", type=click.Choice(["uniform", "empirical"]),
                     default="uniform", show_default=True,
                     help="How missing spins are initialized."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _params_payload(temperature, n, alpha, j_nn, j_fn, field_mode, field_coupling) -> dict:
    return schemas.ModelParamsModel(
        temperature=temperature,
        n=None if n == 0 else n,
        alpha=alpha,
        j_nn=j_nn,
        j_fn=j_fn,
        field_mode=field_mode,
        field_coupling=field_coupling,
    ).model_dump()


@main.command()
@click.option("--nx", type=int, required=True)
@click.option("--ny", type=int, required=True)
@click.option("--mean", type=float, required=True)
@click.option("--sigma", type=float, required=True)
@click.option("--nu", type=float, default=2.5, show_default=True)
@click.option("--xi-x", type=float, default=2.0, show_default=True)
@click.option("--xi-y", type=float, default=2.0, show_default=True)
@click.option("--law", type=click.Choice(["gaussian", "lognormal"]), default="gaussian",
              show_default=True)
@click.option("--modes", type=int, default=1000, show_default=True)
@click.pass_context
@_handle_errors
def generate(ctx, nx, ny, mean, sigma, nu, xi_x, xi_y, law, modes):
    """Generate a synthetic truth field; writes the grid CSV plus a sidecar
    JSON recording the field description and seed."""
    request = schemas.GenerateRequest(nx=nx, ny=ny, mean=mean, sigma=sigma, nu=nu,
                                      xi_x=xi_x, xi_y=xi_y, law=law, n_modes=modes,
                                      seed=ctx.obj["seed"])
    with _client(ctx) as client:
        response = client.post("/generate", request.model_dump())
    out = _out_path(ctx, "field.csv")
    io.write_grid_csv(out, np.asarray(response["values"]))
    io.dump_json(out.with_suffix(out.suffix + ".json"), response["provenance"])
    click.echo(f"wrote {out}")


@main.command()
@click.option("--nx", type=int, required=True)
@click.option("--ny", type=int, required=True)
@click.option("--kind", type=click.Choice(["thinning", "block"]), required=True)
@click.option("--p", type=float, default=None, help="Percent of sites to remove (thinning).")
@click.option("--block-side", type=int, default=None, help="Square side length (block).")
@click.pass_context
@_handle_errors
def mask(ctx, nx, ny, kind, p, block_side):
    """Draw an observation mask (1 = observed, 0 = missing)."""
    request = schemas.MaskRequest(nx=nx, ny=ny, kind=kind, p=p, block_side=block_side,
                                  seed=ctx.obj["seed"])
    with _client(ctx) as client:
        response = client.post("/mask", request.model_dump())
    out = _out_path(ctx, "mask.csv")
    io.write_mask_csv(out, ObservationMask(observed=np.asarray(response["mask"], dtype=bool)))
    click.echo(f"wrote {out} ({response['n_missing']} missing of "
               f"{response['n_missing'] + response['n_observed']})")


@main.command()
@click.argument("sample", type=click.Path(exists=True))
@click.argument("mask_file", type=click.Path(exists=True))
@_model_options
@_schedule_options
@click.option("--trace-out", type=click.Path(), default=None,
              help="Also write the per-sweep specific-energy trace CSV.")
@click.option("--filled-out", type=click.Path(), default=None,
              help="Also write the sample with gaps filled, as a grid CSV.")
@click.pass_context
@_handle_errors
def predict(ctx, sample, mask_file, temperature, n, alpha, j_nn, j_fn, field_mode,
            field_coupling, bias_method, burn_in, averaging, proposal_width, init,
            trace_out, filled_out):
    """Fill the gaps of SAMPLE (grid CSV) at the sites MASK_FILE marks missing.

    Writes one x,y,value row per predicted site.
    """
    sample_grid = io.read_grid_csv(sample)
    mask_obj = io.read_mask_csv(mask_file)
    request = schemas.PredictRequest(
        sample=schemas.grid_to_rows(sample_grid),
        mask=[[int(v) for v in row] for row in mask_obj.observed],
        params=_params_payload(temperature, n, alpha, j_nn, j_fn, field_mode, field_coupling),
        schedule=schemas.ScheduleModel(burn_in=burn_in, averaging=averaging,
                                       proposal_width=proposal_width, seed=ctx.obj["seed"],
                                       init=init),
        bias_method=bias_method,
    )
    with _client(ctx) as client:
        response = client.post("/predict", request.model_dump())
    predicted = schemas.grid_from_rows(response["predicted"])
    out = _out_path(ctx, "predictions.csv")
    io.write_predictions_csv(out, predicted)
    if trace_out:
        io.write_trace_csv(trace_out, response["energy_trace"])
    if filled_out:
        filled = np.where(mask_obj.observed, sample_grid, predicted)
        io.write_grid_csv(filled_out, filled)
    click.echo(f"wrote {out} ({response['n_predicted']} predictions)")


@main.command("baseline-bc")
@click.argument("sample", type=click.Path(exists=True))
@click.argument("mask_file", type=click.Path(exists=True))
@click.option("--bias-method", type=click.Choice(["smooth_inpaint", "cubic"]),
              default="smooth_inpaint", show_default=True)
@click.pass_context
@_handle_errors
def baseline_bc(ctx, sample, mask_file, bias_method):
    """Fill gaps by smooth interpolation alone (the field-dominated limit)."""
    sample_grid = io.read_grid_csv(sample)
    mask_obj = io.read_mask_csv(mask_file)
    request = schemas.BaselineRequest(
        sample=schemas.grid_to_rows(sample_grid),
        mask=[[int(v) for v in row] for row in mask_obj.observed],
        bias_method=bias_method,
    )
    with _client(ctx) as client:
        response = client.post("/baseline-bc", request.model_dump())
    predicted = schemas.grid_from_rows(response["predicted"])
    out = _out_path(ctx, "baseline.csv")
    io.write_predictions_csv(out, predicted)
    click.echo(f"wrote {out}")


@main.command()
@click.option("--nx", type=int, default=64, show_default=True)
@click.option("--ny", type=int, default=64, show_default=True)
@click.option("--temperature", "-t", type=float, default=0.1, show_default=True)
@click.option("--k-prime", type=float, default=0.0, show_default=True,
              help="Uniform field strength (sign skews the angle distribution).")
@click.option("--burn-in", type=int, default=200, show_default=True)
@click.option("--snapshots", type=int, default=300, show_default=True)
@click.option("--bins", type=int, default=60, show_default=True)
@click.pass_context
@_handle_errors
def histogram(ctx, nx, ny, temperature, k_prime, burn_in, snapshots, bins):
    """Histogram spin angles from a free-running (unconditional) simulation."""
    params = schemas.ModelParamsModel(temperature=temperature,
                                      field_mode="uniform" if k_prime else "none",
                                      field_coupling=k_prime)
    request = schemas.HistogramRequest(
        nx=nx, ny=ny, params=params,
        schedule=schemas.ScheduleModel(burn_in=burn_in, averaging=snapshots,
                                       seed=ctx.obj["seed"]),
        bins=bins,
    )
    with _client(ctx) as client:
        response = client.post("/histogram", request.model_dump())
    out = _out_path(ctx, "histogram.csv")
    io.write_histogram_csv(out, response["bin_edges"], response["counts"])
    click.echo(f"wrote {out} (mean angle {response['mean_angle']:.4f}, "
               f"std {response['std_angle']:.4f})")


@main.command()
@click.argument("config", type=click.Path(exists=True))
@click.pass_context
@_handle_errors
def sweep(ctx, config):
    """Run the parameter sweep described by CONFIG (JSON).

    Writes ``<out>.csv`` (one row per parameter cell) and ``<out>.json``
    (full provenance: config, hash, per-configuration metrics, seeds).
    """
    path = Path(config)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        _fail(f"{path}: invalid JSON: {exc}")
    if ctx.obj["threads"] is not None:
        document["workers"] = ctx.obj["threads"]
    request = schemas.SweepRequest(**document)
    with _client(ctx) as client:
        response = client.post("/sweep", request.model_dump())
    prefix = Path(ctx.obj["out"] or "sweep_result")
    if prefix.suffix == ".csv":
        prefix = prefix.with_suffix("")
    csv_rows = [(row["axes"], row["maae"], row["mare"], row["maare"], row["mrase"])
                for row in response["rows"]]
    io.write_sweep_csv(prefix.with_suffix(".csv"), response["axis_names"], csv_rows,
                       response["n_configs"], response["master_seed"])
    provenance = {
        "config": response["config"],
        "config_hash": response["config_hash"],
        "axis_names": response["axis_names"],
        "rows": response["rows"],
    }
    io.dump_json(prefix.with_suffix(".json"), provenance)
    click.echo(f"wrote {prefix.with_suffix('.csv')} and {prefix.with_suffix('.json')} "
               f"({len(response['rows'])} cells)")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("gprfill.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
