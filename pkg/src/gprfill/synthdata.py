"""Synthetic ground truth: Whittle-Matern covariance, random-field generation
by spectral mode superposition, and the two missing-data designs.

The covariance is

    G(u) = sigma^2 * 2^(1-nu) / Gamma(nu) * rho^nu * K_nu(rho),
    rho  = sqrt((u1/xi_x)^2 + (u2/xi_y)^2),

with smoothness ``nu`` and per-axis correlation lengths; unequal lengths give
geometric anisotropy with axes aligned to the grid. Fields are sums of random
cosine modes whose wavevectors follow the matching spectral density: in the
rescaled variable t = (xi_x*k1, xi_y*k2) the density is radially symmetric,
proportional to (1 + |t|^2)^(-(nu+1)) in 2D, so the radius has the exact
inverse CDF ``r = sqrt((1-u)^(-1/nu) - 1)``. Agreement of the empirical
covariance of generated fields with G(u) is asserted by the test suite rather
than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import kv

from .errors import ConfigurationError, DimensionError
from .grid import GridDims, ObservationMask

FIELD_LAWS = ("gaussian", "lognormal")
MASK_KINDS = ("thinning", "block")

DEFAULT_N_MODES = 1000

# Chunk the (modes x sites) phase matrix to bound peak memory on large grids.
_MODE_CHUNK = 128


@dataclass(frozen=True)
class WmSpec:
    """Whittle-Matern field description.

    For the lognormal law, ``mean`` and ``sigma`` parameterize the log of the
    field (the underlying Gaussian), matching how skewed test data are usually
    specified.
    """

    mean: float
    sigma: float
    nu: float
    xi_x: float
    xi_y: float
    law: str = "gaussian"

    def __post_init__(self) -> None:
        for name in ("sigma", "nu", "xi_x", "xi_y"):
            if not getattr(self, name) > 0.0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.law not in FIELD_LAWS:
            raise ConfigurationError(f"law must be one of {FIELD_LAWS}, got {self.law!r}")


@dataclass(frozen=True)
class MaskSpec:
    """Missing-data design: remove ``p`` percent of sites at random, or one
    solid ``block_side`` x ``block_side`` square at a random anchor."""

    kind: str
    p: float | None = None
    block_side: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in MASK_KINDS:
            raise ConfigurationError(f"kind must be one of {MASK_KINDS}, got {self.kind!r}")
        if self.kind == "thinning":
            if self.p is None or not 0.0 < self.p < 100.0:
                raise ConfigurationError(f"thinning needs p in (0, 100), got {self.p}")
        else:
            if self.block_side is None or self.block_side < 1:
                raise ConfigurationError(f"block needs block_side >= 1, got {self.block_side}")


def wm_covariance(lag, spec: WmSpec):
    """Covariance at lag vector(s) ``(u1, u2)`` in grid units.

    ``lag`` is a length-2 sequence or an (..., 2) array; returns a scalar or
    the leading shape. The rho -> 0 limit is sigma^2 exactly.
    """
    lag = np.asarray(lag, dtype=float)
    if lag.shape[-1] != 2:
        raise DimensionError(f"lag must have a trailing axis of size 2, got shape {lag.shape}")
    rho = np.hypot(lag[..., 0] / spec.xi_x, lag[..., 1] / spec.xi_y)
    scale = spec.sigma**2 * 2.0 ** (1.0 - spec.nu) / gamma_fn(spec.nu)
    with np.errstate(invalid="ignore"):
        val = scale * rho**spec.nu * kv(spec.nu, rho)
    out = np.where(rho == 0.0, spec.sigma**2, val)
    return out if out.ndim else float(out)


def _sample_wavevectors(n_modes: int, spec: WmSpec, rng: np.random.Generator):
    """Draw wavevectors from the normalized spectral density by inverse CDF on
    the rescaled radius, then undo the anisotropy rescaling."""
    u = rng.random(n_modes)
    radius = np.sqrt((1.0 - u) ** (-1.0 / spec.nu) - 1.0)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n_modes)
    k1 = radius * np.cos(theta) / spec.xi_x
    k2 = radius * np.sin(theta) / spec.xi_y
    return k1, k2


def generate_field(dims: GridDims, spec: WmSpec, n_modes: int = DEFAULT_N_MODES,
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """Generate one field realization on the grid.

    Gaussian law: Z(r) = mean + sigma * sqrt(2/M) * sum_j cos(k_j . r + psi_j)
    with uniform phases; every mode contributes variance sigma^2 / M, so the
    per-site variance is sigma^2 exactly. Lognormal law exponentiates the
    Gaussian construction. Returns a (ny, nx) array.
    """
    if n_modes < 100:
        raise ConfigurationError(f"n_modes must be >= 100 for a usable spectrum, got {n_modes}")
    if rng is None:
        rng = np.random.default_rng()
    k1, k2 = _sample_wavevectors(n_modes, spec, rng)
    psi = rng.uniform(0.0, 2.0 * math.pi, size=n_modes)

    sites = np.arange(dims.n_sites)
    xs = (sites % dims.nx).astype(float)
    ys = (sites // dims.nx).astype(float)

    acc = np.zeros(dims.n_sites)
    for lo in range(0, n_modes, _MODE_CHUNK):
        hi = min(lo + _MODE_CHUNK, n_modes)
        phase = (k1[lo:hi, None] * xs[None, :] + k2[lo:hi, None] * ys[None, :]
                 + psi[lo:hi, None])
        acc += np.cos(phase).sum(axis=0)

    gauss = spec.mean + spec.sigma * math.sqrt(2.0 / n_modes) * acc
    field = np.exp(gauss) if spec.law == "lognormal" else gauss
    return field.reshape(dims.shape)


def make_mask(dims: GridDims, spec: MaskSpec, rng: np.random.Generator | None = None) -> ObservationMask:
    """Draw an observation mask for the grid per the design in ``spec``.

    Thinning removes exactly floor(p/100 * n_sites) uniformly chosen sites;
    block removes one square whose anchor (x then y) is uniform over in-bounds
    positions.
    """
    if rng is None:
        rng = np.random.default_rng()
    observed = np.ones(dims.shape, dtype=bool)
    if spec.kind == "thinning":
        n_remove = int(math.floor(spec.p / 100.0 * dims.n_sites))
        removed = rng.choice(dims.n_sites, size=n_remove, replace=False)
        observed.ravel()[removed] = False
    else:
        side = int(spec.block_side)
        if side > dims.nx or side > dims.ny:
            raise DimensionError(
                f"block of side {side} does not fit a {dims.nx}x{dims.ny} grid")
        x0 = int(rng.integers(0, dims.nx - side + 1))
        y0 = int(rng.integers(0, dims.ny - side + 1))
        observed[y0:y0 + side, x0:x0 + side] = False
    return ObservationMask(observed=observed)
