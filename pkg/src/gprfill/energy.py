"""Lattice energy: total Hamiltonian, per-site local energy and Metropolis factors.

The energy couples half-angle cosines of spin differences through the
:mod:`potential` family over three pair classes (x neighbors, y neighbors,
knight's-move further neighbors), plus one of two optional external field
terms:

    H = - j_x * sum_x V(cos(q dphi)) - j_y * sum_y V(...) - j_fn * sum_fn V(...)
        - coupling * sum_i cos((phi_i - h_i) / 2)

where ``h`` is a smooth per-site bias field ("bias" mode) or identically zero
("uniform" mode, coupling of either sign). Angle differences are NOT wrapped:
with q = 1/2 the angle space [0, 2*pi] behaves as a bounded linear scale and 0
and 2*pi are maximally distant on purpose.

All interactions are pairwise, so a single-site angle change satisfies
``dH_total == dH_local`` exactly; the sampler relies on this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grid import NeighborTables
from .potential import PotentialParams, pair_potential
from .transform import TWO_PI, SpinField

FIELD_MODES = ("none", "bias", "uniform")


@dataclass(frozen=True)
class ModelParams:
    """Full parameter set of the random-field model.

    ``j_nn`` in [0, 1] splits unit nearest-neighbor strength anisotropically:
    x pairs couple with ``1 - j_nn``, y pairs with ``j_nn``. ``j_fn`` couples
    the eight knight's-move neighbors and may be negative. ``field_coupling``
    is the bias weight K (>= 0, "bias" mode) or the uniform field K' (any
    sign, "uniform" mode). Temperature is in units with k_B = 1.
    """

    temperature: float
    potential: PotentialParams = PotentialParams()
    j_nn: float = 0.5
    j_fn: float = 0.0
    field_mode: str = "none"
    field_coupling: float = 0.0

    def __post_init__(self) -> None:
        if not self.temperature > 0.0:
            raise ConfigurationError(f"temperature must be positive, got {self.temperature}")
        if not 0.0 <= self.j_nn <= 1.0:
            raise ConfigurationError(f"j_nn must lie in [0, 1], got {self.j_nn}")
        if self.field_mode not in FIELD_MODES:
            raise ConfigurationError(f"field_mode must be one of {FIELD_MODES}")
        if self.field_mode == "bias" and self.field_coupling < 0.0:
            raise ConfigurationError("bias coupling K must be non-negative")

    @property
    def j_nn_x(self) -> float:
        return 1.0 - self.j_nn

    @property
    def j_nn_y(self) -> float:
        return self.j_nn


@dataclass(frozen=True)
class BiasField:
    """Per-site attractor angles h in [0, 2*pi].

    ``n_clamped`` reports how many interpolated values had to be clipped back
    into range by the provider that built the field.
    """

    h: np.ndarray
    n_clamped: int = 0

    def __post_init__(self) -> None:
        h = np.asarray(self.h, dtype=float)
        if not np.all(np.isfinite(h)):
            raise ConfigurationError("bias field contains non-finite entries")
        if h.min() < -1e-12 or h.max() > TWO_PI + 1e-12:
            raise ConfigurationError("bias field angles must lie in [0, 2*pi]")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)


def bias_term(phi, h):
    """Alignment score cos((phi - h)/2); 1 at phi == h, -1 at |phi - h| = 2*pi."""
    return np.cos((np.asarray(phi, dtype=float) - np.asarray(h, dtype=float)) / 2.0)


def _angles_flat(spins) -> np.ndarray:
    arr = spins.angles if isinstance(spins, SpinField) else np.asarray(spins, dtype=float)
    return arr.ravel()


def _field_angles(params: ModelParams, bias: BiasField | None) -> np.ndarray | None:
    """Resolve the per-site field attractor, or None when no field is active."""
    if params.field_mode == "none":
        return None
    if params.field_mode == "uniform":
        return np.zeros(0)  # broadcastable stand-in for h == 0 everywhere
    if bias is None:
        raise ConfigurationError("field_mode 'bias' requires a bias field")
    return bias.h.ravel()


class LocalEnergy:
    """Vectorized per-site energy for a fixed (params, tables, bias) triple.

    Zero-coupling interaction classes are dropped from the gather, so e.g. a
    run without further-neighbor coupling never touches the fn adjacency.
    """

    def __init__(self, params: ModelParams, tables: NeighborTables, bias: BiasField | None = None):
        self.params = params
        idx_cols = []
        weight_cols = []
        for (idx, valid), coupling in (
            (tables.adjacency("nn_x"), params.j_nn_x),
            (tables.adjacency("nn_y"), params.j_nn_y),
            (tables.adjacency("fn"), params.j_fn),
        ):
            if coupling != 0.0:
                idx_cols.append(idx)
                weight_cols.append(coupling * valid)
        if idx_cols:
            self._idx = np.concatenate(idx_cols, axis=1)
            self._weights = np.concatenate(weight_cols, axis=1)
        else:
            self._idx = np.zeros((tables.dims.n_sites, 0), dtype=np.int64)
            self._weights = np.zeros((tables.dims.n_sites, 0))
        self._h = _field_angles(params, bias)

    def at(self, sites: np.ndarray, values: np.ndarray, angles_flat: np.ndarray) -> np.ndarray:
        """Energy of all Hamiltonian terms touching each site, evaluated as if
        the site's angle were ``values``; neighbors read from ``angles_flat``."""
        pot = self.params.potential
        nb = angles_flat[self._idx[sites]]
        v = pair_potential(np.cos(pot.q * (values[:, None] - nb)), pot)
        e = -np.sum(self._weights[sites] * v, axis=1)
        if self._h is not None:
            h = 0.0 if self._h.size == 0 else self._h[sites]
            e -= self.params.field_coupling * np.cos((values - h) / 2.0)
        return e


def local_energy(site: int, spins, params: ModelParams, tables: NeighborTables,
                 bias: BiasField | None = None) -> float:
    """Sum of every Hamiltonian term touching ``site`` (interactions + field)."""
    ang = _angles_flat(spins)
    sites = np.asarray([site])
    nbrs = np.concatenate([tables.neighbors(site, k) for k in ("nn_x", "nn_y", "fn")])
    if np.isnan(ang[site]) or np.isnan(ang[nbrs]).any():
        raise ConfigurationError("local energy requires the site and its neighbors set")
    kernel = LocalEnergy(params, tables, bias)
    return float(kernel.at(sites, ang[sites], ang)[0])


def total_energy(spins, params: ModelParams, tables: NeighborTables,
                 bias: BiasField | None = None) -> float:
    """Full Hamiltonian, each interacting pair counted once."""
    ang = _angles_flat(spins)
    if np.isnan(ang).any():
        raise ConfigurationError("total energy requires every angle set (no NaN)")
    pot = params.potential
    parts = []
    for kind, coupling in (("nn_x", params.j_nn_x), ("nn_y", params.j_nn_y), ("fn", params.j_fn)):
        if coupling == 0.0:
            continue
        pairs = tables.pairs(kind)
        if len(pairs) == 0:
            continue
        v = pair_potential(np.cos(pot.q * (ang[pairs[:, 0]] - ang[pairs[:, 1]])), pot)
        parts.append(-coupling * float(np.sum(v)))
    h = _field_angles(params, bias)
    if h is not None:
        attractor = 0.0 if h.size == 0 else h
        parts.append(-params.field_coupling * float(np.sum(np.cos((ang - attractor) / 2.0))))
    return math.fsum(parts)


def boltzmann_factor(d_h: float, temperature: float) -> float:
    """exp(-dH / T); callers clamp to 1 for dH <= 0 when used as an acceptance
    probability."""
    if not temperature > 0.0:
        raise ConfigurationError(f"temperature must be positive, got {temperature}")
    try:
        return math.exp(-d_h / temperature)
    except OverflowError:
        return math.inf
