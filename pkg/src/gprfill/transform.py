"""Linear bijection between data values and spin angles in [0, 2*pi].

The map is anchored to the observed sample only: the smallest observed value
goes to angle 0 and the largest to 2*pi. Predictions mapped back are therefore
confined to the observed value range by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AngleRangeError, DegenerateRangeError, EmptySampleError
from .grid import ObservationMask

TWO_PI = 2.0 * math.pi

# Angles may stray this far outside [0, 2*pi] from rounding before the inverse
# map refuses them.
ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class TransformSpec:
    """Value range [z_min, z_max] mapped linearly onto [0, 2*pi]."""

    z_min: float
    z_max: float

    def __post_init__(self) -> None:
        if not self.z_max > self.z_min:
            raise DegenerateRangeError(
                f"need z_max > z_min, got [{self.z_min}, {self.z_max}]"
            )

    @property
    def span(self) -> float:
        return self.z_max - self.z_min

    def to_angle(self, values: np.ndarray) -> np.ndarray:
        return TWO_PI * (np.asarray(values, dtype=float) - self.z_min) / self.span

    def to_value(self, angles: np.ndarray) -> np.ndarray:
        return self.z_min + self.span * np.asarray(angles, dtype=float) / TWO_PI


@dataclass
class SpinField:
    """Angle-valued lattice with its observation mask.

    ``angles`` is (ny, nx) float64 in [0, 2*pi]; missing sites hold NaN until
    initialized by the sampler, so accidental use of an unset angle poisons
    results instead of silently reading 0.
    """

    angles: np.ndarray
    mask: ObservationMask

    @property
    def shape(self) -> tuple[int, int]:
        return self.angles.shape

    def copy(self) -> "SpinField":
        return SpinField(angles=self.angles.copy(), mask=self.mask)


def to_spin_angles(sample: np.ndarray, mask: ObservationMask) -> tuple[SpinField, TransformSpec]:
    """Map observed sample values onto spin angles.

    Parameters
    ----------
    sample : (ny, nx) array of data values; entries at missing sites are ignored.
    mask : observation mask of the same shape.

    Returns the spin field (NaN at missing sites) and the transform anchored to
    the observed min/max.
    """
    sample = np.asarray(sample, dtype=float)
    if sample.shape != mask.observed.shape:
        raise DegenerateRangeError(
            f"sample shape {sample.shape} does not match mask {mask.observed.shape}"
        )
    obs_vals = sample[mask.observed]
    if obs_vals.size == 0:
        raise EmptySampleError("no observed values to anchor the angle map")
    if not np.all(np.isfinite(obs_vals)):
        raise DegenerateRangeError("observed sample contains non-finite values")
    spec = TransformSpec(z_min=float(obs_vals.min()), z_max=float(obs_vals.max()))
    angles = np.full(sample.shape, np.nan)
    angles[mask.observed] = spec.to_angle(obs_vals)
    return SpinField(angles=angles, mask=mask), spec


def from_spin_angles(angles, spec: TransformSpec) -> np.ndarray:
    """Map angles back to data units; inverse of :func:`to_spin_angles`.

    NaN entries pass through (they mark sites without a value). Angles beyond
    [0, 2*pi] by more than ``ANGLE_TOL`` raise; smaller excursions are clipped.
    """
    if isinstance(angles, SpinField):
        angles = angles.angles
    arr = np.asarray(angles, dtype=float)
    finite = np.isfinite(arr)
    bad = finite & ((arr < -ANGLE_TOL) | (arr > TWO_PI + ANGLE_TOL))
    if bad.any():
        worst = float(arr[bad].flat[0])
        raise AngleRangeError(f"angle {worst} outside [0, 2*pi] beyond tolerance")
    out = np.asarray(spec.to_value(np.clip(arr, 0.0, TWO_PI)))
    out[~finite] = np.nan
    return out if arr.ndim else float(out)
