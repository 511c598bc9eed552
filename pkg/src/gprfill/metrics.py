"""Prediction validation measures and their means over sample configurations.

Errors are ``eps = truth - predicted`` at the prediction sites. The relative
measures divide by the signed true value, as is conventional for positive-
valued data; exact zeros in the truth are a hard error rather than a silent
NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class MetricSet:
    """Absolute (aae, rase, data units) and relative (are, aare) error measures."""

    aae: float
    are: float
    aare: float
    rase: float

    def as_dict(self) -> dict[str, float]:
        return {"aae": self.aae, "are": self.are, "aare": self.aare, "rase": self.rase}

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.aae, self.are, self.aare, self.rase)


def compute_metrics(truth: Sequence[float], predicted: Sequence[float]) -> MetricSet:
    """Error measures of one prediction run.

    ``truth`` and ``predicted`` are equal-length value sequences over the
    prediction sites (order irrelevant). Raises :class:`DomainError` naming
    the offending positions when any true value is exactly zero.
    """
    t = np.asarray(truth, dtype=float).ravel()
    p = np.asarray(predicted, dtype=float).ravel()
    if t.size != p.size:
        raise DomainError(f"truth ({t.size}) and predicted ({p.size}) lengths differ")
    if t.size == 0:
        raise DomainError("metrics need at least one prediction site")
    zeros = np.flatnonzero(t == 0.0)
    if zeros.size:
        shown = ", ".join(str(int(i)) for i in zeros[:10])
        raise DomainError(f"relative errors undefined: truth is zero at positions [{shown}]")
    eps = t - p
    return MetricSet(
        aae=float(np.mean(np.abs(eps))),
        are=float(np.mean(eps / t)),
        aare=float(np.mean(np.abs(eps) / t)),
        rase=math.sqrt(float(np.mean(eps**2))),
    )


def aggregate(sets: Iterable[MetricSet]) -> MetricSet:
    """Component-wise mean over sample configurations."""
    rows = [s.as_tuple() for s in sets]
    if not rows:
        raise DomainError("cannot aggregate an empty collection of metric sets")
    means = np.mean(np.asarray(rows, dtype=float), axis=0)
    return MetricSet(aae=float(means[0]), are=float(means[1]),
                     aare=float(means[2]), rase=float(means[3]))
