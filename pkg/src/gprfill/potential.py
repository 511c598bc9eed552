"""Pairwise interaction potential with exponentially decaying higher harmonics.

The potential is a weighted sum of powers of the half-angle cosine,

    V(c) = sum_{k=1..n} w_k c^k / sum_{k=1..n} w_k,   w_k = alpha**(-k),

with ``c = cos(q * (phi_i - phi_j))`` supplied by the energy module. The
normalization forces V(1) = 1 regardless of (n, alpha). Closed forms:

    finite n : V(c) = J(n, alpha) * c * (1 - (c/alpha)**n) / (alpha - c)
    n -> inf : V(c) = (alpha - 1) * c / (alpha - c)

with J(n, alpha) = (alpha - 1) / (1 - alpha**(-n)). Note the denominator is
(alpha - c): written with (c - alpha) the n=1 case would flip to -c and the
maximum would sit at maximal angle contrast instead of zero contrast, which
contradicts the normalized series itself.

Both n=1 and alpha=inf collapse to the plain cosine potential (the
single-harmonic baseline model), and are short-circuited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

# Below this gap between alpha and c the closed form for finite n loses digits
# to cancellation in (1 - alpha**(-n)); the series is evaluated directly.
_CLOSED_FORM_GUARD = 1e-12

# The direct-summation oracle is for testing; cap n so it stays cheap.
_ORACLE_MAX_N = 64


@dataclass(frozen=True)
class PotentialParams:
    """Harmonic count ``n`` (int or math.inf), decay rate ``alpha`` (> 1 or
    math.inf) and the fixed half-angle factor ``q``."""

    n: float = 1
    alpha: float = math.inf
    q: float = 0.5

    def __post_init__(self) -> None:
        n = self.n
        if not math.isinf(n):
            if n != int(n) or n < 1:
                raise ConfigurationError(f"n must be a positive integer or inf, got {n}")
            object.__setattr__(self, "n", int(n))
        if self.n != 1 and not (self.alpha > 1.0):
            raise ConfigurationError(
                f"alpha must exceed 1 when n >= 2 (got alpha={self.alpha}, n={self.n})"
            )
        if self.q != 0.5:
            raise ConfigurationError("only the half-angle factor q = 1/2 is supported")

    @property
    def is_single_harmonic(self) -> bool:
        """True when the potential degenerates to plain cos (n=1 or alpha=inf)."""
        return self.n == 1 or math.isinf(self.alpha)


def normalization(n: float, alpha: float) -> float:
    """Weight-sum normalizer J(n, alpha); J * sum_k alpha**(-k) == 1."""
    if math.isinf(alpha):
        return 1.0  # degenerate single-harmonic limit: V(c) = c needs no scaling
    if math.isinf(n):
        return alpha - 1.0
    return (alpha - 1.0) / (1.0 - alpha ** (-int(n)))


def _series(c: np.ndarray, n: int, alpha: float) -> np.ndarray:
    """Normalized direct summation of the weighted cosine powers."""
    num = np.zeros_like(c)
    den = 0.0
    term = np.ones_like(c)
    w = 1.0
    for _ in range(int(n)):
        term = term * (c / alpha)
        w /= alpha
        num += term
        den += w
    return num / den


def pair_potential(c, params: PotentialParams):
    """Evaluate the normalized potential at half-angle cosine(s) ``c``.

    Accepts scalars or arrays with |c| <= 1; returns the same shape. The value
    is 1 exactly at c = 1 and reduces to ``c`` itself for n=1 or alpha=inf.
    """
    arr = np.asarray(c, dtype=float)
    if params.is_single_harmonic:
        out = arr
    elif math.isinf(params.n):
        # alpha - c is computed exactly for alpha, c of the same binary scale,
        # so no guard is needed even as alpha -> 1.
        out = (params.alpha - 1.0) * arr / (params.alpha - arr)
    else:
        n, alpha = int(params.n), params.alpha
        j = normalization(n, alpha)
        denom = alpha - arr
        out = j * arr * (1.0 - (arr / alpha) ** n) / denom
        guard = denom < _CLOSED_FORM_GUARD
        if guard.any():
            out = np.where(guard, _series(arr, n, alpha), out)
    return out if arr.ndim else float(out)


def series_oracle(c, n: float, alpha: float):
    """Reference evaluation of the truncated series, for testing the closed form.

    Only finite ``n <= 64`` is supported; the closed form is the production path.
    """
    if math.isinf(n):
        raise ConfigurationError("series oracle is undefined for n = inf")
    if n < 1 or n != int(n):
        raise ConfigurationError(f"n must be a positive integer, got {n}")
    if n > _ORACLE_MAX_N:
        raise ConfigurationError(f"series oracle capped at n <= {_ORACLE_MAX_N}")
    arr = np.asarray(c, dtype=float)
    out = _series(arr, int(n), alpha)
    return out if arr.ndim else float(out)
