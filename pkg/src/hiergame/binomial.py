"""Numerically stable binomial probabilities.

Every expected payoff in the game is a nest of binomial terms, and stability
regions are needed up to group sizes of 50 and beyond. Small rows use the
multiplicative pmf recurrence in linear space; larger rows (or rows whose
starting term underflows) fall back to log-gamma.
"""

from __future__ import annotations

import math

import numpy as np

# Above this trial count the recurrence start (1-p)**m is at risk of
# underflow and factorial ratios lose nothing by going through logs.
_RECURRENCE_LIMIT = 120


def binomial_pmf(k: int, m: int, p: float) -> float:
    """P[Binomial(m, p) = k], stable for m up to at least a few hundred.

    Out-of-range k is simply an impossible outcome and returns 0.
    """
    _check_args(k, m, p)
    if k < 0 or k > m:
        return 0.0
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == m else 0.0
    if m > _RECURRENCE_LIMIT:
        return _pmf_log(k, m, p)
    start = (1.0 - p) ** m
    if start == 0.0:
        return _pmf_log(k, m, p)
    value = start
    ratio = p / (1.0 - p)
    for j in range(1, k + 1):
        value *= (m - j + 1) / j * ratio
    return value


def binomial_row(m: int, p: float) -> np.ndarray:
    """The full pmf row [P(X=0), ..., P(X=m)] for X ~ Binomial(m, p)."""
    _check_args(0, m, p)
    if p == 0.0:
        row = np.zeros(m + 1)
        row[0] = 1.0
        return row
    if p == 1.0:
        row = np.zeros(m + 1)
        row[m] = 1.0
        return row
    start = (1.0 - p) ** m if m <= _RECURRENCE_LIMIT else 0.0
    if m <= _RECURRENCE_LIMIT and start > 0.0:
        row = np.empty(m + 1)
        row[0] = start
        ratio = p / (1.0 - p)
        for k in range(1, m + 1):
            row[k] = row[k - 1] * (m - k + 1) / k * ratio
        return row
    return np.array([_pmf_log(k, m, p) for k in range(m + 1)])


def _pmf_log(k: int, m: int, p: float) -> float:
    log_value = (
        math.lgamma(m + 1)
        - math.lgamma(k + 1)
        - math.lgamma(m - k + 1)
        + k * math.log(p)
        + (m - k) * math.log1p(-p)
    )
    return math.exp(log_value)


def _check_args(k: int, m: int, p: float) -> None:
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise ValueError(f"trial count must be a nonnegative integer, got {m!r}")
    if not isinstance(k, (int, np.integer)):
        raise ValueError(f"success count must be an integer, got {k!r}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
