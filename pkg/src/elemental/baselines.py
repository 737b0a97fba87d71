"""Classical Pickands and Hill tail estimators, for reference columns."""

from __future__ import annotations

import math

import numpy as np

from .estimators import OrderedSample, TieError
from .weights import SpacingWeights


def default_k(n: int) -> int:
    return n // 4


def pickands(s: OrderedSample, k: int | None = None) -> float:
    """``log((X_k - X_2k) / (X_2k - X_4k)) / log 2``; needs ``4k <= N``."""
    k = default_k(s.n) if k is None else int(k)
    if k < 1 or 4 * k > s.n:
        raise IndexError(f"Pickands needs 1 <= k and 4k <= N (k={k}, N={s.n})")
    x = s.values
    upper = x[k - 1] - x[2 * k - 1]
    lower = x[2 * k - 1] - x[4 * k - 1]
    if upper <= 0:
        raise TieError(k, 2 * k)
    if lower <= 0:
        raise TieError(2 * k, 4 * k)
    return float((math.log(upper) - math.log(lower)) / math.log(2.0))


def pickands_weights(n: int, k: int | None = None) -> SpacingWeights:
    """The Pickands estimator written as spacing weights (one nonzero per column)."""
    k = default_k(n) if k is None else int(k)
    if k < 1 or 4 * k > n:
        raise IndexError(f"Pickands needs 1 <= k and 4k <= N (k={k}, N={n})")
    a = np.zeros((n, n))
    a[k - 1, 2 * k - 1] = 1.0 / math.log(2.0)
    a[2 * k - 1, 4 * k - 1] = -1.0 / math.log(2.0)
    return SpacingWeights(a)


def hill(s: OrderedSample, k: int | None = None) -> float:
    """Mean of ``log(X_i / X_{k+1})`` over the top ``k`` values.

    Not location invariant; needs ``X_{k+1} > 0``.
    """
    k = default_k(s.n) if k is None else int(k)
    if k < 1 or k + 1 > s.n:
        raise IndexError(f"Hill needs 1 <= k and k + 1 <= N (k={k}, N={s.n})")
    x = s.values
    ref = x[k]
    if ref <= 0:
        raise ValueError(f"Hill needs positive data: X_{k + 1} = {ref}")
    return float(np.mean(np.log(x[:k] / ref)))
