"""Ordered samples, log-spacings and the elemental three-spacing estimator.

All public indices are 1-based: ``X_1`` is the sample maximum and an elemental
is addressed by ``(I, J)`` with ``J >= I + 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np


class TieError(ValueError):
    """Two order statistics coincide, so a needed log-spacing is undefined."""

    def __init__(self, i: int, j: int):
        self.pair = (int(i), int(j))
        super().__init__(f"tie between X_{i} and X_{j}: log-spacing undefined")


class ElementalIndex(NamedTuple):
    i: int
    j: int

    def validate(self, n: int) -> "ElementalIndex":
        if self.i < 1 or self.j > n or self.j < self.i + 2:
            raise ValueError(f"invalid elemental index {tuple(self)} for N={n}; need 1 <= I, I+2 <= J <= N")
        return self


@dataclass(frozen=True, eq=False)
class OrderedSample:
    """Sample values sorted in decreasing order (``values[0]`` is ``X_1``)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.ndim != 1 or v.size < 1:
            raise ValueError("an ordered sample needs at least one value")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample values must be finite")
        if np.any(np.diff(v) > 0):
            raise ValueError("values must be sorted in decreasing order; use OrderedSample.from_data")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_data(cls, data) -> "OrderedSample":
        v = np.asarray(data, dtype=float).ravel()
        return cls(np.sort(v)[::-1])

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) < 0))

    def x(self, i: int) -> float:
        """The i-th largest value, 1-based."""
        return float(self.values[i - 1])

    def shift(self, c: float) -> "OrderedSample":
        return OrderedSample(self.values + c)

    def scale(self, lam: float) -> "OrderedSample":
        if lam <= 0:
            raise ValueError("scale factor must be positive")
        return OrderedSample(self.values * lam)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"OrderedSample(n={self.n}, values={self.values!r})"


def _first_tie(values: np.ndarray) -> tuple[int, int] | None:
    eq = np.flatnonzero(np.diff(values) == 0)
    if eq.size:
        i = int(eq[0]) + 1
        return i, i + 1
    return None


def log_spacing_matrix(s: OrderedSample) -> np.ndarray:
    """Dense N x N matrix with ``m[i, j] = log(X_i - X_j)`` above the diagonal.

    The returned array is 0-based; entry ``m[I-1, J-1]`` holds the spacing
    between ``X_I`` and ``X_J``. Diagonal and lower triangle are zero.
    """
    tie = _first_tie(s.values)
    if tie is not None:
        raise TieError(*tie)
    n = s.n
    iu, ju = pair_indices(n)
    m = np.zeros((n, n))
    m[iu, ju] = np.log(s.values[iu] - s.values[ju])
    return m


@lru_cache(maxsize=None)
def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """0-based ``(i, j)`` index arrays of the pairs ``i < j`` in row-major order.

    This is the packed layout used for batches of log-spacings.
    """
    iu, ju = np.triu_indices(n, 1)
    iu.setflags(write=False)
    ju.setflags(write=False)
    return iu, ju


def pack(matrix: np.ndarray) -> np.ndarray:
    """Strict upper triangle of an N x N matrix in packed pair order."""
    matrix = np.asarray(matrix)
    iu, ju = pair_indices(matrix.shape[-1])
    return matrix[..., iu, ju]


def unpack(packed: np.ndarray, n: int) -> np.ndarray:
    iu, ju = pair_indices(n)
    out = np.zeros((n, n))
    out[iu, ju] = packed
    return out


@lru_cache(maxsize=None)
def _elemental_index_cache(n: int) -> tuple[ElementalIndex, ...]:
    return tuple(ElementalIndex(i, j) for i in range(1, n - 1) for j in range(i + 2, n + 1))


def elemental_indices(n: int) -> list[ElementalIndex]:
    """All ``(N-1)(N-2)/2`` elemental indices of a size-N sample, row-major."""
    if n < 3:
        raise ValueError("elementals need N >= 3")
    return list(_elemental_index_cache(n))


def elemental_terms(i: int, j: int) -> tuple[tuple[int, int, int], ...]:
    """The three ``(row, col, weight)`` log-spacing terms of elemental ``(i, j)``, 1-based."""
    return ((i, j - 1, j - 1), (i, j, -(j - 1 - i)), (i + 1, j, -i))


def _spacing(s: OrderedSample, i: int, j: int) -> float:
    gap = s.values[i - 1] - s.values[j - 1]
    if gap <= 0:
        raise TieError(i, j)
    return gap


def elemental_estimate(s: OrderedSample, e) -> float:
    """Elemental estimate of the tail parameter from the order statistics ``I, I+1, J-1, J``.

    Evaluated as ``(J-1) log(X_I - X_{J-1}) - (J-1-I) log(X_I - X_J) - I log(X_{I+1} - X_J)``.
    """
    i, j = ElementalIndex(*e).validate(s.n)
    total = 0.0
    for row, col, w in elemental_terms(i, j):
        total += w * np.log(_spacing(s, row, col))
    return float(total)


def all_elementals(s: OrderedSample) -> dict[ElementalIndex, float]:
    if s.n < 3:
        raise ValueError("elementals need N >= 3")
    return {e: elemental_estimate(s, e) for e in elemental_indices(s.n)}


def evaluate_spacing_weights(s: OrderedSample, a) -> float:
    """Sum of ``a[i, j] * log(X_i - X_j)`` over the strict upper triangle.

    ``a`` is a :class:`~elemental.weights.SpacingWeights` or a dense N x N array.
    Only spacings carrying a nonzero weight are evaluated.
    """
    a = np.asarray(getattr(a, "a", a), dtype=float)
    if a.shape != (s.n, s.n):
        raise ValueError(f"weight matrix shape {a.shape} does not match sample size {s.n}")
    iu, ju = pair_indices(s.n)
    w = a[iu, ju]
    nz = np.flatnonzero(w)
    gaps = s.values[iu[nz]] - s.values[ju[nz]]
    bad = np.flatnonzero(gaps <= 0)
    if bad.size:
        k = nz[bad[0]]
        raise TieError(int(iu[k]) + 1, int(ju[k]) + 1)
    return float(np.dot(w[nz], np.log(gaps)))
