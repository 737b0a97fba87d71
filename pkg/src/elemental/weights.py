"""Elemental weight matrices R and the log-spacing weight matrices A they induce.

A unit-sum R over elementals expands to a zero-sum A over log-spacings; the
estimate is then the sum of the entrywise product of A with the log-spacing
matrix.  Both are stored dense N x N (0-based arrays, 1-based vocabulary).
"""

from __future__ import annotations

import enum
import json
from pathlib import Path

import numpy as np

from .estimators import elemental_indices, elemental_terms, pack

SUM_TOL = 1e-12


class SchemeName(str, enum.Enum):
    EQUAL_WEIGHT = "equal-weight"
    TOP_ROW = "top-row"
    QUADRATIC_GAP = "quadratic-gap"
    LINEARLY_RISING = "linearly-rising"
    CUSTOM = "custom"


#: short labels for the named combinations
SCHEME_LABELS = {
    SchemeName.EQUAL_WEIGHT: "A1",
    SchemeName.TOP_ROW: "B1",
    SchemeName.QUADRATIC_GAP: "C1",
}


def _sum_tol(m: np.ndarray) -> float:
    return SUM_TOL * max(1.0, float(np.abs(m).sum()))


class ElementalWeights:
    """Weights ``r[I, J]`` over elementals, nonzero only for ``J >= I + 2``.

    Pass ``normalize=True`` to rescale arbitrary nonnegative-sum weights to unit
    sum.  ``validate=False`` skips the unit-sum check (used for differences of
    combinations and in tests).
    """

    kind = "elemental"

    def __init__(self, r, *, normalize: bool = False, validate: bool = True):
        r = np.array(r, dtype=float)
        if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] < 3:
            raise ValueError("elemental weights must be an N x N matrix with N >= 3")
        if np.any(np.tril(r, 1) != 0):
            raise ValueError("elemental weights must vanish for J < I + 2")
        if normalize:
            total = r.sum()
            if total == 0:
                raise ValueError("cannot normalize weights that sum to zero")
            r /= total
        if validate and abs(r.sum() - 1.0) > _sum_tol(r):
            raise ValueError(f"elemental weights must sum to 1, got {r.sum()!r}")
        r.setflags(write=False)
        self.r = r

    @property
    def n(self) -> int:
        return self.r.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.r

    def vector(self) -> np.ndarray:
        """Weights in row-major elemental order (see :func:`elemental_indices`)."""
        return np.array([self.r[i - 1, j - 1] for i, j in elemental_indices(self.n)])

    @classmethod
    def from_vector(cls, n: int, values, **kw) -> "ElementalWeights":
        values = np.asarray(values, dtype=float)
        idx = elemental_indices(n)
        if values.shape != (len(idx),):
            raise ValueError(f"expected {len(idx)} elemental weights for N={n}")
        r = np.zeros((n, n))
        for (i, j), v in zip(idx, values):
            r[i - 1, j - 1] = v
        return cls(r, **kw)

    def __repr__(self) -> str:
        return f"ElementalWeights(n={self.n})"


class SpacingWeights:
    """Weights ``a[i, j]`` over log-spacings, nonzero only for ``j >= i + 1``."""

    kind = "spacing"

    def __init__(self, a, *, validate: bool = True):
        a = np.array(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise ValueError("spacing weights must be an N x N matrix with N >= 2")
        if np.any(np.tril(a) != 0):
            raise ValueError("spacing weights must vanish on and below the diagonal")
        if validate and abs(a.sum()) > _sum_tol(a):
            raise ValueError(f"spacing weights must sum to 0, got {a.sum()!r}")
        a.setflags(write=False)
        self.a = a

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.a

    @property
    def zero_sum(self) -> bool:
        return abs(self.a.sum()) <= _sum_tol(self.a)

    def packed(self) -> np.ndarray:
        return pack(self.a)

    def __repr__(self) -> str:
        return f"SpacingWeights(n={self.n})"


def expand(r) -> SpacingWeights:
    """Spread each elemental weight over its inverted-L of three log-spacings.

    ``r[I, J]`` contributes ``(J-1) r`` to spacing ``(I, J-1)``, ``-(J-1-I) r``
    to ``(I, J)`` and ``-I r`` to ``(I+1, J)``.
    """
    rm = np.asarray(getattr(r, "r", r), dtype=float)
    n = rm.shape[0]
    a = np.zeros((n, n))
    for i, j in elemental_indices(n):
        w = rm[i - 1, j - 1]
        if w == 0:
            continue
        for row, col, c in elemental_terms(i, j):
            a[row - 1, col - 1] += c * w
    return SpacingWeights(a)


def single_elemental(n: int, i: int, j: int) -> ElementalWeights:
    r = np.zeros((n, n))
    r[i - 1, j - 1] = 1.0
    return ElementalWeights(r)


def _from_rule(n: int, rule) -> ElementalWeights:
    if n < 3:
        raise ValueError("weight schemes need N >= 3")
    r = np.zeros((n, n))
    for i, j in elemental_indices(n):
        r[i - 1, j - 1] = rule(i, j)
    return ElementalWeights(r, normalize=True)


def linearly_rising(n: int) -> ElementalWeights:
    """``r[I, J]`` proportional to ``N + 1 - J``."""
    return _from_rule(n, lambda i, j: n + 1 - j)


def linearly_rising_spacing_closed_form(n: int) -> SpacingWeights:
    """``a[I, J] = 6 (2N - 3J + 2) / (N (N-1) (N-2))`` for ``J >= I + 1``."""
    if n < 3:
        raise ValueError("weight schemes need N >= 3")
    j = np.arange(1, n + 1)
    col = 6.0 * (2 * n - 3 * j + 2) / (n * (n - 1) * (n - 2))
    a = np.triu(np.broadcast_to(col, (n, n)), 1)
    return SpacingWeights(a)


_RULES = {
    SchemeName.EQUAL_WEIGHT: lambda n: (lambda i, j: 1.0),
    SchemeName.TOP_ROW: lambda n: (lambda i, j: 1.0 / (i * (i + 1))),
    SchemeName.QUADRATIC_GAP: lambda n: (lambda i, j: float((j - i) ** 2)),
    SchemeName.LINEARLY_RISING: lambda n: (lambda i, j: float(n + 1 - j)),
}


def named_scheme(name, n: int) -> ElementalWeights:
    name = SchemeName(name)
    if name is SchemeName.CUSTOM:
        raise ValueError("a custom scheme needs an explicit weight matrix")
    return _from_rule(n, _RULES[name](n))


def as_spacing_weights(scheme, n: int) -> SpacingWeights:
    """Resolve a scheme name, ElementalWeights or SpacingWeights to spacing weights for size ``n``."""
    if isinstance(scheme, SpacingWeights):
        w = scheme
    elif isinstance(scheme, ElementalWeights):
        w = expand(scheme)
    else:
        w = expand(named_scheme(scheme, n))
    if w.n != n:
        raise ValueError(f"weights are for N={w.n}, sample size is {n}")
    return w


# -- JSON document -----------------------------------------------------------


def to_json_dict(w) -> dict:
    m = w.matrix
    rows, cols = np.nonzero(m)
    entries = [{"i": int(i) + 1, "j": int(j) + 1, "w": float(m[i, j])} for i, j in zip(rows, cols)]
    return {"n": w.n, "kind": w.kind, "entries": entries}


def from_json_dict(doc: dict):
    """Parse a weight-matrix document; validates triangularity and the sum invariant."""
    try:
        n = int(doc["n"])
        kind = doc["kind"]
        entries = doc["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed weight document: {exc}") from None
    if kind not in ("elemental", "spacing"):
        raise ValueError(f"unknown weight kind {kind!r}")
    m = np.zeros((n, n))
    gap = 2 if kind == "elemental" else 1
    for e in entries:
        i, j = int(e["i"]), int(e["j"])
        if not (1 <= i and j <= n and j >= i + gap):
            raise ValueError(f"entry ({i}, {j}) outside the allowed triangle for {kind} weights")
        m[i - 1, j - 1] = float(e["w"])
    return ElementalWeights(m) if kind == "elemental" else SpacingWeights(m)


def dumps(w, **extra) -> str:
    doc = to_json_dict(w)
    doc.update(extra)
    return json.dumps(doc, indent=2)


def load(path) -> ElementalWeights | SpacingWeights:
    return from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))
