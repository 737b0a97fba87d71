"""Sampling-free checks that a log-spacing weight matrix is an unbiased invariant estimator.

Three conditions are checked on a spacing-weight matrix ``a``:

* zero sum, which removes the scale;
* ``sum a_ij psi(i) = sum a_ij psi(j) = -1``, which makes the expectation of
  the ``log G`` terms equal the tail parameter;
* vanishing of the ``N - 1`` polynomial coefficients ``b_k``, which cancels the
  expectation of every function of the ratios ``G_i / G_j``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .estimators import elemental_indices, pack, pair_indices
from .weights import ElementalWeights, expand, single_elemental

CERT_TOL = 1e-10
SPAN_TOL = 1e-8
MAX_RANK_N = 30

EULER_GAMMA = 0.57721566490153286061

# Bernoulli-number coefficients B_2k / (2k) of the asymptotic series
_ASYMPTOTIC = (
    1.0 / 12,
    -1.0 / 120,
    1.0 / 252,
    -1.0 / 240,
    1.0 / 132,
    -691.0 / 32760,
    1.0 / 12,
    -3617.0 / 8160,
    43867.0 / 14364,
)


def digamma(x: float) -> float:
    """Digamma function for ``x > 0``.

    Upward recurrence ``psi(x) = psi(x + 1) - 1/x`` until ``x >= 6``, then
    ``log x - 1/(2x) - sum B_2k / (2k x^2k)`` truncated after ``x^-18``.
    """
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"digamma is only implemented for finite x > 0, got {x}")
    shift = 0.0
    while x < 6.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for c in reversed(_ASYMPTOTIC):
        series = series * inv2 + c
    return shift + math.log(x) - 0.5 / x - series * inv2


@lru_cache(maxsize=None)
def _psi_table(n: int) -> np.ndarray:
    out = np.array([digamma(k) for k in range(1, n + 1)])
    out.setflags(write=False)
    return out


def _matrix(a) -> np.ndarray:
    return np.asarray(getattr(a, "a", a), dtype=float)


def psi_sums(a) -> tuple[float, float]:
    """``(sum a_ij psi(i), sum a_ij psi(j))`` for a zero-sum spacing-weight matrix."""
    m = _matrix(a)
    if abs(m.sum()) > 1e-12 * max(1.0, np.abs(m).sum()):
        raise ValueError("psi sums are only meaningful for zero-sum weights")
    psi = _psi_table(m.shape[0])
    return float(psi @ m.sum(axis=1)), float(m.sum(axis=0) @ psi)


@lru_cache(maxsize=None)
def constraint_coefficients(n: int) -> tuple[tuple[tuple[int, int, int], ...], ...]:
    """Exact integer coefficients of each ``b_k`` as ``((i, j, c), ...)`` per ``k``.

    ``c = (k+1) C(j-1, k+1) C(k, i-1) (-1)^(k-i-1)`` for ``i <= k+1 < j``.
    """
    rows = []
    for k in range(n - 1):
        terms = []
        for j in range(k + 2, n + 1):
            outer = (k + 1) * math.comb(j - 1, k + 1)
            for i in range(1, k + 2):
                sign = -1 if (k - i - 1) % 2 else 1
                terms.append((i, j, sign * outer * math.comb(k, i - 1)))
        rows.append(tuple(terms))
    return tuple(rows)


def _b_values(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # exact rational dot products of the integer coefficients with the float entries
    n = m.shape[0]
    b = np.zeros(n - 1)
    scale = np.zeros(n - 1)
    for k, terms in enumerate(constraint_coefficients(n)):
        acc = Fraction(0)
        mag = 0.0
        for i, j, c in terms:
            w = m[i - 1, j - 1]
            if w:
                acc += c * Fraction(w)
                mag += abs(c * w)
        b[k] = float(acc)
        scale[k] = mag
    return b, scale


def b_constraints(a) -> np.ndarray:
    """The ``N - 1`` polynomial coefficients ``b_0 .. b_{N-2}``.

    All vanish exactly for every unbiased invariant combination of log-spacings.
    """
    m = _matrix(a)
    if m.shape[0] < 2:
        raise ValueError("need N >= 2")
    return _b_values(m)[0]


@dataclass(frozen=True)
class CertificateReport:
    zero_sum_ok: bool
    psi_i_sum: float
    psi_j_sum: float
    b: list
    passed: bool
    #: per-k magnitude sum |c a| used to judge b_k against round-off
    b_scale: list | None = None

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d.pop("b_scale")
        return d


def certify(a, tol: float = CERT_TOL) -> CertificateReport:
    """Check a spacing-weight matrix for membership in the unbiased invariant class.

    ``b_k`` passes when ``|b_k| <= tol * max(1, scale_k)``, where ``scale_k`` is
    the sum of the absolute products entering ``b_k``.  For integer-weighted
    matrices (every single elemental) the ``b_k`` are computed exactly and this
    is the plain ``|b_k| <= tol``.
    """
    m = _matrix(a)
    n = m.shape[0]
    zero_sum = bool(abs(m.sum()) <= 1e-12 * max(1.0, np.abs(m).sum()))
    psi = _psi_table(n)
    psi_i = float(psi @ m.sum(axis=1))
    psi_j = float(m.sum(axis=0) @ psi)
    b, scale = _b_values(m)
    b_ok = bool(np.all(np.abs(b) <= tol * np.maximum(1.0, scale)))
    passed = zero_sum and abs(psi_i + 1) <= tol and abs(psi_j + 1) <= tol and b_ok
    return CertificateReport(zero_sum, psi_i, psi_j, b.tolist(), bool(passed), scale.tolist())


# -- completeness --------------------------------------------------------------


@lru_cache(maxsize=None)
def elemental_basis(n: int) -> np.ndarray:
    """Packed spacing-weight vectors of every elemental, one column each."""
    cols = [pack(expand(single_elemental(n, i, j)).a) for i, j in elemental_indices(n)]
    out = np.column_stack(cols)
    out.setflags(write=False)
    return out


def constraint_matrix(n: int) -> np.ndarray:
    """``(N-1) x N(N-1)/2`` float matrix of the ``b_k`` functionals in packed order."""
    iu, ju = pair_indices(n)
    pos = {(int(i) + 1, int(j) + 1): p for p, (i, j) in enumerate(zip(iu, ju))}
    c = np.zeros((n - 1, iu.size))
    for k, terms in enumerate(constraint_coefficients(n)):
        for i, j, v in terms:
            c[k, pos[(i, j)]] = v
    return c


def _rref(rows: list[list[int]]) -> tuple[list[list[Fraction]], list[int]]:
    """Exact reduced row-echelon form; returns the nonzero rows and pivot columns."""
    rows = [[Fraction(v) for v in r] for r in rows]
    pivots: list[int] = []
    ncols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(ncols):
        if rank == len(rows):
            break
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank]
        inv = 1 / p[col]
        p = rows[rank] = [x * inv for x in p]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], p)]
        pivots.append(col)
        rank += 1
    return rows[:rank], pivots


def _constraint_rows(n: int) -> list[list[int]]:
    iu, ju = pair_indices(n)
    pos = {(int(i) + 1, int(j) + 1): p for p, (i, j) in enumerate(zip(iu, ju))}
    out = []
    for terms in constraint_coefficients(n):
        row = [0] * iu.size
        for i, j, v in terms:
            row[pos[(i, j)]] = v
        out.append(row)
    return out


def elemental_basis_rank(n: int) -> tuple[int, int, bool]:
    """``(elemental_rank, constraint_rank, spans_nullspace)`` for sample size ``n``.

    Ranks of the constraint system are exact (rational elimination on the
    integer coefficients).  A basis of the vectors satisfying zero sum and all
    ``b_k = 0`` is read off the exact reduced echelon form; each unit-normed
    basis vector is then projected onto the elemental span, which is complete
    when every residual is at most ``1e-8``.
    """
    if not 3 <= n <= MAX_RANK_N:
        raise ValueError(f"rank computations support 3 <= n <= {MAX_RANK_N}, got {n}")
    e = elemental_basis(n)
    elemental_rank = int(np.linalg.matrix_rank(e))
    rows = _constraint_rows(n)
    constraint_rank = len(_rref(rows)[1])

    width = len(rows[0])
    reduced, pivots = _rref(rows + [[1] * width])
    free = [c for c in range(width) if c not in set(pivots)]
    null = np.zeros((width, len(free)))
    for k, f in enumerate(free):
        null[f, k] = 1.0
        for row, p in zip(reduced, pivots):
            null[p, k] = -float(row[f])
    null /= np.linalg.norm(null, axis=0)
    q, _ = np.linalg.qr(e)
    q = q[:, :elemental_rank]
    resid = null - q @ (q.T @ null)
    spans = bool(not free or np.linalg.norm(resid, axis=0).max() <= SPAN_TOL)
    return elemental_rank, constraint_rank, spans


@dataclass(frozen=True)
class Decomposition:
    """Elemental weights reproducing a spacing-weight matrix."""

    r: np.ndarray
    weight_sum: float
    residual: float

    def weights(self) -> ElementalWeights:
        """As unit-sum :class:`ElementalWeights` (requires a unit weight sum)."""
        return ElementalWeights(self.r)


@dataclass(frozen=True)
class NotInSpan:
    residual: float


def membership_decompose(a) -> Decomposition | NotInSpan:
    """Least-squares elemental weights ``r`` with ``expand(r) = a``, if they exist.

    Returns :class:`NotInSpan` when the relative residual exceeds ``1e-8``.
    """
    m = _matrix(a)
    n = m.shape[0]
    target = pack(m)
    e = elemental_basis(n)
    coef, *_ = np.linalg.lstsq(e, target, rcond=None)
    residual = float(np.linalg.norm(e @ coef - target))
    if residual > SPAN_TOL * max(np.linalg.norm(target), np.finfo(float).tiny):
        return NotInSpan(residual)
    r = np.zeros((n, n))
    for (i, j), v in zip(elemental_indices(n), coef):
        r[i - 1, j - 1] = v
    return Decomposition(r, float(coef.sum()), residual)
