"""Seeded Monte Carlo experiments: bias, covariance, optimal weights, efficiency, consistency.

Every experiment draws uniform order statistics ``G`` and turns them into
log-spacings directly (:func:`elemental.gpd.exceedance_log_spacings`), so the
location never enters and the scale only adds ``log sigma`` to every spacing.
Estimators are linear in the log-spacings, so a batch of samples is reduced
with one matrix product against packed weight columns.

Replications are split into fixed chunks of ``CHUNK`` samples.  Chunk ``c`` of
block ``b`` at sample size ``n`` draws from ``RandomStream(seed, n, b, c)``, and
results are concatenated in chunk order, so output does not depend on the
number of worker threads.  The stream does not depend on ``xi``, ``mu`` or
``sigma``: every tail parameter in a sweep sees the same uniforms.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .certificate import certify, elemental_basis
from .estimators import elemental_indices
from .gpd import GpdParams, exceedance_log_spacings, sample_exceedances
from .rng import RandomStream
from .weights import ElementalWeights, SpacingWeights, as_spacing_weights

log = logging.getLogger(__name__)

CHUNK = 1000
#: floats per sub-batch of log-spacings held in memory at once
_BATCH_FLOATS = 2_000_000

BIAS_BLOCK = 0
FIT_BLOCK = 1
HOLDOUT_BLOCK = 2


class ConfigError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


def xi_grid(lo: float, hi: float, count: int) -> list[float]:
    """``count`` equispaced tail parameters from ``lo`` to ``hi`` inclusive."""
    if count < 1:
        raise ConfigError("grid count must be positive")
    if count == 1:
        return [float(lo)]
    return [float(v) for v in np.linspace(lo, hi, count)]


#: default tail-parameter grid of the bias sweep
DEFAULT_XI_GRID = tuple(xi_grid(-10.0, 10.0, 21))


@dataclass
class ExperimentConfig:
    n_values: Sequence[int]
    xi_values: Sequence[float] = DEFAULT_XI_GRID
    replications: int = 50_000
    seed: int = 0
    scheme: object = "linearly-rising"
    mu: float = 0.0
    sigma: float = 1.0
    threads: int = 1

    def __post_init__(self):
        self.n_values = [int(n) for n in self.n_values]
        self.xi_values = [float(x) for x in self.xi_values]
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if not self.n_values or any(n < 3 for n in self.n_values):
            raise ConfigError("every sample size must be at least 3")
        if not self.xi_values:
            raise ConfigError("need at least one tail parameter")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        GpdParams(self.mu, self.sigma, 0.0)


@dataclass(frozen=True)
class SummaryRow:
    """Monte Carlo summary of one estimator at one ``(n, xi)``.

    ``variance`` uses divisor ``replications - 1``; ``rmse`` is the root of the
    plain mean of squared errors, so ``rmse**2 = bias**2 + variance * (R-1)/R``.
    """

    n: int
    xi: float
    estimator: str
    mean: float
    bias: float
    variance: float
    rmse: float
    stderr: float
    replications: int
    axis: float | None = field(default=None, compare=False)


def summarize(estimates, n: int, xi: float, estimator: str) -> SummaryRow:
    est = np.asarray(estimates, dtype=float)
    reps = est.size
    if reps == 0:
        nan = float("nan")
        return SummaryRow(n, xi, estimator, nan, nan, nan, nan, nan, 0)
    mean = float(est.mean())
    err = est - xi
    rmse = float(np.sqrt(np.mean(err * err)))
    if reps > 1:
        variance = float(est.var(ddof=1))
        stderr = math.sqrt(variance / reps)
    else:
        variance = stderr = float("nan")
    return SummaryRow(n, float(xi), estimator, mean, mean - xi, variance, rmse, stderr, reps)


def elemental_label(i: int, j: int) -> str:
    return f"elemental_{i}_{j}"


# -- core sampler --------------------------------------------------------------


def _stream(seed, n: int, block: int) -> RandomStream:
    if isinstance(seed, RandomStream):
        return seed.child(n, block)
    return RandomStream(seed, n, block)


def _chunk_estimates(params: GpdParams, n: int, size: int, weights: np.ndarray, stream: RandomStream) -> np.ndarray:
    g = sample_exceedances(stream, (size, n))
    pairs = n * (n - 1) // 2
    step = max(1, _BATCH_FLOATS // pairs)
    out = np.empty((size, weights.shape[1]))
    for lo in range(0, size, step):
        m = exceedance_log_spacings(params, g[lo : lo + step])
        with np.errstate(invalid="ignore"):
            out[lo : lo + step] = m @ weights
    return out


def simulate_estimates(
    params: GpdParams,
    n: int,
    replications: int,
    weights: np.ndarray,
    stream: RandomStream,
    threads: int = 1,
) -> np.ndarray:
    """Estimates of shape ``(replications, k)`` for packed weight columns ``(n(n-1)/2, k)``.

    Replications whose log-spacings are not all finite (tied draws) are dropped
    with a warning.
    """
    if replications < 1:
        raise ConfigError("replications must be at least 1")
    weights = np.asarray(weights, dtype=float)
    if weights.ndim == 1:
        weights = weights[:, None]
    sizes = [min(CHUNK, replications - lo) for lo in range(0, replications, CHUNK)]

    def task(c):
        return _chunk_estimates(params, n, sizes[c], weights, stream.child(c))

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(task, range(len(sizes))))
    else:
        parts = [task(c) for c in range(len(sizes))]
    est = np.concatenate(parts)
    ok = np.all(np.isfinite(est), axis=1)
    if not ok.all():
        log.warning("dropped %d tied replications (n=%d, xi=%g)", int((~ok).sum()), n, params.xi)
        est = est[ok]
    return est


# -- experiments ---------------------------------------------------------------


def bias_sweep(cfg: ExperimentConfig) -> list[SummaryRow]:
    """Mean, bias and spread of every elemental estimator over the ``(n, xi)`` grid."""
    rows = []
    for n in cfg.n_values:
        basis = elemental_basis(n)
        labels = [elemental_label(i, j) for i, j in elemental_indices(n)]
        for xi in cfg.xi_values:
            params = GpdParams(cfg.mu, cfg.sigma, xi)
            est = simulate_estimates(params, n, cfg.replications, basis, _stream(cfg.seed, n, BIAS_BLOCK), cfg.threads)
            rows.extend(summarize(est[:, k], n, xi, lab) for k, lab in enumerate(labels))
    return rows


def _n_from_elemental_count(m: int) -> int:
    n = int(round((3 + math.sqrt(1 + 8 * m)) / 2))
    if (n - 1) * (n - 2) // 2 != m:
        raise ValueError(f"{m} is not an elemental count (N-1)(N-2)/2")
    return n


def _covariance(est: np.ndarray) -> np.ndarray:
    c = np.atleast_2d(np.cov(est, rowvar=False, ddof=1))
    return (c + c.T) / 2


def elemental_covariance(
    n: int, xi: float, replications: int, rng=0, *, mu: float = 0.0, sigma: float = 1.0, threads: int = 1, block: int = FIT_BLOCK
) -> np.ndarray:
    """Sample covariance of the ``(N-1)(N-2)/2`` elemental estimates."""
    m = (n - 1) * (n - 2) // 2
    if replications < m + 2:
        raise ConfigError(f"need at least {m + 2} replications for a nonsingular {m}x{m} covariance")
    est = simulate_estimates(GpdParams(mu, sigma, xi), n, replications, elemental_basis(n), _stream(rng, n, block), threads)
    return _covariance(est)


@dataclass(frozen=True)
class OptimalWeights:
    #: unit-sum weights in the order of the covariance rows
    r: np.ndarray
    variance: float
    #: multiplier of the stationarity condition 2 cov r = multiplier * 1
    multiplier: float
    ridge: float

    @property
    def weights(self) -> ElementalWeights:
        """As an elemental weight matrix; the covariance must be over all elementals in row-major order."""
        return ElementalWeights.from_vector(_n_from_elemental_count(self.r.size), self.r)


def optimal_weights(cov) -> OptimalWeights:
    """Minimise ``r' cov r`` subject to ``sum r = 1`` through the KKT system.

    A ridge ``eps * trace(cov) / m`` is added first (``eps = 1e-10``, raised by
    factors of ten up to ``1e-6`` while the system stays ill-conditioned).
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    m = cov.shape[0]
    if cov.shape != (m, m):
        raise ValueError("covariance must be square")
    if not np.array_equal(cov, cov.T):
        raise ValueError("covariance must be symmetric")
    scale = np.trace(cov) / m
    ones = np.ones(m)
    cond = np.inf
    for eps in (1e-10, 1e-9, 1e-8, 1e-7, 1e-6):
        ridge = eps * scale
        kkt = np.zeros((m + 1, m + 1))
        kkt[:m, :m] = 2 * (cov + ridge * np.eye(m))
        kkt[:m, m] = -1.0
        kkt[m, :m] = 1.0
        cond = np.linalg.cond(kkt)
        if not np.isfinite(cond) or cond > 1e13:
            continue
        rhs = np.zeros(m + 1)
        rhs[m] = 1.0
        sol = np.linalg.solve(kkt, rhs)
        r, lam = sol[:m], sol[m]
        r = r / r.sum()
        r.setflags(write=False)
        return OptimalWeights(r, float(r @ cov @ r), float(lam), float(ridge))
    raise NumericalError(f"KKT system singular after ridge fallback (condition number {cond:.3g})")


@dataclass(frozen=True)
class VarianceBounds:
    lower: float
    upper: float
    optimal: OptimalWeights

    @property
    def point(self) -> float:
        """Geometric mean of the two bounds."""
        return math.sqrt(self.lower * self.upper)


def min_variance_bounds(
    n: int,
    xi: float,
    block_size: int,
    rng=0,
    *,
    mu: float = 0.0,
    sigma: float = 1.0,
    threads: int = 1,
    blocks: tuple[int, int] = (FIT_BLOCK, HOLDOUT_BLOCK),
) -> VarianceBounds:
    """Bracket the minimum variance of unbiased combinations at ``(n, xi)``.

    Optimal weights fitted on one block give its in-sample variance (lower
    bound); the same weights applied to an independent block give the upper
    bound.
    """
    cov1 = elemental_covariance(n, xi, block_size, rng, mu=mu, sigma=sigma, threads=threads, block=blocks[0])
    cov2 = elemental_covariance(n, xi, block_size, rng, mu=mu, sigma=sigma, threads=threads, block=blocks[1])
    opt = optimal_weights(cov1)
    r = opt.r
    return VarianceBounds(float(r @ cov1 @ r), float(r @ cov2 @ r), opt)


def _scheme_label(scheme) -> str:
    if isinstance(scheme, tuple):
        return str(scheme[0])
    if isinstance(scheme, (ElementalWeights, SpacingWeights)):
        return "custom"
    return str(getattr(scheme, "value", scheme))


def _scheme_weights(scheme, n: int) -> SpacingWeights:
    if isinstance(scheme, tuple):
        scheme = scheme[1]
    return as_spacing_weights(scheme, n)


@dataclass(frozen=True)
class EfficiencyRow:
    n: int
    xi: float
    estimator: str
    variance: float
    in_sample_variance: float
    lower: float
    upper: float
    efficiency: float


def relative_efficiency(
    schemes: Sequence,
    n: int,
    xi_grid: Sequence[float],
    replications: int,
    rng=0,
    *,
    mu: float = 0.0,
    sigma: float = 1.0,
    threads: int = 1,
    reference=None,
) -> list[EfficiencyRow]:
    """Efficiency of each scheme relative to the minimum variance at each ``xi``.

    ``schemes`` holds names, weight objects or ``(label, weights)`` pairs.  The
    minimum variance is the geometric mean of :func:`min_variance_bounds`,
    unless ``reference`` names a scheme whose variance is used instead.  Scheme
    variances are measured on the held-out block; ``in_sample_variance`` is the
    variance on the block the optimal weights were fitted to.
    """
    labels = [_scheme_label(s) for s in schemes]
    spacing = [_scheme_weights(s, n) for s in schemes]
    for lab, w in zip(labels, spacing):
        if not certify(w).passed:
            raise ValueError(f"scheme {lab!r} is not an unbiased invariant combination")
    ref_w = None if reference is None else _scheme_weights(reference, n)
    basis = elemental_basis(n)
    m = basis.shape[1]
    if replications < m + 2:
        raise ConfigError(f"need at least {m + 2} replications per block for N={n}")
    extra = [w.packed() for w in spacing] + ([] if ref_w is None else [ref_w.packed()])
    cols = np.column_stack([basis] + extra) if extra else basis

    rows = []
    for xi in xi_grid:
        params = GpdParams(mu, sigma, xi)
        fit = simulate_estimates(params, n, replications, cols, _stream(rng, n, FIT_BLOCK), threads)
        held = simulate_estimates(params, n, replications, cols, _stream(rng, n, HOLDOUT_BLOCK), threads)
        cov1 = _covariance(fit[:, :m])
        cov2 = _covariance(held[:, :m])
        opt = optimal_weights(cov1)
        r = opt.r
        lower, upper = float(r @ cov1 @ r), float(r @ cov2 @ r)
        var_held = held[:, m:].var(axis=0, ddof=1)
        var_fit = fit[:, m:].var(axis=0, ddof=1)
        min_var = math.sqrt(lower * upper) if ref_w is None else float(var_held[-1])
        for k, lab in enumerate(labels):
            v = float(var_held[k])
            rows.append(EfficiencyRow(n, float(xi), lab, v, float(var_fit[k]), lower, upper, min_var / v))
    return rows


def consistency_study(
    scheme,
    xi_grid: Sequence[float],
    n_grid: Sequence[int],
    replications: int,
    rng=0,
    *,
    mu: float = 0.0,
    sigma: float = 1.0,
    threads: int = 1,
    baselines: bool = False,
) -> list[SummaryRow]:
    """RMSE of one combination as the sample size grows.

    Each row carries ``axis = 1 - sqrt(2/N)``, which maps infinite N to one.
    With ``baselines=True`` a Pickands row (``k = N // 4``) is added per cell.
    """
    from .baselines import default_k, pickands_weights

    label = _scheme_label(scheme)
    rows = []
    for n in n_grid:
        if n < 3:
            raise ConfigError("every sample size must be at least 3")
        cols = [_scheme_weights(scheme, n).packed()]
        labels = [label]
        if baselines and n >= 4:
            cols.append(pickands_weights(n).packed())
            labels.append(f"pickands_k{default_k(n)}")
        w = np.column_stack(cols)
        axis = 1.0 - math.sqrt(2.0 / n)
        for xi in xi_grid:
            est = simulate_estimates(GpdParams(mu, sigma, xi), n, replications, w, _stream(rng, n, BIAS_BLOCK), threads)
            for k, lab in enumerate(labels):
                row = summarize(est[:, k], n, xi, lab)
                rows.append(SummaryRow(**{**row.__dict__, "axis": axis}))
    return rows


def log_rmse_slope(rows: Sequence[SummaryRow]) -> float:
    """Least-squares slope of ``log RMSE`` against ``log N``."""
    x = np.log([r.n for r in rows])
    y = np.log([r.rmse for r in rows])
    return float(np.polyfit(x, y, 1)[0])
