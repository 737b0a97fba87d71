import math

import numpy as np
import pytest

from elemental.baselines import pickands_weights
from elemental.certificate import elemental_basis
from elemental.estimators import evaluate_spacing_weights
from elemental.gpd import GpdParams, sample
from elemental.rng import RandomStream
from elemental.simulation import (
    BIAS_BLOCK,
    ConfigError,
    ExperimentConfig,
    NumericalError,
    bias_sweep,
    consistency_study,
    elemental_covariance,
    log_rmse_slope,
    min_variance_bounds,
    optimal_weights,
    relative_efficiency,
    simulate_estimates,
    summarize,
    xi_grid,
)
from elemental.weights import as_spacing_weights, expand, linearly_rising, named_scheme


def test_xi_grid():
    assert xi_grid(-10, 10, 21) == [float(v) for v in range(-10, 11)]
    assert xi_grid(2, 5, 1) == [2.0]
    with pytest.raises(ConfigError):
        xi_grid(0, 1, 0)


def test_config_validation():
    for kw in ({"replications": 0}, {"n_values": [2]}, {"xi_values": []}, {"threads": 0}, {"sigma": -1}):
        with pytest.raises(ValueError):
            ExperimentConfig(**{"n_values": [5], **kw})


def test_summarize_rmse_identity():
    est = RandomStream(1).generator.normal(0.3, 2.0, 1000)
    row = summarize(est, 7, 0.0, "x")
    r = row.replications
    assert row.rmse**2 == pytest.approx(row.bias**2 + row.variance * (r - 1) / r, rel=1e-9)
    assert row.stderr == pytest.approx(math.sqrt(row.variance / r))


def test_single_replication_bias():
    cfg = ExperimentConfig([5], [0.5], replications=1, seed=4)
    rows = bias_sweep(cfg)
    est = simulate_estimates(GpdParams(0, 1, 0.5), 5, 1, elemental_basis(5), RandomStream(4, 5, BIAS_BLOCK))
    assert [r.bias for r in rows] == pytest.approx(list(est[0] - 0.5), abs=0)
    assert all(math.isnan(r.variance) for r in rows)


def test_bias_sweep_shape_and_labels():
    rows = bias_sweep(ExperimentConfig([4, 5], [-1.0, 1.0], replications=200, seed=1))
    assert len(rows) == 2 * 3 + 2 * 6
    assert rows[0].estimator == "elemental_1_3" and rows[0].n == 4


@pytest.mark.parametrize("n", [3, 7, 20])
@pytest.mark.parametrize("xi", [-3.0, 0.0, 3.0])
def test_linearly_rising_unbiased(n, xi):
    w = as_spacing_weights("linearly-rising", n).packed()
    est = simulate_estimates(GpdParams(0, 1, xi), n, 50_000, w, RandomStream(21, n))
    row = summarize(est[:, 0], n, xi, "lr")
    assert abs(row.bias) <= 4 * row.stderr


def test_covariance_properties():
    cov = elemental_covariance(6, 0.5, 2000, 3)
    assert cov.shape == (10, 10)
    assert np.array_equal(cov, cov.T)
    assert np.all(np.diag(cov) > 0)


def test_covariance_n3_is_sample_variance():
    cov = elemental_covariance(3, 1.0, 500, 9)
    est = simulate_estimates(GpdParams(0, 1, 1.0), 3, 500, elemental_basis(3), RandomStream(9, 3, 1))
    assert cov.shape == (1, 1)
    assert cov[0, 0] == pytest.approx(est[:, 0].var(ddof=1), rel=1e-12)


def test_covariance_too_few_replications():
    with pytest.raises(ConfigError):
        elemental_covariance(6, 0.0, 11, 0)


@pytest.mark.parametrize(
    "cov, r, var",
    [
        (np.eye(3), [1 / 3] * 3, 1 / 3),
        (np.diag([1.0, 2.0, 2.0]), [0.5, 0.25, 0.25], 0.5),
        (10 * np.eye(2), [0.5, 0.5], 5.0),
    ],
)
def test_optimal_weights_examples(cov, r, var):
    opt = optimal_weights(cov)
    np.testing.assert_allclose(opt.r, r, rtol=1e-8)
    assert opt.variance == pytest.approx(var, rel=1e-8)
    assert opt.multiplier == pytest.approx(2 * var, rel=1e-8)


def test_optimal_weights_scaling():
    a, b = optimal_weights(np.eye(2)), optimal_weights(10 * np.eye(2))
    np.testing.assert_allclose(a.r, b.r, rtol=1e-12)
    assert b.variance == pytest.approx(10 * a.variance, rel=1e-12)


def test_optimal_weights_rank_deficient_uses_ridge():
    v = np.array([1.0, 2.0, 3.0])
    opt = optimal_weights(np.outer(v, v))
    assert opt.r.sum() == pytest.approx(1.0)
    assert opt.ridge > 0


def test_optimal_weights_singular_raises():
    with pytest.raises(NumericalError):
        optimal_weights(np.zeros((3, 3)))


def test_optimal_weights_validation():
    with pytest.raises(ValueError):
        optimal_weights(np.array([[1.0, 0.5], [0.4, 1.0]]))


def test_optimal_weights_elemental_view():
    opt = optimal_weights(elemental_covariance(6, 0.0, 3000, 5))
    w = opt.weights
    assert w.n == 6
    np.testing.assert_array_equal(w.vector(), opt.r)


def test_bounds_identical_blocks():
    b = min_variance_bounds(7, 0.0, 2000, 2, blocks=(1, 1))
    assert b.lower == b.upper
    assert b.point == pytest.approx(b.lower)


def test_bounds_ordered_up_to_noise():
    block = 4000
    b = min_variance_bounds(10, 0.0, block, 6)
    assert 0 < b.lower <= b.upper * (1 + 5 / math.sqrt(block))


def test_in_sample_optimality():
    n, xi = 8, 0.5
    cov = elemental_covariance(n, xi, 4000, 8)
    opt = optimal_weights(cov)
    for name in ("equal-weight", "top-row", "quadratic-gap", "linearly-rising"):
        r = named_scheme(name, n).vector()
        assert opt.variance <= r @ cov @ r


def test_optimal_scheme_efficient_on_fresh_data():
    n = 12
    opt = min_variance_bounds(n, 0.0, 10_000, 101).optimal
    rows = relative_efficiency([("D1", opt.weights)], n, [0.0], 10_000, 202)
    assert 0.9 <= rows[0].efficiency <= 1.05


def test_efficiency_against_itself():
    rows = relative_efficiency(["linearly-rising", "top-row"], 7, [0.0, 1.0], 1000, 4, reference="linearly-rising")
    lr = [r for r in rows if r.estimator == "linearly-rising"]
    assert [r.efficiency for r in lr] == [1.0, 1.0]


def test_efficiency_rejects_uncertified_scheme():
    with pytest.raises(ValueError, match="unbiased"):
        relative_efficiency([("pickands", pickands_weights(12, 3))], 12, [0.0], 500, 0)


def test_efficiency_rows_consistent():
    rows = relative_efficiency(["equal-weight"], 6, [0.0], 2000, 3)
    (row,) = rows
    assert row.efficiency == pytest.approx(math.sqrt(row.lower * row.upper) / row.variance)
    assert row.in_sample_variance >= row.lower


def test_determinism_across_threads():
    w = elemental_basis(9)
    a = simulate_estimates(GpdParams(0, 1, 0.7), 9, 4500, w, RandomStream(3), threads=1)
    b = simulate_estimates(GpdParams(0, 1, 0.7), 9, 4500, w, RandomStream(3), threads=4)
    assert np.array_equal(a, b)
    cfg = dict(n_values=[5], xi_values=[0.0, 2.0], replications=3500, seed=2)
    assert bias_sweep(ExperimentConfig(**cfg, threads=1)) == bias_sweep(ExperimentConfig(**cfg, threads=3))


def test_location_scale_invariance_end_to_end():
    base = bias_sweep(ExperimentConfig([4, 7], [-2.0, 0.0, 1.5], replications=2000, seed=5))
    moved = bias_sweep(ExperimentConfig([4, 7], [-2.0, 0.0, 1.5], replications=2000, seed=5, mu=100.0, sigma=7.0))
    for a, b in zip(base, moved):
        assert a.estimator == b.estimator
        assert abs(a.mean - b.mean) <= 1e-9
        assert abs(a.variance - b.variance) <= 1e-9


def test_matches_data_space_sampling():
    """Simulated estimates agree in distribution with sampling data values and evaluating directly."""
    n, xi, reps = 7, 0.4, 20_000
    a = expand(linearly_rising(n))
    stream = RandomStream(17)
    direct = np.array([evaluate_spacing_weights(sample(GpdParams(2, 3, xi), n, stream), a) for _ in range(reps)])
    fast = simulate_estimates(GpdParams(2, 3, xi), n, reps, a.packed(), RandomStream(18))[:, 0]
    se = math.sqrt(direct.var() / reps + fast.var() / reps)
    assert abs(direct.mean() - fast.mean()) <= 4 * se
    assert fast.var() == pytest.approx(direct.var(), rel=0.06)


def test_consistency_rows_and_slope():
    rows = consistency_study("linearly-rising", [0.0], [20, 50, 100], 2000, 7, baselines=True)
    lr = [r for r in rows if r.estimator == "linearly-rising"]
    assert [r.axis for r in lr] == pytest.approx([1 - math.sqrt(2 / n) for n in (20, 50, 100)])
    assert {r.estimator for r in rows} == {"linearly-rising", "pickands_k5", "pickands_k12", "pickands_k25"}
    for a, b in zip(lr, lr[1:]):
        assert b.rmse / a.rmse <= 1.15
    assert -0.7 <= log_rmse_slope(lr) <= -0.3


def test_consistency_reproducible():
    a = consistency_study("linearly-rising", [1.0], [20], 2000, 12)
    b = consistency_study("linearly-rising", [1.0], [20], 2000, 12)
    assert a == b and a[0].axis == b[0].axis
