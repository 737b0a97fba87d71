"""Acceptance criteria A1 to A9.

Each check prints one ``A<k> PASS|FAIL`` line with its measured numbers, then
asserts.  Run ``pytest tests/test_acceptance.py -v`` or execute this file
directly for the summary lines alone.  All Monte Carlo checks use the single
fixed ``ACCEPTANCE_SEED``.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from elemental.baselines import pickands, pickands_weights
from elemental.certificate import (
    Decomposition,
    NotInSpan,
    certify,
    elemental_basis_rank,
    membership_decompose,
)
from elemental.estimators import OrderedSample, elemental_estimate, elemental_indices, evaluate_spacing_weights
from elemental.simulation import (
    ExperimentConfig,
    bias_sweep,
    consistency_study,
    log_rmse_slope,
    relative_efficiency,
)
from elemental.weights import (
    ElementalWeights,
    expand,
    linearly_rising,
    linearly_rising_spacing_closed_form,
    named_scheme,
    single_elemental,
)

ACCEPTANCE_SEED = 20261018
NAMED = ("equal-weight", "top-row", "quadratic-gap", "linearly-rising")


def report(tag: str, ok: bool, detail: str) -> None:
    print(f"{tag} {'PASS' if ok else 'FAIL'}  {detail}", flush=True)


def check_a1():
    t0 = time.perf_counter()
    worst_psi = worst_b = 0.0
    ok = True
    for n in range(3, 21):
        for i, j in elemental_indices(n):
            rep = certify(expand(single_elemental(n, i, j)))
            worst_psi = max(worst_psi, abs(rep.psi_i_sum + 1), abs(rep.psi_j_sum + 1))
            worst_b = max(worst_b, max(map(abs, rep.b)))
            ok &= rep.passed
    elapsed = time.perf_counter() - t0
    ok = ok and worst_psi <= 1e-10 and worst_b <= 1e-10 and elapsed < 5
    return ok, f"max|psi+1|={worst_psi:.2e} max|b_k|={worst_b:.2e} time={elapsed:.2f}s"


def check_a2():
    r = linearly_rising(7).matrix
    a = expand(linearly_rising(7)).matrix
    r_ref = np.zeros((7, 7))
    a_ref = np.zeros((7, 7))
    row = [10, 7, 4, 1, -2, -5]
    for i in range(7):
        for j in range(i + 2, 7):
            r_ref[i, j] = (7 - j) / 35
        for j in range(i + 1, 7):
            a_ref[i, j] = row[j - 1] / 35
    dev_r = float(np.abs(r - r_ref).max())
    dev_a = float(np.abs(a - a_ref).max())
    dev_cf = max(
        float(np.abs(expand(linearly_rising(n)).matrix - linearly_rising_spacing_closed_form(n).matrix).max())
        for n in range(3, 51)
    )
    ok = dev_r <= 1e-15 and dev_a <= 1e-15 and dev_cf <= 1e-12
    return ok, f"R dev={dev_r:.1e} A dev={dev_a:.1e} closed-form dev (n=3..50)={dev_cf:.1e}"


def check_a3():
    xis = [-10, -5, -2, -1, 0, 1, 2, 5, 10]
    t0 = time.perf_counter()
    rows = bias_sweep(ExperimentConfig([7], xis, replications=50_000, seed=ACCEPTANCE_SEED))
    elapsed = time.perf_counter() - t0
    z = [abs(r.bias) / r.stderr for r in rows]
    ok = len(rows) == 15 * len(xis) and max(z) <= 4 and elapsed < 120
    return ok, f"{len(rows)} means, max|z|={max(z):.2f} time={elapsed:.1f}s"


def check_a4():
    rows = bias_sweep(ExperimentConfig([3], [-3, 0, 3], replications=100_000, seed=ACCEPTANCE_SEED))
    z = [abs(r.bias) / r.stderr for r in rows]
    return max(z) <= 4, "z=" + ", ".join(f"{v:.2f}" for v in z) + " at xi=-3,0,3"


def check_a5():
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    ok = True
    worst = 0.0
    for n in range(4, 13):
        er, cr, spans = elemental_basis_rank(n)
        ok &= er == (n - 1) * (n - 2) // 2 and cr == n - 1 and spans
        m = (n - 1) * (n - 2) // 2
        for _ in range(100):
            u = rng.normal(size=m)
            r = ElementalWeights.from_vector(n, u - u.mean() + 1 / m)
            d = membership_decompose(expand(r))
            if not isinstance(d, Decomposition):
                ok = False
                continue
            worst = max(worst, float(np.abs(d.r - r.matrix).max()), d.residual)
    rejected = isinstance(membership_decompose(pickands_weights(12, 3)), NotInSpan)
    ok = ok and worst <= 1e-8 and rejected
    return ok, f"ranks ok n=4..12, 900 round trips max dev={worst:.1e}, single-column rejected={rejected}"


def check_a6():
    t0 = time.perf_counter()
    slopes = {}
    for xi in (-1.0, 0.0, 1.0):
        rows = consistency_study("linearly-rising", [xi], [20, 50, 100, 200, 500], 2000, ACCEPTANCE_SEED)
        slopes[xi] = log_rmse_slope(rows)
    elapsed = time.perf_counter() - t0
    ok = all(abs(s + 0.5) <= 0.1 for s in slopes.values()) and elapsed < 300
    return ok, ", ".join(f"slope(xi={k:g})={v:.3f}" for k, v in slopes.items()) + f" time={elapsed:.1f}s"


def check_a7():
    rows = relative_efficiency(list(NAMED), 20, [0.0, 1.0, 2.0], 8000, ACCEPTANCE_SEED)
    at0 = [r for r in rows if r.xi == 0.0]
    lower, upper = at0[0].lower, at0[0].upper
    bounds_ok = lower <= upper * 1.1
    in_sample_ok = all(lower <= r.in_sample_variance for r in at0)
    eff = {r.xi: r.efficiency for r in rows if r.estimator == "linearly-rising"}
    eff_ok = all(v >= 0.7 for v in eff.values())
    ok = bounds_ok and in_sample_ok and eff_ok
    detail = (
        f"lower={lower:.5f} upper={upper:.5f} in-sample optimal<=schemes={in_sample_ok} "
        + "efficiency(linearly-rising) "
        + ", ".join(f"xi={k:g}:{v:.3f}" for k, v in eff.items())
    )
    return ok, detail


def _estimators(n):
    out = [(f"elemental_{i}_{j}", expand(single_elemental(n, i, j))) for i, j in elemental_indices(n)]
    out += [(name, expand(named_scheme(name, n))) for name in NAMED]
    return out


def check_a8():
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    n = 12
    # dyadic data keeps x + c exact, so the shift check can demand equality
    values = np.sort(rng.choice(np.arange(-4096, 4096), n, replace=False) / 64.0)[::-1]
    s = OrderedSample(values)
    shift_ok = True
    scale_dev = 0.0
    for _, a in _estimators(n):
        base = evaluate_spacing_weights(s, a)
        shift_ok &= evaluate_spacing_weights(s.shift(37.25), a) == base
        for lam in (1e-6, 1e6):
            scale_dev = max(scale_dev, abs(evaluate_spacing_weights(s.scale(lam), a) - base))
    shift_ok &= pickands(s.shift(37.25), 3) == pickands(s, 3)
    shift_ok &= all(elemental_estimate(s.shift(-5.5), e) == elemental_estimate(s, e) for e in elemental_indices(n))
    scale_dev = max(scale_dev, *(abs(pickands(s.scale(lam), 3) - pickands(s, 3)) for lam in (1e-6, 1e6)))

    cfg = dict(n_values=[5, 9], xi_values=[-2.0, 0.0, 1.5], replications=5000, seed=ACCEPTANCE_SEED)
    base = bias_sweep(ExperimentConfig(**cfg))
    moved = bias_sweep(ExperimentConfig(**cfg, mu=100.0, sigma=7.0))
    e2e = max(max(abs(a.mean - b.mean), abs(a.variance - b.variance)) for a, b in zip(base, moved))
    eff_base = relative_efficiency(["linearly-rising"], 8, [0.5], 2000, ACCEPTANCE_SEED)
    eff_moved = relative_efficiency(["linearly-rising"], 8, [0.5], 2000, ACCEPTANCE_SEED, mu=-3.0, sigma=0.01)
    e2e = max(e2e, abs(eff_base[0].efficiency - eff_moved[0].efficiency))
    ok = shift_ok and scale_dev <= 1e-9 and e2e <= 1e-9
    return ok, f"shift exact={shift_ok} scale dev={scale_dev:.1e} end-to-end dev={e2e:.1e}"


def _cli(args, tmp_path, tag):
    out = tmp_path / f"{tag}.out"
    subprocess.run([sys.executable, "-m", "elemental", *args, "--out", str(out)], check=True)
    return out.read_bytes()


def check_a9(tmp_path):
    seed = str(ACCEPTANCE_SEED)
    commands = {
        "sample": ["sample", "--n", "20", "--xi", "0.5", "--reps", "50", "--seed", seed],
        "bias": ["experiment", "bias", "--n", "7", "--reps", "5000", "--xi-grid", "-10:10:5", "--seed", seed],
        "consistency": ["experiment", "consistency", "--n-grid", "20,50", "--xi", "-1,1", "--reps", "2500",
                        "--baselines", "--seed", seed],
        "efficiency": ["experiment", "efficiency", "--n", "10", "--block", "3000", "--xi", "0,2", "--seed", seed],
        "optimal-weights": ["experiment", "optimal-weights", "--n", "10", "--block", "3000", "--seed", seed],
    }
    same = {}
    for name, args in commands.items():
        threaded = [] if name == "sample" else [["--threads", "1"], ["--threads", "4"]]
        runs = [_cli(args, tmp_path, f"{name}0"), _cli(args, tmp_path, f"{name}1")]
        runs += [_cli(args + t, tmp_path, f"{name}t{k}") for k, t in enumerate(threaded)]
        same[name] = all(r == runs[0] for r in runs)
    ok = all(same.values())
    return ok, " ".join(f"{k}={'identical' if v else 'DIFFERENT'}" for k, v in same.items())


CHECKS = {
    "A1": check_a1,
    "A2": check_a2,
    "A3": check_a3,
    "A4": check_a4,
    "A5": check_a5,
    "A6": check_a6,
    "A7": check_a7,
    "A8": check_a8,
    "A9": check_a9,
}


@pytest.mark.parametrize("tag", list(CHECKS))
def test_acceptance(tag, tmp_path, capsys):
    fn = CHECKS[tag]
    ok, detail = fn(tmp_path) if tag == "A9" else fn()
    with capsys.disabled():
        print()
        report(tag, ok, detail)
    assert ok, f"{tag}: {detail}"


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    failed = 0
    for tag, fn in CHECKS.items():
        with tempfile.TemporaryDirectory() as d:
            ok, detail = fn(Path(d)) if tag == "A9" else fn()
        report(tag, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
