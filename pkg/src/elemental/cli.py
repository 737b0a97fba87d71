"""Command-line front end.

Commands::

    elemental sample      --n N --xi XI [--mu --sigma] --reps R --seed S [--out F]
    elemental estimate    --data F [--scheme NAME | --weights W.json] [--all-elementals] [--baselines]
    elemental verify      (--n N | --weights W.json)
    elemental experiment  bias|efficiency|consistency|optimal-weights ...

CSV schemas::

    sample       rep,rank,value
    estimate     rep,estimator,value          (tie rows: rep,error,tie)
    bias         n,xi,estimator,mean,bias,variance,rmse,stderr,reps
    consistency  n,xi,estimator,mean,bias,variance,rmse,stderr,reps,axis
    efficiency   n,xi,estimator,variance,in_sample_variance,lower,upper,efficiency

Every CSV written to a file gets a ``<file>.manifest.json`` alongside.  Exit
codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .baselines import default_k, hill, pickands
from .certificate import MAX_RANK_N, certify, elemental_basis_rank
from .estimators import OrderedSample, TieError, all_elementals, evaluate_spacing_weights, elemental_indices
from .gpd import GpdParams, sample
from .rng import RandomStream
from .simulation import (
    ConfigError,
    ExperimentConfig,
    bias_sweep,
    consistency_study,
    min_variance_bounds,
    relative_efficiency,
    xi_grid,
)
from .weights import SchemeName, as_spacing_weights, dumps, expand, load, named_scheme, single_elemental

SUMMARY_HEADER = ["n", "xi", "estimator", "mean", "bias", "variance", "rmse", "stderr", "reps"]
EFFICIENCY_HEADER = ["n", "xi", "estimator", "variance", "in_sample_variance", "lower", "upper", "efficiency"]
NAMED_SCHEMES = [s.value for s in SchemeName if s is not SchemeName.CUSTOM]


class UsageError(Exception):
    pass


def fmt(v) -> str:
    if isinstance(v, float):
        return repr(v) if math.isnan(v) or math.isinf(v) else format(v, ".17g")
    return str(v)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _write_csv(path, header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _write_manifest(args, started: str, outputs: list, **extra) -> None:
    if not outputs:
        return
    config = {k: v for k, v in vars(args).items() if k != "func"}
    doc = {
        "command": args.command if args.command != "experiment" else f"experiment {args.kind}",
        "config": config,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "started": started,
        "finished": _now(),
        "outputs": [str(p) for p in outputs],
        **extra,
    }
    Path(f"{outputs[0]}.manifest.json").write_text(json.dumps(doc, indent=2, default=str), encoding="utf-8")


def _file_outputs(path) -> list:
    return [] if path is None or str(path) == "-" else [path]


# -- argument types ------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out or any(v < 3 for v in out):
        raise argparse.ArgumentTypeError("sample sizes must be at least 3")
    return out


def _grid(text: str) -> list[float]:
    """``lo:hi:count`` grid."""
    parts = text.split(":")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if len(parts) != 3 or count < 1:
            raise ValueError
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}") from None
    return xi_grid(lo, hi, count)


def _scheme(text: str) -> str:
    if text not in NAMED_SCHEMES:
        raise argparse.ArgumentTypeError(f"unknown scheme {text!r}; choose from {', '.join(NAMED_SCHEMES)}")
    return text


# -- commands ------------------------------------------------------------------


def cmd_sample(args) -> int:
    started = _now()
    params = _params(args.mu, args.sigma, args.xi)
    stream = RandomStream(args.seed)
    rows = []
    for rep in range(1, args.reps + 1):
        s = sample(params, args.n, stream.child(rep))
        rows.extend((rep, rank, float(v)) for rank, v in enumerate(s.values, start=1))
    _write_csv(args.out, ["rep", "rank", "value"], rows)
    _write_manifest(args, started, _file_outputs(args.out))
    return 0


def _params(mu, sigma, xi) -> GpdParams:
    try:
        return GpdParams(mu, sigma, xi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def read_samples(path) -> dict[str, list[float]]:
    """Read a ``rep,rank,value`` CSV or a single column of numbers (one sample)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in csv.reader(io.StringIO(text)) if ln and any(c.strip() for c in ln)]
    if not lines:
        raise UsageError(f"{path}: no data")
    header = [c.strip().lower() for c in lines[0]]
    if "value" in header and "rep" in header:
        ri, vi = header.index("rep"), header.index("value")
        out: dict[str, list[float]] = {}
        for ln in lines[1:]:
            out.setdefault(ln[ri].strip(), []).append(float(ln[vi]))
    else:
        body = lines
        try:
            float(lines[0][0])
        except ValueError:
            body = lines[1:]
        out = {"1": [float(ln[0]) for ln in body]}
    if not out or not any(out.values()):
        raise UsageError(f"{path}: no data")
    return out


def cmd_estimate(args) -> int:
    started = _now()
    samples = read_samples(args.data)
    custom = load(args.weights) if args.weights else None
    label = "custom" if custom is not None else args.scheme
    rows, errors, skipped = [], [], []
    for rep, values in samples.items():
        s = OrderedSample.from_data(values)
        if s.n < 3:
            rows.append((rep, "error", "too-small"))
            errors.append({"rep": rep, "reason": "too-small"})
            continue
        try:
            a = as_spacing_weights(custom if custom is not None else args.scheme, s.n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        try:
            rep_rows = [(rep, label, evaluate_spacing_weights(s, a))]
            if args.all_elementals:
                rep_rows += [(rep, f"elemental_{i}_{j}", v) for (i, j), v in all_elementals(s).items()]
        except TieError as exc:
            rows.append((rep, "error", "tie"))
            errors.append({"rep": rep, "reason": "tie", "pair": list(exc.pair)})
            continue
        if args.baselines:
            k = default_k(s.n)
            for name, fn in (("pickands", pickands), ("hill", hill)):
                try:
                    rep_rows.append((rep, f"{name}_k{k}", fn(s, k)))
                except (IndexError, ValueError) as exc:
                    skipped.append({"rep": rep, "estimator": name, "reason": str(exc)})
        rows.extend(rep_rows)
    _write_csv(args.out, ["rep", "estimator", "value"], rows)
    _write_manifest(args, started, _file_outputs(args.out), error_count=len(errors), errors=errors, skipped=skipped)
    return 0


def cmd_verify(args) -> int:
    if args.weights:
        w = load(args.weights)
        a = expand(w) if w.kind == "elemental" else w
        report = certify(a).to_json_dict()
        doc, ok = report, report["passed"]
    else:
        n = args.n
        elementals = []
        for i, j in elemental_indices(n):
            rep = certify(expand(single_elemental(n, i, j))).to_json_dict()
            elementals.append({"i": i, "j": j, **rep})
        schemes = {name: certify(expand(named_scheme(name, n))).to_json_dict() for name in NAMED_SCHEMES}
        ok = all(e["passed"] for e in elementals) and all(s["passed"] for s in schemes.values())
        doc = {"n": n, "elementals": elementals, "schemes": schemes}
        if n <= MAX_RANK_N:
            er, cr, spans = elemental_basis_rank(n)
            doc["rank"] = {"elemental_rank": er, "constraint_rank": cr, "spans_nullspace": spans}
            ok = ok and er == (n - 1) * (n - 2) // 2 and spans
        doc["passed"] = ok
    text = json.dumps(doc, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0 if ok else 1


def _summary_rows(rows, with_axis=False):
    for r in rows:
        out = [r.n, r.xi, r.estimator, r.mean, r.bias, r.variance, r.rmse, r.stderr, r.replications]
        yield out + [r.axis] if with_axis else out


def _xi_values(args, default):
    if getattr(args, "xi", None) is not None:
        return args.xi
    if getattr(args, "xi_grid", None) is not None:
        return args.xi_grid
    return default


def cmd_experiment(args) -> int:
    started = _now()
    try:
        return _EXPERIMENTS[args.kind](args, started)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _exp_bias(args, started) -> int:
    cfg = ExperimentConfig(args.n, _xi_values(args, list(xi_grid(-10, 10, 21))), args.reps, args.seed,
                           mu=args.mu, sigma=args.sigma, threads=args.threads)
    _write_csv(args.out, SUMMARY_HEADER, _summary_rows(bias_sweep(cfg)))
    _write_manifest(args, started, _file_outputs(args.out))
    return 0


def _scheme_arg(args):
    if getattr(args, "weights", None):
        return ("custom", load(args.weights))
    return args.scheme


def _exp_consistency(args, started) -> int:
    rows = consistency_study(_scheme_arg(args), _xi_values(args, [-3, -1, 0, 1, 3]), args.n_grid, args.reps, args.seed,
                             mu=args.mu, sigma=args.sigma, threads=args.threads, baselines=args.baselines)
    _write_csv(args.out, SUMMARY_HEADER + ["axis"], _summary_rows(rows, with_axis=True))
    _write_manifest(args, started, _file_outputs(args.out))
    return 0


def _exp_efficiency(args, started) -> int:
    schemes = list(args.schemes)
    if args.weights:
        schemes.append(("custom", load(args.weights)))
    try:
        rows = relative_efficiency(schemes, args.n, _xi_values(args, xi_grid(-3, 3, 13)), args.block, args.seed,
                                   mu=args.mu, sigma=args.sigma, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = ([r.n, r.xi, r.estimator, r.variance, r.in_sample_variance, r.lower, r.upper, r.efficiency] for r in rows)
    _write_csv(args.out, EFFICIENCY_HEADER, out)
    _write_manifest(args, started, _file_outputs(args.out))
    return 0


def _exp_optimal(args, started) -> int:
    b = min_variance_bounds(args.n, args.xi, args.block, args.seed, mu=args.mu, sigma=args.sigma, threads=args.threads)
    opt = b.optimal
    text = dumps(
        opt.weights,
        xi=args.xi,
        bounds={"lower": b.lower, "upper": b.upper, "point": b.point},
        multiplier=opt.multiplier,
        ridge=opt.ridge,
        spacing=json.loads(dumps(expand(opt.weights)))["entries"],
    )
    if args.out is None or args.out == "-":
        print(text)
    else:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        _write_manifest(args, started, [args.out])
    return 0


_EXPERIMENTS = {
    "bias": _exp_bias,
    "consistency": _exp_consistency,
    "efficiency": _exp_efficiency,
    "optimal-weights": _exp_optimal,
}


# -- parser --------------------------------------------------------------------


def _common(p, *, seed=True):
    p.add_argument("--out", help="output file (default: stdout)")
    if seed:
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mu", type=float, default=0.0)
        p.add_argument("--sigma", type=float, default=1.0)
        p.add_argument("--threads", type=_positive_int, default=1, help="worker threads; never changes output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elemental", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw GPD samples; CSV rep,rank,value")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--reps", type=_positive_int, default=1)
    _common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="estimate the tail from data; CSV rep,estimator,value")
    p.add_argument("--data", required=True, help="rep,rank,value CSV or one column of numbers")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--scheme", type=_scheme, default="linearly-rising")
    g.add_argument("--weights", help="weight-matrix JSON")
    p.add_argument("--all-elementals", action="store_true")
    p.add_argument("--baselines", action="store_true", help="add Pickands and Hill rows (k = N // 4)")
    _common(p, seed=False)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="analytic unbiasedness certificate (JSON)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--weights")
    _common(p, seed=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="Monte Carlo experiments")
    exp = p.add_subparsers(dest="kind", required=True)

    e = exp.add_parser("bias", help="per-elemental bias sweep")
    e.add_argument("--n", type=_int_list, default=[7])
    e.add_argument("--reps", type=_positive_int, default=50_000)
    g = e.add_mutually_exclusive_group()
    g.add_argument("--xi-grid", type=_grid, help="lo:hi:count (default -10:10:21)")
    g.add_argument("--xi", type=_float_list)
    _common(e)

    e = exp.add_parser("consistency", help="RMSE against sample size")
    g = e.add_mutually_exclusive_group()
    g.add_argument("--scheme", type=_scheme, default="linearly-rising")
    g.add_argument("--weights")
    g = e.add_mutually_exclusive_group()
    g.add_argument("--xi", type=_float_list)
    g.add_argument("--xi-grid", type=_grid)
    e.add_argument("--n-grid", type=_int_list, default=[20, 50, 100, 200, 500, 1000])
    e.add_argument("--reps", type=_positive_int, default=10_000)
    e.add_argument("--baselines", action="store_true")
    _common(e)

    e = exp.add_parser("efficiency", help="relative efficiency against the minimum variance")
    e.add_argument("--n", type=int, default=20)
    e.add_argument("--block", type=_positive_int, default=8000)
    e.add_argument("--schemes", type=lambda t: [_scheme(s) for s in t.split(",") if s], default=NAMED_SCHEMES)
    e.add_argument("--weights", help="extra custom scheme (weight-matrix JSON)")
    g = e.add_mutually_exclusive_group()
    g.add_argument("--xi", type=_float_list)
    g.add_argument("--xi-grid", type=_grid, help="lo:hi:count (default -3:3:13)")
    _common(e)

    e = exp.add_parser("optimal-weights", help="variance-minimising weights and bounds (JSON)")
    e.add_argument("--n", type=int, default=20)
    e.add_argument("--xi", type=float, default=0.0)
    e.add_argument("--block", type=_positive_int, default=8000)
    _common(e)

    p.set_defaults(func=cmd_experiment)
    return parser


_NEGATIVE_OK = ("--xi", "--xi-grid")


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "--xi-grid -10:10:21" as two flags; glue such values on with "="
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _NEGATIVE_OK:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        if getattr(args, "n", None) is not None and args.command == "verify" and args.n < 3:
            raise UsageError("--n must be at least 3")
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"elemental: error: {exc}\n")
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        parser.exit(2, f"elemental: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
