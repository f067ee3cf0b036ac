"""Command-line entry point.

Exit codes: 0 success, 1 failed check, 2 bad input, 3 numeric failure
(cut locus, singular covariance, divergence).
"""

import argparse
import sys
from datetime import datetime, timezone

import numpy as np

from .. import poses
from ..adaptive_weights import compute_weights, residuals
from ..exceptions import FormatError, NonPositiveWeight, NotARotation, NotSPD, NumericError
from ..metric_loss import MetricZ, grad_check
from .align import TrainConfig, align
from .evaluation import evaluate, save_report
from .io import fmt, format_weights, load_metric, load_pairs, load_scalars, parse_pose
from .regressor import LOSS_KINDS, train_demo
from .stats import ttest

EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 1, 2, 3


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _header(args):
    if getattr(args, "no_timestamp", False):
        return ""
    return "# generated " + datetime.now(timezone.utc).isoformat(timespec="seconds") + "\n"


def _metric(path):
    return MetricZ.identity() if path is None else load_metric(path)


def cmd_eval(args):
    pairs = load_pairs(args.pairs)
    Z = _metric(None if args.identity else args.metric)
    name = "identity" if args.metric is None or args.identity else args.metric
    report = evaluate(pairs, Z, metric_name=name)
    save_report(report, args.out, timestamp=not args.no_timestamp)
    summary = report.summary()
    print(f"records={len(report.ids)} excluded_cut_locus={report.n_excluded}")
    print(" ".join(f"{k}={summary[k]:.6g}" for k in summary))
    return 0


def cmd_weights(args):
    pairs = load_pairs(args.pairs)
    X = residuals(pairs.truth, pairs.pred)
    w = compute_weights(X, center=not args.no_center)
    text = format_weights(w)
    if not args.no_timestamp and args.out not in (None, "-"):
        text = _header(args) + text
    _write(args.out, text)
    if args.out not in (None, "-"):
        print("weights " + text.splitlines()[-1])
    return 0


def cmd_align(args):
    cfg = TrainConfig(lr=args.lr, max_iter=args.max_iter, threshold=args.threshold)
    result = align(parse_pose(args.init), parse_pose(args.target), _metric(args.metric), cfg)
    lines = ["iteration,loss,rx,ry,rz,tx,ty,tz"]
    for it, loss, p in result.rows():
        lines.append(",".join([str(it), fmt(loss)] + [fmt(x) for x in p]))
    _write(args.out, _header(args) + "\n".join(lines) + "\n")
    status = "converged" if result.converged else "not converged"
    print(f"{status} after {result.iterations[-1]} iterations, loss {result.loss:.6g}",
          file=sys.stderr)
    return 0 if result.converged else EXIT_FAIL


def random_spd(rng, floor=0.1):
    A = rng.normal(size=(6, 6))
    return A @ A.T + floor * np.eye(6)


def run_gradcheck(samples, step, seed, group=10, max_angle=3.0):
    """Gradient check over random (p, p_hat, Z) triples; one SPD Z per group."""
    rng = np.random.default_rng(seed)
    rels, devs = [], []
    for start in range(0, samples, group):
        n = min(group, samples - start)
        p_hat = poses.sample_poses(rng, n, max_angle=np.pi - 1e-2)
        delta = poses.sample_poses(rng, n, max_angle=max_angle)
        p = poses.compose(p_hat, delta)
        rep = grad_check(p, p_hat, random_spd(rng), step)
        dev = np.abs(rep.analytic - rep.numeric).max(axis=-1)
        scale = np.maximum(np.abs(rep.analytic).max(axis=-1), np.abs(rep.numeric).max(axis=-1))
        rels.append(dev / np.maximum(scale, 1e-12))
        devs.append(dev)
    return np.concatenate(rels), np.concatenate(devs)


def cmd_gradcheck(args):
    rel, dev = run_gradcheck(args.samples, args.step, args.seed)
    ok = bool(np.all(rel < args.rtol))
    print(f"samples={len(rel)} step={args.step:g} max_rel={rel.max():.3e} "
          f"max_abs={dev.max():.3e} rtol={args.rtol:g} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else EXIT_FAIL


def cmd_train_demo(args):
    metric, source = None, "identity"
    if args.metric == "adaptive":
        source = "adaptive"
    elif args.metric not in (None, "identity"):
        metric = load_metric(args.metric)
        source = args.metric
    cfg = TrainConfig(lr=args.lr, max_iter=args.steps, seed=args.seed, metric=source)
    res = train_demo(args.loss, cfg, noise=args.noise, metric=metric)
    lines = [f"loss={res.loss_kind}", f"seed={args.seed}", f"steps={args.steps}",
             f"initial_gd={fmt(res.initial_gd)}", f"final_gd={fmt(res.final_gd)}",
             f"reduction={fmt(res.reduction)}"]
    if res.weights is not None:
        lines.append("weights=" + " ".join(fmt(x) for x in res.weights))
    text = "\n".join(lines) + "\n"
    if args.out:
        curve = "".join(f"{i + 1},{fmt(x)}\n" for i, x in enumerate(res.loss_curve))
        _write(args.out, _header(args) + text + "step,train_loss\n" + curve)
    sys.stdout.write(text)
    return 0


def cmd_ttest(args):
    res = ttest(load_scalars(args.a), load_scalars(args.b), pooled=args.pooled,
                alpha=args.alpha)
    kind = "pooled" if args.pooled else "welch"
    print(f"test={kind} t={fmt(res.t)} df={fmt(res.df)} p={fmt(res.p)} "
          f"significant={'yes' if res.significant else 'no'}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="se3loss",
                                 description="Geodesic pose loss on SE(3): evaluation and checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def stamp(p):
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the generated-at header line")

    p = sub.add_parser("eval", help="per-axis and geodesic errors of pose pairs")
    p.add_argument("--pairs", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--metric", help="metric file (6x6 or 6 diagonal weights)")
    g.add_argument("--identity", action="store_true", help="use Z = I (default)")
    p.add_argument("--out", required=True)
    stamp(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("weights", help="data-adaptive diagonal weights from residuals")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-center", action="store_true",
                   help="use the raw second moment instead of the centred covariance")
    stamp(p)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("align", help="gradient descent of one pose onto another")
    p.add_argument("--init", required=True, help="rx,ry,rz,tx,ty,tz")
    p.add_argument("--target", required=True, help="rx,ry,rz,tx,ty,tz")
    p.add_argument("--metric")
    p.add_argument("--lr", type=float, default=0.4)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--threshold", type=float, default=1e-14)
    p.add_argument("--out", help="trace CSV (stdout when omitted)")
    stamp(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("gradcheck", help="analytic vs finite-difference gradient")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--step", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rtol", type=float, default=1e-4)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("train-demo", help="train a small regressor on synthetic poses")
    p.add_argument("--loss", choices=LOSS_KINDS, default="geodesic")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--steps", type=int, default=5000)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--metric", help="identity (default), adaptive, or a metric file")
    p.add_argument("--out", help="write summary and training-loss curve")
    stamp(p)
    p.set_defaults(func=cmd_train_demo)

    p = sub.add_parser("ttest", help="two-sample t-test on one-number-per-line files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--pooled", action="store_true", help="equal-variance Student test")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_ttest)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, NotSPD, NotARotation, NonPositiveWeight, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
