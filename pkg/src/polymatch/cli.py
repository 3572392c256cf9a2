"""Command-line front end: ``run``, ``inspect`` and ``resultant``.

Exit codes: 0 on success, 1 on I/O failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from .errors import PolymatchError
from .geometry import MinimalProblemKind
from .polynomials import BACKENDS, normalize, resultant_magnitude
from .sim import ExperimentConfig, _stream, corrupt, generate_instance, run_experiment
from .tensor import PAIRINGS, edge_affinities, edge_polynomials, edge_resultants

CSV_HEADER = ["problem", "solver", "sigma", "outliers", "baseline", "motions", "samples",
              "mean_accuracy", "std_accuracy", "instances", "seed"]

PROBLEMS = [k.value for k in MinimalProblemKind]


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polymatch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="accuracy-versus-samples experiment, written as CSV")
    run.add_argument("--problem", choices=PROBLEMS, required=True)
    run.add_argument("--n", type=int, default=10, help="inlier points per instance")
    run.add_argument("--sigma", type=_float_list, default=[0.0], help="pixel noise levels, comma list")
    run.add_argument("--outliers", type=_int_list, default=[0], help="outlier counts, comma list")
    run.add_argument("--baseline", type=float, default=1.0, help="camera baseline for 3p1")
    run.add_argument("--motions", type=int, default=1, help="rigid motions for up2p (1 or 2)")
    run.add_argument("--instances", type=int, default=100)
    run.add_argument("--samples-max", type=int, default=None, help="largest hyper-edge sample size")
    run.add_argument("--rho", type=float, default=None, help="affinity kernel width (per-problem default)")
    run.add_argument("--solver", choices=["sparse", "dense", "both"], default="sparse")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--workers", type=int, default=1, help="worker processes; output does not depend on it")
    run.add_argument("--out", required=True, help="CSV path, '-' for stdout")

    ins = sub.add_parser("inspect", help="print one instance and a correct and a wrong hyper-edge")
    ins.add_argument("--problem", choices=PROBLEMS, required=True)
    ins.add_argument("--seed", type=int, required=True)
    ins.add_argument("--n", type=int, default=10)
    ins.add_argument("--sigma", type=float, default=0.0)
    ins.add_argument("--baseline", type=float, default=1.0)
    ins.add_argument("--motions", type=int, default=1)
    ins.add_argument("--rho", type=float, default=None)

    res = sub.add_parser("resultant", help="resultant magnitude of two equal-degree polynomials")
    res.add_argument("--p", type=_float_list, required=True, help="coefficients, highest degree first")
    res.add_argument("--q", type=_float_list, required=True)
    res.add_argument("--backend", choices=sorted(BACKENDS), default="qr")
    return parser


def _config(args, **extra) -> ExperimentConfig:
    try:
        return ExperimentConfig(kind=args.problem, n=args.n, baseline=args.baseline, motions=args.motions,
                                rho=args.rho, **extra)
    except ValueError as exc:
        raise UsageError(str(exc))


# ------------------------------------------------------------------ run

def curves_to_csv(curves) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in curves:
        for samples, mean, std in c.rows:
            writer.writerow([c.problem, c.solver, repr(c.sigma), c.outliers, repr(c.baseline), c.motions,
                             samples, repr(mean), repr(std), c.instances, c.seed])
    return buf.getvalue()


def cmd_run(args) -> int:
    if args.motions != 1 and args.problem != "up2p":
        raise UsageError("--motions only applies to up2p")
    if args.samples_max is not None and args.samples_max < 1:
        raise UsageError("--samples-max must be positive")
    if not args.sigma or not args.outliers:
        raise UsageError("--sigma and --outliers need at least one value")
    cfg = _config(args, sigmas=args.sigma, outliers=args.outliers, instances=args.instances,
                  samples_max=args.samples_max, solver=args.solver, seed=args.seed, workers=args.workers)
    if args.out == "-":
        sys.stdout.write(curves_to_csv(run_experiment(cfg)))
        return 0
    # open first so an unwritable path fails before the experiment runs
    with open(args.out, "w", newline="") as fh:
        fh.write(curves_to_csv(run_experiment(cfg)))
    return 0


# ------------------------------------------------------------------ inspect

def _fmt(a) -> str:
    return np.array2string(np.asarray(a), precision=6, suppress_small=False, max_line_width=120)


def _edge_report(kind, inst, edge, rho, label):
    P, Q, bad = edge_polynomials(kind, inst, edge[None])
    r = edge_resultants(kind, inst, edge[None])[0]
    w = edge_affinities(kind, inst, edge[None], rho)[0]
    s1, s2 = PAIRINGS[kind]
    lines = [f"{label} edge (row, col): {[tuple(int(v) for v in p) for p in edge]}"]
    for name, slots, c in (("first", s1, P[0]), ("second", s2, Q[0])):
        lines.append(f"  {name} set slots {slots}: coefficients {_fmt(c)}")
        lines.append(f"    unit-norm check: |c| = {np.linalg.norm(c):.12f}")
    lines.append(f"  degenerate: {bool(bad[0])}")
    lines.append(f"  resultant magnitude: {r:.6e}")
    lines.append(f"  affinity: {w:.6e}")
    return lines, r


def inspect_report(args) -> str:
    cfg = _config(args, sigmas=(args.sigma,), instances=1, seed=args.seed)
    kind = cfg.kind
    inst = generate_instance(cfg, _stream(cfg.seed, 0, 0))
    if args.sigma > 0:
        inst = corrupt(inst, args.sigma, 0, _stream(cfg.seed, 0, 1, 0, 0))
    rho = cfg.effective_rho
    out = [f"problem: {kind.value}  (shared variable: {kind.shared_variable}, edge order {kind.order})",
           f"seed: {cfg.seed}  n: {cfg.n}  sigma: {args.sigma}  rho: {rho:g}"]
    for k, cam in enumerate(inst.cameras):
        out.append(f"camera {k}: center {_fmt(cam.center)}")
        out.append(f"  K =\n{_fmt(cam.K)}")
        out.append(f"  R =\n{_fmt(cam.R)}")
    out.append(f"3D points:\n{_fmt(inst.points3d)}")
    for k, obs in enumerate(inst.observations):
        out.append(f"image {k} points:\n{_fmt(obs)}")
    out.append(f"ground truth (row -> column): {inst.ground_truth.tolist()}")
    if inst.motion_labels is not None and cfg.motions == 2:
        out.append(f"motion labels: {inst.motion_labels.tolist()}")
    m = kind.order
    rows = np.arange(m)
    good = np.stack([rows, inst.ground_truth[rows]], axis=-1)
    # the last slot takes the true column of a row outside the edge, so only
    # the second minimal set is wrong
    wrong_cols = inst.ground_truth[rows].copy()
    if inst.n_inliers > m:
        wrong_cols[-1] = inst.ground_truth[m]
    else:
        wrong_cols[[-2, -1]] = wrong_cols[[-1, -2]]
    bad = np.stack([rows, wrong_cols], axis=-1)
    lines, r_good = _edge_report(kind, inst, good, rho, "correct")
    out += lines
    lines, r_bad = _edge_report(kind, inst, bad, rho, "incorrect")
    out += lines
    out.append(f"correct < incorrect: {bool(r_good < r_bad)}")
    return "\n".join(out) + "\n"


def cmd_inspect(args) -> int:
    sys.stdout.write(inspect_report(args))
    return 0


# ------------------------------------------------------------------ resultant

def cmd_resultant(args) -> int:
    p, q = args.p, args.q
    if len(p) < 2 or len(q) < 2:
        raise UsageError("polynomials need degree at least 1")
    if len(p) != len(q):
        raise UsageError(f"degrees differ: {len(p) - 1} and {len(q) - 1}")
    if p[0] == 0 or q[0] == 0:
        raise UsageError("leading coefficients must be nonzero")
    try:
        normalize(p), normalize(q)
    except PolymatchError as exc:
        raise UsageError(str(exc))
    print(repr(resultant_magnitude(p, q, args.backend)))
    return 0


COMMANDS = {"run": cmd_run, "inspect": cmd_inspect, "resultant": cmd_resultant}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"polymatch {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"polymatch {args.command}: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
