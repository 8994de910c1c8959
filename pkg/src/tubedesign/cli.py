"""Command-line interface: ``tubedesign <command> [options]``.

Exit status is 0 on success, 2 for invalid input and 3 when a numerical
procedure fails (quadrature accuracy, orbit reduction, ...).
"""

import argparse
import csv
import io as _io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .bands import (
    TABLE_ONE_V,
    naiman_threshold,
    naiman_threshold_uniform_direction,
    simulate_quantiles,
    table_one,
    tube_threshold,
)
from .bases import Model
from .errors import NumericalFailure, TubeDesignError
from .io import dump_design, load_document
from .mobius import MobiusParams, act_on_design, inverse
from .moments import HankelMatrix, info_matrix
from .optimal import (
    d_optimal_fourier,
    d_optimal_polynomial,
    local_hessian_check,
    m_v,
    reduce_to_orbit_rep,
    tv_optimal_fourier,
    tv_optimal_polynomial,
)
from .volume import len_of_v, lower_bound_len, mixing_curve, volume_fourier, volume_polynomial

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class UsageError(TubeDesignError, ValueError):
    """Inconsistent or missing command-line options."""


# ---------------------------------------------------------------------------
# option parsing helpers


def _floats(text, count=None, name="value"):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{name}: expected comma-separated numbers, got {text!r}") from exc
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"{name}: expected {count} numbers, got {len(vals)}")
    return vals


def _params_arg(text):
    return MobiusParams(*_floats(text, 4, "Moebius parameters"))


def _pair_arg(text):
    return tuple(_floats(text, 2, "pair"))


def _list_arg(text):
    return _floats(text, None, "list")


def _fmt(x):
    return f"{x:.12g}"


def _emit(text, out):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(obj, out):
    _emit(json.dumps(obj, indent=2), out)


def _emit_csv(header, rows, out):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else _fmt(v) for v in row])
    _emit(buf.getvalue(), out)


def _resolve_seed(seed):
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2**63))
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _matrix_input(args, required=True):
    """``(Model, information matrix)`` from ``--moments`` or ``--design``."""
    given = [x for x in (getattr(args, "moments", None), getattr(args, "design", None)) if x is not None]
    if len(given) > 1:
        raise UsageError("give either --moments or --design, not both")
    if not given:
        if required:
            raise UsageError("one of --moments or --design is required")
        return None, None
    if args.moments is not None:
        H = HankelMatrix(args.moments)
        return Model.polynomial(H.n), H
    doc = load_document(args.design)
    return doc.model, info_matrix(doc.model, doc.design)


def _volume_of(model, M, tol):
    if model.kind == "fourier":
        return volume_fourier(M, abs_tol=tol)
    return volume_polynomial(M, abs_tol=tol)


# ---------------------------------------------------------------------------
# commands


def cmd_volume(args):
    model, M = _matrix_input(args)
    res = _volume_of(model, M, args.tol)
    _emit_json({"volume": res.volume, "quadrature_error": res.quadrature_error,
                "nodes": res.nodes, "n": model.n, "kind": model.kind}, args.out)


def _grid(lo, hi, steps):
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    return np.linspace(lo, hi, steps + 1)


def cmd_scan(args):
    if args.kind == "lenv":
        lo = 0.02 if args.lo is None else args.lo
        hi = 0.98 if args.hi is None else args.hi
        if not 0 < lo <= hi < 1:
            raise UsageError("lenv scan needs 0 < --from <= --to < 1")
        rows = []
        for v in _grid(lo, hi, args.steps):
            lb = lower_bound_len(v) if v <= 1 / 3 else None
            rows.append((v, len_of_v(v), lb))
        _emit_csv(["v", "len", "lower_bound"], rows, args.out)
    else:
        lo = 0.0 if args.lo is None else args.lo
        hi = 1.0 if args.hi is None else args.hi
        if not 0 <= lo <= hi <= 1:
            raise UsageError("mixing scan needs 0 <= --from <= --to <= 1")
        _emit_csv(["c", "volume"], mixing_curve(_grid(lo, hi, args.steps)), args.out)


def cmd_doptimal(args):
    if args.domain == "fourier":
        design = d_optimal_fourier(args.n, args.theta)
        model = Model.fourier(args.n)
    else:
        design = d_optimal_polynomial(args.n, args.variance, args.rotation)
        model = Model.polynomial(args.n, args.variance)
    _emit(dump_design(model, design), args.out)


def cmd_tvoptimal(args):
    if args.domain == "fourier":
        design = tv_optimal_fourier(args.q, args.r, args.theta)
        model = Model.fourier(3)
    else:
        design = tv_optimal_polynomial(args.variance, args.free)
        model = Model.polynomial(3, args.variance)
    _emit(dump_design(model, design), args.out)


def cmd_reduce(args):
    model, M = _matrix_input(args)
    if model.kind != "polynomial":
        raise UsageError("reduce needs a polynomial model")
    op = reduce_to_orbit_rep(M)
    _emit_json({"v": op.v, "dual_v": op.dual_v, "transform": list(map(float, op.transform)),
                "scale": op.scale, "volume": volume_polynomial(m_v(op.v)).volume}, args.out)


def cmd_transform(args):
    doc = load_document(args.design)
    params = args.mobius if args.mobius is not None else doc.mobius
    if params is None:
        raise UsageError("no Moebius parameters: pass --mobius or add a 'mobius' field")
    if doc.model.kind != "polynomial":
        raise UsageError("transform needs a polynomial model")
    if args.invert:
        params = inverse(params)
    design, variance = act_on_design(params, doc.design, doc.model.variance)
    model = Model.polynomial(doc.model.n, variance)
    _emit(dump_design(model, design, mobius=params), args.out)


def cmd_threshold(args):
    if (args.volume is None) == (args.design is None):
        raise UsageError("give exactly one of --volume or --design")
    n = args.n
    if args.volume is not None:
        volume = args.volume
    else:
        doc = load_document(args.design)
        volume = _volume_of(doc.model, info_matrix(doc.model, doc.design), 1e-9).volume
        n = n or doc.model.n
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.method == "tube":
            c = tube_threshold(volume, args.alpha)
        elif args.method == "naiman":
            c = naiman_threshold(volume, args.chi, args.alpha)
        else:
            c = naiman_threshold_uniform_direction(volume, args.chi, n or 3, args.alpha)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _emit_json({"threshold": c, "method": args.method, "volume": volume, "alpha": args.alpha,
                "chi": args.chi, "feasible": not caught}, args.out)


def cmd_simulate(args):
    if args.v is not None:
        if args.moments is not None or args.design is not None:
            raise UsageError("give only one of --v, --moments or --design")
        M = m_v(args.v)
    else:
        _, M = _matrix_input(args)
    seed = _resolve_seed(args.seed)
    q = simulate_quantiles(M, args.alphas, args.reps, seed)
    _emit_json({"seed": seed, "reps": args.reps,
                "quantiles": [{"alpha": a, "w": w} for a, w in zip(args.alphas, q)]}, args.out)


def cmd_table1(args):
    seed = _resolve_seed(args.seed)
    alphas = args.alphas
    rows = table_one(args.reps, seed, alphas=alphas, vs=TABLE_ONE_V)
    fmt = args.format or ("json" if args.out and args.out.endswith(".json") else "csv")
    if fmt == "json":
        _emit_json({"seed": seed, "reps": args.reps, "rows": [
            {"v": r.v, "volume": r.volume,
             "empirical": dict(zip(map(str, alphas), r.empirical)),
             "theoretical": dict(zip(map(str, alphas), r.theoretical))} for r in rows]}, args.out)
    else:
        header = ["v", "volume"] + [f"w_{a:g}" for a in alphas] + [f"tube_{a:g}" for a in alphas]
        _emit_csv(header, [(r.v, r.volume, *r.empirical, *r.theoretical) for r in rows], args.out)


def cmd_hessian_check(args):
    rep = local_hessian_check(args.n)
    _emit_json({"n": args.n, "eigenvalues": rep.eigenvalues.tolist(), "null_dim": rep.null_dim,
                "orbit_dim": rep.orbit_dim, "point": rep.point.tolist()}, args.out)


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="tubedesign", description="Tube-volume optimal designs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", help="output file (default: stdout)")
        return p

    def matrix_opts(p):
        p.add_argument("--moments", type=_list_arg, help="m_0,...,m_{2n-2}")
        p.add_argument("--design", help="design JSON file")

    p = add("volume", cmd_volume, "tube-volume criterion of a design or moment vector")
    matrix_opts(p)
    p.add_argument("--tol", type=float, default=1e-9, help="absolute quadrature tolerance")

    p = add("scan", cmd_scan, "len(v) with its lower bound, or the mixing curve, as CSV")
    p.add_argument("--kind", choices=["lenv", "mixing"], required=True)
    p.add_argument("--from", dest="lo", type=float)
    p.add_argument("--to", dest="hi", type=float)
    p.add_argument("--steps", type=int, default=100, help="number of grid intervals")

    p = add("doptimal", cmd_doptimal, "D-optimal design")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--domain", choices=["fourier", "real"], default="fourier")
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--variance", type=_params_arg, default=MobiusParams(1.0, 0.0, 0.0, 1.0))
    p.add_argument("--rotation", type=_pair_arg, default=(1.0, 0.0), help="s,t with s^2+t^2=1")

    p = add("tvoptimal", cmd_tvoptimal, "three-point tube-volume optimal design")
    p.add_argument("--domain", choices=["fourier", "real"], default="fourier")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--variance", type=_params_arg, default=MobiusParams(1.0, 0.0, 0.0, 1.0))
    p.add_argument("--free", type=_params_arg, default=MobiusParams(1.0, 0.0, 0.0, 1.0))

    p = add("reduce", cmd_reduce, "reduce an n=3 information matrix to its orbit representative M_v")
    matrix_opts(p)

    p = add("transform", cmd_transform, "move a polynomial design along a Moebius map")
    p.add_argument("--design", required=True)
    p.add_argument("--mobius", type=_params_arg, help="a,b,c,d (overrides the file's 'mobius' field)")
    p.add_argument("--invert", action="store_true", help="apply the inverse map")

    p = add("threshold", cmd_threshold, "band threshold from a volume")
    p.add_argument("--volume", type=float)
    p.add_argument("--design")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--chi", type=int, default=2)
    p.add_argument("--n", type=int, help="dimension for --method beta (default: from the design, else 3)")
    p.add_argument("--method", choices=["tube", "naiman", "beta"], default="tube")

    p = add("simulate", cmd_simulate, "Monte Carlo quantiles of the band statistic")
    p.add_argument("--v", type=float, help="use M_v")
    matrix_opts(p)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--alphas", type=_list_arg, required=True)
    p.add_argument("--seed", type=int)

    p = add("table1", cmd_table1, "volumes, simulated and tube quantiles for the designs D(v)")
    p.add_argument("--reps", type=int, default=300_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--alphas", type=_list_arg, default=[0.1, 0.05])
    p.add_argument("--format", choices=["csv", "json"])

    p = add("hessian-check", cmd_hessian_check, "finite-difference Hessian at the D-optimal point")
    p.add_argument("--n", type=int, required=True)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except NumericalFailure as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (TubeDesignError, ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
