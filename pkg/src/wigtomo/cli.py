"""Command-line entry point: ``wigtomo <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 3 data or file-format error,
4 numerical failure.
"""

import argparse
import csv
import logging
import math
from pathlib import Path
import sys

from . import __version__
from .analysis import (
    DEFAULT_DISTANCE_R,
    STUDY_GRID_H,
    STUDY_N_MAX,
    bootstrap_study,
    distance_study,
    mc_study,
    reconstruct_point,
    settings_label,
)
from .fbp import FbpConfig, fbp_grid
from .grid import GridSpec
from .identities import run_identity_suite
from .io import (
    FormatError,
    read_dataset,
    write_coefficients,
    write_dataset,
    write_distance_curves,
    write_grid,
    write_table,
)
from .pse import PseConfig, estimate_coefficients, pse_grid
from .sampling import sample_dataset
from .states import StateSpec, make_state

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

SCHEME_ALIASES = {
    "full": "uniform_full_circle",
    "half": "uniform_half_circle",
    "uniform_full_circle": "uniform_full_circle",
    "uniform_half_circle": "uniform_half_circle",
}

ERROR_HEADER = ["mode", "algorithm", "q", "p", "J", "K", "value", "sigma", "mean_value", "mc_sigma", "mean_reported_sigma"]


class UsageError(Exception):
    pass


def _count(text):
    """Positive integer, also accepting forms like ``1e5``."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(v) and v == int(v) and v >= 1):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def _count_list(text):
    return [_count(t) for t in text.split(",") if t.strip()]


def _scheme(text):
    try:
        return SCHEME_ALIASES[text]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown scheme {text!r}; use full or half") from None


def _point(text):
    try:
        q, p = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected q,p, got {text!r}") from None
    return q, p


def _disk(text):
    if text == "auto":
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a radius or 'auto', got {text!r}") from None


def _algo_options(p, multi=False):
    help_algo = "comma-separated list of pse, fbp" if multi else "reconstruction algorithm"
    p.add_argument("--algo", default="pse,fbp" if multi else "pse", help=help_algo)
    p.add_argument("--kc", type=float, default=8.0, help="FBP frequency cutoff k_c")
    p.add_argument("--N", type=int, default=8, help="PSE angular cutoff")
    p.add_argument("--M", type=int, default=30, help="PSE radial cutoff")
    p.add_argument("--L", type=_disk, default=None, help="PSE disk radius (default auto = max |x|)")


def build_parser():
    parser = argparse.ArgumentParser(prog="wigtomo", description="Homodyne tomography by FBP and series expansion.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a synthetic homodyne dataset")
    g.add_argument("--state", required=True, help="state spec, e.g. thermal:nbar=1 or a bundled name")
    g.add_argument("--J", type=_count, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--scheme", type=_scheme, default="uniform_full_circle")
    g.add_argument("--out", required=True)

    r = sub.add_parser("reconstruct", help="reconstruct W on a grid from a dataset")
    r.add_argument("--data", required=True)
    r.add_argument("--scheme", type=_scheme, default=None, help="phase scheme of a bare CSV")
    _algo_options(r)
    r.add_argument("--grid", default="-4:4:81", help="lo:hi:n or qlo:qhi:nq,plo:phi:np")
    r.add_argument("--out", required=True)
    r.add_argument("--coeff-out", default=None, help="coefficient file (pse; default <out>_coefficients.csv)")

    e = sub.add_parser("error", help="error estimate at a phase-space point")
    e.add_argument("--mode", choices=("direct", "mc", "bootstrap"), default="direct")
    e.add_argument("--data", default=None, help="dataset (direct, bootstrap)")
    e.add_argument("--state", default=None, help="state spec (mc, or direct without --data)")
    e.add_argument("--J", type=_count, default=10_000)
    e.add_argument("--K", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--scheme", type=_scheme, default="uniform_full_circle")
    e.add_argument("--point", type=_point, default=(0.0, 0.0))
    _algo_options(e)
    e.add_argument("--out", default=None)

    d = sub.add_parser("distance", help="mean distance to a target versus J")
    d.add_argument("--state", required=True)
    _algo_options(d, multi=True)
    d.add_argument("--J", type=_count_list, default=[5000, 20000, 80000], help="comma-separated sample sizes")
    d.add_argument("--K", "--replicas", dest="K", type=int, default=100)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--scheme", type=_scheme, default="uniform_full_circle")
    d.add_argument("--R", type=float, default=DEFAULT_DISTANCE_R)
    d.add_argument("--h", type=float, default=STUDY_GRID_H)
    d.add_argument("--n-max", type=int, default=STUDY_N_MAX)
    d.add_argument("--out", required=True)

    sub.add_parser("identity-check", help="run the special-function identity suite")
    return parser


def _settings(args, name):
    try:
        if name == "fbp":
            return FbpConfig(args.kc)
        if name == "pse":
            return PseConfig(N=args.N, M=args.M, L=args.L)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    raise UsageError(f"unknown algorithm {name!r}; use pse or fbp")


def _state(text):
    try:
        return StateSpec.parse(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse state spec {text!r}: {exc}") from None


def _run_meta(args):
    keys = sorted(k for k in vars(args) if k not in ("verbose",))
    out = {}
    for k in keys:
        v = getattr(args, k)
        out[k] = list(v) if isinstance(v, tuple) else v
    return {"command": out}


def cmd_generate(args):
    spec = _state(args.state)
    data = sample_dataset(make_state(spec), args.J, scheme=args.scheme, seed=args.seed)
    write_dataset(args.out, data, state_spec=spec.to_string())
    print(f"wrote {data.J} samples to {args.out}")


def cmd_reconstruct(args):
    settings = _settings(args, args.algo)
    try:
        grid = GridSpec.parse(args.grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = read_dataset(args.data, theta_scheme=args.scheme)
    meta = {**_run_meta(args), "algorithm": settings_label(settings), "dataset": str(args.data), "J": data.J}
    if isinstance(settings, FbpConfig):
        result = fbp_grid(data, settings, grid)
    else:
        table = estimate_coefficients(data, settings)
        result = pse_grid(table, grid)
        coeff_out = args.coeff_out or str(Path(args.out).with_suffix("")) + "_coefficients.csv"
        write_coefficients(coeff_out, table, meta)
        print(f"wrote coefficients (L={table.L:.6g}, excluded={table.excluded}) to {coeff_out}")
    write_grid(args.out, result, meta)
    node = result.node(0.0, 0.0)
    if node is not None:
        print(f"W(0,0) = {result.w[node]:.6g} +- {result.sigma[node]:.3g}")
    print(f"wrote {grid.size} nodes to {args.out}")


def _error_dataset(args):
    if args.data is not None:
        return read_dataset(args.data)
    if args.state is None:
        raise UsageError("--data or --state is required")
    return sample_dataset(make_state(_state(args.state)), args.J, scheme=args.scheme, seed=args.seed)


def cmd_error(args):
    settings = _settings(args, args.algo)
    q, p = args.point
    label = settings_label(settings)
    nan = float("nan")
    if args.mode in ("mc", "bootstrap") and args.K < 2:
        raise UsageError("--K must be at least 2 for replica studies")
    if args.mode == "direct":
        data = _error_dataset(args)
        est = reconstruct_point(data, settings, q, p)
        row = ("direct", label, q, p, data.J, 1, est.value, est.sigma, nan, nan, nan)
    else:
        if args.mode == "mc":
            if args.state is None:
                raise UsageError("--state is required for mode mc")
            res = mc_study(make_state(_state(args.state)), args.J, args.K, settings, (q, p), args.seed, args.scheme)
        else:
            if args.data is None and args.state is None:
                raise UsageError("--data or --state is required for mode bootstrap")
            res = bootstrap_study(_error_dataset(args), args.K, settings, (q, p), args.seed)
        row = (args.mode, label, q, p, res.J, res.K, nan, nan, res.mean_value, res.mc_sigma, res.mean_reported_sigma)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(ERROR_HEADER)
    out.writerow([v if isinstance(v, str) else f"{v:.10g}" for v in row])
    if args.out:
        write_table(args.out, ERROR_HEADER, [row], {"kind": "error_report", **_run_meta(args)})


def cmd_distance(args):
    names = [a.strip() for a in args.algo.split(",") if a.strip()]
    settings = [_settings(args, n) for n in names]
    if args.K < 2:
        raise UsageError("--K must be at least 2")
    if sorted(set(args.J)) != list(args.J):
        raise UsageError("--J must be strictly increasing")
    try:
        GridSpec.square(args.R, args.h)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    curves = distance_study(
        _state(args.state), settings, args.J, args.K, args.seed, args.R, args.h, args.n_max, args.scheme
    )
    write_distance_curves(args.out, curves, _run_meta(args))
    for c in curves:
        for row in c.rows:
            print(f"{c.label} J={row.J} d_L2={row.mean_d_L2:.5g}+-{row.se_d_L2:.2g} d_F={row.mean_d_F:.5g}+-{row.se_d_F:.2g}")


def cmd_identity_check(args):
    results = run_identity_suite()
    for r in results:
        print(r.summary())
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


COMMANDS = {
    "generate": cmd_generate,
    "reconstruct": cmd_reconstruct,
    "error": cmd_error,
    "distance": cmd_distance,
    "identity-check": cmd_identity_check,
}


_NEGATIVE_OK = ("--grid", "--point", "--L", "--kc", "--seed")


def _join_negative_values(argv):
    """Turn ``--grid -4:4:81`` into ``--grid=-4:4:81`` so argparse does not
    mistake a leading minus for an option."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _NEGATIVE_OK and i + 1 < len(argv) and argv[i + 1].startswith("-") and len(argv[i + 1]) > 1:
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None):
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"wigtomo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, OSError) as exc:
        print(f"wigtomo: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"wigtomo: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
