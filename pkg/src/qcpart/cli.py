"""Command-line front end: analyze, partition, construct, verify, simulate.

Exit codes: 0 success/pass, 1 usage error, 2 parse/validation error,
3 no solution or verification failure, 4 search budget exhausted.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import partition as pt
from . import peg, simulate
from .decoder import LayeredDecoder
from .qc import MatrixFormatError, ValidationError, expand, factors, load_base_matrix, matrix_max_column_weight

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_NO_SOLUTION = 3
EXIT_BUDGET = 4


def _load(path):
    b = load_base_matrix(path)
    return b, expand(b)


def cmd_analyze(args) -> int:
    b, h = _load(args.matrix)
    omega = matrix_max_column_weight(h)
    print(f"M={b.M} N={b.N} Z={b.Z} omega={omega}")
    print(f"factors(Z)={factors(b.Z)}")
    print("L omega_lb d_ub")
    for L in factors(b.Z):
        print(f"{L} {pt.omega_lower_bound(h, L)} {L // omega}")
    d_ub_max = b.Z // omega
    print("k L_lb")
    k = 1
    while True:
        lb = pt.min_layers_for_distance(h, k)
        if lb is None or k > d_ub_max:
            break
        print(f"{k} {lb}")
        k += 1
    return EXIT_OK


def cmd_partition(args) -> int:
    b, h = _load(args.matrix)
    budget = pt.SearchBudget(time_limit=args.budget_secs)
    if args.distance:
        if args.layers:
            res = pt.solve_with_distance(h, args.layers, args.distance, method=args.method, budget=budget)
            found = res.found
        else:
            out = pt.find_min_layers(h, args.distance, method=args.method, budget=budget)
            found = out is not None
            if found:
                L, res = out
                print(f"min_layers={L}")
        if not found:
            print("no scheme with requested layer distance")
            return EXIT_NO_SOLUTION
        scheme, omega, dist = res.scheme, res.omega, res.distance
        print(f"omega={omega} S={scheme.S} distance={dist} proven_optimal=True")
    else:
        if not args.layers:
            print("error: --layers is required without --distance", file=sys.stderr)
            return EXIT_USAGE
        if args.method == "enum":
            res = pt.solve_enumerative(h, args.layers, budget=budget)
        else:
            res = pt.solve_greedy(h, args.layers)
        if res.scheme is None:
            print("no scheme found within budget")
            return EXIT_BUDGET
        scheme, omega = res.scheme, res.omega
        dist = pt.layer_distance(h, scheme)
        print(f"omega={omega} S={scheme.S} distance={dist} proven_optimal={res.proven_optimal}")
        if args.method == "enum" and not res.swept_all and not res.proven_optimal:
            if args.out:
                pt.save_scheme(args.out, scheme, omega, dist)
            return EXIT_BUDGET
    if args.out:
        pt.save_scheme(args.out, scheme, omega, dist)
    return EXIT_OK


def cmd_construct(args) -> int:
    if args.dims:
        M, N, Z = (int(x) for x in args.dims.split(","))
        degrees = tuple(int(x) for x in args.degrees.split(","))
    else:
        b0, _ = _load(args.matrix)
        M, N, Z = b0.M, b0.N, b0.Z
        degrees = tuple(b0.column_degrees())
    strategy = {1: peg.STRATEGY1, 2: peg.STRATEGY2, 3: peg.STRATEGY3}[args.strategy]
    spec = peg.ConstructionSpec(M, N, Z, args.layers, degrees, strategy=strategy, k=args.distance or 1, seed=args.seed)
    print(f"seed={args.seed}")
    b, _ = peg.construct(spec)
    if strategy == peg.STRATEGY2:
        report = peg.verify_construction(b, args.layers, "omega_lb")
    elif strategy == peg.STRATEGY3:
        report = peg.verify_construction(b, args.layers, "distance", k=spec.k)
    else:
        report = None
    if report is not None:
        print(report.text())
    if report:
        text = peg.serialize_construction(b, spec, report)
    else:
        from .qc import serialize_base_matrix

        text = serialize_base_matrix(b, (f"constructed: strategy=1 seed={args.seed}",))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if report is not None and not report.passed:
        return EXIT_NO_SOLUTION
    return EXIT_OK


def cmd_verify(args) -> int:
    b, _ = _load(args.matrix)
    if args.distance:
        report = peg.verify_construction(b, args.layers, "distance", k=args.distance)
    else:
        report = peg.verify_construction(b, args.layers, "omega_lb")
    print(report.text())
    return EXIT_OK if report.passed else EXIT_NO_SOLUTION


def cmd_simulate(args) -> int:
    b, h = _load(args.matrix)
    scheme = None
    if args.scheme:
        scheme, _, _ = pt.load_scheme(args.scheme, h)
    a, bb, step = (float(x) for x in args.snr.split(":"))
    snrs = tuple(np.round(np.arange(a, bb + step / 2, step), 6))
    cfg = simulate.ChannelConfig(
        snr_db=snrs,
        rate=args.rate if args.rate else simulate.default_rate(h),
        max_iters=args.max_iters,
        min_frame_errors=args.min_frame_errors,
        max_frames=args.max_frames,
        seed=args.seed,
    )
    print(f"seed={args.seed}")
    result = simulate.run_monte_carlo(h, scheme, cfg, workers=args.workers)
    csv = result.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcpart", description="QC-LDPC layer partitioning toolkit")
    sub = p.add_subparsers(dest="cmd", required=True)

    pa = sub.add_parser("analyze", help="bounds and dimensions of a base matrix")
    pa.add_argument("--matrix", required=True)
    pa.set_defaults(fn=cmd_analyze)

    pp = sub.add_parser("partition", help="search a layer partition scheme")
    pp.add_argument("--matrix", required=True)
    pp.add_argument("--layers", type=int, default=0)
    pp.add_argument("--method", choices=("enum", "greedy"), default="greedy")
    pp.add_argument("--distance", type=int, default=0, help="target layer distance k")
    pp.add_argument("--budget-secs", type=float, default=60.0)
    pp.add_argument("--out")
    pp.set_defaults(fn=cmd_partition)

    pc = sub.add_parser("construct", help="build a base matrix by cyclic edge growth")
    src = pc.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="copy dimensions and degrees from this matrix")
    src.add_argument("--dims", help="M,N,Z")
    pc.add_argument("--degrees", help="comma-separated block-column degrees (with --dims)")
    pc.add_argument("--layers", type=int, required=True)
    pc.add_argument("--strategy", type=int, choices=(1, 2, 3), default=1)
    pc.add_argument("--distance", type=int, default=0)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--out")
    pc.set_defaults(fn=cmd_construct)

    pv = sub.add_parser("verify", help="check partition guarantees of a matrix")
    pv.add_argument("--matrix", required=True)
    pv.add_argument("--layers", type=int, required=True)
    pv.add_argument("--distance", type=int, default=0)
    pv.set_defaults(fn=cmd_verify)

    ps = sub.add_parser("simulate", help="Monte-Carlo FER over BPSK/AWGN")
    ps.add_argument("--matrix", required=True)
    ps.add_argument("--scheme", help="scheme file from the partition command")
    ps.add_argument("--snr", required=True, help="a:b:step in dB")
    ps.add_argument("--rate", type=float, default=0.0)
    ps.add_argument("--max-iters", type=int, default=10)
    ps.add_argument("--min-frame-errors", type=int, default=100)
    ps.add_argument("--max-frames", type=int, default=1_000_000)
    ps.add_argument("--workers", type=int, default=1)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out")
    ps.set_defaults(fn=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except (MatrixFormatError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
