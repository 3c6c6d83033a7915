"""Command line interface: gen, solve, verify, bench.

Exit codes: 0 success (for `solve`, a certified optimal solution; for
`verify`, an accepted certificate), 2 iteration limit or rejected
certificate, 1 usage or I/O errors.  The MINBALL_TOL environment
variable overrides the default activity/feasibility tolerance.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .geometry import DEFAULT_TOL, Tolerances
from .harness import (
    SCHEMA_VERSION,
    generate_instance,
    instance_from_dict,
    load_instance,
    run_bench,
    save_instance,
    solve_instance,
)


def _tolerances(args):
    env = os.environ.get("MINBALL_TOL")
    tol = float(env) if env else None
    if getattr(args, "tol", None) is not None:
        tol = args.tol
    if tol is None:
        return DEFAULT_TOL
    return dataclasses.replace(DEFAULT_TOL, activity=tol)


def cmd_gen(args):
    inst, meta = generate_instance(args.dim, args.m, args.seed,
                                   radius_max=args.radius_max, name=args.name)
    if args.output:
        save_instance(args.output, inst, meta)
    else:
        from .harness import instance_to_dict

        json.dump(instance_to_dict(inst, meta), sys.stdout, indent=1)
        sys.stdout.write("\n")
    return 0


def cmd_solve(args):
    inst, _ = load_instance(args.instance)
    tol = _tolerances(args)
    records = []
    algos = ["primal", "dual"] if args.algorithm == "both" else [args.algorithm]
    for algo in algos:
        records.append(solve_instance(inst, algorithm=algo, tol=tol,
                                      max_iter=args.max_iter))
    doc = records[0] if len(records) == 1 else {
        "schema_version": SCHEMA_VERSION, "results": records}
    out = json.dumps(doc, indent=1)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return 0 if all(r["status"] == "optimal" for r in records) else 2


def cmd_verify(args):
    from .oracle import validate

    inst, _ = load_instance(args.instance)
    with open(args.result) as fh:
        doc = json.load(fh)
    recs = doc.get("results", [doc])
    tol = _tolerances(args)
    certs = []
    ok = True
    for rec in recs:
        cert = validate(inst, np.array(rec["center"], dtype=float),
                        float(rec["radius"]),
                        support=rec.get("support"), tol=tol)
        certs.append(cert.to_dict())
        ok = ok and cert.ok
    out = certs[0] if len(certs) == 1 else {"certificates": certs}
    print(json.dumps(out, indent=1))
    return 0 if ok else 2


def cmd_bench(args):
    with open(args.suite) as fh:
        suite = json.load(fh)
    algos = ("primal", "dual") if args.algorithm == "both" else (args.algorithm,)
    lines = run_bench(suite, algorithms=algos)
    if args.output:
        with open(args.output, "w") as fh:
            for line in lines:
                fh.write(line + "\n")
    else:
        for line in lines:
            print(line)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="minball",
                                description="minimum covering ball of balls")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance file")
    g.add_argument("--dim", "-n", type=int, required=True)
    g.add_argument("--m", "-m", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--radius-max", type=float, default=0.5)
    g.add_argument("--name", default=None)
    g.add_argument("--output", "-o", default=None)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--algorithm", "-a", choices=["primal", "dual", "both"],
                   default="dual")
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--max-iter", type=int, default=None)
    s.add_argument("--output", "-o", default=None)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="verify a solve result against an instance")
    v.add_argument("instance")
    v.add_argument("result")
    v.add_argument("--tol", type=float, default=None)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run a benchmark suite, emit CSV")
    b.add_argument("suite", help="JSON list of {dim, m, seeds} entries")
    b.add_argument("--algorithm", "-a", choices=["primal", "dual", "both"],
                   default="both")
    b.add_argument("--output", "-o", default=None)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
