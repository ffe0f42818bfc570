"""Command line front end.

Exit codes: 0 when every requested check passes, 1 when a check fails
(the first failing check is named on stderr), 2 for bad input.
"""
import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io
from .asymptotics import power_sweep
from .blaschke import FiniteBlaschke, clark_measure, from_clark_measure
from .errors import ClarkError
from .measure import AtomicMeasure, from_turns
from .operators.basic import matrix_from_json
from .scenarios import (
    KINDS,
    SUITES,
    Instance,
    example_clark_weight,
    example_crofoot,
    instance_from_entry,
    random_instance,
    verify_instance,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ClarkError(message)


def _complex_list(text):
    """'1,2' -> reals; '[[1,0],[0,1]]' -> complex pairs; JSON reals also accepted."""
    import json

    try:
        val = json.loads(text if text.lstrip().startswith("[") else f"[{text}]")
    except json.JSONDecodeError as e:
        raise ClarkError(f"cannot parse list {text!r}") from e
    return np.array([complex(*v) if isinstance(v, list) else complex(v) for v in val])


def build_parser():
    p = _Parser(prog="clarklab", description="Clark measures, model spaces and intertwined operators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("clark", help="Clark measure of a Blaschke product")
    s.add_argument("--theta", required=True, help="Blaschke product JSON")
    s.add_argument("--c", type=float, default=0.0, help="argument of c in turns (0 gives c = 1)")
    s.add_argument("--out")

    s = sub.add_parser("from-measure", help="Blaschke product of a Clark measure")
    s.add_argument("--mu", required=True, help="atomic measure JSON")
    s.add_argument("--out")

    s = sub.add_parser("example", help="worked constructions")
    s.add_argument("name", choices=["crofoot", "clark-weight"])
    s.add_argument("--theta", help="Blaschke product JSON (default z^degree)")
    s.add_argument("--degree", type=int, default=3)
    s.add_argument("--lambda", dest="lam", type=float, nargs=2, default=[0.5, 0.0], metavar=("RE", "IM"))
    s.add_argument("--c", type=float, default=None, help="argument of c in turns")
    s.add_argument("--phi", help="weights at the sigma_c atoms: '1,1.5' or '[[re,im],...]'")
    s.add_argument("--out")

    s = sub.add_parser("verify", help="run a check suite on an instance or a manifest")
    s.add_argument("--instance", help="instance JSON (default: the built-in manifest)")
    s.add_argument("--manifest", help="manifest JSON listing instances")
    s.add_argument("--suite", choices=SUITES, default="all")
    s.add_argument("--n-sweep", type=int, default=2000)
    s.add_argument("--quad", type=int, default=None, help="starting quadrature size (default auto)")
    s.add_argument("--seed", type=int, default=0, help="seed of the randomized spot checks")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out")

    s = sub.add_parser("sweep", help="norms of powers of an operator")
    s.add_argument("--operator", required=True, help="operator or instance JSON")
    s.add_argument("--n", type=int, default=2000)
    s.add_argument("--csv", help="write (n, ||T^n||, ||T^-n||) rows here")
    s.add_argument("--out")

    s = sub.add_parser("random", help="seeded random instance")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--kind", choices=KINDS, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")
    return p


def _theta(args):
    if args.theta:
        return FiniteBlaschke.from_json(io.load_json(args.theta))
    return FiniteBlaschke(np.zeros(args.degree))


def _verify_one(job):
    entry, obj, suite, n_sweep, quad, seed = job
    inst = Instance.from_json(obj) if obj is not None else instance_from_entry(entry)
    return verify_instance(inst, suite, n_sweep, quad, seed)


def _verify(args):
    if args.instance:
        jobs = [(None, io.load_json(args.instance))]
    else:
        man = io.load_json(args.manifest) if args.manifest else io.default_manifest()
        jobs = [(e, None) for e in man["instances"]]
    jobs = [j + (args.suite, args.n_sweep, args.quad, args.seed) for j in jobs]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            reports = list(ex.map(_verify_one, jobs))     # results in submission order
    else:
        reports = [_verify_one(j) for j in jobs]
    failed = [(i, r["first_failure"]) for i, r in enumerate(reports) if not r["passed"]]
    out = {"suite": args.suite, "reports": reports, "passed": not failed}
    for i, r in enumerate(reports):
        n_ok = sum(c["pass"] for c in r["checks"])
        print(f"[{i}] {r['provenance']}: {n_ok}/{len(r['checks'])} checks pass", file=sys.stderr)
    return out, failed


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command == "clark":
            theta = FiniteBlaschke.from_json(io.load_json(args.theta))
            io.write_json(clark_measure(theta, from_turns(args.c)).to_json(), args.out, sys.stdout)
        elif args.command == "from-measure":
            mu = AtomicMeasure.from_json(io.load_json(args.mu))
            io.write_json(from_clark_measure(mu).to_json(), args.out, sys.stdout)
        elif args.command == "example":
            theta = _theta(args)
            if args.name == "crofoot":
                c = from_turns(args.c if args.c is not None else 0.0)
                inst = example_crofoot(theta, complex(*args.lam), c)
            else:
                c = from_turns(args.c if args.c is not None else 0.5)
                phi = _complex_list(args.phi) if args.phi else np.ones(theta.degree)
                inst = example_clark_weight(theta, c, phi)
            io.write_json(inst.to_json(), args.out, sys.stdout)
        elif args.command == "random":
            inst = random_instance(args.degree, args.kind, args.seed)
            io.write_json(inst.to_json(), args.out, sys.stdout)
        elif args.command == "sweep":
            obj = io.load_json(args.operator)
            if "rows" in obj:
                T = matrix_from_json(obj)
            elif "T" in obj and "dim" in obj:
                T = Instance.from_json(obj).T.matrix
            else:
                raise ClarkError("operator JSON needs 'rows/cols/matrix' or an instance")
            rep = power_sweep(T, args.n)
            if args.csv:
                with open(args.csv, "w", encoding="utf-8") as fh:
                    fh.write(rep.to_csv())
            io.write_json(rep.to_json(), args.out, sys.stdout)
        elif args.command == "verify":
            out, failed = _verify(args)
            io.write_json(out, args.out, sys.stdout)
            if failed:
                i, name = failed[0]
                print(f"FAIL: instance {i}: {name}", file=sys.stderr)
                return 1
    except (ClarkError, KeyError, TypeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())
