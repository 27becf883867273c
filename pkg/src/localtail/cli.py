"""Command-line entry point ``localtail``.

Exit codes: 0 success, 1 a checked inequality or identity failed,
2 the capacity guard tripped, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds
from .exceptions import ArgumentError, CapacityError, UndefinedBoundError
from .experiments import KINDS, ExperimentConfig, run_experiment
from .functions.weights import (
    DISTRIBUTIONS,
    RandomWeightInstance,
    instance_cost,
    random_instance,
    truncate_discretize,
)
from .io import atomic_write, read_qcube
from .verify import SUITES

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CAPACITY = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(text, output):
    if output:
        atomic_write(output, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- verify ---------------------------------------------------------------------


def cmd_verify(args):
    if args.seed is None and args.input is None:
        raise UsageError("verify needs --seed (or --input for the fourier suite)")
    seed = args.seed if args.seed is not None else 0
    if args.input is not None:
        if args.suite != "fourier":
            raise UsageError("--input is only accepted by the fourier suite")
        report = SUITES["fourier"](seed, table=read_qcube(args.input))
    elif args.suite == "variance-bounds":
        report = SUITES["variance-bounds"](seed, r=args.r)
    else:
        report = SUITES[args.suite](seed)
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.passed else EXIT_VIOLATION


# -- experiment -------------------------------------------------------------------


def _config_from_args(args):
    return ExperimentConfig(
        kind=args.kind,
        seed=args.seed,
        samples=args.samples,
        m=args.m,
        n=args.n,
        dist=args.dist,
        c=args.c,
        adaptive_c=args.adaptive_c,
        r=args.r,
        K=args.K,
        beta=args.beta,
        family=args.family,
        theorem=args.theorem,
        profile_samples=args.profile_samples,
        workers=args.workers,
    )


def _render(report, fmt):
    return report.to_json() if fmt == "json" else report.to_csv()


def cmd_experiment(args):
    report = run_experiment(_config_from_args(args))
    fmt = args.format or ("csv" if args.output and str(args.output).endswith(".csv") else "json")
    _emit(_render(report, fmt), args.output)
    if args.output and fmt == "csv":
        # CSV has no room for metadata; keep it next to the table
        meta = Path(str(args.output) + ".meta.json")
        atomic_write(meta, json.dumps(report.metadata, indent=2, sort_keys=True))
    return EXIT_VIOLATION if report.violations else EXIT_OK


def cmd_replay(args):
    original = Path(args.report).read_text(encoding="utf-8")
    doc = json.loads(original)
    params = doc.get("metadata", {}).get("params")
    if params is None:
        raise UsageError("report has no embedded params; replay needs a JSON experiment report")
    cfg = ExperimentConfig.from_dict(params, workers=args.workers)
    text = run_experiment(cfg).to_json()
    if args.output:
        atomic_write(args.output, text)
    identical = text == original or text + "\n" == original
    sys.stdout.write(json.dumps({"identical": identical, "kind": cfg.kind, "seed": cfg.seed}) + "\n")
    return EXIT_OK if identical else EXIT_VIOLATION


# -- bound ----------------------------------------------------------------------------

_FORMULAS = {
    "thm21": "sqrt((72/5) v p_window / (p_tail_b log(e^2 / (2 p_window))))",
    "thm22": "sqrt((72/5) v gamma / (delta log(e^2 / (2 gamma))))",
    "adjacent": "4 sqrt(v / k)",
    "adjacent-tight": "(12/sqrt 5) sqrt(v / ((k-1) log 2 + 2))",
    "thm23": "B + sqrt((72/5) v gamma / (delta log(e^2 / (2 gamma))))",
    "thm31": "sqrt((72/5) phi(q_upper + B) gamma / (delta log(e^2 / (2 gamma))))",
    "thm31-adjacent": "4 sqrt(phi(a_next + B) / k)",
    "cor41": "B + 14 sqrt(log((9/2) r^3)) sqrt(v / k)",
    "local-mass": "(5/288)(k - Ef)^2 / v^2 + (5 / (72 v)) log(e^2 / 2)",
    "monotone-threshold": "Ef + 5 sqrt(5) v",
    "mst-failure": "min(1, 4 m^(-c/4))",
    "subgaussian-tail": "exp(-t^2 / (4 v))",
}


def _phi(text):
    if text is None or text == "identity":
        return bounds.PhiSpec.identity()
    kind, _, rest = text.partition(":")
    try:
        nums = [float(x) for x in rest.split(",")] if rest else []
    except ValueError:
        raise UsageError(f"bad --phi {text!r}") from None
    if kind == "affine" and len(nums) == 2:
        return bounds.PhiSpec.affine(*nums)
    if kind == "power" and len(nums) == 2:
        return bounds.PhiSpec.power(*nums)
    raise UsageError(f"bad --phi {text!r}; use identity, affine:a,b or power:c,alpha")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"bound {args.theorem} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))
    return [getattr(args, n) for n in names]


def cmd_bound(args):
    tag = args.theorem
    B = args.B if args.B is not None else 0.0
    if tag == "thm21":
        value = bounds.gap_bound_thm21(*_need(args, "p_window", "p_tail_b", "v")).value
    elif tag == "thm22":
        value = bounds.gap_bound_thm22(*_need(args, "gamma", "delta", "v")).value
    elif tag == "adjacent":
        v, k = _need(args, "v", "k")
        value = bounds.gap_bound_adjacent(v, k, args.form).value
        if args.form == "tight":
            tag = "adjacent-tight"
    elif tag == "thm23":
        value = bounds.gap_bound_thm23(*_need(args, "gamma", "delta", "v"), B).value
    elif tag == "thm31":
        gamma, delta, q = _need(args, "gamma", "delta", "q_upper")
        value = bounds.gap_bound_thm31(gamma, delta, _phi(args.phi), q, B).value
    elif tag == "thm31-adjacent":
        a_next, k = _need(args, "a_next", "k")
        value = bounds.gap_bound_thm31_adjacent(_phi(args.phi), a_next, B, k).value
    elif tag == "cor41":
        v, k, r = _need(args, "v", "k", "r")
        value = bounds.gap_bound_cor41(v, B, k, r).value
    elif tag == "local-mass":
        value = bounds.local_mass_lower_bound(*_need(args, "k", "mean", "v"))
    elif tag == "monotone-threshold":
        value = bounds.monotone_tail_threshold(*_need(args, "mean", "v"))
    elif tag == "mst-failure":
        value = bounds.mst_truncation_failure_bound(*_need(args, "m", "c"))
    else:
        value = bounds.subgaussian_tail(*_need(args, "v", "t"))
    sys.stdout.write(f"{value!r}\n{tag}: {_FORMULAS[tag]}\n")
    return EXIT_OK


# -- instance ---------------------------------------------------------------------------


def cmd_instance(args):
    if args.action == "generate":
        if args.seed is None:
            raise UsageError("instance generate needs --seed")
        if args.m is None:
            raise UsageError("instance generate needs --m")
        inst = random_instance(args.kind, args.m, args.dist, seed=args.seed)
        if args.delta is not None or args.r is not None:
            if args.delta is None or args.r is None:
                raise UsageError("truncation needs both --delta and --r")
            inst = truncate_discretize(inst, args.delta, args.r)
        _emit(inst.to_json(), args.output)
        return EXIT_OK
    if args.file is None:
        raise UsageError("instance solve needs an instance file")
    inst = RandomWeightInstance.from_json(Path(args.file).read_text(encoding="utf-8"))
    sys.stdout.write(json.dumps({"kind": inst.kind, "m": inst.m, "cost": instance_cost(inst)}) + "\n")
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="localtail", description="Local tail bounds: verification suites, experiments, calculators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--seed", type=int)
    p.add_argument("--r", type=int, default=2, help="alphabet size for variance-bounds")
    p.add_argument("--input", help="QCUBE table (fourier suite only)")
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run a Monte Carlo or exact gap experiment")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform01")
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--adaptive-c", action="store_true")
    p.add_argument("--r", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--beta", type=float, default=1e-3)
    p.add_argument("--family", default="random20")
    p.add_argument("--theorem", choices=("thm22", "adjacent", "thm23", "thm31", "cor41"))
    p.add_argument("--profile-samples", type=int, default=8)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("replay", help="rerun a JSON report from its embedded parameters")
    p.add_argument("report")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bound", help="evaluate one bound")
    p.add_argument("theorem", choices=sorted(set(_FORMULAS) - {"adjacent-tight"}))
    for name in ("gamma", "delta", "v", "B", "q_upper", "a_next", "p_window", "p_tail_b", "mean", "c", "t", "k"):
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--form", choices=("simple", "tight"), default="simple")
    p.add_argument("--phi")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("instance", help="generate or solve a random-weight instance")
    p.add_argument("action", choices=("generate", "solve"))
    p.add_argument("file", nargs="?")
    p.add_argument("--kind", choices=("mst", "assignment"), default="mst")
    p.add_argument("--m", type=int)
    p.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform01")
    p.add_argument("--seed", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_instance)
    return parser


def _integral_k(args):
    # k is parsed as float so local-mass can take real k; integer-only bounds get an int
    if getattr(args, "k", None) is not None and args.theorem != "local-mass":
        if args.k != int(args.k):
            raise UsageError(f"--k must be an integer for {args.theorem}")
        args.k = int(args.k)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "bound":
            _integral_k(args)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except CapacityError as exc:
        sys.stderr.write(f"capacity: {exc}\n")
        return EXIT_CAPACITY
    except UndefinedBoundError as exc:
        sys.stderr.write(f"undefined: {exc}\n")
        return EXIT_USAGE
    except ArgumentError as exc:
        sys.stderr.write(f"argument error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
