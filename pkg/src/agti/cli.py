"""Command-line entry point: ``agti {tally,solve,triplets,binarize,simulate,evaluate}``.

Exit status:
  0  clean result
  2  usage error (argparse)
  3  I/O error
  4  parse / malformed input error
  5  degenerate ensemble (an uncorrelated classifier pair)
  6  independence-violation alarm (covariance sign pattern)
  7  unphysical or above-tolerance roots only
  8  ambiguous root selection
  9  insufficient ensemble (fewer than 3 classifiers)
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .ensemble import binarize_ids, triplet_sweep, unique_count_estimate
from .errors import (
    AmbiguousSelectionError,
    DegenerateEnsembleError,
    IndependenceViolationError,
    InsufficientEnsembleError,
    MalformedInputError,
    UndefinedScoreError,
)
from .files import read_decisions, read_ids, write_decisions
from .sketch import PatternSketch, frequencies, pattern_name, patterns, tally
from .solver import SolveTolerances, parse_policy
from .synth import GeneratorSpec, evaluate, generate, solve_and_select

EXIT_OK = 0
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_DEGENERATE = 5
EXIT_INDEPENDENCE = 6
EXIT_UNPHYSICAL = 7
EXIT_AMBIGUOUS = 8
EXIT_INSUFFICIENT = 9

_ALARM_EXIT = {
    "degenerate": EXIT_DEGENERATE,
    "independence_violation": EXIT_INDEPENDENCE,
    "unphysical": EXIT_UNPHYSICAL,
    "residual": EXIT_UNPHYSICAL,
    "ambiguous_selection": EXIT_AMBIGUOUS,
}


def alarm_exit_code(alarms) -> int:
    codes = [_ALARM_EXIT.get(a.split(":", 1)[0], EXIT_UNPHYSICAL) for a in alarms]
    return min(codes) if codes else EXIT_OK


def _labels(text: str) -> tuple[str, str]:
    parts = text.split(",")
    if len(parts) != 2 or not all(parts) or parts[0] == parts[1]:
        raise argparse.ArgumentTypeError("--labels takes two distinct tokens, e.g. 'yes,no'")
    return parts[0], parts[1]


def _policy(text: str):
    try:
        return parse_policy(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _tolerances(args, total: Optional[int]) -> SolveTolerances:
    base = SolveTolerances.for_sample(total) if total else SolveTolerances()
    over = {k: v for k, v in (("residual", args.tol_residual), ("degenerate", args.tol_degenerate),
                              ("phys", args.tol_phys)) if v is not None}
    return SolveTolerances(**{**base.__dict__, **over})


def _emit(doc: dict, out: Optional[str], human: Optional[str] = None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
        if human:
            print(human)
    else:
        sys.stdout.write(text)


def solve_report(sketch: PatternSketch, policy, tol: SolveTolerances) -> dict:
    """Structured solve report for a three-classifier sketch."""
    if sketch.n != 3:
        raise MalformedInputError(f"solve needs a 3-classifier sketch, got n={sketch.n}")
    f = frequencies(sketch)
    pair, chosen, alarms = solve_and_select(f, policy, tol)
    selected = None
    if chosen is not None:
        selected = "a" if chosen is pair.root_a else "b"
    return {
        "total": sketch.total,
        "frequencies": {pattern_name(p): float(x) for p, x in zip(patterns(3), f)},
        "moments": None if pair is None else pair.moments.to_dict(),
        "r": None if pair is None else pair.r,
        "roots": None if pair is None else {"a": pair.root_a.to_dict(), "b": pair.root_b.to_dict()},
        "policy": policy.describe(),
        "selected": selected,
        "tolerances": tol.__dict__,
        "alarms": alarms,
    }


def _solve_table(doc: dict) -> str:
    lines = [f"{'root':<6}{'prevalence':>12}" + "".join(f"{'C%d a/b' % (i + 1):>18}" for i in range(3))
             + f"{'residual':>12}  flags"]
    for name, r in (doc["roots"] or {}).items():
        accs = "".join(f"{a:>9.4f}{b:>9.4f}" for a, b in zip(r["acc_alpha"], r["acc_beta"]))
        flags = []
        if not r["physical"]:
            flags.append("unphysical")
        if r["clamped"]:
            flags.append("clamped")
        if name == doc["selected"]:
            flags.append("selected")
        lines.append(f"{name:<6}{r['prevalence']:>12.6f}{accs}{r['residual']:>12.2e}  {','.join(flags)}")
    lines += [f"alarm: {a}" for a in doc["alarms"]]
    return "\n".join(lines)


def cmd_tally(args) -> int:
    stream = read_decisions(args.decisions, args.labels)
    _emit(tally(stream).to_dict(), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    sketch = PatternSketch.loads(Path(args.sketch).read_text())
    doc = solve_report(sketch, args.policy, _tolerances(args, sketch.total))
    _emit(doc, args.out, _solve_table(doc))
    return alarm_exit_code(doc["alarms"])


def cmd_triplets(args) -> int:
    if args.binarize:
        stream = binarize_ids(read_ids(args.input))
    else:
        stream = read_decisions(args.input, args.labels)
    sketch = tally(stream)
    report = triplet_sweep(sketch, args.policy, _tolerances(args, sketch.total))
    doc = report.to_dict()
    try:
        doc["unique_count_estimate"] = unique_count_estimate(report, sketch.total)
    except UndefinedScoreError:
        doc["unique_count_estimate"] = None
    human = report.table()
    if doc["consistency_score"] is not None:
        human += f"\nconsistency score: {doc['consistency_score']:.6f}"
    _emit(doc, args.out, human)
    return alarm_exit_code([a for t in report.triplets for a in t.alarms])


def cmd_binarize(args) -> int:
    stream = binarize_ids(read_ids(args.ids))
    if args.out:
        write_decisions(stream, args.out, args.labels)
    else:
        sys.stdout.write(",".join(f"c{i + 1}" for i in range(stream.n)) + "\n")
        for row in stream.decisions:
            sys.stdout.write(",".join(args.labels[c] for c in row) + "\n")
    return EXIT_OK


def _load_spec(args) -> GeneratorSpec:
    spec = GeneratorSpec.loads(Path(args.spec).read_text())
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    return spec


def cmd_simulate(args) -> int:
    spec = _load_spec(args)
    stream = generate(spec)
    if not args.out:
        raise MalformedInputError("simulate needs --out")
    write_decisions(stream, args.out, args.labels)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    spec = _load_spec(args)
    total = None if args.exact else spec.sample_size
    tol = _tolerances(args, total)
    report = evaluate(spec, args.policy, tol, exact=args.exact)
    doc = report.to_dict()
    doc["spec"] = spec.to_dict()
    _emit(doc, args.out, report.table())
    return alarm_exit_code(report.alarms)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--labels", type=_labels, default=("alpha", "beta"),
                        help="tokens for the two labels, alpha first (default: alpha,beta)")
    common.add_argument("--out", help="output path (default: stdout)")

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--policy", type=_policy, default=parse_policy("majority"),
                         help="root selection: majority | prior=<p> | manual=<a|b>")
    solving.add_argument("--tol-residual", type=float)
    solving.add_argument("--tol-degenerate", type=float)
    solving.add_argument("--tol-phys", type=float)

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, help="override the spec's seed")

    parser = argparse.ArgumentParser(prog="agti", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tally", parents=[common], help="decisions file -> sketch")
    p.add_argument("decisions")
    p.set_defaults(func=cmd_tally)

    p = sub.add_parser("solve", parents=[common, solving], help="3-classifier sketch -> solve report")
    p.add_argument("sketch")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("triplets", parents=[common, solving], help="n>=3 decisions -> triplet report")
    p.add_argument("input")
    p.add_argument("--binarize", action="store_true", help="input is an ID file; map to new/old first")
    p.set_defaults(func=cmd_triplets)

    p = sub.add_parser("binarize", parents=[common], help="ID file -> new/old decisions file")
    p.add_argument("ids")
    p.set_defaults(func=cmd_binarize)

    p = sub.add_parser("simulate", parents=[common, seeded], help="generator spec -> labeled decisions file")
    p.add_argument("spec")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", parents=[common, solving, seeded], help="generator spec -> eval report")
    p.add_argument("spec")
    p.add_argument("--exact", action="store_true", help="solve forward-model frequencies instead of a sample")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"agti: {exc}", file=sys.stderr)
        return EXIT_IO
    except InsufficientEnsembleError as exc:
        print(f"agti: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except DegenerateEnsembleError as exc:
        print(f"agti: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except IndependenceViolationError as exc:
        print(f"agti: {exc}", file=sys.stderr)
        return EXIT_INDEPENDENCE
    except AmbiguousSelectionError as exc:
        print(f"agti: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (MalformedInputError, ValueError) as exc:
        print(f"agti: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
