"""Command-line harness: case studies, the property suite and closure-space files."""

from __future__ import annotations

import argparse
import sys

from . import closure_core as cc
from .cases import CASE_STUDIES, UnknownCaseError, run_case_study, run_property_suite
from .report import Report, RunConfig, render

FAULTS = ("tie-ignores-y",)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=RunConfig.seed)
    common.add_argument("--mode", choices=("exact", "float"), default=RunConfig.mode)
    common.add_argument("--tol", type=float, default=RunConfig.tol)
    common.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--timing", action="store_true", help="include per-claim elapsed seconds")
    common.add_argument("--algebra", default=RunConfig.algebra, help="block sizes such as 2+3")
    common.add_argument("--inject-fault", choices=FAULTS, default=None)
    for name in ("tie-pairs", "complex-pairs", "lift-pairs", "reconstruction-cases",
                 "sublemma-cases", "like-tensor-cases", "sample-points"):
        dest = name.replace("-", "_")
        common.add_argument(f"--{name}", type=int, default=getattr(RunConfig, dest), dest=dest)

    parser = argparse.ArgumentParser(prog="gsspace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    case = sub.add_parser("case", parents=[common], help="run one case study")
    case.add_argument("name", help="one of: " + ", ".join(CASE_STUDIES))
    sub.add_parser("suite", parents=[common], help="run the property suite")
    space = sub.add_parser("space", parents=[common], help="inspect a closure-space JSON file")
    space.add_argument("action", choices=("check", "transform"))
    space.add_argument("file")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        seed=args.seed, mode=args.mode, tol=args.tol, algebra=args.algebra,
        tie_pairs=args.tie_pairs, complex_pairs=args.complex_pairs, lift_pairs=args.lift_pairs,
        reconstruction_cases=args.reconstruction_cases, sublemma_cases=args.sublemma_cases,
        like_tensor_cases=args.like_tensor_cases, sample_points=args.sample_points,
        inject_fault=args.inject_fault,
    )


def space_report(action: str, text: str, config: RunConfig, source: str = "") -> tuple:
    """Report on a closure space; for ``transform`` also return the two transforms as JSON."""
    report = Report(f"space {action} {source}".strip(), config)
    holder = {}

    def load():
        holder["s"] = cc.space_from_json(text)
        return True, float("inf"), f"points={holder['s'].size} closed={len(holder['s'].closed_masks)}"

    if not report.check("space.valid", "closed family is intersection-closed with empty and full sets", load):
        return report, ""
    space = holder["s"]
    t0, t1 = cc.separation_flags(space)
    report.check("space.topologizable", "closed family union-closed",
                  lambda: (True, float("inf"), str(cc.is_topologizable(space)).lower()))
    report.check("space.separation", "T0 and T1 flags",
                  lambda: (True, float("inf"), f"t0={str(t0).lower()} t1={str(t1).lower()}"))
    _, classes = cc.equivalence_structure(space)
    report.check("space.classes", "transitive closure of the tie relation",
                 lambda: (True, float("inf"), " ".join("{" + ",".join(map(str, c)) + "}" for c in classes)))
    if action == "check":
        return report, ""
    from .cases import transform_identity_holds

    t = cc.transforms(space)
    report.check("space.transform-identity", "class closure is the pullback of closure-of-class closure",
                 lambda: transform_identity_holds(space))
    report.check("space.transform-t0", "closure-of-class space is T0", lambda: cc.separation_flags(t.p_space)[0])
    extra = "class-space\n" + cc.space_to_json(t.g_space) + "closure-space\n" + cc.space_to_json(t.p_space)
    return report, extra


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        config = _config(args)
    except ValueError as exc:
        parser.error(str(exc))
    extra = ""
    if args.command == "case":
        try:
            report = run_case_study(args.name, config)
        except UnknownCaseError:
            parser.print_usage(sys.stderr)
            print(f"gsspace: unknown case study {args.name!r}; choose from {', '.join(CASE_STUDIES)}",
                  file=sys.stderr)
            return 2
    elif args.command == "suite":
        report = run_property_suite(config)
    else:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"gsspace: {exc}", file=sys.stderr)
            return 2
        report, extra = space_report(args.action, text, config, args.file)
    out = render(report, args.format, timing=args.timing)
    if extra and args.format == "text":
        out += extra
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
