#!/usr/bin/env python3
"""
Systolizer - systolic completions of Coxeter complexes

Command-line pipelines that build balls in rank 3 and rank 4 Coxeter
complexes, add the systolizing edges, verify largeness of links on the
interior of the ball, and export the result.
"""

import sys
import json
import logging
import argparse
from pathlib import Path
from typing import List, Optional

from systolizer.pipeline.config import (
    DEFAULT_K, DEFAULT_MAX_VERTICES, DEFAULT_SEED, DEFAULT_TRIALS, DEFAULT_WORKERS, LOG_LEVEL, SIX_CYCLE_MARGIN,
    PipelineConfig,
)
from systolizer.pipeline.errors import InputError, SystolizerError
from systolizer.pipeline.formatters import ComplexFormatter, ReportFormatter
from systolizer.pipeline.help_texts import (
    BUILD_HELP, CHECK_HELP, CLI_DESCRIPTION, EXPORT_HELP, ORACLE_HELP, SYSTOLIZE_HELP,
)
from systolizer.tools.complex import TypedComplex, original_subcomplex
from systolizer.tools.coxeter import CoxeterSystem, build_coxeter_ball, parse_exponent
from systolizer.tools.oracles import run_face_complex_oracle, run_lemma_oracles
from systolizer.tools.plot import render_complex_html
from systolizer.tools.systolize import davis_systolization, system_of, systolize_rank3, systolize_rank4
from systolizer.tools.verify import (
    check_edge_links, check_full_six_cycles, check_new_edge_triangles, check_relation_lists,
    check_structural_rank3, check_structural_rank4, check_vertex_links, check_vertex_retraction,
)

logger = logging.getLogger(__name__)

SUITES = ("structural", "links", "edges", "oracles", "all")


def load_complex(path: str) -> TypedComplex:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}")
    return TypedComplex.from_dict(data)


def write_output(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
    logger.info(f"[cli] wrote {path}")


def parse_exponents(raw: str):
    return tuple(parse_exponent(part.strip()) for part in raw.split(",") if part.strip())


def is_systolized(complex_: TypedComplex) -> bool:
    return any(origin != "original" for origin in complex_.edges.values())


# Commands

def cmd_build(args, config: PipelineConfig) -> int:
    system = CoxeterSystem.from_exponents(config.exponents)
    ball = build_coxeter_ball(system, config.radius, config.node_budget)
    write_output(ComplexFormatter.to_json(ball), config.output)
    return 0


def cmd_systolize(args, config: PipelineConfig) -> int:
    ball = load_complex(args.input)
    system = system_of(ball)
    if args.davis:
        result = davis_systolization(ball, system, force=args.force)
    elif system.rank == 3:
        result = systolize_rank3(ball, system, force=args.force)
    else:
        result = systolize_rank4(ball, system)
    write_output(ComplexFormatter.to_json(result), config.output)
    return 0


def structural_reports(complex_: TypedComplex, config: PipelineConfig) -> list:
    system_of(complex_)
    rank = complex_.metadata.get("rank")
    margin = config.margin_for(rank)
    original = original_subcomplex(complex_)
    if rank == 3:
        reports = [check_structural_rank3(original, margin)]
    elif rank == 4:
        reports = [check_structural_rank4(original, config.case, margin), check_relation_lists(original, margin)]
    else:
        raise InputError(f"no structural checks for rank {rank}")
    if is_systolized(complex_):
        reports.append(check_new_edge_triangles(original, complex_))
        if rank == 3:
            reports.append(check_vertex_retraction(original, complex_, margin))
            reports.append(check_full_six_cycles(complex_, config.margin or SIX_CYCLE_MARGIN))
    return reports


def oracle_reports(config: PipelineConfig) -> list:
    return [
        run_lemma_oracles(config.trials, config.max_vertices, config.seed),
        run_face_complex_oracle(config.trials, config.max_vertices, config.seed, config.k),
    ]


def cmd_check(args, config: PipelineConfig) -> int:
    suite = args.suite
    reports = []
    if suite != "oracles":
        if args.input is None:
            raise InputError(f"suite {suite!r} needs an input complex")
        complex_ = load_complex(args.input)
        rank = complex_.metadata.get("rank")
        margin = config.margin_for(rank)
        # derived complexes carry no Coxeter system and only get link checks under "all"
        has_system = "system" in complex_.metadata
        if suite == "structural" or (suite == "all" and has_system):
            reports += structural_reports(complex_, config)
        if suite in ("links", "all"):
            reports.append(check_vertex_links(complex_, config.k, margin, config.workers))
        if suite == "edges" or (suite == "all" and rank == 4 and has_system):
            reports.append(check_edge_links(complex_, config.k, margin, config.workers))
    if suite in ("oracles", "all"):
        reports += oracle_reports(config)

    write_output(ReportFormatter.to_json(reports, args.timings), config.output)
    failed = [r.check_name for r in reports if not r.passed]
    if failed:
        logger.info(f"[check] failed: {', '.join(failed)}")
        return 1
    return 0


def cmd_export(args, config: PipelineConfig) -> int:
    complex_ = load_complex(args.input)
    if args.format == "json":
        write_output(ComplexFormatter.to_json(complex_), config.output)
    elif args.format == "dot":
        write_output(ComplexFormatter.to_dot(complex_, complex_.metadata.get("kind", "complex")), config.output)
    else:
        if config.output is None:
            raise InputError("html export needs --output")
        render_complex_html(complex_, config.output)
    return 0


def cmd_oracle(args, config: PipelineConfig) -> int:
    reports = oracle_reports(config)
    write_output(ReportFormatter.to_json(reports, args.timings), config.output)
    return 0 if all(r.passed for r in reports) else 1


COMMANDS = {
    "build": cmd_build,
    "systolize": cmd_systolize,
    "check": cmd_check,
    "export": cmd_export,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="systolizer", description=CLI_DESCRIPTION, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log at DEBUG level")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        sub = subparsers.add_parser(name, description=help_text, formatter_class=argparse.RawDescriptionHelpFormatter)
        sub.add_argument("--output", "-o", help="Output file (stdout when omitted)")
        return sub

    build = add("build", BUILD_HELP)
    build.add_argument("--exponents", required=True, help="l,k,m or ab,ac,ad,bc,bd,cd")
    build.add_argument("--radius", type=int, required=True, help="Ball radius in chambers")

    systolize = add("systolize", SYSTOLIZE_HELP)
    systolize.add_argument("input", help="Ball JSON file")
    systolize.add_argument("--force", action="store_true", help="Run on excluded types anyway")
    systolize.add_argument("--davis", action="store_true", help="Write the Davis systolization")

    check = add("check", CHECK_HELP)
    check.add_argument("input", nargs="?", help="Complex JSON file")
    check.add_argument("--suite", choices=SUITES, default="all", help="Suite to run")
    check.add_argument("--margin", type=int, help="Minimal depth of scanned objects")
    check.add_argument("--k", default=str(DEFAULT_K), help="Largeness to test, an integer >= 4 or inf")
    check.add_argument("--case", choices=("I", "II", "all_geq_3"), help="Override the rank 4 case")
    check.add_argument("--workers", type=int, default=DEFAULT_WORKERS, help="Threads for link checks")
    check.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="Oracle trials")
    check.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES, help="Oracle graph size")
    check.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Oracle seed")
    check.add_argument("--timings", action="store_true", help="Include wall-clock time in the reports")

    export = add("export", EXPORT_HELP)
    export.add_argument("input", help="Complex JSON file")
    export.add_argument("--format", choices=("json", "dot", "html"), default="json")

    oracle = add("oracle", ORACLE_HELP)
    oracle.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="Trials per oracle")
    oracle.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES, help="Largest random graph")
    oracle.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Seed of the random generator")
    oracle.add_argument("--timings", action="store_true", help="Include wall-clock time in the reports")
    return parser


def config_from_args(args) -> PipelineConfig:
    values = {"output": args.output}
    if getattr(args, "exponents", None) is not None:
        values["exponents"] = parse_exponents(args.exponents)
    if getattr(args, "k", None) is not None:
        values["k"] = parse_exponent(args.k)
    for name in ("radius", "margin", "case", "seed", "trials", "max_vertices", "workers"):
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    return PipelineConfig(**values)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=LOG_LEVEL)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        config = config_from_args(args)
        return COMMANDS[args.command](args, config)
    except SystolizerError as e:
        logger.error(f"[{args.command}] {type(e).__name__}: {e}")
        sys.stderr.write(json.dumps(ReportFormatter.format_error(e, args.command)) + "\n")
        return 2
    except Exception as e:
        logger.exception(f"[{args.command}] unexpected error: {e}")
        sys.stderr.write(json.dumps(ReportFormatter.format_error(e, args.command)) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
