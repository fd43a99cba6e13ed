"""
Command-line entry point

Exit codes: 0 for an affirmative result, 1 for a negative finding (axiom
violated, no model within bounds, classification false, precondition
violated), 2 for usage and input errors.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from fuzzyalc import config
from fuzzyalc.degrees import OperatorFamily, format_degree, parse_degree
from fuzzyalc.errors import DegreeError, FuzzyAlcError, TransformPreconditionError, UnsupportedOperationError
from fuzzyalc.fmp import CanonicalModel, classify_vs_prefix, export_prefix, forced_sequence, format_value, \
    k2, render_prefix_table, tail_classify, verify_k2_prefix
from fuzzyalc.modelsearch import SearchBounds, SearchStatus, sat_search
from fuzzyalc.semantics import check_kb, describe_witnesses, find_witnesses, subsumption_witness
from fuzzyalc.syntax import GciGeq, RoleGeq, classify_tbox, render_concept, uses_graph
from fuzzyalc.transform import Encoding, acyclic_to_abox, describe_gadget, synthesize_gadget, unfold_to_abox, \
    verify_gadget
from fuzzyalc.utils.parser import parse_concept, read_interpretation, read_kb
from fuzzyalc.utils.validator import KnowledgeBaseValidator
from fuzzyalc.utils.writer import interpretation_to_dict, satisfaction_to_dict, serialize_interpretation, \
    serialize_kb, to_json, write_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


@dataclass
class CommandResult:
    exit_code: int
    report: List[str]
    payload: Optional[Dict[str, Any]] = field(default=None)


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """Raises instead of exiting so main() owns every exit code"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _family(value: str) -> OperatorFamily:
    try:
        return OperatorFamily.from_name(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown family {value!r} (zadeh, luk, prod, goedel)") from None


def _denominators(value: str):
    try:
        numbers = tuple(int(part) for part in value.replace(" ", "").split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(f"denominators must be a comma separated list of integers: {value!r}") \
            from None
    if not numbers:
        raise argparse.ArgumentTypeError("at least one denominator is needed")
    return numbers


def _degree(value: str):
    try:
        return parse_degree(value)
    except DegreeError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit one JSON document instead of the text report")
    common.add_argument("--log-file", help="Also write log lines to this file")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings and errors only")

    parser = _ArgumentParser(prog="fuzzyalc", description="Exact-arithmetic toolkit for fuzzy ALC")
    parser.add_argument("--version", action="version", version=f"%(prog)s {config.TOOL_VERSION}")
    commands = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)
    commands.required = True

    check = commands.add_parser("check-model", parents=[common], help="Check a finite interpretation")
    check.add_argument("--kb", required=True, help="Knowledge-base file")
    check.add_argument("--model", required=True, help="Interpretation file")
    check.add_argument("--family", required=True, type=_family, help="Operator family")
    check.add_argument("--strict", action="store_true", help="Fail on names the interpretation does not list")
    check.add_argument("--explain", action="store_true", help="Show witnesses for the first violated axiom")
    check.add_argument("--allow-fresh", action="store_true", help="Accept generated primed names in the KB")
    check.add_argument("--workers", type=int, default=1, help="Threads for axiom checking")

    search = commands.add_parser("sat-search", parents=[common], help="Bounded finite-model search")
    search.add_argument("--kb", required=True, help="Knowledge-base file")
    search.add_argument("--family", required=True, type=_family, help="Operator family")
    search.add_argument("--max-size", type=int, default=config.DEFAULT_MAX_SIZE, help="Largest domain size")
    search.add_argument("--denominators", type=_denominators, default=config.DEFAULT_DENOMINATORS,
                        help="Grid denominators, e.g. 1,2,5")
    search.add_argument("--budget", type=int, help="Stop after this many candidates")
    search.add_argument("--crisp-roles", action="store_true", help="Roles take only the degrees 0 and 1")
    search.add_argument("--workers", type=int, default=config.DEFAULT_SEARCH_WORKERS, help="Search threads")
    search.add_argument("--out", help="Where to write a found model")
    search.add_argument("--allow-fresh", action="store_true", help="Accept generated primed names in the KB")

    analyze = commands.add_parser("analyze", parents=[common], help="Classify the TBox")
    analyze.add_argument("--kb", required=True, help="Knowledge-base file")
    analyze.add_argument("--allow-fresh", action="store_true", help="Accept generated primed names in the KB")

    unfold = commands.add_parser("unfold", parents=[common], help="Eliminate an acyclic TBox into an ABox")
    unfold.add_argument("--kb", required=True, help="Knowledge-base file")
    unfold.add_argument("--family", required=True, type=_family, help="Operator family")
    unfold.add_argument("--encoding", choices=[e.value for e in Encoding], default=Encoding.TNORM.value,
                        help="How degree-1 inclusions become definitions")
    unfold.add_argument("--out", required=True, help="Where to write the resulting ABox")
    unfold.add_argument("--trace", help="Where to write the rewrite trace (default: OUT.trace)")
    unfold.add_argument("--allow-fresh", action="store_true", help="Accept generated primed names in the KB")

    gadget = commands.add_parser("gadget", parents=[common], help="Synthesize and verify a threshold gadget")
    gadget.add_argument("--alpha", required=True, type=_degree, help="Threshold p/q strictly between 0 and 1")
    gadget.add_argument("--sweep", type=int, help="Sweep denominator N (default: q)")

    fmp = commands.add_parser("fmp", help="K2 and its canonical infinite models")
    fmp_commands = fmp.add_subparsers(dest="fmp_command", parser_class=_ArgumentParser)
    fmp_commands.required = True

    demo = fmp_commands.add_parser("demo", parents=[common], help="Verify a K2 prefix and search for finite models")
    demo.add_argument("--family", required=True, type=_family, help="luk or prod")
    demo.add_argument("--depth", type=int, default=config.DEFAULT_PREFIX_DEPTH, help="Prefix depth")
    demo.add_argument("--max-size", type=int, default=config.DEFAULT_MAX_SIZE, help="Search domain size")
    demo.add_argument("--denominators", type=_denominators, default=config.DEFAULT_DENOMINATORS,
                      help="Search grid denominators")

    forced = fmp_commands.add_parser("forced-seq", parents=[common], help="Values K2 forces along a chain")
    forced.add_argument("--family", required=True, type=_family, help="luk or prod")
    forced.add_argument("-n", type=int, required=True, help="Sequence length")

    classify = fmp_commands.add_parser("classify", parents=[common], help="Tail class of a concept")
    classify.add_argument("--family", required=True, type=_family, help="luk or prod")
    classify.add_argument("--concept", required=True, help="Concept expression over A and R")
    classify.add_argument("--depth", type=int, default=config.DEFAULT_PREFIX_DEPTH, help="Prefix depth")
    classify.add_argument("--tolerance", type=int, default=config.DEFAULT_TOLERANCE,
                          help="Tolerance denominator")

    export = fmp_commands.add_parser("export", parents=[common], help="Write a Lukasiewicz model prefix")
    export.add_argument("--depth", type=int, default=config.DEFAULT_PREFIX_DEPTH, help="Prefix depth")
    export.add_argument("--out", required=True, help="Interpretation file to write")

    return parser


def _setup_logging(args):
    """Setup logging configuration"""
    if getattr(args, "verbose", False):
        level = logging.DEBUG
    elif getattr(args, "quiet", False):
        level = logging.WARNING
    else:
        level = getattr(logging, config.LOG_LEVEL)
    handlers = [logging.StreamHandler(sys.stderr)]
    if getattr(args, "log_file", None):
        handlers.append(logging.FileHandler(args.log_file))
    logging.basicConfig(level=level, format=config.LOG_FORMAT, handlers=handlers, force=True)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_check_model(args) -> CommandResult:
    kb = read_kb(args.kb, args.allow_fresh)
    interpretation = read_interpretation(args.model)
    is_valid, errors = KnowledgeBaseValidator().validate_coverage(kb, interpretation)
    if not is_valid:
        return CommandResult(EXIT_USAGE, [f"error: {error}" for error in errors], {"errors": errors})

    report = check_kb(interpretation, args.family, kb, strict=args.strict, workers=args.workers)
    lines = [result.describe() for result in report.results]
    violated = len(report.violations)
    if report.satisfied:
        lines.append(f"satisfied: all {len(report.results)} axioms hold under {args.family.value}")
    else:
        lines.append(f"NOT satisfied: {violated} of {len(report.results)} axioms violated under {args.family.value}")
        if args.explain:
            lines.extend(_explain(interpretation, args.family, report.first_violation.axiom))
    return CommandResult(EXIT_OK if report.satisfied else EXIT_NEGATIVE, lines, satisfaction_to_dict(report))


def _explain(interpretation, family: OperatorFamily, axiom) -> List[str]:
    """Witness elements behind a violated axiom"""
    if isinstance(axiom, GciGeq):
        element, value = subsumption_witness(interpretation, family, axiom.sub, axiom.sup)
        return [f"  worst element: {element} (inclusion degree {format_degree(value)})"]
    if isinstance(axiom, RoleGeq):
        return []
    element = interpretation.element_of(axiom.individual)
    witnesses = find_witnesses(interpretation, family, axiom.concept, element)
    return [f"  {line}" for line in describe_witnesses(witnesses)]


def _default_model_path(kb_path: str, family: OperatorFamily) -> str:
    stem = os.path.splitext(os.path.basename(kb_path))[0]
    return os.path.join(config.OUTPUT_DIR, f"{stem}_{family.value}.interp")


def cmd_sat_search(args) -> CommandResult:
    kb = read_kb(args.kb, args.allow_fresh)
    bounds = SearchBounds(args.max_size, args.denominators, args.budget, args.crisp_roles)
    outcome = sat_search(kb, args.family, bounds, args.workers)
    lines = outcome.describe()
    payload = outcome.to_dict()

    if outcome.status is SearchStatus.SAT:
        path = args.out or _default_model_path(args.kb, args.family)
        text = serialize_interpretation(outcome.model)
        write_text(path, text)
        lines.append(f"model written to {path}")
        lines.extend(text.rstrip("\n").splitlines())
        payload["model"] = interpretation_to_dict(outcome.model)
        payload["model_path"] = path
        return CommandResult(EXIT_OK, lines, payload)
    if outcome.status is SearchStatus.BUDGET_EXHAUSTED:
        lines.append("search budget exhausted before a verdict")
        return CommandResult(EXIT_NEGATIVE, lines, payload)
    lines.append("UNSAT within bounds: no model inside the searched bounds (a bounded claim, not a proof)")
    return CommandResult(EXIT_NEGATIVE, lines, payload)


def cmd_analyze(args) -> CommandResult:
    kb = read_kb(args.kb, args.allow_fresh)
    classification = classify_tbox(kb.tbox)
    signature = kb.signature
    lines = [f"axioms:     {len(kb.abox)} ABox, {len(kb.tbox)} TBox",
             f"signature:  {len(signature.concepts)} concepts, {len(signature.roles)} roles, "
             f"{len(signature.individuals)} individuals",
             f"acyclic:    {'yes' if classification.acyclic else 'no'}",
             f"unfoldable: {'yes' if classification.unfoldable else 'no'}"]
    graph = uses_graph(kb.tbox)
    if graph:
        lines.append("uses:")
        lines.extend(f"  {name} -> {', '.join(sorted(targets)) or '(nothing)'}" for name, targets in sorted(graph.items()))
    if classification.violations:
        lines.append("violations:")
        lines.extend(f"  {violation}" for violation in classification.violations)
    payload = {
        "acyclic": classification.acyclic,
        "unfoldable": classification.unfoldable,
        "violations": [{"constraint": v.constraint, "detail": v.detail, "cycle": list(v.cycle)}
                       for v in classification.violations],
        "uses": {name: sorted(targets) for name, targets in sorted(graph.items())},
    }
    return CommandResult(EXIT_OK if classification.unfoldable else EXIT_NEGATIVE, lines, payload)


def cmd_unfold(args) -> CommandResult:
    kb = read_kb(args.kb, args.allow_fresh)
    classification = classify_tbox(kb.tbox)
    if classification.unfoldable:
        abox, trace = unfold_to_abox(kb, args.encoding, args.family)
    else:
        abox, trace = acyclic_to_abox(kb, args.encoding, args.family)

    trace_path = args.trace or f"{args.out}.trace"
    write_text(args.out, serialize_kb(abox))
    write_text(trace_path, trace.render() + "\n")
    lines = trace.render().splitlines()
    lines.append(f"ABox written to {args.out}, trace to {trace_path}")
    payload = {
        "out": args.out,
        "trace": trace_path,
        "steps": [{"lemma": step.lemma, "fresh": list(step.fresh)} for step in trace.steps],
        "axioms": [trace.axioms_before, trace.axioms_after],
        "concept_nodes": [trace.nodes_before, trace.nodes_after],
    }
    return CommandResult(EXIT_OK, lines, payload)


def cmd_gadget(args) -> CommandResult:
    gadget = synthesize_gadget(args.alpha)
    sweep = args.sweep if args.sweep is not None else gadget.alpha.denominator
    report = verify_gadget(gadget, sweep)
    lines = describe_gadget(gadget) + [report.describe()]
    payload = {
        "alpha": format_degree(gadget.alpha),
        "gadget": render_concept(gadget.concept),
        "bound": format_degree(gadget.bound),
        "witness_input": format_degree(gadget.witness_input),
        "passed": report.passed,
        "max_value": format_degree(report.max_value),
    }
    return CommandResult(EXIT_OK if report.passed else EXIT_NEGATIVE, lines, payload)


def cmd_fmp_demo(args) -> CommandResult:
    model = CanonicalModel(args.family)
    report = verify_k2_prefix(model, args.depth)
    lines = [f"K2 on the {args.family.value} canonical model, nodes 1..{args.depth}"
             + (" and infinity" if model.has_infinity else "")]
    lines.extend(render_prefix_table(report))

    outcome = sat_search(k2(), args.family, SearchBounds(args.max_size, args.denominators))
    lines.append("")
    lines.append("Bounded finite-model search on K2 (a corroboration within bounds, not a proof):")
    lines.extend(f"  {line}" for line in outcome.describe())
    found_finite = outcome.status is SearchStatus.SAT
    if found_finite:
        lines.append("  unexpected: a finite model was found")
    payload = {
        "prefix_passed": report.passed,
        "checks": len(report.rows),
        "failures": [{"node": str(row.node), "check": row.check, "lhs": format_value(row.lhs),
                      "rhs": format_value(row.rhs)} for row in report.failures],
        "search": outcome.to_dict(),
    }
    ok = report.passed and not found_finite
    return CommandResult(EXIT_OK if ok else EXIT_NEGATIVE, lines, payload)


def cmd_fmp_forced(args) -> CommandResult:
    values = [format_value(value) for value in forced_sequence(args.family, args.n)]
    return CommandResult(EXIT_OK, [" ".join(values)], {"family": args.family.value, "values": values})


def cmd_fmp_classify(args) -> CommandResult:
    model = CanonicalModel(args.family)
    concept = parse_concept(args.concept)
    tail = tail_classify(model, concept)
    lines = [f"{render_concept(concept)}: {tail.value}"]
    payload: Dict[str, Any] = {"concept": render_concept(concept), "class": tail.value}
    try:
        check = classify_vs_prefix(model, concept, args.depth, args.tolerance)
    except UnsupportedOperationError as e:
        lines.append(f"error: prefix values cannot be computed exactly: {e}")
        payload["error"] = str(e)
        return CommandResult(EXIT_USAGE, lines, payload)
    lines.append(check.describe())
    payload.update({"consistent": check.consistent, "crossover": check.crossover,
                    "last_value": format_value(check.last_value)})
    return CommandResult(EXIT_OK if check.consistent else EXIT_NEGATIVE, lines, payload)


def cmd_fmp_export(args) -> CommandResult:
    export = export_prefix(CanonicalModel(OperatorFamily.LUKASIEWICZ), args.depth)
    text = f"# {export.caveat}\n" + serialize_interpretation(export.interpretation)
    write_text(args.out, text)
    return CommandResult(EXIT_OK, [export.caveat, f"prefix written to {args.out}"],
                         {"out": args.out, "caveat": export.caveat})


COMMANDS = {
    "check-model": cmd_check_model,
    "sat-search": cmd_sat_search,
    "analyze": cmd_analyze,
    "unfold": cmd_unfold,
    "gadget": cmd_gadget,
    ("fmp", "demo"): cmd_fmp_demo,
    ("fmp", "forced-seq"): cmd_fmp_forced,
    ("fmp", "classify"): cmd_fmp_classify,
    ("fmp", "export"): cmd_fmp_export,
}


def run(argv: Optional[List[str]] = None) -> CommandResult:
    """Parse arguments and run one command; never exits the interpreter"""
    args = build_parser().parse_args(argv)
    _setup_logging(args)
    key = (args.command, args.fmp_command) if args.command == "fmp" else args.command
    handler = COMMANDS[key]
    try:
        return handler(args)
    except TransformPreconditionError as e:
        logger.error(f"Precondition violated: {e}")
        violations = [str(v) for v in e.violations]
        lines = [f"precondition violated: {e}"] + [f"  {v}" for v in violations]
        return CommandResult(EXIT_NEGATIVE, lines, {"error": str(e), "violations": violations})
    except (FuzzyAlcError, OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return CommandResult(EXIT_USAGE, [f"error: {e}"], {"error": str(e)})


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    if argv is None:
        argv = sys.argv[1:]
    try:
        result = run(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE

    if "--json" in argv:
        document = dict(result.payload or {})
        document["exit_code"] = result.exit_code
        print(to_json(document))
    else:
        for line in result.report:
            print(line)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
