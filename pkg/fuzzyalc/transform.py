"""
Knowledge-base transformations: threshold gadgets, GCI encodings and
elimination of unfoldable TBoxes into a pure ABox

Every transformation records its rewrites in a TransformTrace. A trace step
replaces a list of axioms by another list, and the transformations apply
their own steps through the same routine that replay_trace uses, so a trace
always replays to exactly the output it was recorded with.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from graphlib import TopologicalSorter
from typing import Dict, List, Optional, Sequence, Tuple, Union

from fuzzyalc import config
from fuzzyalc.degrees import ONE, ZERO, OperatorFamily, format_degree, make_degree, residuum
from fuzzyalc.errors import GadgetError, KnowledgeBaseError, TransformPreconditionError, UnsupportedFamilyError
from fuzzyalc.semantics import FiniteInterpretation, ModelChecker
from fuzzyalc.syntax import ABOX_TYPES, And, Atomic, Axiom, Concept, ConceptGeq, ConceptLeq, GciGeq, \
    KnowledgeBase, Not, Or, Signature, FreshNames, classify_tbox, concept_names, equivalence_axioms, n_fold, \
    render_axiom, render_concept, substitute, tbox_units

logger = logging.getLogger(__name__)

VACUOUS = "vacuous-gci"
THRESHOLD_ABSORPTION = "threshold-absorption"
TNORM_ENCODING = "tnorm-encoding"
MIN_ENCODING = "min-encoding"
UNFOLD = "unfold-definition"
UPPER_BOUND_NEGATION = "upper-bound-negation"


class Encoding(Enum):
    """How a degree-1 inclusion is turned into an equivalence"""

    TNORM = "tnorm"
    MIN = "min"


# ---------------------------------------------------------------------------
# Threshold gadgets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GadgetSpec:
    """
    A one-atom Lukasiewicz concept whose value never exceeds ``bound`` = 1 - alpha
    and equals it when the atom takes ``witness_input``.
    """

    alpha: Fraction
    concept: Concept
    atom: str
    witness_input: Fraction
    bound: Fraction


@dataclass(frozen=True)
class GadgetReport:
    passed: bool
    max_value: Fraction
    argmax: Fraction
    witness_value: Fraction
    points_checked: int
    counterexample: Optional[Fraction] = None

    def describe(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        line = (f"{verdict}: max value {format_degree(self.max_value)} at x = {format_degree(self.argmax)}, "
                f"value at witness input {format_degree(self.witness_value)}, {self.points_checked} points checked")
        if self.counterexample is not None:
            line += f"; counterexample x = {format_degree(self.counterexample)}"
        return line


def synthesize_gadget(alpha: Union[Fraction, int, str], atom: str = config.GADGET_ATOM) -> GadgetSpec:
    """
    Build (A' and ... and A') and not (A' and ... and A') with p and q copies
    of the atom, where alpha = p/q in lowest terms.

    The Lukasiewicz value at A' = x is max(0, px - (p-1)) - max(0, qx - (q-1)),
    which is bounded by (q-p)/q and reaches it at x = (q-1)/q.
    """
    alpha = make_degree(alpha)
    if alpha == 0:
        raise GadgetError("gadget unnecessary for alpha = 0: degree-0 axioms are vacuous")
    if alpha == 1:
        raise GadgetError("gadget unnecessary for alpha = 1: degree-1 axioms pass through unchanged")
    p, q = alpha.numerator, alpha.denominator
    variable = Atomic(atom)
    concept = And(n_fold(variable, p), Not(n_fold(variable, q)))
    return GadgetSpec(alpha, concept, atom, Fraction(q - 1, q), ONE - alpha)


def gadget_value(gadget: GadgetSpec, x: Fraction) -> Fraction:
    """Lukasiewicz value of the gadget concept when its atom takes the constant x"""
    interpretation = FiniteInterpretation(("x",), {gadget.atom: {"x": x}})
    return ModelChecker(interpretation, OperatorFamily.LUKASIEWICZ).value(gadget.concept, "x")


def verify_gadget(gadget: GadgetSpec, sweep_denominator: int) -> GadgetReport:
    """
    Evaluate the gadget at every k/(N*q) for k = 0..N*q.

    The value is piecewise linear with breakpoints at multiples of 1/q, so
    the sweep covers every linear piece at both ends and is exhaustive.
    """
    q = gadget.alpha.denominator
    if sweep_denominator < q:
        raise GadgetError(f"sweep denominator {sweep_denominator} must be at least q = {q}")
    steps = sweep_denominator * q
    max_value = None
    argmax = None
    for k in range(steps + 1):
        x = Fraction(k, steps)
        value = gadget_value(gadget, x)
        if max_value is None or value > max_value:
            max_value, argmax = value, x
    witness_value = gadget_value(gadget, gadget.witness_input)
    bounded = max_value <= gadget.bound
    passed = bounded and witness_value == gadget.bound
    report = GadgetReport(passed, max_value, argmax, witness_value, steps + 1,
                          None if bounded else argmax)
    logger.debug(f"Gadget for alpha={format_degree(gadget.alpha)}: {report.describe()}")
    return report


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    lemma: str
    before: Tuple[Axiom, ...]
    after: Tuple[Axiom, ...]
    fresh: Tuple[str, ...] = ()

    def render(self, unicode: bool = False) -> str:
        before = "; ".join(render_axiom(axiom, unicode) for axiom in self.before) or "-"
        after = "; ".join(render_axiom(axiom, unicode) for axiom in self.after) or "(removed)"
        line = f"[{self.lemma}] {before}  =>  {after}"
        if self.fresh:
            line += f"  (fresh: {', '.join(self.fresh)})"
        return line


@dataclass(frozen=True)
class TransformTrace:
    steps: Tuple[TraceStep, ...]
    axioms_before: int
    axioms_after: int
    nodes_before: int
    nodes_after: int

    @property
    def fresh_names(self) -> Tuple[str, ...]:
        return tuple(name for step in self.steps for name in step.fresh)

    def fresh_collisions(self, signature: Signature) -> List[str]:
        """Fresh names that repeat or already occur in the input signature"""
        problems = []
        seen = set()
        for name in self.fresh_names:
            if name in seen:
                problems.append(f"{name} introduced twice")
            if name in signature.names:
                problems.append(f"{name} occurs in the input signature")
            seen.add(name)
        return problems

    def merged(self, later: "TransformTrace") -> "TransformTrace":
        return TransformTrace(self.steps + later.steps, self.axioms_before, later.axioms_after,
                              self.nodes_before, later.nodes_after)

    def render(self, unicode: bool = False) -> str:
        lines = [step.render(unicode) for step in self.steps]
        lines.append(f"# {len(self.steps)} steps; axioms {self.axioms_before} -> {self.axioms_after}; "
                     f"concept nodes {self.nodes_before} -> {self.nodes_after}")
        return "\n".join(lines)


class _Rewriter:
    """Mutable ABox/TBox lists that trace steps are applied to"""

    def __init__(self, kb: KnowledgeBase):
        self.original = kb
        self.abox: List = list(kb.abox)
        self.tbox: List = list(kb.tbox)
        self.steps: List[TraceStep] = []

    def record(self, lemma: str, before: Sequence[Axiom], after: Sequence[Axiom], fresh: Sequence[str] = ()):
        step = TraceStep(lemma, tuple(before), tuple(after), tuple(fresh))
        _apply_step(self.abox, self.tbox, step)
        self.steps.append(step)
        logger.debug(step.render())

    def kb(self) -> KnowledgeBase:
        return KnowledgeBase(tuple(self.abox), tuple(self.tbox))

    def trace(self) -> TransformTrace:
        result = self.kb()
        trace = TransformTrace(tuple(self.steps), len(self.original), len(result),
                               self.original.node_count, result.node_count)
        problems = trace.fresh_collisions(self.original.signature)
        if problems:
            raise KnowledgeBaseError(f"fresh name collision: {'; '.join(problems)}")
        return trace


def _apply_step(abox: List, tbox: List, step: TraceStep):
    """Remove ``step.before`` and put ``step.after`` where the first removed axiom of each kind stood"""
    for axiom in step.before:
        target = abox if isinstance(axiom, ABOX_TYPES) else tbox
        for index, candidate in enumerate(target):
            if candidate is not None and candidate == axiom:
                target[index] = None
                break
        else:
            raise TransformPreconditionError(
                f"trace step [{step.lemma}] does not apply: {render_axiom(axiom)} is not present")
    for target, is_abox in ((abox, True), (tbox, False)):
        additions = [axiom for axiom in step.after if isinstance(axiom, ABOX_TYPES) == is_abox]
        rebuilt = []
        inserted = False
        for candidate in target:
            if candidate is None:
                if not inserted:
                    rebuilt.extend(additions)
                    inserted = True
                continue
            rebuilt.append(candidate)
        if not inserted:
            rebuilt.extend(additions)
        target[:] = rebuilt


def replay_trace(kb: KnowledgeBase, trace: TransformTrace) -> KnowledgeBase:
    """Apply every step of ``trace`` to ``kb``"""
    abox, tbox = list(kb.abox), list(kb.tbox)
    for step in trace.steps:
        _apply_step(abox, tbox, step)
    return KnowledgeBase(tuple(abox), tuple(tbox))


def _fresh_supply(kb: KnowledgeBase, names: Optional[FreshNames]) -> FreshNames:
    if names is None:
        return FreshNames(kb.signature.names)
    names.reserved |= set(kb.signature.names)
    return names


def _precondition_error(message: str, violations) -> TransformPreconditionError:
    detail = "; ".join(str(v) for v in violations)
    return TransformPreconditionError(f"{message}: {detail}" if detail else message, violations)


# ---------------------------------------------------------------------------
# Transformations
# ---------------------------------------------------------------------------

def _drop_vacuous(rewriter: _Rewriter):
    for axiom in list(rewriter.tbox):
        if axiom.degree == ZERO:
            rewriter.record(VACUOUS, (axiom,), ())


def drop_vacuous(kb: KnowledgeBase) -> Tuple[KnowledgeBase, TransformTrace]:
    """Remove inclusions of degree 0, which every interpretation satisfies"""
    rewriter = _Rewriter(kb)
    _drop_vacuous(rewriter)
    return rewriter.kb(), rewriter.trace()


def acyclic_to_unfoldable(kb: KnowledgeBase, family: OperatorFamily = OperatorFamily.LUKASIEWICZ,
                          names: Optional[FreshNames] = None) -> Tuple[KnowledgeBase, TransformTrace]:
    """
    Absorb every sub-unit inclusion degree into a gadget with a fresh atom.

    <A sub C >= alpha> becomes <A sub C or gadget(A') >= 1>. Only defined for
    Lukasiewicz, where the gadget construction works. Degree-0 inclusions are
    dropped first, so a TBox left with unit degrees only passes under any family.
    """
    names = _fresh_supply(kb, names)
    rewriter = _Rewriter(kb)
    _drop_vacuous(rewriter)

    classification = classify_tbox(rewriter.tbox)
    if not classification.acyclic:
        raise _precondition_error("TBox is not acyclic", classification.violations)

    pending = [unit for unit in tbox_units(rewriter.tbox) if not unit.is_equivalence and unit.degree != ONE]
    if pending and family is not OperatorFamily.LUKASIEWICZ:
        raise UnsupportedFamilyError(f"threshold absorption needs Lukasiewicz connectives, not {family.value}")

    for unit in pending:
        axiom = unit.axioms[0]
        fresh = names.next()
        gadget = synthesize_gadget(axiom.degree, fresh)
        absorbed = GciGeq(axiom.sub, Or(axiom.sup, gadget.concept), ONE)
        rewriter.record(THRESHOLD_ABSORPTION, (axiom,), (absorbed,), (fresh,))

    trace = rewriter.trace()
    logger.info(f"Threshold absorption: {len(trace.steps)} rewrites, {len(trace.fresh_names)} fresh atoms")
    return rewriter.kb(), trace


def require_min_definable(family: OperatorFamily):
    if family is OperatorFamily.PRODUCT:
        raise UnsupportedFamilyError("min not definable in this fragment: the Product family needs the residuum, "
                                     "which the concept language does not provide")


def min_concept(family: OperatorFamily, left: Concept, right: Concept) -> Concept:
    """min{left, right} written with the family's own connectives"""
    require_min_definable(family)
    if family is OperatorFamily.LUKASIEWICZ:
        return And(left, Or(Not(left), right))
    return And(left, right)


def _encoded_definition(encoding: Encoding, family: OperatorFamily, fresh: Atomic, sup: Concept) -> Concept:
    if encoding is Encoding.TNORM:
        return And(fresh, sup)
    return min_concept(family, fresh, sup)


def _encode_gci(kb: KnowledgeBase, gci: GciGeq, encoding: Encoding, family: OperatorFamily,
                names: Optional[FreshNames]) -> KnowledgeBase:
    if gci not in kb.tbox:
        raise TransformPreconditionError(f"{render_axiom(gci)} is not an inclusion of the knowledge base")
    if gci.degree != ONE:
        raise TransformPreconditionError(f"encoding needs a degree-1 inclusion, got {render_axiom(gci)}")
    names = _fresh_supply(kb, names)
    fresh = names.atom()
    rewriter = _Rewriter(kb)
    halves = equivalence_axioms(gci.sub, _encoded_definition(encoding, family, fresh, gci.sup))
    lemma = TNORM_ENCODING if encoding is Encoding.TNORM else MIN_ENCODING
    rewriter.record(lemma, (gci,), halves, (fresh.name,))
    rewriter.trace()
    return rewriter.kb()


def encode_gci_tnorm(kb: KnowledgeBase, gci: GciGeq, names: Optional[FreshNames] = None) -> KnowledgeBase:
    """Replace <C sub D >= 1> by C == A and D with a fresh atom A"""
    return _encode_gci(kb, gci, Encoding.TNORM, OperatorFamily.LUKASIEWICZ, names)


def encode_gci_min(kb: KnowledgeBase, gci: GciGeq, family: OperatorFamily,
                   names: Optional[FreshNames] = None) -> KnowledgeBase:
    """Replace <C sub D >= 1> by C == min{A, D} with a fresh atom A"""
    require_min_definable(family)
    return _encode_gci(kb, gci, Encoding.MIN, family, names)


def unfold_to_abox(kb: KnowledgeBase, encoding: Union[Encoding, str] = Encoding.TNORM,
                   family: OperatorFamily = OperatorFamily.LUKASIEWICZ,
                   names: Optional[FreshNames] = None) -> Tuple[KnowledgeBase, TransformTrace]:
    """
    Eliminate an unfoldable TBox.

    Every lone <A sub C >= 1> first becomes an equivalence A == A' and C (or
    the min form). Definitions are then substituted leaves first into the
    ABox and into the remaining definitions, each exactly once, until the
    TBox is empty. The result can be exponentially larger than the input.
    """
    encoding = Encoding(encoding)
    if encoding is Encoding.MIN:
        require_min_definable(family)
    names = _fresh_supply(kb, names)
    rewriter = _Rewriter(kb)
    _drop_vacuous(rewriter)

    classification = classify_tbox(rewriter.tbox)
    if not classification.unfoldable:
        raise _precondition_error("TBox is not unfoldable", classification.violations)

    lemma = TNORM_ENCODING if encoding is Encoding.TNORM else MIN_ENCODING
    for unit in tbox_units(rewriter.tbox):
        if unit.is_equivalence:
            continue
        axiom = unit.axioms[0]
        fresh = names.atom()
        halves = equivalence_axioms(axiom.sub, _encoded_definition(encoding, family, fresh, axiom.sup))
        rewriter.record(lemma, (axiom,), halves, (fresh.name,))

    definitions: Dict[str, Concept] = {}
    for unit in tbox_units(rewriter.tbox):
        definitions[unit.defined] = unit.definition
    graph = {name: concept_names(body) & set(definitions) for name, body in definitions.items()}

    for name in _leaves_first(graph):
        body = definitions[name]
        mapping = {name: body}
        before: List[Axiom] = []
        after: List[Axiom] = []
        for unit in tbox_units(rewriter.tbox):
            if unit.defined == name:
                before.extend(unit.axioms)
            elif name in concept_names(unit.definition):
                origin = unit.axioms[0].origin
                before.extend(unit.axioms)
                after.extend(equivalence_axioms(substitute(origin.left, mapping), substitute(origin.right, mapping)))
        for axiom in rewriter.abox:
            if isinstance(axiom, (ConceptGeq, ConceptLeq)) and name in concept_names(axiom.concept):
                before.append(axiom)
                after.append(type(axiom)(axiom.individual, substitute(axiom.concept, mapping), axiom.degree))
        rewriter.record(UNFOLD, before, after)
        for other, other_body in definitions.items():
            if name in concept_names(other_body):
                definitions[other] = substitute(other_body, mapping)

    if rewriter.tbox:
        raise KnowledgeBaseError("unfolding left axioms in the TBox: "
                                 + "; ".join(render_axiom(axiom) for axiom in rewriter.tbox))
    trace = rewriter.trace()
    logger.info(f"Unfolded {len(definitions)} definitions into the ABox: "
                f"{trace.nodes_before} -> {trace.nodes_after} concept nodes")
    return rewriter.kb(), trace


def _leaves_first(graph: Dict[str, set]) -> List[str]:
    """Defined names ordered so that every name comes after the names it uses"""
    sorter = TopologicalSorter(graph)
    sorter.prepare()
    order: List[str] = []
    while sorter.is_active():
        ready = sorted(sorter.get_ready())
        order.extend(ready)
        sorter.done(*ready)
    return order


def acyclic_to_abox(kb: KnowledgeBase, encoding: Union[Encoding, str] = Encoding.TNORM,
                    family: OperatorFamily = OperatorFamily.LUKASIEWICZ,
                    names: Optional[FreshNames] = None) -> Tuple[KnowledgeBase, TransformTrace]:
    """Threshold absorption followed by unfolding: acyclic KB in, pure ABox out"""
    names = _fresh_supply(kb, names)
    unfoldable, first = acyclic_to_unfoldable(kb, family, names)
    abox, second = unfold_to_abox(unfoldable, encoding, family, names)
    return abox, first.merged(second)


def negate_upper_bounds(kb: KnowledgeBase, family: OperatorFamily) -> Tuple[KnowledgeBase, TransformTrace]:
    """Rewrite (a : C) <= d as (a : not C) >= 1 - d; needs an involutive negation"""
    if family not in (OperatorFamily.LUKASIEWICZ, OperatorFamily.ZADEH):
        raise UnsupportedFamilyError(f"{family.value} negation is not involutive")
    rewriter = _Rewriter(kb)
    for axiom in list(rewriter.abox):
        if isinstance(axiom, ConceptLeq):
            rewriter.record(UPPER_BOUND_NEGATION, (axiom,),
                            (ConceptGeq(axiom.individual, Not(axiom.concept), ONE - axiom.degree),))
    return rewriter.kb(), rewriter.trace()


# ---------------------------------------------------------------------------
# Model lifting
# ---------------------------------------------------------------------------

def lift_threshold_model(interpretation: FiniteInterpretation, trace: TransformTrace) -> FiniteInterpretation:
    """Give every gadget atom of the trace its witness input as a constant value"""
    for step in trace.steps:
        if step.lemma != THRESHOLD_ABSORPTION:
            continue
        witness = synthesize_gadget(step.before[0].degree, step.fresh[0]).witness_input
        interpretation = interpretation.with_concept(step.fresh[0], {}, default=witness)
    return interpretation


def lift_tnorm_model(interpretation: FiniteInterpretation, family: OperatorFamily, gci: GciGeq,
                     fresh: str) -> FiniteInterpretation:
    """Fresh atom of C == A and D gets D(x) => C(x), the residuum of the t-norm"""
    checker = ModelChecker(interpretation, family)
    values = {x: residuum(family, checker.value(gci.sup, x), checker.value(gci.sub, x))
              for x in interpretation.domain}
    return interpretation.with_concept(fresh, values)


def lift_min_model(interpretation: FiniteInterpretation, family: OperatorFamily, gci: GciGeq,
                   fresh: str) -> FiniteInterpretation:
    """Fresh atom of C == min{A, D} gets C(x)"""
    checker = ModelChecker(interpretation, family)
    values = {x: checker.value(gci.sub, x) for x in interpretation.domain}
    return interpretation.with_concept(fresh, values)


def lift_unfolded_model(interpretation: FiniteInterpretation, trace: TransformTrace,
                        family: OperatorFamily) -> FiniteInterpretation:
    """
    Extend a model of the original knowledge base to every fresh atom the
    trace introduced, in trace order.
    """
    for step in trace.steps:
        if step.lemma == THRESHOLD_ABSORPTION:
            witness = synthesize_gadget(step.before[0].degree, step.fresh[0]).witness_input
            interpretation = interpretation.with_concept(step.fresh[0], {}, default=witness)
        elif step.lemma == TNORM_ENCODING:
            interpretation = lift_tnorm_model(interpretation, family, step.before[0], step.fresh[0])
        elif step.lemma == MIN_ENCODING:
            interpretation = lift_min_model(interpretation, family, step.before[0], step.fresh[0])
    return interpretation


def describe_gadget(gadget: GadgetSpec) -> List[str]:
    return [
        f"alpha:         {format_degree(gadget.alpha)}",
        f"gadget:        {render_concept(gadget.concept)}",
        f"notation:      {render_concept(gadget.concept, unicode=True)}",
        f"bound:         {format_degree(gadget.bound)}",
        f"witness input: {format_degree(gadget.witness_input)}",
    ]
