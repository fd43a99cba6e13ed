"""
The two example knowledge bases, forced sequences and the canonical
infinite models that satisfy K2 under Lukasiewicz and Product semantics

The canonical models are never materialized. Nodes are the naturals 1, 2,
3, ... (plus a node at infinity for Lukasiewicz); the role is the crisp
successor relation, so every restriction evaluates exactly at the unique
successor.
"""

import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from fuzzyalc import config
from fuzzyalc.degrees import LD_ONE, LD_ZERO, ONE, ZERO, LogDyadicDegree, OperatorFamily, format_degree, \
    ld_negation, ld_tnorm, negation, tconorm, tnorm
from fuzzyalc.errors import CanonicalModelError, UnsupportedFamilyError, UnsupportedOperationError
from fuzzyalc.semantics import FiniteInterpretation
from fuzzyalc.syntax import TOP, And, Atomic, Bottom, Concept, ConceptEq, ConceptGeq, ConceptLeq, Equivalence, \
    Exists, Forall, GciGeq, KnowledgeBase, Not, Or, RoleGeq, Top, expand_shorthands, render_axiom, render_concept

logger = logging.getLogger(__name__)

INFINITY = math.inf

Node = Union[int, float]
Value = Union[Fraction, LogDyadicDegree]


def k1() -> KnowledgeBase:
    """Young Jim likes Mary; an inn is a hotel to degree 1/2"""
    return expand_shorthands([
        ConceptGeq("jim", Atomic("YoungPerson"), Fraction(1, 5)),
        RoleGeq("jim", "mary", "likes", Fraction(4, 5)),
        GciGeq(Atomic("Inn"), Atomic("Hotel"), Fraction(1, 2)),
    ])


def _k2_items(include_recurrence: bool) -> list:
    a, r = Atomic("A"), "R"
    items = [
        ConceptEq("a", a, Fraction(1, 2)),
        GciGeq(TOP, Exists(r, TOP), ONE),
        Equivalence(Forall(r, a), Exists(r, a)),
    ]
    if include_recurrence:
        items.append(Equivalence(a, And(Forall(r, a), Forall(r, a))))
    return items


def k2() -> KnowledgeBase:
    """
    (a : A) = 1/2, Top sub exists R . Top, forall R . A == exists R . A and
    A == forall R . A and forall R . A. Satisfiable but without finite
    models under Lukasiewicz and Product semantics.
    """
    return expand_shorthands(_k2_items(True))


def k2_without_recurrence() -> KnowledgeBase:
    """K2 minus its last equivalence; has small finite models"""
    return expand_shorthands(_k2_items(False))


class TailClass(Enum):
    """Limit behaviour of a concept along the canonical model"""

    COND1 = "Cond1"
    COND2 = "Cond2"
    IDENTICALLY_ZERO = "IdenticallyZero"
    POSITIVE_SUP_ONE = "PositiveNondecreasingSupOne"

    @property
    def tends_to_one(self) -> bool:
        return self in (TailClass.COND2, TailClass.POSITIVE_SUP_ONE)


@dataclass(frozen=True)
class CanonicalModel:
    """
    The witnessed model of K2 for one family.

    ``overrides`` replaces the closed-form atom value at chosen nodes, which
    is how broken variants are built for testing the verifier.
    """

    family: OperatorFamily
    atom: str = "A"
    role: str = "R"
    individual: str = "a"
    overrides: Tuple[Tuple[Node, Value], ...] = ()

    def __post_init__(self):
        if self.family not in (OperatorFamily.LUKASIEWICZ, OperatorFamily.PRODUCT):
            raise UnsupportedFamilyError(f"no canonical model is defined for the {self.family.value} family")

    @property
    def has_infinity(self) -> bool:
        return self.family is OperatorFamily.LUKASIEWICZ

    def with_override(self, node: Node, value: Value) -> "CanonicalModel":
        return CanonicalModel(self.family, self.atom, self.role, self.individual,
                              self.overrides + ((node, value),))

    def check_node(self, node: Node):
        if node == INFINITY:
            if not self.has_infinity:
                raise UnsupportedOperationError("the Product canonical model has no node at infinity")
            return
        if not isinstance(node, int) or node < 1:
            raise CanonicalModelError(f"nodes are positive integers, got {node!r}")

    def successor(self, node: Node) -> Node:
        return INFINITY if node == INFINITY else node + 1

    def atom_value(self, node: Node) -> Value:
        self.check_node(node)
        for overridden, value in reversed(self.overrides):
            if overridden == node:
                return value
        if self.family is OperatorFamily.LUKASIEWICZ:
            if node == INFINITY:
                return ONE
            return Fraction(2 ** node - 1, 2 ** node)
        return LogDyadicDegree.pow2(Fraction(-1, 2 ** (node - 1)))


def canonical_model(family: OperatorFamily) -> CanonicalModel:
    return CanonicalModel(family)


def forced_sequence(family: OperatorFamily, n: int) -> List[Value]:
    """
    The values any model of K2 must give A along an R-chain from a:
    a1 = 1/2 and a(k+1) is the unique value whose self-t-norm is a(k).
    """
    if n < 1:
        raise ValueError("forced sequence length must be at least 1")
    if family is OperatorFamily.LUKASIEWICZ:
        values = [Fraction(1, 2)]
        while len(values) < n:
            values.append((values[-1] + 1) / 2)
        return values
    if family is OperatorFamily.PRODUCT:
        exponent = Fraction(-1)
        values = [LogDyadicDegree.pow2(exponent)]
        while len(values) < n:
            exponent /= 2
            values.append(LogDyadicDegree.pow2(exponent))
        return values
    raise UnsupportedFamilyError(f"K2 forces no sequence under the {family.value} family")


def eval_on_canonical(model: CanonicalModel, concept: Concept, node: Node) -> Value:
    """Exact value of ``concept`` at ``node``; restrictions read the successor"""
    model.check_node(node)
    if model.family is OperatorFamily.LUKASIEWICZ:
        return _eval_lukasiewicz(model, concept, node)
    return _eval_product(model, concept, node)


def _check_names(model: CanonicalModel, concept: Concept):
    if isinstance(concept, Atomic) and concept.name != model.atom:
        raise CanonicalModelError(f"the canonical model only interprets {model.atom}, not {concept.name}")
    if isinstance(concept, (Forall, Exists)) and concept.role != model.role:
        raise CanonicalModelError(f"the canonical model only interprets role {model.role}, not {concept.role}")


def _eval_lukasiewicz(model: CanonicalModel, concept: Concept, node: Node) -> Fraction:
    family = OperatorFamily.LUKASIEWICZ
    _check_names(model, concept)
    if isinstance(concept, Top):
        return ONE
    if isinstance(concept, Bottom):
        return ZERO
    if isinstance(concept, Atomic):
        return model.atom_value(node)
    if isinstance(concept, And):
        return tnorm(family, _eval_lukasiewicz(model, concept.left, node),
                     _eval_lukasiewicz(model, concept.right, node))
    if isinstance(concept, Or):
        return tconorm(family, _eval_lukasiewicz(model, concept.left, node),
                       _eval_lukasiewicz(model, concept.right, node))
    if isinstance(concept, Not):
        return negation(family, _eval_lukasiewicz(model, concept.operand, node))
    if isinstance(concept, (Forall, Exists)):
        return _eval_lukasiewicz(model, concept.filler, model.successor(node))
    raise TypeError(f"Not a concept: {concept!r}")


def _eval_product(model: CanonicalModel, concept: Concept, node: Node) -> LogDyadicDegree:
    _check_names(model, concept)
    if isinstance(concept, Top):
        return LD_ONE
    if isinstance(concept, Bottom):
        return LD_ZERO
    if isinstance(concept, Atomic):
        return model.atom_value(node)
    if isinstance(concept, And):
        return ld_tnorm(_eval_product(model, concept.left, node), _eval_product(model, concept.right, node))
    if isinstance(concept, Or):
        raise UnsupportedOperationError("the Product t-conorm leaves the 2^r number system; "
                                        "concepts evaluated on the Product canonical model must be free of 'or'")
    if isinstance(concept, Not):
        return ld_negation(_eval_product(model, concept.operand, node))
    if isinstance(concept, (Forall, Exists)):
        return _eval_product(model, concept.filler, model.successor(node))
    raise TypeError(f"Not a concept: {concept!r}")


def format_value(value: Value) -> str:
    if isinstance(value, LogDyadicDegree):
        return str(value)
    return format_degree(value)


def _as_model_value(model: CanonicalModel, degree: Fraction) -> Value:
    """An axiom degree in the model's number system"""
    if model.family is OperatorFamily.LUKASIEWICZ:
        return degree
    if degree == 0:
        return LD_ZERO
    denominator = degree.denominator
    if degree.numerator != 1 or denominator & (denominator - 1):
        raise UnsupportedOperationError(f"degree {format_degree(degree)} is not a power of 2")
    return LogDyadicDegree.pow2(1 - denominator.bit_length())


# ---------------------------------------------------------------------------
# Prefix verification
# ---------------------------------------------------------------------------

RECURRENCE = "recurrence A(i) = A(i+1) * A(i+1)"


@dataclass(frozen=True)
class PrefixRow:
    node: Node
    check: str
    lhs: Value
    rhs: Value
    ok: bool


@dataclass(frozen=True)
class PrefixReport:
    family: OperatorFamily
    depth: int
    rows: Tuple[PrefixRow, ...]

    @property
    def passed(self) -> bool:
        return all(row.ok for row in self.rows)

    @property
    def failures(self) -> List[PrefixRow]:
        return [row for row in self.rows if not row.ok]

    @property
    def first_failure(self) -> Optional[PrefixRow]:
        failures = self.failures
        return failures[0] if failures else None


def _node_label(node: Node) -> str:
    return "inf" if node == INFINITY else str(node)


def verify_k2_prefix(model: CanonicalModel, depth: int) -> PrefixReport:
    """
    Check K2 on nodes 1..depth (and infinity for Lukasiewicz).

    Degree-1 inclusions are checked pointwise as lhs <= rhs. The assertion
    pair is checked at node 1 where the individual lives. The recurrence
    row checks the defining identity of the atom valuation.
    """
    if depth < 1:
        raise ValueError("prefix depth must be at least 1")
    kb = k2()
    rows: List[PrefixRow] = []

    for axiom in kb.abox:
        if not isinstance(axiom, (ConceptGeq, ConceptLeq)):
            continue
        achieved = eval_on_canonical(model, axiom.concept, 1)
        bound = _as_model_value(model, axiom.degree)
        ok = achieved >= bound if isinstance(axiom, ConceptGeq) else achieved <= bound
        rows.append(PrefixRow(1, render_axiom(axiom), achieved, bound, ok))

    nodes: List[Node] = list(range(1, depth + 1))
    if model.has_infinity:
        nodes.append(INFINITY)
    atom = Atomic(model.atom)
    for node in nodes:
        for axiom in kb.tbox:
            lhs = eval_on_canonical(model, axiom.sub, node)
            rhs = eval_on_canonical(model, axiom.sup, node)
            rows.append(PrefixRow(node, render_axiom(axiom), lhs, rhs, lhs <= rhs))
        following = eval_on_canonical(model, atom, model.successor(node))
        current = eval_on_canonical(model, atom, node)
        if model.family is OperatorFamily.LUKASIEWICZ:
            squared = tnorm(OperatorFamily.LUKASIEWICZ, following, following)
        else:
            squared = ld_tnorm(following, following)
        rows.append(PrefixRow(node, RECURRENCE, current, squared, current == squared))

    report = PrefixReport(model.family, depth, tuple(rows))
    if report.passed:
        logger.info(f"K2 prefix of depth {depth} verified under {model.family.value}: {len(rows)} checks")
    else:
        failure = report.first_failure
        logger.warning(f"K2 prefix check failed at node {_node_label(failure.node)}: {failure.check}")
    return report


def render_prefix_table(report: PrefixReport, limit: int = config.REPORT_ROW_LIMIT) -> List[str]:
    """Text table of the report; failures are always listed, passing rows up to ``limit``"""
    lines = [f"{'node':>6}  {'verdict':7}  check  [lhs | rhs]"]
    shown = 0
    for row in report.rows:
        if row.ok and shown >= limit:
            continue
        if row.ok:
            shown += 1
        lhs, rhs = format_value(row.lhs), format_value(row.rhs)
        if len(lhs) > 40:
            lhs = lhs[:18] + "..." + lhs[-18:]
        if len(rhs) > 40:
            rhs = rhs[:18] + "..." + rhs[-18:]
        lines.append(f"{_node_label(row.node):>6}  {'ok' if row.ok else 'FAILED':7}  {row.check}  [{lhs} | {rhs}]")
    hidden = sum(1 for row in report.rows if row.ok) - shown
    if hidden > 0:
        lines.append(f"... {hidden} further passing checks not shown")
    lines.append(f"{len(report.rows)} checks, {len(report.failures)} failed")
    return lines


# ---------------------------------------------------------------------------
# Tail classification
# ---------------------------------------------------------------------------

def reduce_connectives(concept: Concept) -> Concept:
    """Rewrite 'or' and 'exists' through 'not', 'and' and 'forall' (Lukasiewicz dualities)"""
    if isinstance(concept, Or):
        return Not(And(Not(reduce_connectives(concept.left)), Not(reduce_connectives(concept.right))))
    if isinstance(concept, Exists):
        return Not(Forall(concept.role, Not(reduce_connectives(concept.filler))))
    if isinstance(concept, And):
        return And(reduce_connectives(concept.left), reduce_connectives(concept.right))
    if isinstance(concept, Not):
        return Not(reduce_connectives(concept.operand))
    if isinstance(concept, Forall):
        return Forall(concept.role, reduce_connectives(concept.filler))
    return concept


def tail_classify(model: CanonicalModel, concept: Concept) -> TailClass:
    if model.family is OperatorFamily.LUKASIEWICZ:
        return _classify_lukasiewicz(model, reduce_connectives(concept))
    return _classify_product(model, concept)


def _classify_lukasiewicz(model: CanonicalModel, concept: Concept) -> TailClass:
    _check_names(model, concept)
    if isinstance(concept, (Top, Atomic)):
        return TailClass.COND2
    if isinstance(concept, Bottom):
        return TailClass.COND1
    if isinstance(concept, Not):
        inner = _classify_lukasiewicz(model, concept.operand)
        return TailClass.COND1 if inner is TailClass.COND2 else TailClass.COND2
    if isinstance(concept, And):
        both = (_classify_lukasiewicz(model, concept.left) is TailClass.COND2
                and _classify_lukasiewicz(model, concept.right) is TailClass.COND2)
        return TailClass.COND2 if both else TailClass.COND1
    if isinstance(concept, Forall):
        return _classify_lukasiewicz(model, concept.filler)
    raise TypeError(f"Unexpected concept after reduction: {concept!r}")


def _classify_product(model: CanonicalModel, concept: Concept) -> TailClass:
    _check_names(model, concept)
    positive, zero = TailClass.POSITIVE_SUP_ONE, TailClass.IDENTICALLY_ZERO
    if isinstance(concept, (Top, Atomic)):
        return positive
    if isinstance(concept, Bottom):
        return zero
    if isinstance(concept, Not):
        return zero if _classify_product(model, concept.operand) is positive else positive
    if isinstance(concept, And):
        left = _classify_product(model, concept.left)
        right = _classify_product(model, concept.right)
        return positive if left is positive and right is positive else zero
    if isinstance(concept, Or):
        left = _classify_product(model, concept.left)
        right = _classify_product(model, concept.right)
        return positive if left is positive or right is positive else zero
    if isinstance(concept, (Forall, Exists)):
        return _classify_product(model, concept.filler)
    raise TypeError(f"Not a concept: {concept!r}")


@dataclass(frozen=True)
class ClassificationCheck:
    concept: Concept
    expected: TailClass
    consistent: bool
    crossover: Optional[int]
    counterexample: Optional[int]
    last_value: Value
    infinity_value: Optional[Value] = None

    def describe(self) -> str:
        verdict = "consistent" if self.consistent else f"INCONSISTENT at node {self.counterexample}"
        line = f"{render_concept(self.concept)}: {self.expected.value}, {verdict}"
        if self.crossover is not None:
            line += f", within tolerance from node {self.crossover}"
        if self.infinity_value is not None:
            line += f", value at infinity {format_value(self.infinity_value)}"
        return line


def _near_one(value: Value, tolerance: int) -> bool:
    if isinstance(value, LogDyadicDegree):
        return value.approximate() >= Decimal(1) - Decimal(1) / Decimal(tolerance)
    return value >= ONE - Fraction(1, tolerance)


def _near_zero(value: Value, tolerance: int) -> bool:
    if isinstance(value, LogDyadicDegree):
        return value.approximate() <= Decimal(1) / Decimal(tolerance)
    return value <= Fraction(1, tolerance)


def classify_vs_prefix(model: CanonicalModel, concept: Concept, depth: int = config.DEFAULT_PREFIX_DEPTH,
                       tolerance: int = config.DEFAULT_TOLERANCE) -> ClassificationCheck:
    """
    Compare the structural class of ``concept`` with its values on nodes
    1..depth. A class tending to 1 must end at or above 1 - 1/tolerance, a
    class tending to 0 at or below 1/tolerance; the crossover is the node
    from which every remaining value stays within tolerance.
    """
    if depth < 1 or tolerance < 1:
        raise ValueError("depth and tolerance must be positive")
    expected = tail_classify(model, concept)
    values = [eval_on_canonical(model, concept, node) for node in range(1, depth + 1)]
    within = _near_one if expected.tends_to_one else _near_zero

    crossover = None
    for node in range(depth, 0, -1):
        if not within(values[node - 1], tolerance):
            break
        crossover = node
    counterexample = None
    if crossover is None:
        counterexample = depth

    if expected is TailClass.IDENTICALLY_ZERO:
        nonzero = [node for node, value in enumerate(values, start=1) if not value.is_zero]
        if nonzero:
            counterexample = nonzero[0]
    elif expected is TailClass.POSITIVE_SUP_ONE:
        for node, value in enumerate(values, start=1):
            if value.is_zero or (node > 1 and value < values[node - 2]):
                counterexample = node
                break

    infinity_value = None
    if model.has_infinity:
        infinity_value = eval_on_canonical(model, concept, INFINITY)
        if infinity_value != (ONE if expected.tends_to_one else ZERO) and counterexample is None:
            counterexample = depth

    check = ClassificationCheck(concept, expected, counterexample is None, crossover, counterexample,
                                values[-1], infinity_value)
    if not check.consistent:
        logger.error(f"Tail class disagrees with prefix values: {check.describe()}")
    return check


# ---------------------------------------------------------------------------
# Prefix export
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrefixExport:
    interpretation: FiniteInterpretation
    caveat: str


def export_prefix(model: CanonicalModel, depth: int) -> PrefixExport:
    """
    Nodes 1..depth of the Lukasiewicz model plus its node at infinity as a
    finite interpretation, for inspection only.
    """
    if model.family is not OperatorFamily.LUKASIEWICZ:
        raise UnsupportedOperationError("Product canonical-model degrees are irrational and cannot be exported")
    if depth < 1:
        raise ValueError("prefix depth must be at least 1")
    domain = tuple(f"n{i}" for i in range(1, depth + 1)) + ("inf",)
    atom_values = {f"n{i}": model.atom_value(i) for i in range(1, depth + 1)}
    atom_values["inf"] = model.atom_value(INFINITY)
    edges = {(f"n{i}", f"n{i + 1}"): ONE for i in range(1, depth)}
    edges[("inf", "inf")] = ONE
    interpretation = FiniteInterpretation(domain, {model.atom: atom_values}, {model.role: edges},
                                          {model.individual: "n1"})
    caveat = (f"truncated after node {depth}: n{depth} has no {model.role}-successor, so "
              f"Top sub exists {model.role} . Top fails there; this prefix is not a model")
    return PrefixExport(interpretation, caveat)
