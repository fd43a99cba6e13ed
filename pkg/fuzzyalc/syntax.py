"""
Concept syntax, fuzzy axioms, knowledge bases and TBox structure analysis
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from fuzzyalc import config
from fuzzyalc.degrees import ONE, format_degree, make_degree
from fuzzyalc.errors import KnowledgeBaseError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Concepts
# ---------------------------------------------------------------------------

class Concept:
    """Base class of the concept syntax tree"""

    __slots__ = ()

    def __str__(self) -> str:
        return render_concept(self)


@dataclass(frozen=True)
class Top(Concept):
    pass


@dataclass(frozen=True)
class Bottom(Concept):
    pass


@dataclass(frozen=True)
class Atomic(Concept):
    name: str


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Not(Concept):
    operand: Concept


@dataclass(frozen=True)
class Forall(Concept):
    role: str
    filler: Concept


@dataclass(frozen=True)
class Exists(Concept):
    role: str
    filler: Concept


TOP = Top()
BOTTOM = Bottom()


def conjunction(*concepts: Concept) -> Concept:
    """Right-nested conjunction C1 and (C2 and (...))"""
    if not concepts:
        return TOP
    result = concepts[-1]
    for concept in reversed(concepts[:-1]):
        result = And(concept, result)
    return result


def disjunction(*concepts: Concept) -> Concept:
    """Right-nested disjunction; the empty disjunction is Bot"""
    if not concepts:
        return BOTTOM
    result = concepts[-1]
    for concept in reversed(concepts[:-1]):
        result = Or(concept, result)
    return result


def n_fold(concept: Concept, n: int) -> Concept:
    """The n-fold conjunction of a concept with itself"""
    if n < 1:
        raise ValueError("n-fold conjunction needs n >= 1")
    return conjunction(*([concept] * n))


def concept_names(concept: Concept) -> FrozenSet[str]:
    names: Set[str] = set()
    for node in iter_subconcepts(concept):
        if isinstance(node, Atomic):
            names.add(node.name)
    return frozenset(names)


def role_names(concept: Concept) -> FrozenSet[str]:
    names: Set[str] = set()
    for node in iter_subconcepts(concept):
        if isinstance(node, (Forall, Exists)):
            names.add(node.role)
    return frozenset(names)


def children(concept: Concept) -> Tuple[Concept, ...]:
    if isinstance(concept, (And, Or)):
        return (concept.left, concept.right)
    if isinstance(concept, Not):
        return (concept.operand,)
    if isinstance(concept, (Forall, Exists)):
        return (concept.filler,)
    return ()


def iter_subconcepts(concept: Concept):
    """Pre-order walk over every node of the tree (duplicates included)"""
    stack = [concept]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def concept_size(concept: Concept) -> int:
    return sum(1 for _ in iter_subconcepts(concept))


def concept_depth(concept: Concept) -> int:
    kids = children(concept)
    if not kids:
        return 0
    return 1 + max(concept_depth(kid) for kid in kids)


def contains_disjunction(concept: Concept) -> bool:
    return any(isinstance(node, Or) for node in iter_subconcepts(concept))


def substitute(concept: Concept, mapping: Dict[str, Concept]) -> Concept:
    """Replace every atomic concept named in ``mapping`` by its image"""
    if isinstance(concept, Atomic):
        return mapping.get(concept.name, concept)
    if isinstance(concept, And):
        return And(substitute(concept.left, mapping), substitute(concept.right, mapping))
    if isinstance(concept, Or):
        return Or(substitute(concept.left, mapping), substitute(concept.right, mapping))
    if isinstance(concept, Not):
        return Not(substitute(concept.operand, mapping))
    if isinstance(concept, Forall):
        return Forall(concept.role, substitute(concept.filler, mapping))
    if isinstance(concept, Exists):
        return Exists(concept.role, substitute(concept.filler, mapping))
    return concept


_OR_LEVEL, _AND_LEVEL, _UNARY_LEVEL = 1, 2, 3

_ASCII = {"top": "Top", "bot": "Bot", "and": " and ", "or": " or ", "not": "not ",
          "forall": "forall {} . ", "exists": "exists {} . "}
_UNICODE = {"top": "⊤", "bot": "⊥", "and": " ⊓ ", "or": " ⊔ ", "not": "¬",
            "forall": "∀{}.", "exists": "∃{}."}


def _level(concept: Concept) -> int:
    if isinstance(concept, Or):
        return _OR_LEVEL
    if isinstance(concept, And):
        return _AND_LEVEL
    return _UNARY_LEVEL


def render_concept(concept: Concept, unicode: bool = False) -> str:
    """
    Render with the fewest parentheses that still parse back to the same tree.

    Binary connectives associate to the right, so a right-nested chain
    prints flat and a left-nested operand gets parentheses.
    """
    symbols = _UNICODE if unicode else _ASCII
    return _render(concept, symbols, 0)


def _render(concept: Concept, symbols: Dict[str, str], min_level: int) -> str:
    if isinstance(concept, Top):
        text = symbols["top"]
    elif isinstance(concept, Bottom):
        text = symbols["bot"]
    elif isinstance(concept, Atomic):
        text = concept.name
    elif isinstance(concept, And):
        text = (_render(concept.left, symbols, _UNARY_LEVEL) + symbols["and"]
                + _render(concept.right, symbols, _AND_LEVEL))
    elif isinstance(concept, Or):
        text = (_render(concept.left, symbols, _AND_LEVEL) + symbols["or"]
                + _render(concept.right, symbols, _OR_LEVEL))
    elif isinstance(concept, Not):
        text = symbols["not"] + _render(concept.operand, symbols, _UNARY_LEVEL)
    elif isinstance(concept, Forall):
        text = symbols["forall"].format(concept.role) + _render(concept.filler, symbols, _UNARY_LEVEL)
    elif isinstance(concept, Exists):
        text = symbols["exists"].format(concept.role) + _render(concept.filler, symbols, _UNARY_LEVEL)
    else:
        raise TypeError(f"Not a concept: {concept!r}")
    if _level(concept) < min_level:
        return f"({text})"
    return text


# ---------------------------------------------------------------------------
# Axioms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Equivalence:
    """Sugar C == D; expands to two degree-1 inclusions"""

    left: Concept
    right: Concept

    @property
    def defined_name(self) -> Optional[str]:
        """The atomic side this equivalence defines, preferring the left"""
        if isinstance(self.left, Atomic):
            return self.left.name
        if isinstance(self.right, Atomic):
            return self.right.name
        return None

    @property
    def definition(self) -> Optional[Concept]:
        if isinstance(self.left, Atomic):
            return self.right
        if isinstance(self.right, Atomic):
            return self.left
        return None


@dataclass(frozen=True)
class ConceptEq:
    """Sugar (a : C) = d; expands to the >= and <= assertions"""

    individual: str
    concept: Concept
    degree: Fraction


@dataclass(frozen=True)
class ConceptGeq:
    individual: str
    concept: Concept
    degree: Fraction


@dataclass(frozen=True)
class ConceptLeq:
    individual: str
    concept: Concept
    degree: Fraction


@dataclass(frozen=True)
class RoleGeq:
    subject: str
    object: str
    role: str
    degree: Fraction


@dataclass(frozen=True)
class GciGeq:
    """
    Graded inclusion <sub sqsubseteq sup >= degree>.

    ``origin`` links the two halves of an expanded equivalence; it takes no
    part in equality.
    """

    sub: Concept
    sup: Concept
    degree: Fraction
    origin: Optional[Equivalence] = field(default=None, compare=False, repr=False)


AboxAxiom = Union[ConceptGeq, ConceptLeq, RoleGeq]
Axiom = Union[ConceptGeq, ConceptLeq, RoleGeq, GciGeq]
RawAxiom = Union[ConceptGeq, ConceptLeq, RoleGeq, GciGeq, ConceptEq, Equivalence]

ABOX_TYPES = (ConceptGeq, ConceptLeq, RoleGeq)


def axiom_concepts(axiom) -> Tuple[Concept, ...]:
    if isinstance(axiom, (ConceptGeq, ConceptLeq, ConceptEq)):
        return (axiom.concept,)
    if isinstance(axiom, GciGeq):
        return (axiom.sub, axiom.sup)
    if isinstance(axiom, Equivalence):
        return (axiom.left, axiom.right)
    return ()


def render_axiom(axiom, unicode: bool = False) -> str:
    """Render an axiom in the knowledge-base file syntax (or Unicode notation)"""
    def concept(c):
        return render_concept(c, unicode)

    if isinstance(axiom, (ConceptGeq, ConceptLeq, ConceptEq)):
        op = {ConceptGeq: ">=", ConceptLeq: "<=", ConceptEq: "="}[type(axiom)]
        if unicode:
            op = {">=": "≥", "<=": "≤", "=": "="}[op]
        return f"({axiom.individual} : {concept(axiom.concept)}) {op} {format_degree(axiom.degree)}"
    if isinstance(axiom, RoleGeq):
        op = "≥" if unicode else ">="
        return f"(({axiom.subject} , {axiom.object}) : {axiom.role}) {op} {format_degree(axiom.degree)}"
    if isinstance(axiom, GciGeq):
        if unicode:
            return f"⟨{concept(axiom.sub)} ⊑ {concept(axiom.sup)} ≥ {format_degree(axiom.degree)}⟩"
        return f"({concept(axiom.sub)} sub {concept(axiom.sup)}) >= {format_degree(axiom.degree)}"
    if isinstance(axiom, Equivalence):
        op = " ≡ " if unicode else " == "
        return concept(axiom.left) + op + concept(axiom.right)
    raise TypeError(f"Not an axiom: {axiom!r}")


# ---------------------------------------------------------------------------
# Knowledge bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    concepts: FrozenSet[str]
    roles: FrozenSet[str]
    individuals: FrozenSet[str]

    @property
    def names(self) -> FrozenSet[str]:
        return self.concepts | self.roles | self.individuals


@dataclass(frozen=True)
class KnowledgeBase:
    """A fuzzy ABox plus a fuzzy TBox of graded inclusions"""

    abox: Tuple[AboxAxiom, ...] = ()
    tbox: Tuple[GciGeq, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "abox", tuple(self.abox))
        object.__setattr__(self, "tbox", tuple(self.tbox))
        for axiom in self.abox:
            if not isinstance(axiom, ABOX_TYPES):
                raise KnowledgeBaseError(f"ABox may not contain {type(axiom).__name__}: {render_axiom(axiom)}")
        for axiom in self.tbox:
            if not isinstance(axiom, GciGeq):
                raise KnowledgeBaseError(f"TBox may only contain inclusions, got {type(axiom).__name__}")

    @property
    def axioms(self) -> Tuple[Axiom, ...]:
        return self.abox + self.tbox

    @property
    def signature(self) -> Signature:
        concepts: Set[str] = set()
        roles: Set[str] = set()
        individuals: Set[str] = set()
        for axiom in self.axioms:
            for concept in axiom_concepts(axiom):
                concepts |= concept_names(concept)
                roles |= role_names(concept)
            if isinstance(axiom, (ConceptGeq, ConceptLeq)):
                individuals.add(axiom.individual)
            elif isinstance(axiom, RoleGeq):
                roles.add(axiom.role)
                individuals.update((axiom.subject, axiom.object))
        return Signature(frozenset(concepts), frozenset(roles), frozenset(individuals))

    @property
    def node_count(self) -> int:
        return sum(concept_size(c) for axiom in self.axioms for c in axiom_concepts(axiom))

    def __len__(self) -> int:
        return len(self.abox) + len(self.tbox)


def expand_shorthands(items: Iterable[RawAxiom]) -> KnowledgeBase:
    """
    Rewrite sugar into the four core axiom kinds.

    (a : C) = d becomes the >= and <= pair, C == D becomes two degree-1
    inclusions tagged with their origin. Core axioms pass through unchanged,
    so the function is idempotent on its own output.
    """
    abox: List[AboxAxiom] = []
    tbox: List[GciGeq] = []
    for item in items:
        if isinstance(item, ConceptEq):
            degree = make_degree(item.degree)
            abox.append(ConceptGeq(item.individual, item.concept, degree))
            abox.append(ConceptLeq(item.individual, item.concept, degree))
        elif isinstance(item, Equivalence):
            tbox.append(GciGeq(item.left, item.right, ONE, origin=item))
            tbox.append(GciGeq(item.right, item.left, ONE, origin=item))
        elif isinstance(item, GciGeq):
            tbox.append(item)
        elif isinstance(item, ABOX_TYPES):
            abox.append(item)
        else:
            raise KnowledgeBaseError(f"Cannot expand {item!r}")
    return KnowledgeBase(tuple(abox), tuple(tbox))


def equivalence_axioms(left: Concept, right: Concept) -> Tuple[GciGeq, GciGeq]:
    return expand_shorthands([Equivalence(left, right)]).tbox


# ---------------------------------------------------------------------------
# TBox structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TBoxUnit:
    """
    One left-hand-side occurrence: an equivalence (both halves) or a lone inclusion.
    """

    axioms: Tuple[GciGeq, ...]
    defined: Optional[str]
    definition: Optional[Concept]
    degree: Fraction
    is_equivalence: bool

    def render(self, unicode: bool = False) -> str:
        if self.is_equivalence:
            return render_axiom(self.axioms[0].origin, unicode)
        return render_axiom(self.axioms[0], unicode)


def tbox_units(tbox: Sequence[GciGeq]) -> List[TBoxUnit]:
    """Group expanded equivalence halves back into their sugar"""
    units: List[TBoxUnit] = []
    consumed: Set[int] = set()
    for index, axiom in enumerate(tbox):
        if index in consumed:
            continue
        partner = _find_partner(tbox, index, consumed)
        if partner is not None:
            consumed.update((index, partner))
            origin = axiom.origin
            units.append(TBoxUnit((axiom, tbox[partner]), origin.defined_name, origin.definition, ONE, True))
            continue
        consumed.add(index)
        if isinstance(axiom.sub, Atomic):
            units.append(TBoxUnit((axiom,), axiom.sub.name, axiom.sup, axiom.degree, False))
        else:
            units.append(TBoxUnit((axiom,), None, None, axiom.degree, False))
    return units


def _find_partner(tbox: Sequence[GciGeq], index: int, consumed: Set[int]) -> Optional[int]:
    axiom = tbox[index]
    if axiom.origin is None:
        return None
    for other in range(index + 1, len(tbox)):
        candidate = tbox[other]
        if (other not in consumed and candidate.origin == axiom.origin
                and candidate.sub == axiom.sup and candidate.sup == axiom.sub):
            return other
    return None


def uses_graph(tbox: Sequence[GciGeq]) -> Dict[str, FrozenSet[str]]:
    """
    The "directly uses" relation: A -> B when A alone is on the left of an
    axiom whose right side mentions B. Every defined name is a node.
    """
    graph: Dict[str, Set[str]] = {}
    for unit in tbox_units(tbox):
        if unit.defined is None:
            continue
        graph.setdefault(unit.defined, set()).update(concept_names(unit.definition))
    return {name: frozenset(targets) for name, targets in graph.items()}


def find_cycles(graph: Dict[str, FrozenSet[str]]) -> List[Tuple[str, ...]]:
    """
    One cycle per back edge of a depth-first search, as A1, A2, ..., A1.
    Empty exactly when the uses relation is irreflexive on its closure.
    """
    white, grey, black = 0, 1, 2
    colour: Dict[str, int] = {}
    cycles: List[Tuple[str, ...]] = []
    seen: Set[FrozenSet[Tuple[str, str]]] = set()

    def visit(node: str, path: List[str]):
        colour[node] = grey
        path.append(node)
        for target in sorted(graph.get(node, ())):
            state = colour.get(target, white)
            if state == grey:
                start = path.index(target)
                cycle = tuple(path[start:]) + (target,)
                key = frozenset(zip(cycle, cycle[1:]))
                if key not in seen:
                    seen.add(key)
                    cycles.append(cycle)
            elif state == white:
                visit(target, path)
        path.pop()
        colour[node] = black

    for node in sorted(graph):
        if colour.get(node, white) == white:
            visit(node, [])
    return cycles


FORM = "form"
MULTI_DEFINITION = "multi-definition"
CYCLE = "cycle"
SUB_UNIT_DEGREE = "sub-unit-degree"


@dataclass(frozen=True)
class Violation:
    constraint: str
    detail: str
    axioms: Tuple[GciGeq, ...] = ()
    cycle: Tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"[{self.constraint}] {self.detail}"


@dataclass(frozen=True)
class TBoxClassification:
    acyclic: bool
    unfoldable: bool
    violations: Tuple[Violation, ...]

    def violations_of(self, constraint: str) -> List[Violation]:
        return [v for v in self.violations if v.constraint == constraint]


def classify_tbox(tbox: Sequence[GciGeq]) -> TBoxClassification:
    """
    Check the three acyclicity constraints and the unit-degree condition.

    An equivalence counts as a single left-hand occurrence of the name it
    defines.
    """
    violations: List[Violation] = []
    units = tbox_units(tbox)

    for unit in units:
        if unit.defined is None:
            violations.append(Violation(FORM, f"left side is not an atomic concept: {unit.render()}", unit.axioms))

    occurrences: Dict[str, List[TBoxUnit]] = {}
    for unit in units:
        if unit.defined is not None:
            occurrences.setdefault(unit.defined, []).append(unit)
    for name in sorted(occurrences):
        if len(occurrences[name]) > 1:
            axioms = tuple(ax for unit in occurrences[name] for ax in unit.axioms)
            rendered = "; ".join(unit.render() for unit in occurrences[name])
            violations.append(Violation(MULTI_DEFINITION, f"{name} is defined more than once: {rendered}", axioms))

    for cycle in find_cycles(uses_graph(tbox)):
        violations.append(Violation(CYCLE, " uses ".join(cycle), cycle=cycle))

    acyclic = not violations

    for unit in units:
        if not unit.is_equivalence and unit.degree < 1:
            violations.append(Violation(SUB_UNIT_DEGREE,
                                        f"inclusion degree {format_degree(unit.degree)} < 1: {unit.render()}",
                                        unit.axioms))

    unfoldable = acyclic and not violations
    logger.debug(f"TBox classified: acyclic={acyclic} unfoldable={unfoldable} violations={len(violations)}")
    return TBoxClassification(acyclic, unfoldable, tuple(violations))


# ---------------------------------------------------------------------------
# Fresh names
# ---------------------------------------------------------------------------

class FreshNames:
    """
    Session-local supply of fresh atomic names (A'1, A'2, ...).

    Generated names carry the reserved marker, which the parser refuses in
    user input, and additionally skip everything in ``reserved``.
    """

    def __init__(self, reserved: Iterable[str] = ()):
        self.reserved: Set[str] = set(reserved)
        self.issued: List[str] = []
        self._counter = 0

    def next(self, base: str = "A") -> str:
        while True:
            self._counter += 1
            name = f"{base}{config.FRESH_MARKER}{self._counter}"
            if name not in self.reserved:
                self.reserved.add(name)
                self.issued.append(name)
                return name

    def atom(self, base: str = "A") -> Atomic:
        return Atomic(self.next(base))


def is_fresh_name(name: str) -> bool:
    return config.FRESH_MARKER in name
