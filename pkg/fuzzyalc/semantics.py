"""
Finite fuzzy interpretations and exact model checking
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from fuzzyalc.degrees import ONE, ZERO, OperatorFamily, format_degree, implication, make_degree, negation, \
    tconorm, tnorm
from fuzzyalc.errors import InterpretationError
from fuzzyalc.syntax import And, Atomic, Axiom, Bottom, Concept, ConceptGeq, ConceptLeq, Exists, Forall, GciGeq, \
    KnowledgeBase, Not, Or, RoleGeq, Top, children, render_axiom, render_concept

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


@dataclass(frozen=True)
class FiniteInterpretation:
    """
    A finite domain with exact concept/role degrees and individual assignments.

    Names missing from ``concepts``/``roles`` are unknown to the
    interpretation; listed names fall back to their map default (0 unless
    stated) for elements without an entry. Entries equal to the default are
    dropped so that equal interpretations compare and serialize equally.
    """

    domain: Tuple[str, ...]
    concepts: Mapping[str, Mapping[str, Fraction]] = field(default_factory=dict)
    roles: Mapping[str, Mapping[Pair, Fraction]] = field(default_factory=dict)
    individuals: Mapping[str, str] = field(default_factory=dict)
    concept_defaults: Mapping[str, Fraction] = field(default_factory=dict)
    role_defaults: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        domain = tuple(self.domain)
        if not domain:
            raise InterpretationError("domain must be nonempty")
        if len(set(domain)) != len(domain):
            raise InterpretationError("domain elements must be distinct")
        members = set(domain)

        concepts = {}
        concept_defaults = {}
        for name in sorted(set(self.concepts) | set(self.concept_defaults)):
            default = make_degree(self.concept_defaults.get(name, ZERO))
            values = {}
            for element, value in self.concepts.get(name, {}).items():
                if element not in members:
                    raise InterpretationError(f"concept {name} refers to unknown element {element!r}")
                value = make_degree(value)
                if value != default:
                    values[element] = value
            concepts[name] = {x: values[x] for x in domain if x in values}
            concept_defaults[name] = default

        roles = {}
        role_defaults = {}
        for name in sorted(set(self.roles) | set(self.role_defaults)):
            default = make_degree(self.role_defaults.get(name, ZERO))
            values = {}
            for pair, value in self.roles.get(name, {}).items():
                for element in pair:
                    if element not in members:
                        raise InterpretationError(f"role {name} refers to unknown element {element!r}")
                value = make_degree(value)
                if value != default:
                    values[tuple(pair)] = value
            roles[name] = {(x, y): values[(x, y)] for x in domain for y in domain if (x, y) in values}
            role_defaults[name] = default

        individuals = {}
        for name in sorted(self.individuals):
            element = self.individuals[name]
            if element not in members:
                raise InterpretationError(f"individual {name} is mapped to unknown element {element!r}")
            individuals[name] = element

        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "concepts", concepts)
        object.__setattr__(self, "concept_defaults", concept_defaults)
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "role_defaults", role_defaults)
        object.__setattr__(self, "individuals", individuals)

    def knows_concept(self, name: str) -> bool:
        return name in self.concept_defaults

    def knows_role(self, name: str) -> bool:
        return name in self.role_defaults

    def concept_value(self, name: str, element: str) -> Fraction:
        if name not in self.concept_defaults:
            return ZERO
        return self.concepts[name].get(element, self.concept_defaults[name])

    def role_value(self, name: str, subject: str, obj: str) -> Fraction:
        if name not in self.role_defaults:
            return ZERO
        return self.roles[name].get((subject, obj), self.role_defaults[name])

    def element_of(self, individual: str) -> str:
        try:
            return self.individuals[individual]
        except KeyError:
            raise InterpretationError(f"individual {individual} is not mapped to any domain element") from None

    def with_concept(self, name: str, values: Mapping[str, Fraction],
                     default: Fraction = ZERO) -> "FiniteInterpretation":
        """Copy with one concept (re)defined"""
        concepts = dict(self.concepts)
        defaults = dict(self.concept_defaults)
        concepts[name] = dict(values)
        defaults[name] = default
        return FiniteInterpretation(self.domain, concepts, self.roles, self.individuals, defaults,
                                    self.role_defaults)


@dataclass(frozen=True)
class AxiomResult:
    axiom: Axiom
    satisfied: bool
    achieved: Fraction
    required: Fraction

    def describe(self) -> str:
        verdict = "ok" if self.satisfied else "VIOLATED"
        relation = "<=" if isinstance(self.axiom, ConceptLeq) else ">="
        return (f"{verdict:8} {render_axiom(self.axiom)}  "
                f"(achieved {format_degree(self.achieved)}, required {relation} {format_degree(self.required)})")


@dataclass(frozen=True)
class SatisfactionReport:
    results: Tuple[AxiomResult, ...]

    @property
    def satisfied(self) -> bool:
        return all(result.satisfied for result in self.results)

    @property
    def violations(self) -> List[AxiomResult]:
        return [result for result in self.results if not result.satisfied]

    @property
    def first_violation(self) -> Optional[AxiomResult]:
        for result in self.results:
            if not result.satisfied:
                return result
        return None


class ModelChecker:
    """
    Evaluates concepts and axioms over one interpretation and one family.

    Values are memoized per (concept, element) for the lifetime of the
    checker; the interpretation is immutable, so this never changes results.
    """

    def __init__(self, interpretation: FiniteInterpretation, family: OperatorFamily, strict: bool = False):
        self.interpretation = interpretation
        self.family = family
        self.strict = strict
        self._cache: Dict[Tuple[Concept, str], Fraction] = {}
        self._reported: set = set()

    def _unknown(self, kind: str, name: str):
        if self.strict:
            raise InterpretationError(f"{kind} {name} is not interpreted")
        if (kind, name) not in self._reported:
            self._reported.add((kind, name))
            logger.warning(f"{kind} {name} is not interpreted; treating it as constant 0")

    def value(self, concept: Concept, element: str) -> Fraction:
        """C^I(x) per the fuzzy ALC semantics; inf/sup are min/max over the domain"""
        key = (concept, element)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        result = self._evaluate(concept, element)
        self._cache[key] = result
        return result

    def _evaluate(self, concept: Concept, element: str) -> Fraction:
        family = self.family
        interpretation = self.interpretation
        if isinstance(concept, Top):
            return ONE
        if isinstance(concept, Bottom):
            return ZERO
        if isinstance(concept, Atomic):
            if not interpretation.knows_concept(concept.name):
                self._unknown("concept", concept.name)
            return interpretation.concept_value(concept.name, element)
        if isinstance(concept, And):
            return tnorm(family, self.value(concept.left, element), self.value(concept.right, element))
        if isinstance(concept, Or):
            return tconorm(family, self.value(concept.left, element), self.value(concept.right, element))
        if isinstance(concept, Not):
            return negation(family, self.value(concept.operand, element))
        if isinstance(concept, (Forall, Exists)):
            if not interpretation.knows_role(concept.role):
                self._unknown("role", concept.role)
            return self._quantifier(concept, element)[1]
        raise TypeError(f"Not a concept: {concept!r}")

    def _quantifier(self, concept, element: str) -> Tuple[str, Fraction]:
        """Witness and value of a restriction at ``element`` (least domain index on ties)"""
        interpretation = self.interpretation
        best_element = None
        best_value = None
        universal = isinstance(concept, Forall)
        for other in interpretation.domain:
            degree = interpretation.role_value(concept.role, element, other)
            filler = self.value(concept.filler, other)
            if universal:
                candidate = implication(self.family, degree, filler)
                better = best_value is None or candidate < best_value
            else:
                candidate = tnorm(self.family, degree, filler)
                better = best_value is None or candidate > best_value
            if better:
                best_element, best_value = other, candidate
        return best_element, best_value

    def subsumption_witness(self, sub: Concept, sup: Concept) -> Tuple[str, Fraction]:
        best_element = None
        best_value = None
        for element in self.interpretation.domain:
            candidate = implication(self.family, self.value(sub, element), self.value(sup, element))
            if best_value is None or candidate < best_value:
                best_element, best_value = element, candidate
        return best_element, best_value

    def subsumption_degree(self, sub: Concept, sup: Concept) -> Fraction:
        """(C sqsubseteq D)^I = min over the domain of C(x) => D(x)"""
        return self.subsumption_witness(sub, sup)[1]

    def check_axiom(self, axiom: Axiom) -> AxiomResult:
        if isinstance(axiom, ConceptGeq):
            achieved = self.value(axiom.concept, self.interpretation.element_of(axiom.individual))
            return AxiomResult(axiom, achieved >= axiom.degree, achieved, axiom.degree)
        if isinstance(axiom, ConceptLeq):
            achieved = self.value(axiom.concept, self.interpretation.element_of(axiom.individual))
            return AxiomResult(axiom, achieved <= axiom.degree, achieved, axiom.degree)
        if isinstance(axiom, RoleGeq):
            subject = self.interpretation.element_of(axiom.subject)
            obj = self.interpretation.element_of(axiom.object)
            if not self.interpretation.knows_role(axiom.role):
                self._unknown("role", axiom.role)
            achieved = self.interpretation.role_value(axiom.role, subject, obj)
            return AxiomResult(axiom, achieved >= axiom.degree, achieved, axiom.degree)
        if isinstance(axiom, GciGeq):
            achieved = self.subsumption_degree(axiom.sub, axiom.sup)
            return AxiomResult(axiom, achieved >= axiom.degree, achieved, axiom.degree)
        raise TypeError(f"Not an axiom: {axiom!r}")

    def check_all(self, axioms: Sequence[Axiom], workers: int = 1) -> SatisfactionReport:
        if workers > 1 and len(axioms) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(self.check_axiom, axioms))
        else:
            results = [self.check_axiom(axiom) for axiom in axioms]
        return SatisfactionReport(tuple(results))

    def first_failure(self, axioms: Sequence[Axiom]) -> Optional[AxiomResult]:
        """Check in order and stop at the first violated axiom"""
        for axiom in axioms:
            result = self.check_axiom(axiom)
            if not result.satisfied:
                return result
        return None

    def witnesses(self, concept: Concept, element: str) -> Dict[Tuple[Concept, str], str]:
        """
        For every restriction reached while evaluating ``concept`` at
        ``element``, the element attaining its inf/sup at each evaluation point.
        """
        found: Dict[Tuple[Concept, str], str] = {}
        visited = set()
        stack = [(concept, element)]
        domain = self.interpretation.domain
        while stack:
            node, point = stack.pop()
            if (node, point) in visited:
                continue
            visited.add((node, point))
            if isinstance(node, (Forall, Exists)):
                found[(node, point)] = self._quantifier(node, point)[0]
                stack.extend((node.filler, other) for other in domain)
            else:
                stack.extend((kid, point) for kid in children(node))
        return found


def eval_concept(interpretation: FiniteInterpretation, family: OperatorFamily, concept: Concept,
                 element: str, strict: bool = False) -> Fraction:
    if element not in interpretation.domain:
        raise InterpretationError(f"{element!r} is not a domain element")
    return ModelChecker(interpretation, family, strict).value(concept, element)


def subsumption_degree(interpretation: FiniteInterpretation, family: OperatorFamily,
                       sub: Concept, sup: Concept) -> Fraction:
    return ModelChecker(interpretation, family).subsumption_degree(sub, sup)


def subsumption_witness(interpretation: FiniteInterpretation, family: OperatorFamily,
                        sub: Concept, sup: Concept) -> Tuple[str, Fraction]:
    return ModelChecker(interpretation, family).subsumption_witness(sub, sup)


def check_axiom(interpretation: FiniteInterpretation, family: OperatorFamily, axiom: Axiom,
                strict: bool = False) -> AxiomResult:
    return ModelChecker(interpretation, family, strict).check_axiom(axiom)


def check_kb(interpretation: FiniteInterpretation, family: OperatorFamily, kb: KnowledgeBase,
             strict: bool = False, workers: int = 1) -> SatisfactionReport:
    """Check every axiom; one shared memo table serves the whole knowledge base"""
    report = ModelChecker(interpretation, family, strict).check_all(kb.axioms, workers)
    logger.debug(f"Checked {len(report.results)} axioms: {len(report.violations)} violated")
    return report


def find_witnesses(interpretation: FiniteInterpretation, family: OperatorFamily, concept: Concept,
                   element: str) -> Dict[Tuple[Concept, str], str]:
    if element not in interpretation.domain:
        raise InterpretationError(f"{element!r} is not a domain element")
    return ModelChecker(interpretation, family).witnesses(concept, element)


def describe_witnesses(witnesses: Dict[Tuple[Concept, str], str]) -> List[str]:
    return [f"{render_concept(concept)} at {point}: {witness}"
            for (concept, point), witness in sorted(witnesses.items(), key=lambda item: (str(item[0][0]), item[0][1]))]
