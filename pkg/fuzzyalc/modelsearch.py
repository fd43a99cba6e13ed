"""
Bounded finite-model search

Enumerates every interpretation with at most ``max_size`` elements whose
concept and role degrees lie on a finite rational grid, in a fixed
lexicographic order, and returns the first one that satisfies the knowledge
base. A negative answer only covers the searched bounds.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple

from fuzzyalc import config
from fuzzyalc.degrees import ONE, ZERO, OperatorFamily, format_degree
from fuzzyalc.errors import InterpretationError, ModelSearchError
from fuzzyalc.semantics import AxiomResult, FiniteInterpretation, ModelChecker, check_kb
from fuzzyalc.syntax import Atomic, Axiom, ConceptGeq, ConceptLeq, GciGeq, KnowledgeBase, RoleGeq, render_axiom, \
    role_names

logger = logging.getLogger(__name__)

ELEMENT_PREFIX = "e"


class SearchStatus(Enum):
    SAT = "sat"
    UNSAT_WITHIN_BOUNDS = "unsat-within-bounds"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class SearchBounds:
    """
    Domain size limit, grid denominators and an optional cap on the number
    of candidates examined. The grid is every k/d in [0, 1] for d in
    ``denominators``; 0 and 1 are always on it.
    """

    max_size: int = config.DEFAULT_MAX_SIZE
    denominators: Tuple[int, ...] = config.DEFAULT_DENOMINATORS
    budget: Optional[int] = None
    crisp_roles: bool = False

    def __post_init__(self):
        object.__setattr__(self, "denominators", tuple(sorted(set(self.denominators))))
        if self.max_size < 1:
            raise ModelSearchError(f"max size must be at least 1, got {self.max_size}")
        if not self.denominators or any(d < 1 for d in self.denominators):
            raise ModelSearchError(f"denominators must be positive integers, got {list(self.denominators)}")
        if self.budget is not None and self.budget < 1:
            raise ModelSearchError(f"budget must be positive, got {self.budget}")

    @property
    def grid(self) -> Tuple[Fraction, ...]:
        values = {ZERO, ONE}
        for d in self.denominators:
            values.update(Fraction(k, d) for k in range(d + 1))
        return tuple(sorted(values))

    @property
    def role_grid(self) -> Tuple[Fraction, ...]:
        return (ZERO, ONE) if self.crisp_roles else self.grid

    def describe(self) -> str:
        grid = ", ".join(format_degree(g) for g in self.grid)
        line = f"size <= {self.max_size}, grid {{{grid}}}"
        if self.crisp_roles:
            line += ", crisp roles"
        if self.budget is not None:
            line += f", budget {self.budget}"
        return line


@dataclass(frozen=True)
class SearchStatistics:
    enumerated: int = 0
    pruned: int = 0
    elapsed: float = 0.0
    sizes_completed: int = 0


@dataclass(frozen=True)
class SearchOutcome:
    status: SearchStatus
    model: Optional[FiniteInterpretation]
    statistics: SearchStatistics
    bounds: SearchBounds
    notes: Tuple[str, ...] = ()

    @property
    def satisfiable(self) -> bool:
        return self.status is SearchStatus.SAT

    def describe(self) -> List[str]:
        stats = self.statistics
        lines = [f"status:     {self.status.value}",
                 f"bounds:     {self.bounds.describe()}",
                 f"candidates: {stats.enumerated} examined, {stats.pruned} pruned, {stats.elapsed:.2f}s"]
        lines.extend(f"note:       {note}" for note in self.notes)
        return lines

    def to_dict(self) -> Dict:
        return {
            "status": self.status.value,
            "bounds": {
                "max_size": self.bounds.max_size,
                "denominators": list(self.bounds.denominators),
                "budget": self.bounds.budget,
                "crisp_roles": self.bounds.crisp_roles,
            },
            "statistics": {
                "enumerated": self.statistics.enumerated,
                "pruned": self.statistics.pruned,
                "elapsed": round(self.statistics.elapsed, 3),
                "sizes_completed": self.statistics.sizes_completed,
            },
            "notes": list(self.notes),
        }


class _CandidateView:
    """Mutable stand-in for a FiniteInterpretation while candidates are enumerated"""

    def __init__(self, domain: Tuple[str, ...], individuals: Dict[str, str], concepts: Sequence[str],
                 roles: Sequence[str]):
        self.domain = domain
        self.individuals = individuals
        self.concept_names = frozenset(concepts)
        self.role_names = frozenset(roles)
        self.concept_values: Dict[Tuple[str, str], Fraction] = {}
        self.role_values: Dict[Tuple[str, str, str], Fraction] = {}

    def knows_concept(self, name: str) -> bool:
        return name in self.concept_names

    def knows_role(self, name: str) -> bool:
        return name in self.role_names

    def concept_value(self, name: str, element: str) -> Fraction:
        return self.concept_values.get((name, element), ZERO)

    def role_value(self, name: str, subject: str, obj: str) -> Fraction:
        return self.role_values.get((name, subject, obj), ZERO)

    def element_of(self, individual: str) -> str:
        try:
            return self.individuals[individual]
        except KeyError:
            raise InterpretationError(f"individual {individual} is not mapped to any domain element") from None

    def freeze(self) -> FiniteInterpretation:
        concepts = {name: {} for name in self.concept_names}
        for (name, element), value in self.concept_values.items():
            concepts[name][element] = value
        roles = {name: {} for name in self.role_names}
        for (name, subject, obj), value in self.role_values.items():
            roles[name][(subject, obj)] = value
        return FiniteInterpretation(self.domain, concepts, roles, dict(self.individuals))


@dataclass
class _BranchResult:
    enumerated: int = 0
    pruned: int = 0
    model: Optional[FiniteInterpretation] = None
    exhausted: bool = False
    notes: List[str] = field(default_factory=list)


def _mentions_roles(axiom: Axiom) -> bool:
    if isinstance(axiom, RoleGeq):
        return True
    if isinstance(axiom, (ConceptGeq, ConceptLeq)):
        return bool(role_names(axiom.concept))
    if isinstance(axiom, GciGeq):
        return bool(role_names(axiom.sub) or role_names(axiom.sup))
    return True


class ModelSearch:
    """One bounded search over a fixed knowledge base, family and bounds"""

    def __init__(self, kb: KnowledgeBase, family: OperatorFamily, bounds: SearchBounds):
        self.kb = kb
        self.family = family
        self.bounds = bounds
        signature = kb.signature
        self.concepts = sorted(signature.concepts)
        self.roles = sorted(signature.roles)
        self.individuals = sorted(signature.individuals)
        self.grid = bounds.grid
        self.role_grid = bounds.role_grid
        self.role_free = [axiom for axiom in kb.axioms if not _mentions_roles(axiom)]
        self.role_bound = [axiom for axiom in kb.axioms if _mentions_roles(axiom)]

    def run(self, workers: int = config.DEFAULT_SEARCH_WORKERS) -> SearchOutcome:
        started = time.perf_counter()
        enumerated = pruned = 0
        notes: List[str] = []
        logger.info(f"Model search under {self.family.value}: {len(self.concepts)} concepts, "
                    f"{len(self.roles)} roles, {len(self.individuals)} individuals, {self.bounds.describe()}")
        if workers > 1 and self.bounds.budget is not None:
            logger.info("A budget makes the candidate order observable; searching with one worker")
            workers = 1

        for size in range(1, self.bounds.max_size + 1):
            domain = tuple(f"{ELEMENT_PREFIX}{k}" for k in range(1, size + 1))
            assignments = list(product(range(size), repeat=len(self.individuals)))
            results = self._run_size(domain, assignments, workers, enumerated)
            for result in results:
                enumerated += result.enumerated
                pruned += result.pruned
                for note in result.notes:
                    if note not in notes:
                        notes.append(note)
                if result.model is not None:
                    return self._sat(result.model, enumerated, pruned, started, size - 1, notes)
                if result.exhausted:
                    statistics = SearchStatistics(enumerated, pruned, time.perf_counter() - started, size - 1)
                    notes.append(f"budget of {self.bounds.budget} candidates exhausted at size {size}")
                    logger.warning(notes[-1])
                    return SearchOutcome(SearchStatus.BUDGET_EXHAUSTED, None, statistics, self.bounds, tuple(notes))
            logger.info(f"size {size}: no model ({enumerated} candidates examined, {pruned} pruned so far)")

        notes.append(f"no model with at most {self.bounds.max_size} elements on the searched grid; "
                     f"models outside these bounds are not ruled out")
        statistics = SearchStatistics(enumerated, pruned, time.perf_counter() - started, self.bounds.max_size)
        return SearchOutcome(SearchStatus.UNSAT_WITHIN_BOUNDS, None, statistics, self.bounds, tuple(notes))

    def _run_size(self, domain: Tuple[str, ...], assignments: List[Tuple[int, ...]], workers: int,
                  enumerated: int) -> List[_BranchResult]:
        """Branch results in assignment order, cut after the first branch that found a model or ran dry"""
        if workers > 1 and len(assignments) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda assignment: self._branch(domain, assignment, None), assignments))
            for index, result in enumerate(results):
                if result.model is not None:
                    return results[:index + 1]
            return results

        results = []
        for assignment in assignments:
            limit = None
            if self.bounds.budget is not None:
                limit = self.bounds.budget - enumerated
            result = self._branch(domain, assignment, limit)
            enumerated += result.enumerated
            results.append(result)
            if result.model is not None or result.exhausted:
                break
        return results

    def _limits(self, individuals: Dict[str, str]):
        """Grid cells restricted by atomic assertions under one individual assignment"""
        concept_limits: Dict[Tuple[str, str], List[Fraction]] = {}
        role_limits: Dict[Tuple[str, str, str], List[Fraction]] = {}
        for axiom in self.kb.abox:
            if isinstance(axiom, (ConceptGeq, ConceptLeq)) and isinstance(axiom.concept, Atomic):
                cell = (axiom.concept.name, individuals[axiom.individual])
                low, high = concept_limits.get(cell, [ZERO, ONE])
                if isinstance(axiom, ConceptGeq):
                    low = max(low, axiom.degree)
                else:
                    high = min(high, axiom.degree)
                concept_limits[cell] = [low, high]
            elif isinstance(axiom, RoleGeq):
                cell = (axiom.role, individuals[axiom.subject], individuals[axiom.object])
                low, high = role_limits.get(cell, [ZERO, ONE])
                role_limits[cell] = [max(low, axiom.degree), high]
        return concept_limits, role_limits

    def _branch(self, domain: Tuple[str, ...], assignment: Tuple[int, ...], limit: Optional[int]) -> _BranchResult:
        result = _BranchResult()
        individuals = {name: domain[index] for name, index in zip(self.individuals, assignment)}
        concept_cells = [(name, x) for name in self.concepts for x in domain]
        role_cells = [(name, x, y) for name in self.roles for x in domain for y in domain]
        concept_limits, role_limits = self._limits(individuals)

        concept_choices = []
        for cell in concept_cells:
            low, high = concept_limits.get(cell, (ZERO, ONE))
            concept_choices.append([g for g in self.grid if low <= g <= high])
        role_choices = []
        for cell in role_cells:
            low, high = role_limits.get(cell, (ZERO, ONE))
            role_choices.append([g for g in self.role_grid if low <= g <= high])

        unrestricted = len(self.grid) ** len(concept_cells) * len(self.role_grid) ** len(role_cells)
        restricted = prod(len(c) for c in concept_choices) * prod(len(c) for c in role_choices)
        result.pruned += unrestricted - restricted
        if restricted == 0:
            for cell, choices in zip(concept_cells + role_cells, concept_choices + role_choices):
                if not choices:
                    name, element = cell[0], ", ".join(cell[1:])
                    result.notes.append(f"no grid value fits the asserted bounds on {name}({element})")
            return result

        role_total = prod(len(c) for c in role_choices)
        view = _CandidateView(domain, individuals, self.concepts, self.roles)
        for concept_values in product(*concept_choices):
            view.concept_values = dict(zip(concept_cells, concept_values))
            view.role_values = {}
            if self.role_free and ModelChecker(view, self.family).first_failure(self.role_free) is not None:
                result.pruned += role_total
                continue
            for role_values in product(*role_choices):
                if limit is not None and result.enumerated >= limit:
                    result.exhausted = True
                    return result
                view.role_values = dict(zip(role_cells, role_values))
                result.enumerated += 1
                if result.enumerated % config.PROGRESS_EVERY == 0:
                    logger.info(f"size {len(domain)}, assignment {assignment}: "
                                f"{result.enumerated} candidates examined")
                if ModelChecker(view, self.family).first_failure(self.role_bound) is None:
                    result.model = view.freeze()
                    return result
        return result

    def _sat(self, model: FiniteInterpretation, enumerated: int, pruned: int, started: float,
             sizes_completed: int, notes: List[str]) -> SearchOutcome:
        report = check_kb(model, self.family, self.kb)
        if not report.satisfied:
            raise ModelSearchError(f"found model fails re-verification: {report.first_violation.describe()}")
        statistics = SearchStatistics(enumerated, pruned, time.perf_counter() - started, sizes_completed)
        logger.info(f"Found a model with {len(model.domain)} elements after {enumerated} candidates")
        return SearchOutcome(SearchStatus.SAT, model, statistics, self.bounds, tuple(notes))


def sat_search(kb: KnowledgeBase, family: OperatorFamily, bounds: Optional[SearchBounds] = None,
               workers: int = config.DEFAULT_SEARCH_WORKERS) -> SearchOutcome:
    return ModelSearch(kb, family, bounds or SearchBounds()).run(workers)


@dataclass(frozen=True)
class Refutation:
    satisfied: bool
    violation: Optional[AxiomResult]
    checked: int

    def describe(self) -> str:
        if self.satisfied:
            return f"confirmed: all {self.checked} axioms are satisfied"
        return (f"refuted: {render_axiom(self.violation.axiom)} is violated "
                f"(achieved {format_degree(self.violation.achieved)}, "
                f"required {'<=' if isinstance(self.violation.axiom, ConceptLeq) else '>='} "
                f"{format_degree(self.violation.required)})")


def refute_candidate(kb: KnowledgeBase, family: OperatorFamily, interpretation: FiniteInterpretation) -> Refutation:
    """First violated axiom of ``kb`` in ``interpretation``, or a confirmation"""
    report = check_kb(interpretation, family, kb)
    return Refutation(report.satisfied, report.first_violation, len(report.results))
