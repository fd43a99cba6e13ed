"""
Tests for bounded finite-model search
"""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from fuzzyalc.degrees import OperatorFamily
from fuzzyalc.errors import ModelSearchError
from fuzzyalc.fmp import k1, k2, k2_without_recurrence
from fuzzyalc.modelsearch import SearchBounds, SearchStatus, refute_candidate, sat_search
from fuzzyalc.semantics import FiniteInterpretation, check_kb
from fuzzyalc.syntax import BOTTOM, And, Atomic, ConceptGeq, ConceptLeq, Exists, GciGeq, KnowledgeBase, RoleGeq, \
    axiom_concepts, role_names

from conftest import knowledge_bases

HALF = Fraction(1, 2)
LUK = OperatorFamily.LUKASIEWICZ
PRODUCT = OperatorFamily.PRODUCT


def test_bounds_validation():
    with pytest.raises(ModelSearchError):
        SearchBounds(max_size=0)
    with pytest.raises(ModelSearchError):
        SearchBounds(denominators=(0,))
    with pytest.raises(ModelSearchError):
        SearchBounds(budget=0)


def test_grid_contains_every_denominator():
    bounds = SearchBounds(denominators=(3, 2, 2))
    assert bounds.denominators == (2, 3)
    assert bounds.grid == (0, Fraction(1, 3), HALF, Fraction(2, 3), 1)
    assert SearchBounds(crisp_roles=True).role_grid == (0, 1)
    assert "crisp roles" in SearchBounds(crisp_roles=True).describe()


@pytest.mark.parametrize("family", list(OperatorFamily))
def test_k1_has_a_one_element_model(family):
    outcome = sat_search(k1(), family, SearchBounds(max_size=1, denominators=(1, 2, 5)))
    assert outcome.status is SearchStatus.SAT
    assert check_kb(outcome.model, family, k1()).satisfied
    assert outcome.model.domain == ("e1",)


def test_k1_first_model_under_zadeh():
    outcome = sat_search(k1(), OperatorFamily.ZADEH, SearchBounds(max_size=1, denominators=(1, 2, 5)))
    model = outcome.model
    assert model.concept_value("YoungPerson", "e1") == Fraction(1, 5)
    assert model.role_value("likes", "e1", "e1") == Fraction(4, 5)
    assert model.concept_value("Hotel", "e1") == 0
    assert model.concept_value("Inn", "e1") == 0
    assert model.individuals == {"jim": "e1", "mary": "e1"}


def test_grid_choice_shapes_the_model():
    outcome = sat_search(k1(), OperatorFamily.ZADEH, SearchBounds(max_size=1, denominators=(1, 2)))
    assert outcome.model.concept_value("YoungPerson", "e1") == HALF
    assert outcome.model.role_value("likes", "e1", "e1") == 1


@pytest.mark.parametrize("family", [LUK, PRODUCT])
def test_k2_has_no_small_model(family):
    outcome = sat_search(k2(), family, SearchBounds(max_size=2, denominators=(1, 2)))
    assert outcome.status is SearchStatus.UNSAT_WITHIN_BOUNDS
    assert outcome.model is None
    # 3 role values at size 1; 3 values of A(e2) times 3^4 role cells for each of 2 assignments at size 2
    assert outcome.statistics.enumerated == 3 + 2 * 3 * 81
    assert any("not ruled out" in note for note in outcome.notes)


@pytest.mark.parametrize("family", [LUK, PRODUCT])
def test_k2_has_no_small_model_on_quarters(family):
    outcome = sat_search(k2(), family, SearchBounds(max_size=2, denominators=(1, 2, 4)))
    assert outcome.status is SearchStatus.UNSAT_WITHIN_BOUNDS
    assert outcome.statistics.pruned > 0


@pytest.mark.slow
@pytest.mark.parametrize("family", [LUK, PRODUCT])
def test_k2_has_no_model_up_to_three_elements(family):
    outcome = sat_search(k2(), family, SearchBounds(max_size=3, denominators=(1, 2)))
    assert outcome.status is SearchStatus.UNSAT_WITHIN_BOUNDS


def test_k2_under_goedel_has_a_loop_model():
    outcome = sat_search(k2(), OperatorFamily.GOEDEL, SearchBounds(max_size=1, denominators=(1, 2)))
    assert outcome.satisfiable
    assert outcome.model.role_value("R", "e1", "e1") == 1
    assert outcome.model.concept_value("A", "e1") == HALF
    assert outcome.statistics.enumerated == 3


def test_dropping_the_recurrence_allows_finite_models():
    outcome = sat_search(k2_without_recurrence(), LUK, SearchBounds(max_size=1, denominators=(1, 2)))
    assert outcome.satisfiable


def test_every_candidate_is_enumerated_or_pruned():
    kb = KnowledgeBase((ConceptGeq("a", And(Atomic("A"), Exists("R", BOTTOM)), HALF),))
    outcome = sat_search(kb, LUK, SearchBounds(max_size=1, denominators=(1, 2)))
    assert outcome.status is SearchStatus.UNSAT_WITHIN_BOUNDS
    assert outcome.statistics.enumerated == 9
    assert outcome.statistics.pruned == 0


def test_atomic_bounds_prune_the_grid():
    kb = KnowledgeBase((ConceptGeq("a", Atomic("A"), Fraction(1)),), (GciGeq(Atomic("A"), Atomic("B"), Fraction(1)),))
    outcome = sat_search(kb, LUK, SearchBounds(max_size=1, denominators=(1, 2)))
    assert outcome.satisfiable
    # A(e1) = 1 is forced; B(e1) = 0 and 1/2 fail the role-free inclusion before any role is tried
    assert outcome.statistics.pruned == 8
    assert outcome.statistics.enumerated == 1
    assert outcome.model.concept_value("B", "e1") == 1


def test_lower_bounds_round_up_to_the_grid():
    kb = KnowledgeBase((ConceptGeq("a", Atomic("A"), Fraction(1, 3)),))
    outcome = sat_search(kb, LUK, SearchBounds(max_size=1, denominators=(2,)))
    assert outcome.satisfiable
    assert outcome.model.concept_value("A", "e1") == HALF


def test_unreachable_bounds_are_noted():
    kb = KnowledgeBase((ConceptGeq("a", Atomic("A"), Fraction(1)), ConceptLeq("a", Atomic("A"), HALF)))
    outcome = sat_search(kb, LUK, SearchBounds(max_size=1))
    assert outcome.status is SearchStatus.UNSAT_WITHIN_BOUNDS
    assert "no grid value fits the asserted bounds on A(e1)" in outcome.notes
    assert outcome.statistics.enumerated == 0


def test_budget_exhaustion():
    outcome = sat_search(k2(), LUK, SearchBounds(max_size=3, denominators=(1, 2), budget=5))
    assert outcome.status is SearchStatus.BUDGET_EXHAUSTED
    assert outcome.statistics.enumerated == 5
    assert not outcome.satisfiable
    assert outcome.to_dict()["status"] == "budget-exhausted"


def test_workers_do_not_change_results():
    bounds = SearchBounds(max_size=2, denominators=(1, 2))
    for kb, family in ((k1(), OperatorFamily.GOEDEL), (k2(), LUK)):
        sequential = sat_search(kb, family, bounds)
        parallel = sat_search(kb, family, bounds, workers=4)
        assert sequential.status is parallel.status
        assert sequential.model == parallel.model
        assert sequential.statistics.enumerated == parallel.statistics.enumerated


def test_outcome_description():
    outcome = sat_search(k1(), LUK, SearchBounds(max_size=1))
    lines = outcome.describe()
    assert lines[0] == "status:     sat"
    assert outcome.to_dict()["bounds"]["denominators"] == [1, 2]


def test_refute_candidate():
    loop = FiniteInterpretation(("x",), {"A": {"x": HALF}}, {"R": {("x", "x"): Fraction(1)}}, {"a": "x"})
    refutation = refute_candidate(k2(), LUK, loop)
    assert not refutation.satisfied
    assert refutation.describe().startswith("refuted: (A sub forall R . A and forall R . A) >= 1")

    confirmed = refute_candidate(k2(), OperatorFamily.GOEDEL, loop)
    assert confirmed.satisfied
    assert confirmed.describe() == "confirmed: all 7 axioms are satisfied"


# Pruning soundness

def one_element_candidates(kb, bounds):
    """Every one-element interpretation on the grid, with and without its role values"""
    signature = kb.signature
    concept_names, roles = sorted(signature.concepts), sorted(signature.roles)
    individuals = {name: "e1" for name in signature.individuals}
    for concept_values in product(bounds.grid, repeat=len(concept_names)):
        concept_map = {name: {"e1": value} for name, value in zip(concept_names, concept_values)}
        erased = FiniteInterpretation(("e1",), concept_map, {name: {} for name in roles}, individuals)
        for role_values in product(bounds.role_grid, repeat=len(roles)):
            role_map = {name: {("e1", "e1"): value} for name, value in zip(roles, role_values)}
            yield FiniteInterpretation(("e1",), concept_map, role_map, individuals), erased


def mentions_roles(axiom):
    return isinstance(axiom, RoleGeq) or any(role_names(concept) for concept in axiom_concepts(axiom))


@given(knowledge_bases(max_abox=3, max_tbox=2), st.sampled_from(list(OperatorFamily)))
@settings(max_examples=25, deadline=None)
def test_pruning_never_discards_a_model(kb, family):
    bounds = SearchBounds(max_size=1, denominators=(1, 2))
    role_free = KnowledgeBase(tuple(ax for ax in kb.abox if not mentions_roles(ax)),
                              tuple(ax for ax in kb.tbox if not mentions_roles(ax)))
    models = total = 0
    for candidate, erased in one_element_candidates(kb, bounds):
        total += 1
        satisfied = check_kb(candidate, family, kb).satisfied
        models += satisfied
        if not check_kb(erased, family, role_free).satisfied:
            # a rejected role-free part rejects every role completion
            assert not satisfied

    outcome = sat_search(kb, family, bounds)
    assert outcome.satisfiable == (models > 0)
    if not outcome.satisfiable:
        assert outcome.statistics.enumerated + outcome.statistics.pruned == total
