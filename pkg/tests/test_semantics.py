"""
Tests for finite interpretations and model checking
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fuzzyalc.degrees import OperatorFamily, implication, negation, tconorm, tnorm
from fuzzyalc.errors import InterpretationError
from fuzzyalc.fmp import k1, k2
from fuzzyalc.semantics import FiniteInterpretation, ModelChecker, check_axiom, check_kb, describe_witnesses, \
    eval_concept, find_witnesses, subsumption_degree, subsumption_witness
from fuzzyalc.syntax import BOTTOM, TOP, And, Atomic, ConceptGeq, ConceptLeq, Exists, Forall, GciGeq, Not, Or, \
    RoleGeq

from conftest import concepts, interpretations

FAMILIES = list(OperatorFamily)
HALF = Fraction(1, 2)
A, B = Atomic("A"), Atomic("B")


@pytest.fixture
def two_elements():
    return FiniteInterpretation(
        ("x", "y"),
        concepts={"A": {"x": Fraction(1, 4), "y": Fraction(3, 4)}, "B": {"y": HALF}},
        roles={"R": {("x", "x"): HALF, ("x", "y"): Fraction(1)}},
        individuals={"a": "x", "b": "y"},
    )


def k1_model():
    return FiniteInterpretation(
        ("e1",),
        concepts={"YoungPerson": {"e1": Fraction(1, 5)}, "Inn": {}, "Hotel": {}},
        roles={"likes": {("e1", "e1"): Fraction(4, 5)}},
        individuals={"jim": "e1", "mary": "e1"},
    )


def loop_model(value):
    return FiniteInterpretation(("x",), {"A": {"x": value}}, {"R": {("x", "x"): Fraction(1)}}, {"a": "x"})


def test_interpretation_validation():
    with pytest.raises(InterpretationError, match="nonempty"):
        FiniteInterpretation(())
    with pytest.raises(InterpretationError, match="unknown element"):
        FiniteInterpretation(("x",), {"A": {"z": HALF}})
    with pytest.raises(InterpretationError):
        FiniteInterpretation(("x",), individuals={"a": "z"})


def test_entries_equal_to_default_are_dropped():
    first = FiniteInterpretation(("x", "y"), {"A": {"x": Fraction(0), "y": HALF}})
    second = FiniteInterpretation(("x", "y"), {"A": {"y": HALF}})
    assert first == second
    assert first.concepts["A"] == {"y": HALF}


def test_defaults_and_unknown_names(two_elements):
    assert two_elements.concept_value("B", "x") == 0
    assert two_elements.concept_value("Missing", "x") == 0
    assert not two_elements.knows_concept("Missing")
    with_default = two_elements.with_concept("C", {"x": Fraction(1)}, default=HALF)
    assert with_default.concept_value("C", "y") == HALF
    assert with_default.concept_value("C", "x") == 1


def test_strict_mode_rejects_unknown_names(two_elements):
    with pytest.raises(InterpretationError, match="not interpreted"):
        eval_concept(two_elements, OperatorFamily.LUKASIEWICZ, Atomic("Missing"), "x", strict=True)
    assert eval_concept(two_elements, OperatorFamily.LUKASIEWICZ, Atomic("Missing"), "x") == 0


def test_quantifiers_use_inf_and_sup(two_elements):
    luk = OperatorFamily.LUKASIEWICZ
    # forall R . A at x: min(R(x,x) => A(x), R(x,y) => A(y)) = min(min(1, 1 - 1/2 + 1/4), 3/4)
    assert eval_concept(two_elements, luk, Forall("R", A), "x") == Fraction(3, 4)
    # exists R . A at x: max(1/2 (x) 1/4, 1 (x) 3/4) = 3/4
    assert eval_concept(two_elements, luk, Exists("R", A), "x") == Fraction(3, 4)
    # y has no successors
    assert eval_concept(two_elements, luk, Forall("R", BOTTOM), "y") == 1
    assert eval_concept(two_elements, luk, Exists("R", TOP), "y") == 0


@pytest.mark.parametrize("family", FAMILIES)
def test_connectives_follow_family(two_elements, family):
    value = eval_concept(two_elements, family, And(A, Or(B, Not(A))), "y")
    a, b = Fraction(3, 4), HALF
    checker = ModelChecker(two_elements, family)
    assert value == checker.value(And(A, Or(B, Not(A))), "y")
    assert eval_concept(two_elements, family, And(A, B), "y") == tnorm(family, a, b)


def test_subsumption_degree_and_witness(two_elements):
    luk = OperatorFamily.LUKASIEWICZ
    # A => B is 3/4 at both elements; the tie goes to x
    assert subsumption_degree(two_elements, luk, A, B) == Fraction(3, 4)
    assert subsumption_witness(two_elements, luk, A, B) == ("x", Fraction(3, 4))


def test_check_axiom_kinds(two_elements):
    luk = OperatorFamily.LUKASIEWICZ
    assert check_axiom(two_elements, luk, ConceptGeq("a", A, Fraction(1, 4))).satisfied
    assert not check_axiom(two_elements, luk, ConceptLeq("b", A, HALF)).satisfied
    assert check_axiom(two_elements, luk, RoleGeq("a", "b", "R", Fraction(1))).satisfied
    result = check_axiom(two_elements, luk, GciGeq(A, B, Fraction(4, 5)))
    assert not result.satisfied
    assert result.achieved == Fraction(3, 4)
    assert "VIOLATED" in result.describe()


def test_unmapped_individual(two_elements):
    with pytest.raises(InterpretationError, match="not mapped"):
        check_axiom(two_elements, OperatorFamily.ZADEH, ConceptGeq("c", A, HALF))


@pytest.mark.parametrize("family", FAMILIES)
def test_k1_one_element_model(family):
    assert check_kb(k1_model(), family, k1()).satisfied


def test_k2_loop_models_fail_under_lukasiewicz():
    luk = OperatorFamily.LUKASIEWICZ
    report = check_kb(loop_model(HALF), luk, k2())
    assert not report.satisfied
    first = report.first_violation
    assert first.axiom == GciGeq(A, And(Forall("R", A), Forall("R", A)), Fraction(1))
    assert first.achieved == HALF

    report = check_kb(loop_model(Fraction(1)), luk, k2())
    assert isinstance(report.first_violation.axiom, ConceptLeq)
    assert report.first_violation.achieved == 1


def test_parallel_check_keeps_order():
    luk = OperatorFamily.LUKASIEWICZ
    sequential = check_kb(loop_model(HALF), luk, k2())
    parallel = check_kb(loop_model(HALF), luk, k2(), workers=4)
    assert sequential == parallel


def test_witnesses_reproduce_values(two_elements):
    luk = OperatorFamily.LUKASIEWICZ
    concept = Forall("R", Exists("R", A))
    found = find_witnesses(two_elements, luk, concept, "x")
    checker = ModelChecker(two_elements, luk)
    outer = found[(concept, "x")]
    assert checker.value(concept, "x") == implication(luk, two_elements.role_value("R", "x", outer),
                                                      checker.value(concept.filler, outer))
    assert describe_witnesses(found)
    with pytest.raises(InterpretationError):
        find_witnesses(two_elements, luk, concept, "nowhere")


def test_witness_ties_break_to_first_element():
    interpretation = FiniteInterpretation(("x", "y", "z"), {"A": {"y": HALF, "z": HALF}},
                                          {"R": {("x", "y"): Fraction(1), ("x", "z"): Fraction(1)}})
    found = find_witnesses(interpretation, OperatorFamily.GOEDEL, Exists("R", A), "x")
    assert found[(Exists("R", A), "x")] == "y"


@given(interpretations(), concepts(), st.sampled_from(FAMILIES))
@settings(max_examples=150, deadline=None)
def test_witnesses_are_exact(interpretation, concept, family):
    checker = ModelChecker(interpretation, family)
    for (node, point), witness in find_witnesses(interpretation, family, concept, interpretation.domain[0]).items():
        degree = interpretation.role_value(node.role, point, witness)
        filler = checker.value(node.filler, witness)
        if isinstance(node, Forall):
            assert checker.value(node, point) == implication(family, degree, filler)
        else:
            assert checker.value(node, point) == tnorm(family, degree, filler)


@given(interpretations(), concepts(), st.sampled_from(FAMILIES), st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None)
def test_values_invariant_under_domain_reordering(interpretation, concept, family, rng):
    shuffled_domain = list(interpretation.domain)
    rng.shuffle(shuffled_domain)
    shuffled = FiniteInterpretation(tuple(shuffled_domain), interpretation.concepts, interpretation.roles,
                                    interpretation.individuals, interpretation.concept_defaults,
                                    interpretation.role_defaults)
    for element in interpretation.domain:
        assert eval_concept(interpretation, family, concept, element) == eval_concept(shuffled, family, concept,
                                                                                      element)


@given(interpretations(), concepts(), st.sampled_from(FAMILIES))
@settings(max_examples=100, deadline=None)
def test_values_stay_in_unit_interval(interpretation, concept, family):
    for element in interpretation.domain:
        value = eval_concept(interpretation, family, concept, element)
        assert 0 <= value <= 1


def naive_value(interpretation, family, concept, element):
    """Direct recursive reading of the semantics, without witnesses or caching"""
    if concept == TOP:
        return Fraction(1)
    if concept == BOTTOM:
        return Fraction(0)
    if isinstance(concept, Atomic):
        return interpretation.concept_value(concept.name, element)
    if isinstance(concept, Not):
        return negation(family, naive_value(interpretation, family, concept.operand, element))
    if isinstance(concept, (And, Or)):
        combine = tnorm if isinstance(concept, And) else tconorm
        return combine(family, naive_value(interpretation, family, concept.left, element),
                       naive_value(interpretation, family, concept.right, element))
    if isinstance(concept, Forall):
        return min(implication(family, interpretation.role_value(concept.role, element, other),
                               naive_value(interpretation, family, concept.filler, other))
                   for other in interpretation.domain)
    return max(tnorm(family, interpretation.role_value(concept.role, element, other),
                     naive_value(interpretation, family, concept.filler, other))
               for other in interpretation.domain)


@given(interpretations(max_size=4), concepts(max_leaves=6), st.sampled_from(FAMILIES))
@settings(max_examples=200, deadline=None)
def test_checker_agrees_with_direct_evaluation(interpretation, concept, family):
    checker = ModelChecker(interpretation, family)
    for element in interpretation.domain:
        assert checker.value(concept, element) == naive_value(interpretation, family, concept, element)


@given(interpretations(max_size=4), concepts(max_leaves=6),
       st.sampled_from([OperatorFamily.ZADEH, OperatorFamily.LUKASIEWICZ]))
@settings(max_examples=100, deadline=None)
def test_involutive_negation_cancels(interpretation, concept, family):
    checker = ModelChecker(interpretation, family)
    for element in interpretation.domain:
        assert checker.value(Not(Not(concept)), element) == checker.value(concept, element)


@given(interpretations(max_size=4), concepts(max_leaves=4), concepts(max_leaves=4), st.sampled_from(FAMILIES))
@settings(max_examples=100, deadline=None)
def test_conjunction_is_bounded_by_its_conjuncts(interpretation, left, right, family):
    checker = ModelChecker(interpretation, family)
    for element in interpretation.domain:
        both = checker.value(And(left, right), element)
        assert both <= checker.value(left, element)
        assert both <= checker.value(right, element)


@given(interpretations(max_size=4), concepts(max_leaves=4), concepts(max_leaves=4),
       st.sampled_from([OperatorFamily.LUKASIEWICZ, OperatorFamily.PRODUCT, OperatorFamily.GOEDEL]))
@settings(max_examples=150, deadline=None)
def test_full_subsumption_means_pointwise_order_for_residua(interpretation, sub, sup, family):
    checker = ModelChecker(interpretation, family)
    pointwise = all(checker.value(sub, x) <= checker.value(sup, x) for x in interpretation.domain)
    assert (subsumption_degree(interpretation, family, sub, sup) == 1) == pointwise


@given(interpretations(max_size=4), concepts(max_leaves=4), concepts(max_leaves=4))
@settings(max_examples=150, deadline=None)
def test_full_subsumption_under_kleene_dienes(interpretation, sub, sup):
    checker = ModelChecker(interpretation, OperatorFamily.ZADEH)
    expected = all(checker.value(sub, x) == 0 or checker.value(sup, x) == 1 for x in interpretation.domain)
    assert (subsumption_degree(interpretation, OperatorFamily.ZADEH, sub, sup) == 1) == expected
