"""
Tests for threshold gadgets, GCI encodings, unfolding and model lifting
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fuzzyalc.degrees import OperatorFamily
from fuzzyalc.errors import GadgetError, TransformPreconditionError, UnsupportedFamilyError
from fuzzyalc.fmp import k1, k2
from fuzzyalc.modelsearch import SearchBounds, SearchStatus, sat_search
from fuzzyalc.semantics import FiniteInterpretation, ModelChecker, check_kb, subsumption_degree
from fuzzyalc.syntax import SUB_UNIT_DEGREE, And, Atomic, ConceptGeq, ConceptLeq, Equivalence, Exists, Forall, \
    FreshNames, GciGeq, KnowledgeBase, Not, Or, Signature, expand_shorthands, render_concept
from fuzzyalc.transform import MIN_ENCODING, THRESHOLD_ABSORPTION, TNORM_ENCODING, UNFOLD, VACUOUS, GadgetSpec, \
    TraceStep, TransformTrace, acyclic_to_abox, acyclic_to_unfoldable, describe_gadget, drop_vacuous, \
    encode_gci_min, encode_gci_tnorm, gadget_value, lift_min_model, lift_threshold_model, lift_unfolded_model, \
    min_concept, negate_upper_bounds, replay_trace, synthesize_gadget, unfold_to_abox, verify_gadget
from fuzzyalc.utils.parser import parse_kb

from conftest import concepts, interpretations

LUK = OperatorFamily.LUKASIEWICZ
A, B, C = Atomic("A"), Atomic("B"), Atomic("C")
HALF = Fraction(1, 2)


def all_alphas(max_denominator: int = 12):
    return sorted({Fraction(p, q) for q in range(2, max_denominator + 1) for p in range(1, q)})


def unfoldable_kb():
    return expand_shorthands([
        ConceptGeq("a", A, HALF),
        GciGeq(B, Forall("R", C), Fraction(1)),
        Equivalence(A, And(B, C)),
    ])


# Gadgets

def test_gadget_two_thirds():
    gadget = synthesize_gadget("2/3")
    assert render_concept(gadget.concept) == "(A' and A') and not (A' and A' and A')"
    assert render_concept(gadget.concept, unicode=True) == "(A' ⊓ A') ⊓ ¬(A' ⊓ A' ⊓ A')"
    assert gadget.bound == Fraction(1, 3)
    assert gadget.witness_input == Fraction(2, 3)
    report = verify_gadget(gadget, 3)
    assert report.passed
    assert report.max_value == Fraction(1, 3)
    assert report.argmax == Fraction(2, 3)
    assert report.points_checked == 10


@pytest.mark.parametrize("alpha, witness", [("1/2", Fraction(1, 2)), ("3/4", Fraction(3, 4))])
def test_gadget_small_examples(alpha, witness):
    gadget = synthesize_gadget(alpha)
    assert gadget.witness_input == witness
    assert gadget_value(gadget, witness) == 1 - Fraction(alpha)
    assert verify_gadget(gadget, gadget.alpha.denominator).passed


def test_every_gadget_up_to_denominator_twelve():
    for alpha in all_alphas():
        gadget = synthesize_gadget(alpha)
        report = verify_gadget(gadget, alpha.denominator)
        assert report.passed, report.describe()
        assert report.witness_value == 1 - alpha


def test_gadget_edge_degrees():
    with pytest.raises(GadgetError, match="vacuous"):
        synthesize_gadget(0)
    with pytest.raises(GadgetError, match="unchanged"):
        synthesize_gadget(1)


def test_sweep_must_reach_the_denominator():
    with pytest.raises(GadgetError):
        verify_gadget(synthesize_gadget("2/3"), 2)


def test_corrupted_gadget_is_caught():
    broken = GadgetSpec(Fraction(2, 3), Atomic("A'"), "A'", Fraction(2, 3), Fraction(1, 3))
    report = verify_gadget(broken, 3)
    assert not report.passed
    assert report.counterexample == 1
    assert "FAIL" in report.describe()


def test_describe_gadget_lines():
    lines = describe_gadget(synthesize_gadget("2/3"))
    assert len(lines) == 5
    assert lines[0].endswith("2/3")
    assert lines[-1].endswith("2/3")


# Threshold absorption

def test_threshold_absorption_on_k1():
    result, trace = acyclic_to_unfoldable(k1())
    gadget = synthesize_gadget(HALF, "A'1")
    assert result.abox == k1().abox
    assert result.tbox == (GciGeq(Atomic("Inn"), Or(Atomic("Hotel"), gadget.concept), Fraction(1)),)
    assert [step.lemma for step in trace.steps] == [THRESHOLD_ABSORPTION]
    assert trace.fresh_names == ("A'1",)
    assert replay_trace(k1(), trace) == result


def test_absorption_needs_lukasiewicz():
    with pytest.raises(UnsupportedFamilyError):
        acyclic_to_unfoldable(k1(), OperatorFamily.ZADEH)


@pytest.mark.parametrize("family", list(OperatorFamily))
def test_vacuous_sub_unit_inclusions_need_no_absorption(family):
    kb = KnowledgeBase((ConceptGeq("a", B, HALF),),
                       (GciGeq(A, C, Fraction(0)), GciGeq(B, Exists("R", C), Fraction(1))))
    result, trace = acyclic_to_abox(kb, "tnorm", family)
    assert result.tbox == ()
    assert result.abox == (ConceptGeq("a", And(Atomic("A'1"), Exists("R", C)), HALF),)
    assert [step.lemma for step in trace.steps] == [VACUOUS, TNORM_ENCODING, UNFOLD]


def test_absorption_rejects_cyclic_tbox():
    with pytest.raises(TransformPreconditionError) as excinfo:
        acyclic_to_unfoldable(k2())
    assert excinfo.value.violations


def test_lifted_threshold_model_satisfies_absorbed_kb():
    model = FiniteInterpretation(
        ("e1",),
        {"YoungPerson": {"e1": Fraction(1, 5)}, "Inn": {"e1": Fraction(1)}, "Hotel": {"e1": HALF}},
        {"likes": {("e1", "e1"): Fraction(4, 5)}},
        {"jim": "e1", "mary": "e1"},
    )
    assert check_kb(model, LUK, k1()).satisfied
    result, trace = acyclic_to_unfoldable(k1())
    assert not check_kb(model, LUK, result).satisfied
    lifted = lift_threshold_model(model, trace)
    assert lifted.concept_value("A'1", "e1") == HALF
    assert check_kb(lifted, LUK, result).satisfied


def test_vacuous_inclusions_are_dropped():
    kb = KnowledgeBase((), (GciGeq(A, B, Fraction(0)), GciGeq(A, C, Fraction(1))))
    result, trace = drop_vacuous(kb)
    assert result.tbox == (GciGeq(A, C, Fraction(1)),)
    assert trace.axioms_before == 2 and trace.axioms_after == 1


# Encodings and unfolding

def test_tnorm_encoding_replaces_inclusion():
    gci = GciGeq(B, Forall("R", C), Fraction(1))
    result = encode_gci_tnorm(KnowledgeBase((), (gci,)), gci)
    fresh = Atomic("A'1")
    assert result.tbox == (GciGeq(B, And(fresh, Forall("R", C)), Fraction(1)),
                           GciGeq(And(fresh, Forall("R", C)), B, Fraction(1)))


def test_encoding_preconditions():
    gci = GciGeq(B, C, HALF)
    with pytest.raises(TransformPreconditionError):
        encode_gci_tnorm(KnowledgeBase((), (gci,)), gci)
    with pytest.raises(TransformPreconditionError):
        encode_gci_tnorm(KnowledgeBase(), GciGeq(B, C, Fraction(1)))


def test_min_encoding_and_product():
    assert min_concept(LUK, A, B) == And(A, Or(Not(A), B))
    assert min_concept(OperatorFamily.GOEDEL, A, B) == And(A, B)
    gci = GciGeq(B, C, Fraction(1))
    with pytest.raises(UnsupportedFamilyError, match="min not definable"):
        encode_gci_min(KnowledgeBase((), (gci,)), gci, OperatorFamily.PRODUCT)
    with pytest.raises(UnsupportedFamilyError):
        unfold_to_abox(KnowledgeBase((), (gci,)), "min", OperatorFamily.PRODUCT)


def test_unfold_small_kb():
    kb = unfoldable_kb()
    result, trace = unfold_to_abox(kb)
    fresh = Atomic("A'1")
    assert result.tbox == ()
    assert result.abox == (ConceptGeq("a", And(And(fresh, Forall("R", C)), C), HALF),)
    assert [step.lemma for step in trace.steps] == [TNORM_ENCODING, UNFOLD, UNFOLD]
    assert replay_trace(kb, trace) == result
    assert "tnorm-encoding" in trace.render()


def test_unfold_with_min_encoding():
    result, trace = unfold_to_abox(unfoldable_kb(), "min", OperatorFamily.GOEDEL)
    assert result.tbox == ()
    assert trace.steps[0].lemma == MIN_ENCODING


def test_unfold_rejects_sub_unit_degrees():
    with pytest.raises(TransformPreconditionError) as excinfo:
        unfold_to_abox(k1())
    assert [v.constraint for v in excinfo.value.violations] == [SUB_UNIT_DEGREE]


def test_acyclic_to_abox_on_k1():
    result, trace = acyclic_to_abox(k1())
    assert result.tbox == ()
    assert result.abox == k1().abox
    assert trace.fresh_names == ("A'1", "A'2")
    assert trace.fresh_collisions(k1().signature) == []


def test_shared_fresh_supply_never_repeats():
    names = FreshNames()
    first, _ = acyclic_to_unfoldable(k1(), names=names)
    second, _ = acyclic_to_unfoldable(k1(), names=names)
    assert first != second
    assert names.issued == ["A'1", "A'2"]


def test_fresh_collisions_are_reported():
    step = TraceStep(THRESHOLD_ABSORPTION, (), (), ("A", "A"))
    trace = TransformTrace((step,), 0, 0, 0, 0)
    problems = trace.fresh_collisions(Signature(frozenset({"A"}), frozenset(), frozenset()))
    assert len(problems) == 3


def test_replay_rejects_foreign_trace():
    _, trace = acyclic_to_unfoldable(k1())
    with pytest.raises(TransformPreconditionError, match="does not apply"):
        replay_trace(KnowledgeBase(), trace)


def test_negate_upper_bounds():
    kb = KnowledgeBase((ConceptLeq("a", A, Fraction(1, 4)), ConceptGeq("a", B, HALF)))
    result, trace = negate_upper_bounds(kb, LUK)
    assert result.abox == (ConceptGeq("a", Not(A), Fraction(3, 4)), ConceptGeq("a", B, HALF))
    assert len(trace.steps) == 1
    with pytest.raises(UnsupportedFamilyError):
        negate_upper_bounds(kb, OperatorFamily.PRODUCT)


def test_lift_min_model():
    interpretation = FiniteInterpretation(("x", "y"), {"B": {"x": HALF}, "C": {"x": Fraction(3, 4), "y": HALF}})
    gci = GciGeq(B, C, Fraction(1))
    result = encode_gci_min(KnowledgeBase((), (gci,)), gci, LUK)
    lifted = lift_min_model(interpretation, LUK, gci, "A'1")
    assert check_kb(lifted, LUK, result).satisfied


# Equisatisfiability by lifting

@st.composite
def satisfied_acyclic_kbs(draw):
    """An interpretation plus an acyclic knowledge base it satisfies, degrees read off the interpretation"""
    interpretation = draw(interpretations(max_size=2))
    checker = ModelChecker(interpretation, LUK)
    hotel_sup = draw(concepts(["A", "B"], max_leaves=4))
    inn_sup = draw(concepts(["A", "B", "Hotel"], max_leaves=4))
    tbox = [GciGeq(Atomic(name), sup, subsumption_degree(interpretation, LUK, Atomic(name), sup))
            for name, sup in (("Hotel", hotel_sup), ("Inn_2", inn_sup))]
    abox = []
    for individual in draw(st.lists(st.sampled_from(["a", "b", "jim"]), max_size=2)):
        concept = draw(concepts(max_leaves=4))
        value = checker.value(concept, interpretation.element_of(individual))
        abox.append(ConceptGeq(individual, concept, value))
        abox.append(ConceptLeq(individual, concept, value))
    return interpretation, KnowledgeBase(tuple(abox), tuple(tbox))


@given(satisfied_acyclic_kbs())
@settings(max_examples=60, deadline=None)
def test_lifted_model_satisfies_unfolded_kb(case):
    interpretation, kb = case
    assert check_kb(interpretation, LUK, kb).satisfied
    result, trace = acyclic_to_abox(kb)
    assert result.tbox == ()
    lifted = lift_unfolded_model(interpretation, trace, LUK)
    assert check_kb(lifted, LUK, result).satisfied
    assert replay_trace(kb, trace) == result


@pytest.mark.parametrize("encoding", ["tnorm", "min"])
@given(satisfied_acyclic_kbs())
@settings(max_examples=40, deadline=None)
def test_lifted_model_satisfies_either_encoding(encoding, case):
    interpretation, kb = case
    result, trace = acyclic_to_abox(kb, encoding)
    lifted = lift_unfolded_model(interpretation, trace, LUK)
    assert check_kb(lifted, LUK, result).satisfied


# Equisatisfiability against the bounded search

# Gadget witnesses for quarter degrees and Lukasiewicz residua of quarter
# values stay on this grid, so one grid serves both sides.
QUARTERS = tuple(Fraction(k, 4) for k in range(5))
QUARTER_GRID = SearchBounds(max_size=1, denominators=(1, 2, 4))


def search_status_before_and_after(kb, encoding):
    before = sat_search(kb, LUK, QUARTER_GRID)
    result, trace = acyclic_to_abox(kb, encoding)
    after = sat_search(result, LUK, QUARTER_GRID)
    if before.satisfiable:
        assert check_kb(lift_unfolded_model(before.model, trace, LUK), LUK, result).satisfied
    return before.status, after.status


@pytest.mark.parametrize("encoding", ["tnorm", "min"])
@pytest.mark.parametrize("text, satisfiable", [
    ("abox:\n(a : A) >= 1\n(a : C) <= 0\ntbox:\n(A sub C) >= 1/2\n", False),
    ("abox:\n(a : A) >= 1\n(a : C) >= 1/2\ntbox:\n(A sub C) >= 1/2\n", True),
    ("abox:\n(a : A) >= 1\n(a : C) <= 1/4\ntbox:\n(A sub C) >= 3/4\n", False),
    ("abox:\n(a : A) = 3/4\n((a , a) : R) >= 1\n(a : B) <= 1/2\ntbox:\nA sub forall R . B\n", False),
    ("abox:\n(a : A) = 1/2\n((a , a) : R) >= 1\n(a : B) <= 1/2\ntbox:\nA sub forall R . B\n", True),
])
def test_bounded_search_agrees_before_and_after_unfolding(text, satisfiable, encoding):
    before, after = search_status_before_and_after(parse_kb(text), encoding)
    assert before is after
    assert (before is SearchStatus.SAT) == satisfiable


@st.composite
def small_acyclic_kbs(draw):
    """One inclusion defining A over B and R, plus assertions on a single individual"""
    sup = draw(concepts(["B"], ["R"], max_leaves=3))
    tbox = (GciGeq(A, sup, draw(st.sampled_from(QUARTERS))),)
    abox = []
    for _ in range(draw(st.integers(1, 2))):
        kind = draw(st.sampled_from([ConceptGeq, ConceptLeq]))
        abox.append(kind("a", draw(concepts(["A", "B"], ["R"], max_leaves=3)), draw(st.sampled_from(QUARTERS))))
    return KnowledgeBase(tuple(abox), tbox)


@pytest.mark.parametrize("encoding", ["tnorm", "min"])
@given(small_acyclic_kbs())
@settings(max_examples=50, deadline=None)
def test_bounded_search_status_survives_unfolding(encoding, kb):
    before, after = search_status_before_and_after(kb, encoding)
    assert before is after
