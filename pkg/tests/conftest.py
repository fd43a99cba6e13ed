"""
Shared fixtures and hypothesis strategies
"""

import os
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from fuzzyalc import config
from fuzzyalc.semantics import FiniteInterpretation
from fuzzyalc.syntax import BOTTOM, TOP, And, Atomic, ConceptGeq, ConceptLeq, Exists, Forall, GciGeq, \
    KnowledgeBase, Not, Or, RoleGeq

CONCEPT_NAMES = ["A", "B", "Hotel", "Inn_2"]
ROLE_NAMES = ["R", "likes"]
INDIVIDUALS = ["a", "b", "jim"]


def fixture_path(name: str) -> str:
    return os.path.join(config.FIXTURES_DIR, name)


@pytest.fixture
def k1_path():
    return fixture_path("k1.kb")


@pytest.fixture
def k2_path():
    return fixture_path("k2.kb")


def grid_degrees(max_denominator: int = 12):
    return st.integers(1, max_denominator).flatmap(
        lambda d: st.integers(0, d).map(lambda k: Fraction(k, d)))


def concepts(names=CONCEPT_NAMES, roles=ROLE_NAMES, with_or: bool = True, max_leaves: int = 8):
    base = st.one_of(st.just(TOP), st.just(BOTTOM), st.sampled_from(names).map(Atomic))

    def extend(children):
        options = [
            st.builds(And, children, children),
            st.builds(Not, children),
            st.builds(Forall, st.sampled_from(roles), children),
            st.builds(Exists, st.sampled_from(roles), children),
        ]
        if with_or:
            options.append(st.builds(Or, children, children))
        return st.one_of(options)

    return st.recursive(base, extend, max_leaves=max_leaves)


def canonical_concepts(with_or: bool = True):
    """Concepts over the single atom and role of the canonical models"""
    return concepts(["A"], ["R"], with_or=with_or, max_leaves=6)


def abox_axioms(concept_strategy=None):
    concept_strategy = concept_strategy or concepts(max_leaves=4)
    individual = st.sampled_from(INDIVIDUALS)
    return st.one_of(
        st.builds(ConceptGeq, individual, concept_strategy, grid_degrees(6)),
        st.builds(ConceptLeq, individual, concept_strategy, grid_degrees(6)),
        st.builds(RoleGeq, individual, individual, st.sampled_from(ROLE_NAMES), grid_degrees(6)),
    )


def gcis(concept_strategy=None):
    concept_strategy = concept_strategy or concepts(max_leaves=4)
    return st.builds(GciGeq, concept_strategy, concept_strategy, grid_degrees(6))


@st.composite
def knowledge_bases(draw, max_abox: int = 4, max_tbox: int = 3):
    abox = draw(st.lists(abox_axioms(), max_size=max_abox))
    tbox = draw(st.lists(gcis(), max_size=max_tbox))
    return KnowledgeBase(tuple(abox), tuple(tbox))


@st.composite
def interpretations(draw, max_size: int = 3, names=CONCEPT_NAMES, roles=ROLE_NAMES, individuals=INDIVIDUALS):
    size = draw(st.integers(1, max_size))
    domain = tuple(f"e{k}" for k in range(1, size + 1))
    element = st.sampled_from(domain)
    concept_maps = {}
    concept_defaults = {}
    for name in draw(st.lists(st.sampled_from(names), unique=True)):
        concept_maps[name] = draw(st.dictionaries(element, grid_degrees(6)))
        concept_defaults[name] = draw(grid_degrees(4))
    role_maps = {}
    role_defaults = {}
    for name in draw(st.lists(st.sampled_from(roles), unique=True)):
        role_maps[name] = draw(st.dictionaries(st.tuples(element, element), grid_degrees(6)))
        role_defaults[name] = draw(grid_degrees(4))
    mapping = {name: draw(element) for name in individuals}
    return FiniteInterpretation(domain, concept_maps, role_maps, mapping, concept_defaults, role_defaults)
