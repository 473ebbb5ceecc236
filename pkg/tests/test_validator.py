import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import v9oracle
from cardgen import random_card
from conftest import FIXTURE_NAMES
from usecasecards import NotValidated, parse_card, validate, word_count
from usecasecards.model import Actor, ActorKind, Relation, RelationKind, UseCaseNode
from usecasecards.validator import dependency_cycles, require_valid


def rules(card):
    return validate(card).rules()


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixtures_are_clean(fixtures, name):
    diags = validate(fixtures[name])
    assert diags.errors == [], diags.to_text()
    assert diags.warnings == [], diags.to_text()


def test_no_ai_use_case(minimal_text):
    card = parse_card(minimal_text.replace("ai: yes", "ai: no"))
    diags = validate(card)
    assert [f.rule for f in diags.errors] == ["V2"]


def _with_ucs(card, extra_relations):
    ucs = card.use_cases + (UseCaseNode("a", "A", True), UseCaseNode("b", "B", True))
    return dataclasses.replace(card, use_cases=ucs, relations=card.relations + tuple(extra_relations))


def test_two_cycle_single_finding(minimal_text):
    card = _with_ucs(parse_card(minimal_text), [
        Relation(RelationKind.INCLUDE, "a", "b"), Relation(RelationKind.INCLUDE, "b", "a")])
    v9 = [f for f in validate(card) if f.rule == "V9"]
    assert len(v9) == 1
    assert v9[0].severity == "error"
    assert v9[0].message == "include/extend cycle: a -> b -> a"


def test_mixed_include_extend_cycle(minimal_text):
    card = _with_ucs(parse_card(minimal_text), [
        Relation(RelationKind.INCLUDE, "main", "a"), Relation(RelationKind.EXTEND, "a", "b"),
        Relation(RelationKind.INCLUDE, "b", "main")])
    assert "V9" in rules(card)


def test_self_include_is_v3_not_v9(minimal_text):
    card = dataclasses.replace(parse_card(minimal_text), relations=parse_card(minimal_text).relations + (
        Relation(RelationKind.INCLUDE, "main", "main"),))
    r = rules(card)
    assert "V3" in r and "V9" not in r


def test_word_count():
    assert word_count("") == 0
    assert word_count("a  b\nc") == 3


def test_scene_narrator_scope_word_count(fixtures):
    # Hand count of the scope text in fixtures/scene-narrator.ucc:
    # "Produce a spoken natural-language description of the scene in front of" (11)
    # "the user: surrounding objects, readable text such as signs, panels or menus," (12)
    # "and the people present, naming those who were registered as familiar." (11)
    assert word_count(fixtures["scene-narrator"].intended_purpose.scope) == 34


def test_101_word_scope_warns(minimal_text):
    scope = " ".join(f"w{i}" for i in range(101))
    card = parse_card(minimal_text.replace("scope: A scope.", f"scope: {scope}"))
    v4 = [f for f in validate(card) if f.rule == "V4"]
    assert [(f.severity, f.subject) for f in v4] == [("warning", "purpose.scope")]
    exactly = parse_card(minimal_text.replace("scope: A scope.", "scope: " + " ".join(["w"] * 100)))
    assert "V4" not in rules(exactly)


def test_vocabulary_errors(minimal_text):
    text = (minimal_text.replace("product: other-software", "product: spaceship")
            .replace("area: other", "area: law-enforcement")
            .replace("scope: A scope.", "scope: A scope.\nsdg: 42"))
    subjects = [f.subject for f in validate(parse_card(text)) if f.rule == "V5"]
    assert subjects == ["purpose.sdgs[0]", "table.product_type", "table.application_entries[0]"]


def test_structural_rules(minimal_text):
    card = parse_card(minimal_text)
    assert rules(dataclasses.replace(card, primary_actor="ghost"))[:1] == ["V1"]
    no_main = dataclasses.replace(card, use_cases=(UseCaseNode("main", "Main", True, False),))
    assert "V1" in rules(no_main)
    dangling = dataclasses.replace(card, relations=card.relations + (
        Relation(RelationKind.ASSOCIATION, "user", "nowhere"),))
    assert "V3" in rules(dangling)
    wrong_kind = dataclasses.replace(card, relations=card.relations + (
        Relation(RelationKind.INCLUDE, "user", "main"),))
    assert "V3" in rules(wrong_kind)
    lonely = dataclasses.replace(card, relations=())
    assert {"V6", "V8"} <= set(rules(lonely))
    bad_ext = parse_card(minimal_text.replace("step: Do the thing", "step: Do the thing\nextension: 4 | x | y"))
    assert [f.subject for f in validate(bad_ext) if f.rule == "V7"] == ["table.extensions[0]"]


def test_open_issues_warning(minimal_text):
    card = parse_card(minimal_text)
    assert validate(card).warnings[-1].rule == "V10"
    assert rules(dataclasses.replace(card, open_issues=("misuse",))) == []


def test_require_valid(minimal_text):
    with pytest.raises(NotValidated) as exc:
        require_valid(parse_card(minimal_text.replace("ai: yes", "ai: no")))
    assert exc.value.rules == ["V2"]


@settings(max_examples=200)
@given(st.randoms(use_true_random=False).map(random_card))
def test_generated_cards_are_valid_and_deterministic(card):
    a, b = validate(card), validate(card)
    assert a.is_valid
    assert a.to_list() == b.to_list()


@settings(max_examples=200)
@given(st.randoms(use_true_random=False))
def test_unreferenced_actor_only_adds_v8(r):
    card = random_card(r)
    before = validate(card).to_list()
    extra = dataclasses.replace(card, actors=card.actors + (Actor("zz-extra", "Extra", ActorKind.GROUP),))
    after = validate(extra).to_list()
    added = [f for f in after if f not in before]
    assert [f for f in before if f not in after] == []
    assert [(f["rule"], f["subject"]) for f in added] == [("V8", "zz-extra")]


def _check_cycle(cycle, edges):
    es = set(edges)
    assert len(set(cycle)) == len(cycle)
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        assert (a, b) in es


def test_v9_agrees_with_exhaustive_oracle_up_to_four_nodes():
    for n in range(1, 5):
        table = v9oracle.cyclic_table(n)
        nodes = [f"n{i}" for i in range(n)]
        for mask in range(len(table)):
            edges = [(nodes[a], nodes[b]) for a, b in v9oracle.edges_of(mask, n)]
            found = dependency_cycles(nodes, edges)
            assert bool(found) == bool(table[mask]), (n, edges)
            for cycle in found:
                _check_cycle(cycle, edges)


def test_acyclic_count_five_nodes():
    # labelled DAGs on 5 nodes: 29281
    assert int((~v9oracle.cyclic_table(5)).sum()) == 29281


def _dfs_has_cycle(nodes, edges):
    succ = {n: [b for a, b in edges if a == n] for n in nodes}
    state = {}

    def visit(v):
        state[v] = 1
        for w in succ[v]:
            if state.get(w) == 1 or (w not in state and visit(w)):
                return True
        state[v] = 2
        return False

    return any(n not in state and visit(n) for n in nodes)


@settings(max_examples=300)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=20))))
def test_v9_random_graphs_up_to_eight_nodes(case):
    n, pairs = case
    nodes = [f"u{i}" for i in range(n)]
    edges = [(nodes[a], nodes[b]) for a, b in pairs if a != b]
    found = dependency_cycles(nodes, edges)
    assert bool(found) == _dfs_has_cycle(nodes, edges)
    for cycle in found:
        _check_cycle(cycle, edges)


def test_v9_through_validate_on_three_nodes(minimal_text):
    base = parse_card(minimal_text)
    ucs = tuple(UseCaseNode(f"x{i}", f"X{i}", True) for i in range(3))
    table = v9oracle.cyclic_table(3)
    for mask in range(len(table)):
        rels = tuple(Relation(RelationKind.INCLUDE if (a + b) % 2 else RelationKind.EXTEND, f"x{a}", f"x{b}")
                     for a, b in v9oracle.edges_of(mask, 3))
        card = dataclasses.replace(base, use_cases=base.use_cases + ucs, relations=base.relations + rels)
        assert ("V9" in rules(card)) == bool(table[mask])
