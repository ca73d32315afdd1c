import pytest

from ontology import Infon, TypeRef, Variable
from sit_errors import (
    AnchorKindError,
    AnchorRestrictionError,
    AppropriatenessError,
    DuplicateAnchorError,
    IncoherenceError,
    KindError,
    LocationError,
    NegativeAssertionError,
    PartOfCycleError,
    UnknownNameError,
    VariableAssertionError,
)
from situation_store import Mode, Proposition, SituationStore, render_proposition

IND = TypeRef("IND")
SIT = TypeRef("SIT")
TIM = TypeRef("TIM")


def sees(who, where, polarity=1):
    return Infon("sees", (who, where), polarity)


@pytest.fixture
def store():
    store = SituationStore()
    ontology = store.ontology
    for name in ("s1", "s2", "s3"):
        store.create_situation(name)
    store.declare_object("bob", IND)
    store.declare_object("ann", IND)
    store.declare_object("t1", TIM)
    store.declare_object("t2", TIM)
    ontology.declare_relation("sees", [{IND}, {SIT}], 1)
    ontology.declare_relation("happy", [{IND}], 1)
    return store


def test_world_exists_and_contains_everything(store):
    assert store.situation_names() == ["s1", "s2", "s3", "w"]
    for name in ("s1", "s2", "s3"):
        assert store.part_of("w", name)
        assert "w" in store.descendants(name)
    assert store.ancestors("w") == {"s1", "s2", "s3", "w"}


def test_part_of_is_reflexive_and_transitive(store):
    store.make_part_of("s1", "s2")
    store.make_part_of("s2", "s3")
    assert store.part_of("s1", "s1")
    assert store.part_of("s1", "s3")
    assert not store.part_of("s3", "s1")
    assert store.ancestors("s1") == {"s1", "s2", "s3"}


def test_part_of_cycle_is_refused(store):
    store.make_part_of("s1", "s2")
    store.make_part_of("s2", "s3")
    with pytest.raises(PartOfCycleError):
        store.make_part_of("s3", "s1")
    assert store.parents_of("s3") == []


def test_make_part_of_stores_part_of_fact(store):
    result = store.make_part_of("s1", "s2")
    assert result.edges == [("s1", "s2")]
    assert Infon("part-of", ("s1", "s2"), 1) in store.own_infons("s2")


def test_part_of_asserted_elsewhere_is_kept_there(store):
    store.assert_infons("s3", [Infon("part-of", ("s1", "s2"), 1)])
    assert store.part_of("s1", "s2")
    assert Infon("part-of", ("s1", "s2"), 1) in store.own_infons("s3")
    assert Infon("part-of", ("s1", "s2"), 1) in store.own_infons("s2")


def test_make_part_of_with_polarity_zero_is_refused(store):
    with pytest.raises(KindError):
        store.assert_infons("s1", [Infon("make-part-of", ("s1", "s2"), 0)])


def test_parts_support_flows_upward(store):
    store.make_part_of("s1", "s2")
    store.assert_infons("s1", [sees("bob", "s3")])
    assert store.supports("s2", sees("bob", "s3"))
    assert not store.supports("s3", sees("bob", "s3"))


def test_world_facts_are_supported_everywhere(store):
    store.assert_infons("w", [Infon("happy", ("bob",), 1)])
    for name in ("s1", "s2", "s3", "w"):
        assert store.supports(name, Infon("happy", ("bob",), 1))


def test_typing_facts_live_in_world(store):
    assert store.supports("s1", Infon("of-type", ("bob", IND), 1))


def test_incoherent_assertion_is_refused_atomically(store):
    store.assert_infons("s1", [sees("bob", "s2")])
    with pytest.raises(IncoherenceError) as excinfo:
        store.assert_infons("s1", [sees("ann", "s2"), sees("bob", "s2", 0)])
    assert excinfo.value.situation == "s1"
    assert sees("ann", "s2") not in store.own_infons("s1")


def test_incoherence_through_parts(store):
    store.make_part_of("s1", "s2")
    store.assert_infons("s2", [sees("bob", "s3")])
    with pytest.raises(IncoherenceError):
        store.assert_infons("s1", [sees("bob", "s3", 0)])


def test_linking_incoherent_situations_is_refused(store):
    store.assert_infons("s1", [sees("bob", "s3")])
    store.assert_infons("s2", [sees("bob", "s3", 0)])
    with pytest.raises(IncoherenceError):
        store.make_part_of("s1", "s2")
    assert not store.part_of("s1", "s2")
    assert store.audit_coherence() == []


def test_sibling_situations_may_disagree(store):
    store.assert_infons("s1", [sees("bob", "s3")])
    store.assert_infons("s2", [sees("bob", "s3", 0)])
    assert store.supports("s1", sees("bob", "s3"))
    assert store.supports("s2", sees("bob", "s3", 0))


def test_world_fact_conflicting_with_a_situation_is_refused(store):
    store.assert_infons("s1", [Infon("happy", ("bob",), 0)])
    with pytest.raises(IncoherenceError):
        store.assert_infons("w", [Infon("happy", ("bob",), 1)])


def test_unsaturated_and_saturated_are_distinct(store):
    store.assert_infons("s1", [sees("bob", "s2")])
    padded = store.ontology.make_infon("sees", ["bob"], 0)
    store.assert_infons("s1", [padded])
    assert store.supports("s1", padded)


def test_negative_mode_cannot_be_asserted(store):
    with pytest.raises(NegativeAssertionError):
        store.assert_proposition(Proposition("s1", (sees("bob", "s2"),), Mode.NOT_SUPPORTS))


def test_variables_cannot_be_asserted(store):
    with pytest.raises(VariableAssertionError):
        store.assert_infons("s1", [sees(Variable("X"), "s2")])


def test_unknown_situation(store):
    with pytest.raises(UnknownNameError):
        store.assert_infons("nowhere", [sees("bob", "s2")])


def test_time_and_place_are_single_valued(store):
    store.assert_infons("s1", [Infon("time-of", ("s1", "t1"), 1)])
    assert store.located("s1") == ("t1", None)
    store.assert_infons("s1", [Infon("time-of", ("s1", "t1"), 1)])
    with pytest.raises(LocationError):
        store.assert_infons("s2", [Infon("time-of", ("s1", "t2"), 1)])


def test_of_type_assertions_must_agree_with_declarations(store):
    store.assert_infons("w", [Infon("of-type", ("bob", IND), 1)])
    assert Infon("of-type", ("bob", IND), 1) not in store.own_infons("w")
    with pytest.raises(KindError):
        store.assert_infons("s1", [Infon("of-type", ("bob", TIM), 1)])
    with pytest.raises(KindError):
        store.assert_infons("s1", [Infon("of-type", ("bob", IND), 0)])


def test_parametric_type_membership(store):
    ontology = store.ontology
    ontology.define_type_abstraction(
        "HAPPY", "IND1", "s1", [ontology.make_infon("happy", ["IND1"], 1)]
    )
    store.assert_infons("s1", [Infon("happy", ("bob",), 1)])
    assert store.of_type("bob", "HAPPY")
    assert not store.of_type("ann", "HAPPY")
    assert not store.of_type("t1", "HAPPY")
    assert store.supports("s2", Infon("of-type", ("bob", TypeRef("HAPPY")), 1))


def test_declaring_parametric_object_asserts_its_conditions(store):
    ontology = store.ontology
    ontology.define_type_abstraction(
        "HAPPY", "IND1", "s1", [ontology.make_infon("happy", ["IND1"], 1)]
    )
    store.declare_object("carl", TypeRef("HAPPY"))
    assert Infon("happy", ("carl",), 1) in store.own_infons("s1")


def test_declaring_parametric_object_rolls_back_on_conflict(store):
    ontology = store.ontology
    ontology.define_type_abstraction(
        "WATCHED", "IND1", "s1",
        [ontology.make_infon("happy", ["IND1"], 1), sees("bob", "s2")],
    )
    store.assert_infons("s1", [sees("bob", "s2", 0)])
    with pytest.raises(IncoherenceError):
        store.declare_object("carl", TypeRef("WATCHED"))
    assert not ontology.is_declared("carl")
    assert Infon("happy", ("carl",), 1) not in store.own_infons("s1")


def test_anchor_registration_and_application(store):
    ontology = store.ontology
    ontology.declare_parameter("E", TypeRef("IND"))
    store.register_anchor("s3", "E", "bob")
    assert store.anchors_of("s3") == {"E": "bob"}
    assert store.apply_anchoring(sees("E", "s1"), "s3") == sees("bob", "s1")
    assert store.apply_anchoring(sees("IND1", "s1"), "s3") == sees("IND1", "s1")
    assert store.apply_anchoring([sees("E", "s1")], "s3") == [sees("bob", "s1")]


def test_anchor_is_a_partial_function(store):
    store.ontology.declare_parameter("E", TypeRef("IND"))
    store.register_anchor("s3", "E", "bob")
    store.register_anchor("s3", "E", "bob")
    with pytest.raises(DuplicateAnchorError):
        store.register_anchor("s3", "E", "ann")
    store.register_anchor("s2", "E", "ann")
    assert store.anchors_of("s2") == {"E": "ann"}


def test_anchor_must_match_the_parameter_kind(store):
    store.ontology.declare_parameter("E", TypeRef("IND"))
    with pytest.raises(AnchorKindError):
        store.register_anchor("s3", "E", "t1")
    with pytest.raises(AppropriatenessError):
        store.register_anchor("s3", "bob", "ann")


def test_anchor_must_satisfy_restrictions(store):
    ontology = store.ontology
    ontology.declare_parameter("E", "IND1", [ontology.make_infon("sees", ["IND1", "s1"], 1)])
    with pytest.raises(AnchorRestrictionError):
        store.register_anchor("s3", "E", "bob")
    store.assert_infons("w", [sees("bob", "s1")])
    store.register_anchor("s3", "E", "bob")
    assert store.anchors_of("s3") == {"E": "bob"}


def test_assertion_through_an_anchoring(store):
    store.ontology.declare_parameter("E", TypeRef("IND"))
    store.register_anchor("s3", "E", "bob")
    store.assert_infons("s1", [sees("E", "s2")], anchoring="s3")
    assert store.own_infons("s1") == {sees("bob", "s2")}


def test_candidate_infons_order_own_parts_world(store):
    store.make_part_of("s1", "s2")
    store.assert_infons("w", [sees("ann", "s1")])
    store.assert_infons("s1", [sees("bob", "s1")])
    store.assert_infons("s2", [sees("bob", "s3")])
    found = list(store.candidate_infons("s2", sees("bob", "s3")))
    assert found == [sees("bob", "s3"), sees("bob", "s1"), sees("ann", "s1")]


def test_after_assert_hook_sees_changes(store):
    seen = []
    store.after_assert = lambda result: seen.append(result.added) or []
    store.assert_infons("s1", [sees("bob", "s2")])
    store.assert_infons("s1", [sees("bob", "s2")])
    assert seen == [[("s1", sees("bob", "s2"))]]


def test_snapshot_is_a_copy(store):
    store.assert_infons("s1", [sees("bob", "s2")])
    snapshot = store.snapshot()
    store.assert_infons("s1", [sees("ann", "s2")])
    assert snapshot["s1"] == {sees("bob", "s2")}


def test_render_proposition():
    assert render_proposition("s1", Mode.SUPPORTS, [sees("bob", "s2")]) == "s1 |= <<sees, bob, s2, 1>>"
    assert (
        render_proposition("s1", Mode.NOT_SUPPORTS, [sees("bob", "s2"), sees("ann", "s2")])
        == "s1 |/= {<<sees, bob, s2, 1>>, <<sees, ann, s2, 1>>}"
    )
