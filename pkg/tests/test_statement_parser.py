import pytest

from ontology import NULL, TypeRef, Variable
from sit_errors import SitSyntaxError
from situation_store import Mode
from statement_parser import (
    AtomGroup,
    ConstraintDef,
    Directive,
    InfonLiteral,
    InfonNaming,
    NameBinding,
    ObjectDecl,
    ParameterDecl,
    Propositions,
    RelationDecl,
    TypeDecl,
    logical_lines,
    parse_statement,
)


def test_object_declaration():
    assert parse_statement("bob: ~IND") == ObjectDecl("bob", TypeRef("IND"))


def test_relation_declaration_with_minimality():
    statement = parse_statement("<sees | ~IND, ~SIT> [1]")
    assert statement == RelationDecl("sees", ((TypeRef("IND"),), (TypeRef("SIT"),)), 1)


def test_relation_declaration_with_multi_kind_role():
    statement = parse_statement("<at | ~IND/~SIT, ~LOC>")
    assert statement.roles == ((TypeRef("IND"), TypeRef("SIT")), (TypeRef("LOC"),))
    assert statement.minimality is None


def test_parameter_declaration_with_restriction():
    statement = parse_statement("E = IND1 ^ <<sees, IND1, sit1, 1>>")
    assert statement == ParameterDecl("E", "IND1", (InfonLiteral("sees", ("IND1", "sit1"), 1),))


def test_parameter_over_basic_kind():
    assert parse_statement("T = ~TIM") == ParameterDecl("T", TypeRef("TIM"), ())


def test_plain_name_binding():
    assert parse_statement("F = E") == NameBinding("F", "E")


def test_type_abstraction():
    statement = parse_statement("~HAPPY = [P | w |= <<happy, P, 1>>]")
    assert statement == TypeDecl("HAPPY", "P", "w", (InfonLiteral("happy", ("P",), 1),))


def test_infon_naming_with_nesting_and_null():
    statement = parse_statement("belief = <<believes, bob, <<happy, -, 1>>, 1>>")
    assert isinstance(statement, InfonNaming)
    inner = statement.infon.args[1]
    assert inner == InfonLiteral("happy", (NULL,), 1)


def test_proposition_with_infon_set():
    statement = parse_statement("sit1 |= {<<sees, E, sit2, 1>>, <<part-of, sit2, sit1, 1>>}")
    assert isinstance(statement, Propositions)
    group = statement.groups[0]
    assert group.situation == "sit1"
    assert group.mode is Mode.SUPPORTS
    assert len(group.items) == 2


def test_conjunctive_query_with_variables():
    statement = parse_statement("?S |= {<<sees, E, ?Y, 1>>, <<time-of, sit2, ?Z, 1>>}, ?S |/= <<blind, bob, 1>>")
    first, second = statement.groups
    assert first.situation == Variable("S")
    assert first.items[0].args == ("E", Variable("Y"))
    assert second == AtomGroup(Variable("S"), Mode.NOT_SUPPORTS, (InfonLiteral("blind", ("bob",), 1),))


def test_named_infon_as_item():
    statement = parse_statement("sit1 |= seeing")
    assert statement.groups[0].items == ("seeing",)


def test_backward_constraint_keeps_consequents_apart():
    statement = parse_statement(
        "SPECIES-PERSPECTIVE: HUMAN-BEINGS-012: ?S |= <<human, ?X, 1>> <= ?S |= <<man, ?X, 1>>"
    )
    assert isinstance(statement, ConstraintDef)
    assert statement.group == "SPECIES-PERSPECTIVE"
    assert statement.name == "HUMAN-BEINGS-012"
    assert statement.arrow == "<="
    assert statement.consequents[0].items[0].relation == "human"
    assert statement.antecedents[0].items[0].relation == "man"


def test_forward_constraint_with_label_and_conditions():
    statement = parse_statement(
        "PHYSICS: FALLING-BLOCK (nomic): ?S1 |= <<block, ?X, 1>>, ?S1 |= <<supported, ?X, 0>> "
        "=> ?S2 |= <<falls, ?X, 1>> UNDER-CONDITIONS: w |= <<exists, gravity, 1>>"
    )
    assert statement.label == "nomic"
    assert statement.arrow == "=>"
    assert len(statement.antecedents) == 2
    assert statement.conditions == (InfonLiteral("exists", ("gravity",), 1),)


def test_bidirectional_constraint():
    statement = parse_statement("G: C: ?S |= <<man, ?X, 1>> <=> ?S |= <<human, ?X, 1>>")
    assert statement.arrow == "<=>"


def test_conditions_outside_world_rejected():
    with pytest.raises(SitSyntaxError):
        parse_statement("G: C: ?S |= <<man, ?X, 1>> => ?S |= <<human, ?X, 1>> UNDER-CONDITIONS: s1 |= <<a, 1>>")


def test_directive():
    assert parse_statement(":perspective A,B") == Directive("perspective", ("A,B",))
    assert parse_statement(":quit") == Directive("quit", ())


def test_unknown_directive():
    with pytest.raises(SitSyntaxError) as excinfo:
        parse_statement(":fly away")
    assert "unknown directive" in str(excinfo.value)


def test_blank_and_comment_lines():
    assert parse_statement("") is None
    assert parse_statement("   ; just a note") is None


def test_trailing_comment_is_ignored():
    assert parse_statement("bob: ~IND ; the observer") == ObjectDecl("bob", TypeRef("IND"))


def test_missing_polarity_is_a_positioned_error():
    with pytest.raises(SitSyntaxError) as excinfo:
        parse_statement("sit1 |= <<sees, bob, sit2>>", line=7)
    assert excinfo.value.line == 7
    assert excinfo.value.column is not None


def test_garbage_is_rejected():
    with pytest.raises(SitSyntaxError):
        parse_statement("sit1 |= <<sees, bob")


@pytest.mark.parametrize("text", [
    "bob: ~IND",
    "<sees | ~IND, ~SIT> [1]",
    "E = IND1 ^ <<sees, IND1, sit1, 1>>",
    "~HAPPY = [P | w |= <<happy, P, 1>>]",
    "sit1 |= {<<sees, E, sit2, 1>>, <<part-of, sit2, sit1, 1>>}",
    "LABOUR: POOR (conventional): ?S |= <<poor, ?W, 1>> <= ?S |= <<paid, ?W, 1>>, ?S |/= <<rich, ?W, 1>>",
])
def test_canonical_text_reparses_to_the_same_statement(text):
    statement = parse_statement(text)
    assert parse_statement(str(statement)) == statement


def test_logical_lines_join_continuations():
    lines = ["a: ~IND\n", "G: C: ?S |= <<p, ?X, 1>> \\\n", "    => ?S |= <<q, ?X, 1>>\n", "\n"]
    assert list(logical_lines(lines)) == [
        (1, "a: ~IND"),
        (2, "G: C: ?S |= <<p, ?X, 1>> => ?S |= <<q, ?X, 1>>"),
        (4, ""),
    ]
