"""
Statement Parser

pyparsing grammar for the interpreter's concrete syntax. One line parses to
exactly one Statement; names inside infons stay unresolved until the
statement is executed.

    bob: ~IND
    <sees | ~IND, ~SIT> [1]
    E = IND1 ^ <<human, IND1, 1>>
    ~HAPPY = [P | w |= <<happy, P, 1>>]
    seeing = <<sees, bob, sit2, 1>>
    sit1 |= {<<sees, E, sit2, 1>>, <<part-of, sit2, sit1, 1>>}
    SPECIES: HUMAN-1: ?S |= <<human, ?X, 1>> <= ?S |= <<man, ?X, 1>>
    :perspective SPECIES
"""

from dataclasses import dataclass

from pyparsing import (
    Forward,
    Group,
    Literal,
    OneOrMore,
    Optional,
    ParseBaseException,
    ParseFatalException,
    ParseResults,
    Regex,
    Suppress,
    ZeroOrMore,
)

import sit_config
from ontology import NULL, TypeRef, Variable
from situation_store import Mode
from sit_errors import SitSyntaxError

NAME_PATTERN = r"[A-Za-z0-9_][A-Za-z0-9_\-]*"
DIRECTIVES = (
    "mode", "anchor", "perspective", "antecedent-perspective", "group", "solutions",
    "trace", "anchortrace", "showanchors", "chain", "load", "save", "export-dot",
    "report", "list", "quit",
)


def _render_arg(arg):
    return str(arg)


@dataclass(frozen=True)
class InfonLiteral:
    """An infon as written: arguments are names, variables, types, '-' or nested literals."""
    relation: str
    args: tuple
    polarity: int

    def __str__(self):
        parts = [self.relation] + [_render_arg(arg) for arg in self.args] + [str(self.polarity)]
        return "<<" + ", ".join(parts) + ">>"


def render_items(items):
    if len(items) == 1:
        return str(items[0])
    return "{" + ", ".join(str(item) for item in items) + "}"


@dataclass(frozen=True)
class AtomGroup:
    """sit |= infonset; items are InfonLiteral or infon names."""
    situation: object
    mode: Mode
    items: tuple

    def __str__(self):
        return f"{self.situation} {self.mode} {render_items(self.items)}"


class Statement:
    """Marker base for parsed statements."""


@dataclass(frozen=True)
class ObjectDecl(Statement):
    name: str
    kind: TypeRef

    def __str__(self):
        return f"{self.name}: {self.kind}"


@dataclass(frozen=True)
class RelationDecl(Statement):
    name: str
    roles: tuple  # tuple of tuples of TypeRef
    minimality: int = None

    def __str__(self):
        roles = ", ".join("/".join(str(ref) for ref in role) for role in self.roles)
        text = f"<{self.name} | {roles}>"
        if self.minimality is not None:
            text += f" [{self.minimality}]"
        return text


@dataclass(frozen=True)
class ParameterDecl(Statement):
    name: str
    base: object  # TypeRef of a basic kind, or a parameter name
    restrictions: tuple = ()

    def __str__(self):
        text = f"{self.name} = {self.base}"
        if self.restrictions:
            text += f" ^ {render_items(self.restrictions)}"
        return text


@dataclass(frozen=True)
class TypeDecl(Statement):
    name: str
    parameter: str
    grounding: str
    conditions: tuple

    def __str__(self):
        return f"~{self.name} = [{self.parameter} | {self.grounding} |= {render_items(self.conditions)}]"


@dataclass(frozen=True)
class InfonNaming(Statement):
    name: str
    infon: InfonLiteral

    def __str__(self):
        return f"{self.name} = {self.infon}"


@dataclass(frozen=True)
class NameBinding(Statement):
    """NAME = NAME: an infon renaming or a parameter derived from another one."""
    name: str
    target: str

    def __str__(self):
        return f"{self.name} = {self.target}"


@dataclass(frozen=True)
class Propositions(Statement):
    """One or more atom groups; asserted in assert mode, evaluated in query mode."""
    groups: tuple

    def __str__(self):
        return ", ".join(str(group) for group in self.groups)


@dataclass(frozen=True)
class ConstraintDef(Statement):
    group: str
    name: str
    antecedents: tuple
    arrow: str
    consequents: tuple
    conditions: tuple = ()
    label: str = None

    def __str__(self):
        head = f"{self.group}: {self.name}"
        if self.label:
            head += f" ({self.label})"
        antecedents = ", ".join(str(group) for group in self.antecedents)
        consequents = ", ".join(str(group) for group in self.consequents)
        if self.arrow == "<=":
            body = f"{consequents} <= {antecedents}"
        else:
            body = f"{antecedents} {self.arrow} {consequents}"
        text = f"{head}: {body}"
        if self.conditions:
            text += f" UNDER-CONDITIONS: {sit_config.WORLD_SITUATION} |= {render_items(self.conditions)}"
        return text


@dataclass(frozen=True)
class Directive(Statement):
    name: str
    args: tuple = ()

    def __str__(self):
        return " ".join((f":{self.name}",) + self.args)


@dataclass(frozen=True)
class _Label:
    name: str


@dataclass(frozen=True)
class _Conditions:
    holder: str
    items: tuple


class StatementParser:
    def __init__(self):
        name = Regex(NAME_PATTERN)
        variable = Regex(r"\?" + NAME_PATTERN).set_parse_action(lambda t: Variable(t[0][1:]))
        type_ref = Regex(r"~" + NAME_PATTERN).set_parse_action(lambda t: TypeRef(t[0][1:]))
        null = Literal(sit_config.NULL_TOKEN).set_parse_action(lambda t: [NULL])
        supp = (Literal("|/=") | Literal("|=")).set_parse_action(lambda t: Mode(t[0]))
        comma = Suppress(",")

        self.infon = Forward()
        arg = self.infon | variable | type_ref | null | name
        self.infon <<= (
            Suppress("<<") + name + OneOrMore(comma + arg) + Suppress(">>")
        ).set_parse_action(self._make_infon)

        item = self.infon | name
        infonset = Group(
            Suppress("{") + item + ZeroOrMore(comma + item) + Suppress("}") | item
        ).set_parse_action(lambda t: [tuple(t[0])])

        atom = (
            (variable | name) + supp + infonset
        ).set_parse_action(lambda t: AtomGroup(t[0], t[1], t[2]))
        atoms = Group(atom + ZeroOrMore(comma + atom)).set_parse_action(lambda t: [tuple(t[0])])

        role = Group(type_ref + ZeroOrMore(Suppress("/") + type_ref)).set_parse_action(lambda t: [tuple(t[0])])
        integer = Regex(r"\d+").set_parse_action(lambda t: int(t[0]))
        relation_decl = (
            Suppress("<") + name + Suppress("|") + Group(role + ZeroOrMore(comma + role))
            + Suppress(">") + Optional(Suppress("[") + integer + Suppress("]"))
        ).set_parse_action(lambda t: RelationDecl(t[0], tuple(t[1]), t[2] if len(t) > 2 else None))

        type_decl = (
            type_ref + Suppress("=") + Suppress("[") + name + Suppress("|") + name
            + Suppress(Literal("|=")) + infonset + Suppress("]")
        ).set_parse_action(lambda t: TypeDecl(t[0].name, t[1], t[2], t[3]))

        arrow = Literal("<=>") | Literal("<=") | Literal("=>")
        label = (Suppress("(") + name + Suppress(")")).set_parse_action(lambda t: _Label(t[0]))
        conditions = (
            Optional(name + Suppress(Literal("|=") | Literal(":"))) + infonset
        ).set_parse_action(lambda t: _Conditions(t[0] if len(t) > 1 else None, t[-1]))
        constraint = (
            name + Suppress(":") + name + Optional(label) + Suppress(":")
            + atoms + arrow + atoms
            + Optional(Suppress(Literal("UNDER-CONDITIONS")) + Suppress(":") + conditions)
        ).set_parse_action(self._make_constraint)

        object_decl = (name + Suppress(":") + type_ref).set_parse_action(lambda t: ObjectDecl(t[0], t[1]))

        infon_naming = (name + Suppress("=") + self.infon).set_parse_action(lambda t: InfonNaming(t[0], t[1]))
        parameter_decl = (
            name + Suppress("=") + (type_ref | name) + Optional(Suppress("^") + infonset)
        ).set_parse_action(self._make_parameter)

        directive = (
            Regex(r":[a-z\-]+") + ZeroOrMore(Regex(r"\S+"))
        ).set_parse_action(self._make_directive)

        self.statement = (
            directive
            | relation_decl
            | type_decl
            | constraint
            | object_decl
            | infon_naming
            | parameter_decl
            | atoms.copy().add_parse_action(lambda t: Propositions(t[0]))
        )
        self.statement.ignore(Regex(r";.*"))

    @staticmethod
    def _make_infon(s, loc, t):
        relation, *args = list(t)
        polarity = args.pop() if args else None
        if polarity not in ("0", "1"):
            raise ParseFatalException(s, loc, f"infon <<{relation}, ...>> must end with polarity 0 or 1")
        return InfonLiteral(relation, tuple(args), int(polarity))

    @staticmethod
    def _make_parameter(t):
        name, base = t[0], t[1]
        restrictions = t[2] if len(t) > 2 else ()
        if not restrictions and not isinstance(base, TypeRef):
            return NameBinding(name, base)
        return ParameterDecl(name, base, restrictions)

    @staticmethod
    def _make_constraint(s, loc, t):
        tokens = list(t)
        group, name = tokens[0], tokens[1]
        rest = tokens[2:]
        label = None
        if rest and isinstance(rest[0], _Label):
            label = rest.pop(0).name
        conditions = ()
        if rest and isinstance(rest[-1], _Conditions):
            found = rest.pop()
            if found.holder is not None and found.holder != sit_config.WORLD_SITUATION:
                raise ParseFatalException(
                    s, loc, f"background conditions hold in {sit_config.WORLD_SITUATION}, not {found.holder}"
                )
            conditions = tuple(found.items)
        left, arrow, right = rest
        if arrow == "<=":
            antecedents, consequents = right, left
        else:
            antecedents, consequents = left, right
        return ConstraintDef(group, name, antecedents, arrow, consequents, conditions, label)

    @staticmethod
    def _make_directive(s, loc, t):
        name = t[0][1:]
        if name not in DIRECTIVES:
            raise ParseFatalException(s, loc, f"unknown directive :{name}")
        return Directive(name, tuple(t[1:]))

    def parse(self, text, line=1):
        """
        Parse one statement.

        Returns:
            the Statement, or None for a blank or comment-only line

        Raises:
            SitSyntaxError: positioned, with the expected-token hint
        """
        stripped = text.strip()
        if not stripped or stripped.startswith(";"):
            return None
        try:
            result = self.statement.parse_string(stripped, parse_all=True)
        except ParseBaseException as exc:
            raise SitSyntaxError(
                "cannot parse statement", line=line, column=exc.column, expected=exc.msg
            ) from None
        statement = result[0]
        if isinstance(statement, ParseResults):
            statement = statement[0]
        return statement


_parser = None


def parse_statement(text, line=1):
    global _parser
    if _parser is None:
        _parser = StatementParser()
    return _parser.parse(text, line)


def logical_lines(lines):
    """
    Join backslash-continued lines.

    Yields:
        (starting line number, joined text)
    """
    buffer = []
    start = None
    for number, raw in enumerate(lines, start=1):
        text = raw.rstrip("\n").rstrip("\r")
        if start is None:
            start = number
        if text.endswith("\\"):
            buffer.append(text[:-1])
            continue
        buffer.append(text)
        yield start, " ".join(part.strip() for part in buffer).strip()
        buffer = []
        start = None
    if buffer:
        yield start, " ".join(part.strip() for part in buffer).strip()
