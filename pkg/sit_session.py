"""
Interpreter Session

Holds one store and engine plus the SessionState that directives change,
and turns parsed statements into store, engine and query calls. Every line
produces deterministic text output; errors are reported, never raised, by
repl_step.
"""

import logging
from dataclasses import dataclass, replace

import kb_report
import kb_storage
import sit_config
from inference_engine import ALL_GROUPS, Atom, Constraint, Direction, InferenceEngine
from ontology import NULL, TypeRef, Variable
from query_mode import Query, QueryOptions, evaluate, render_solution
from situation_store import Proposition, SituationStore
from statement_parser import (
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
from sit_errors import KindError, SitError, SitSyntaxError, UnknownNameError, VariableAssertionError

logger = logging.getLogger(__name__)

MODES = ("assert", "query")
LISTINGS = ("situations", "relations", "constraints", "parameters", "anchors", "facts")


@dataclass(frozen=True)
class SessionState:
    mode: str = "assert"
    anchoring: str = None
    perspectivity: frozenset = frozenset({ALL_GROUPS})
    antecedent_perspectivity: frozenset = None
    group_filter: str = None
    max_solutions: int = None
    trace: bool = False
    anchor_trace: bool = False
    show_anchors: bool = True
    running: bool = True

    @property
    def prompt(self):
        return sit_config.PROMPTS[self.mode]

    def query_options(self):
        return QueryOptions(
            perspectivity=self.perspectivity,
            antecedent_perspectivity=self.antecedent_perspectivity,
            group_filter=self.group_filter,
            anchoring=self.anchoring,
            max_solutions=self.max_solutions,
            show_anchors=self.show_anchors,
            show_anchor_trace=self.anchor_trace,
        )


def _switch(value, directive):
    if value not in ("on", "off"):
        raise SitSyntaxError(f":{directive} takes on or off", expected="on|off")
    return value == "on"


def _groups(args, directive):
    text = "".join(args)
    if not text:
        raise SitSyntaxError(f":{directive} needs a group list", expected="GROUP[,GROUP...]|all|none")
    if text == "all":
        return frozenset({ALL_GROUPS})
    if text == "none":
        return frozenset()
    return frozenset(group for group in text.split(",") if group)


class Session:
    """
    One interpreter session.

    Args:
        depth_limit: backward proof depth (default from sit_config)
        max_firings: forward chaining cap (default from sit_config)
    """

    def __init__(self, depth_limit=None, max_firings=None):
        self.store = SituationStore()
        self.engine = InferenceEngine(self.store, depth_limit, max_firings)
        self.state = SessionState()
        self.errors = 0
        self.queries = 0
        self.empty_queries = 0

    @property
    def ontology(self):
        return self.store.ontology

    # --- name resolution ---

    def resolve_item(self, item):
        """An infon name or InfonLiteral turned into a validated Infon."""
        if isinstance(item, str):
            if item in self.ontology.infon_names:
                return self.ontology.infon_names[item]
            raise UnknownNameError(item, "infon name")
        args = tuple(self._resolve_arg(arg) for arg in item.args)
        return self.ontology.make_infon(item.relation, args, item.polarity)

    def _resolve_arg(self, arg):
        if isinstance(arg, InfonLiteral):
            return self.resolve_item(arg)
        if arg is NULL or isinstance(arg, Variable):
            return arg
        if isinstance(arg, TypeRef):
            return self.ontology.resolve_kind(arg)
        return self.ontology.resolve_name(arg)

    def _atoms(self, groups):
        return tuple(
            Atom(group.situation, self.resolve_item(item), group.mode)
            for group in groups
            for item in group.items
        )

    # --- statements ---

    def execute(self, statement, mode=None, replay=False):
        """
        Run one parsed statement.

        Args:
            statement: a Statement from statement_parser
            mode: "assert" or "query"; defaults to the session's mode
            replay: statements from a saved knowledge base; the active anchoring is not applied

        Returns:
            output text (may be empty)
        """
        mode = mode or self.state.mode
        if isinstance(statement, Directive):
            return self._directive(statement)
        if isinstance(statement, Propositions):
            if mode == "query":
                return self._query(statement)
            return self._assert(statement, None if replay else self.state.anchoring)
        if isinstance(statement, ConstraintDef):
            return self._constraint(statement)
        return self._declare(statement)

    def _declare(self, statement):
        ontology = self.ontology
        if isinstance(statement, ObjectDecl):
            self.store.declare_object(statement.name, statement.kind)
        elif isinstance(statement, RelationDecl):
            ontology.declare_relation(statement.name, [set(role) for role in statement.roles], statement.minimality)
        elif isinstance(statement, ParameterDecl):
            ontology.declare_parameter(
                statement.name, statement.base,
                lambda: [self.resolve_item(item) for item in statement.restrictions],
            )
        elif isinstance(statement, TypeDecl):
            ontology.define_type_abstraction(
                statement.name, statement.parameter, statement.grounding,
                [self.resolve_item(item) for item in statement.conditions],
            )
        elif isinstance(statement, InfonNaming):
            infon = self.resolve_item(statement.infon)
            if infon.variables():
                raise VariableAssertionError("named infons cannot contain variables")
            ontology.name_infon(statement.name, infon)
        elif isinstance(statement, NameBinding):
            if statement.target in ontology.infon_names:
                ontology.name_infon(statement.name, ontology.infon_names[statement.target])
            elif ontology.is_parameter(statement.target):
                ontology.declare_parameter(statement.name, statement.target)
            else:
                ontology.kind_of(statement.target)
                raise KindError(f"'{statement.target}' is neither an infon name nor a parameter")
        else:
            raise KindError(f"cannot execute {type(statement).__name__}")
        lines = [f"✓ {statement}"]
        if isinstance(statement, ObjectDecl):
            lines.extend(self._chaining_lines(self.engine.auto_forward()))
        return "\n".join(lines)

    def _assert(self, statement, anchoring):
        propositions = []
        for group in statement.groups:
            if isinstance(group.situation, Variable):
                raise VariableAssertionError(f"cannot assert into a variable situation: {group}")
            infons = tuple(self.resolve_item(item) for item in group.items)
            propositions.append(Proposition(group.situation, infons, group.mode))
        results = self.store.assert_propositions(propositions, anchoring=anchoring)
        lines = []
        for proposition, result in zip(propositions, results):
            lines.append(f"✓ {proposition}")
            lines.extend(self._chaining_lines(result.firings))
        return "\n".join(lines)

    def _constraint(self, statement):
        constraint = Constraint(
            group=statement.group,
            name=statement.name,
            antecedents=self._atoms(statement.antecedents),
            direction=Direction(statement.arrow),
            consequents=self._atoms(statement.consequents),
            conditions=tuple(self.resolve_item(item) for item in statement.conditions),
            label=statement.label,
        )
        self.engine.define_constraint(constraint)
        lines = [f"✓ constraint {constraint.group}/{constraint.name} ({constraint.direction})"]
        if constraint.forward:
            lines.extend(self._chaining_lines(self.engine.auto_forward()))
        return "\n".join(lines)

    def _query(self, statement):
        self.queries += 1
        options = self.state.query_options()
        query = Query(self._atoms(statement.groups), options)
        blocks = [
            render_solution(solution, options, index)
            for index, solution in enumerate(evaluate(self.engine, query), start=1)
        ]
        if not blocks:
            self.empty_queries += 1
            return "; no solutions"
        return "\n\n".join(blocks)

    def _chaining_lines(self, firings):
        if not firings:
            return []
        if self.state.trace:
            return [f"↻ {firing.trace_line()}" for firing in firings]
        accepted = sum(1 for firing in firings if firing.accepted)
        lines = [f"↻ forward chaining: {accepted} accepted, {len(firings) - accepted} refused"]
        lines.extend(
            f"⚠ refused {firing.situation} |= {firing.infon}: {firing.reason}"
            for firing in firings if not firing.accepted
        )
        return lines

    # --- directives ---

    def _directive(self, directive):
        name, args = directive.name, directive.args
        arg = args[0] if args else None
        state = self.state

        if name == "mode":
            if arg not in MODES:
                raise SitSyntaxError(":mode takes assert or query", expected="assert|query")
            self.state = replace(state, mode=arg)
        elif name == "anchor":
            if arg is None:
                raise SitSyntaxError(":anchor needs a situation", expected="SIT|off")
            if arg == "off":
                self.state = replace(state, anchoring=None)
            else:
                self.store.require_situation(arg)
                self.state = replace(state, anchoring=arg)
        elif name == "perspective":
            self.state = replace(state, perspectivity=_groups(args, name))
        elif name == "antecedent-perspective":
            value = None if arg == "off" else _groups(args, name)
            self.state = replace(state, antecedent_perspectivity=value)
        elif name == "group":
            if arg is None:
                raise SitSyntaxError(":group needs a group", expected="GROUP|off")
            self.state = replace(state, group_filter=None if arg == "off" else arg)
        elif name == "solutions":
            if arg == "all":
                self.state = replace(state, max_solutions=None)
            elif arg is not None and arg.isdigit() and int(arg) >= 1:
                self.state = replace(state, max_solutions=int(arg))
            else:
                raise SitSyntaxError(":solutions takes a positive count or all", expected="N|all")
        elif name == "trace":
            self.state = replace(state, trace=_switch(arg, name))
        elif name == "anchortrace":
            self.state = replace(state, anchor_trace=_switch(arg, name))
        elif name == "showanchors":
            self.state = replace(state, show_anchors=_switch(arg, name))
        elif name == "quit":
            self.state = replace(state, running=False)
            return "✓ bye"
        elif name == "chain":
            firings = self.engine.forward_chain()
            return "\n".join(self._chaining_lines(firings) or ["↻ forward chaining: nothing to do"])
        elif name == "list":
            return self._listing(arg)
        else:
            if arg is None:
                raise SitSyntaxError(f":{name} needs a file name", expected="FILE")
            return self._file_directive(name, arg)
        return f"✓ {directive}"

    def _file_directive(self, name, path):
        if name == "load":
            count = kb_storage.load_kb(self, path)
            return f"✓ loaded {path} ({count} statements)"
        if name == "save":
            kb_storage.save_kb(self.engine, path)
            return f"✓ saved {path}"
        if name == "export-dot":
            kb_storage.export_graph(self.store, path)
            return f"✓ exported part-of graph to {path}"
        facts = kb_report.fact_table(self.store, self.engine)
        kb_report.write_report(facts, path)
        return f"✓ report written to {path} ({len(facts)} facts)\n{kb_report.breakdown(facts)}"

    def _listing(self, what):
        if what not in LISTINGS:
            raise SitSyntaxError(":list needs a listing", expected="|".join(LISTINGS))
        builders = {
            "situations": lambda: kb_report.situations_table(self.store),
            "relations": lambda: kb_report.relations_table(self.ontology),
            "constraints": lambda: kb_report.constraints_table(self.engine),
            "parameters": lambda: kb_report.parameters_table(self.ontology),
            "anchors": lambda: kb_report.anchors_table(self.store),
            "facts": lambda: kb_report.fact_table(self.store, self.engine),
        }
        return kb_report.render_table(builders[what]())

    # --- lines ---

    def repl_step(self, line, line_number=1):
        """
        Parse and run one logical line.

        Lines starting with I> or Q> run in assert or query mode regardless
        of the current mode.

        Returns:
            (SessionState, output text)
        """
        text = line.strip()
        mode = None
        for prefix, prefix_mode in (("I>", "assert"), ("Q>", "query")):
            if text.startswith(prefix):
                mode = prefix_mode
                text = text[len(prefix):].strip()
                break
        try:
            statement = parse_statement(text, line=line_number)
            if statement is None:
                return self.state, ""
            output = self.execute(statement, mode)
        except SitError as exc:
            self.errors += 1
            output = f"✗ {type(exc).__name__}: {exc}"
        except OSError as exc:
            self.errors += 1
            output = f"✗ {type(exc).__name__}: {exc}"
        except Exception as exc:
            self.errors += 1
            logger.exception("unexpected failure on line %d", line_number)
            output = f"✗ {type(exc).__name__}: {exc}"
        return self.state, output

    def run_lines(self, lines):
        """
        Run a session script.

        Yields:
            (prompt + statement text, output) for every non-blank line until :quit
        """
        for number, text in logical_lines(lines):
            if not text or text.startswith(";"):
                continue
            prompt = self.state.prompt
            _, output = self.repl_step(text, number)
            echoed = text if text[:2] in ("I>", "Q>") else prompt + text
            yield echoed, output
            if not self.state.running:
                break

    def exit_code(self):
        if self.errors:
            return sit_config.EXIT_ERROR
        if self.empty_queries:
            return sit_config.EXIT_NO_SOLUTIONS
        return sit_config.EXIT_OK
