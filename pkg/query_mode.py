"""
Query Mode

Evaluates conjunctive queries over situations and renders the solutions.

Anchors from the chosen anchoring situation are substituted into the query
before evaluation, stored infons are matched through the same anchors, and
parameters left in a solution are replaced when it is rendered.
"""

import logging
from dataclasses import dataclass, field

from inference_engine import ALL_GROUPS, Atom, is_ground, perspective, resolve, resolve_atom
from ontology import Infon
from situation_store import render_proposition
from sit_errors import DepthLimitError, UnknownNameError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QueryOptions:
    perspectivity: frozenset = frozenset({ALL_GROUPS})
    antecedent_perspectivity: frozenset = None
    group_filter: str = None
    anchoring: str = None
    max_solutions: int = None  # None means unbounded
    show_anchors: bool = True
    show_anchor_trace: bool = False

    def __post_init__(self):
        if self.max_solutions is not None and self.max_solutions < 1:
            raise ValueError("max_solutions must be at least 1")


@dataclass(frozen=True)
class Query:
    atoms: tuple
    options: QueryOptions = field(default_factory=QueryOptions)

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a query needs at least one atom")

    def variables(self):
        found = set()
        for atom in self.atoms:
            found |= atom.variables()
        return found


@dataclass(frozen=True)
class Solution:
    bindings: tuple        # (Variable, value) sorted by variable name
    atoms: tuple           # ground, rendered atoms
    anchor_facts: tuple    # (anchoring situation, anchor infon)
    trace: tuple = ()      # (parameter, target)

    def binding(self, name):
        for variable, value in self.bindings:
            if variable.name == name:
                return value
        raise KeyError(name)


def _check_groups(engine, groups):
    known = set(engine.groups())
    for group in sorted(groups or ()):
        if group != ALL_GROUPS and group not in known:
            raise UnknownNameError(group, "constraint group")


def _parameters_in(atoms, ontology):
    found = []
    for atom in atoms:
        terms = [atom.situation] + list(atom.infon.terms())
        for term in terms:
            if ontology.is_parameter(term) and term not in found:
                found.append(term)
    return found


def evaluate(engine, query):
    """
    Stream the solutions of a query.

    Args:
        engine: InferenceEngine over the store to query
        query: Query with its options

    Yields:
        Solution, in discovery order, duplicates removed

    Raises:
        UnknownNameError: unknown situation, anchoring situation or group
        NonGroundNegationError: a |/= atom still has variables when reached
        DepthLimitError: nothing found and the depth limit cut the search
    """
    store = engine.store
    options = query.options
    for atom in query.atoms:
        if isinstance(atom.situation, str):
            store.require_situation(atom.situation)
    if options.anchoring is not None:
        store.require_situation(options.anchoring)
    _check_groups(engine, options.perspectivity)
    _check_groups(engine, options.antecedent_perspectivity)
    if options.group_filter is not None:
        _check_groups(engine, {options.group_filter})

    atoms = list(query.atoms)
    anchors = store.anchors_of(options.anchoring) if options.anchoring else {}
    if anchors:
        atoms = [atom.substitute(anchors) for atom in atoms]
        logger.debug("query after anchoring: %s", ", ".join(str(atom) for atom in atoms))

    ctx = engine.new_context(
        anchoring=options.anchoring,
        group_filter=options.group_filter,
        antecedent_perspectivity=options.antecedent_perspectivity,
    )
    variables = sorted(query.variables(), key=lambda variable: variable.name)
    original_parameters = _parameters_in(query.atoms, store.ontology)
    # Solutions come out in discovery order, not sorted by binding. An
    # anchored query lists the solution through the anchored facts first.
    seen = set()
    count = 0
    for bindings in engine.prove_all(atoms, {}, perspective(options.perspectivity), engine.depth_limit, ctx):
        values = tuple((variable, resolve(variable, bindings)) for variable in variables)
        if values in seen:
            continue
        seen.add(values)
        rendered = [resolve_atom(atom, bindings) for atom in atoms]
        if anchors:
            rendered = [atom.substitute(anchors) for atom in rendered]
        used = [
            parameter for parameter in original_parameters + _parameters_in(rendered, store.ontology)
            if parameter in anchors
        ]
        used = list(dict.fromkeys(used))
        anchor_facts = tuple(
            (options.anchoring, Infon("anchor", (parameter, anchors[parameter]), 1)) for parameter in used
        )
        trace = tuple((parameter, anchors[parameter]) for parameter in used)
        count += 1
        yield Solution(values, tuple(rendered), anchor_facts, trace)
        if options.max_solutions is not None and count >= options.max_solutions:
            return
    if count == 0 and ctx.depth_hit:
        raise DepthLimitError(f"depth limit {engine.depth_limit} reached before any solution was found")


def check_solution(engine, solution, options=None):
    """Re-check every rendered atom on its own; True when all of them hold."""
    options = options or QueryOptions()
    for atom in solution.atoms:
        if not is_ground(atom.situation) or not atom.is_ground:
            return False
        holds = any(True for _ in engine.prove_all(
            [Atom(atom.situation, atom.infon, atom.mode)], {},
            perspective(options.perspectivity), engine.depth_limit,
            engine.new_context(anchoring=options.anchoring, group_filter=options.group_filter),
        ))
        if not holds:
            return False
    return True


def render_solution(solution, options, index=1):
    """
    Text block for one solution; every non-comment line re-parses as a proposition.

    Consecutive atoms on the same situation and mode share one line.
    """
    lines = [f"; Solution {index}:"]
    groups = []
    for atom in solution.atoms:
        if groups and groups[-1][0] == (atom.situation, atom.mode):
            groups[-1][1].append(atom.infon)
        else:
            groups.append(((atom.situation, atom.mode), [atom.infon]))
    for (situation, mode), infons in groups:
        infons = list(dict.fromkeys(infons))
        lines.append(render_proposition(situation, mode, infons))
    if options.show_anchors and solution.anchor_facts:
        lines.append("; with the anchoring:")
        for situation, infon in solution.anchor_facts:
            lines.append(f"{situation} |= {infon}")
    if options.show_anchor_trace:
        lines.append("; anchor trace:")
        for parameter, target in solution.trace:
            lines.append(f";   {parameter} -> {target}")
    return "\n".join(lines)
