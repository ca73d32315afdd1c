"""
Knowledge Base Storage

Saves a session's knowledge base as statements in the interpreter's own
syntax, replays such a file through the normal assertion path, and exports
the part-of hierarchy as a Graphviz digraph.

File layout: preamble comments, declarations in the order they were made,
propositions (w first, then every other situation by name), then
constraints by group and name.
"""

import logging
from pathlib import Path

import sit_config
from situation_store import WORLD
from statement_parser import Directive, logical_lines, parse_statement
from sit_errors import ReplayError, SitError, SitSyntaxError

logger = logging.getLogger(__name__)


def _declaration_line(ontology, category, name):
    if category == "object":
        return f"{name}: {ontology.objects[name].kind}"
    if category == "relation":
        return str(ontology.relations[name])
    if category == "parameter":
        parameter = ontology.parameters[name]
        text = f"{name} = ~{parameter.base.value}"
        restrictions = sorted(parameter.restrictions, key=str)
        if len(restrictions) == 1:
            text += f" ^ {restrictions[0]}"
        elif restrictions:
            text += " ^ {" + ", ".join(str(r) for r in restrictions) + "}"
        return text
    if category == "type":
        abstraction = ontology.types[name]
        conditions = ", ".join(str(c) for c in abstraction.conditions)
        if len(abstraction.conditions) > 1:
            conditions = "{" + conditions + "}"
        return f"~{name} = [{abstraction.parameter} | {abstraction.grounding} |= {conditions}]"
    if category == "infon":
        return f"{name} = {ontology.infon_names[name]}"
    raise ValueError(f"unknown declaration category {category}")


def kb_lines(engine):
    """Every line of the saved form of the engine's knowledge base."""
    store = engine.store
    ontology = store.ontology
    lines = list(sit_config.KB_PREAMBLE)
    lines.extend(_declaration_line(ontology, category, name) for category, name in ontology.history)
    order = [WORLD] + [name for name in store.situation_names() if name != WORLD]
    for situation in order:
        for infon in sorted(store.own_infons(situation), key=str):
            lines.append(f"{situation} |= {infon}")
    lines.extend(str(constraint) for constraint in engine.sorted_constraints())
    return lines


def save_kb(engine, path):
    with engine.store.lock:
        text = "\n".join(kb_lines(engine)) + "\n"
    Path(path).write_text(text, encoding="utf-8")
    logger.info("saved knowledge base to %s", path)


def load_kb(session, path):
    """
    Replay a saved knowledge base into a session, statement by statement.

    The whole file is parsed before anything is replayed.

    Returns:
        number of statements replayed

    Raises:
        SitSyntaxError: with the file's line number
        ReplayError: naming the refused statement and its line
    """
    with open(path, encoding="utf-8") as handle:
        raw_lines = handle.readlines()

    statements = []
    for number, text in logical_lines(raw_lines):
        try:
            statement = parse_statement(text, line=number)
        except SitSyntaxError as exc:
            raise SitSyntaxError(f"{path}: cannot parse statement", exc.line, exc.column, exc.expected) from None
        if statement is None:
            continue
        if isinstance(statement, Directive):
            raise ReplayError(path, number, text, "directives are not allowed in a knowledge base")
        statements.append((number, text, statement))

    for number, text, statement in statements:
        try:
            session.execute(statement, mode="assert", replay=True)
        except SitError as exc:
            raise ReplayError(path, number, text, exc) from exc
    logger.info("loaded %d statements from %s", len(statements), path)
    return len(statements)


def graph_edges(store):
    """
    Direct part-of edges with transitive ones dropped; top-level situations point at w.
    """
    edges = []
    for name in store.situation_names():
        if name == WORLD:
            continue
        parents = store.parents_of(name)
        if not parents:
            edges.append((name, WORLD))
            continue
        for parent in parents:
            others = [other for other in parents if other != parent]
            if any(parent in store.ancestors(other) for other in others):
                continue
            edges.append((name, parent))
    return sorted(edges)


def dot_text(store):
    lines = ["digraph situations {"]
    lines.extend(f'    "{name}";' for name in store.situation_names())
    lines.extend(f'    "{child}" -> "{parent}";' for child, parent in graph_edges(store))
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_graph(store, path):
    Path(path).write_text(dot_text(store), encoding="utf-8")
    logger.info("exported part-of graph to %s", path)
