"""
Inference Engine

Constraints between infon patterns, typed unification, forward chaining to
a fixpoint and tabled backward proof search with negation as failure.

A constraint belongs to a group (its perspectivity set). Forward (=>) and
bidirectional (<=>) constraints fire when their antecedents hold; backward
(<=) and bidirectional constraints are used when a goal is proved.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum

import sit_config
from ontology import NULL, BasicKind, Infon, Variable, dual, kind_ref
from situation_store import WORLD, Mode, Proposition, render_proposition
from sit_errors import (
    ChainingLimitError,
    ConstraintDefinitionError,
    DepthLimitError,
    NonGroundNegationError,
    SitError,
    UnknownNameError,
)

logger = logging.getLogger(__name__)

ALL_GROUPS = "*"
CONSTRAINT_CLASSES = ("nomic", "necessary", "conventional")
SITUATION_ROLE = frozenset({kind_ref(BasicKind.SIT)})


class Direction(Enum):
    BACKWARD = "<="
    FORWARD = "=>"
    BOTH = "<=>"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Atom:
    """sit |= infon or sit |/= infon; the situation and args may be variables."""
    situation: object
    infon: Infon
    mode: Mode = Mode.SUPPORTS

    def substitute(self, mapping):
        situation = self.situation if self.situation is NULL else mapping.get(self.situation, self.situation)
        return Atom(situation, self.infon.substitute(mapping), self.mode)

    def variables(self):
        found = set(self.infon.variables())
        if isinstance(self.situation, Variable):
            found.add(self.situation)
        return found

    @property
    def is_ground(self):
        return not self.variables()

    def __str__(self):
        return render_proposition(self.situation, self.mode, [self.infon])


@dataclass(frozen=True)
class Constraint:
    group: str
    name: str
    antecedents: tuple
    direction: Direction
    consequents: tuple
    conditions: tuple = ()
    label: str = None

    @property
    def key(self):
        return self.group, self.name

    @property
    def forward(self):
        return self.direction in (Direction.FORWARD, Direction.BOTH)

    @property
    def backward(self):
        return self.direction in (Direction.BACKWARD, Direction.BOTH)

    def variables(self):
        found = set()
        for atom in self.antecedents + self.consequents:
            found |= atom.variables()
        return found

    def __str__(self):
        head = f"{self.group}: {self.name}"
        if self.label:
            head += f" ({self.label})"
        antecedents = ", ".join(str(atom) for atom in self.antecedents)
        consequents = ", ".join(str(atom) for atom in self.consequents)
        if self.direction is Direction.BACKWARD:
            body = f"{consequents} {self.direction} {antecedents}"
        else:
            body = f"{antecedents} {self.direction} {consequents}"
        text = f"{head}: {body}"
        if self.conditions:
            text += " UNDER-CONDITIONS: " + render_proposition(WORLD, Mode.SUPPORTS, self.conditions)
        return text


@dataclass(frozen=True)
class Firing:
    constraint: tuple
    bindings: tuple  # (variable text, value text), sorted
    situation: str
    infon: Infon
    accepted: bool
    reason: str = ""

    def trace_line(self):
        group, name = self.constraint
        bound = ", ".join(f"{variable}={value}" for variable, value in self.bindings)
        outcome = "accepted" if self.accepted else "refused"
        return f"FIRE {group}/{name} {{{bound}}} => {self.situation} |= {self.infon} [{outcome}]"


# --- unification ---

def walk(term, bindings):
    while isinstance(term, Variable) and term in bindings:
        term = bindings[term]
    return term


def resolve(term, bindings):
    """Fully apply bindings to a term, nested infons included."""
    term = walk(term, bindings)
    if isinstance(term, Infon):
        return Infon(term.relation, tuple(resolve(arg, bindings) for arg in term.args), term.polarity)
    return term


def resolve_atom(atom, bindings):
    return Atom(resolve(atom.situation, bindings), resolve(atom.infon, bindings), atom.mode)


def is_ground(term):
    if isinstance(term, Variable):
        return False
    if isinstance(term, Infon):
        return not term.variables()
    return True


def _occurs(variable, term, bindings):
    term = walk(term, bindings)
    if term == variable:
        return True
    if isinstance(term, Infon):
        return any(_occurs(variable, arg, bindings) for arg in term.args)
    return False


def _bind(variable, value, bindings, ontology, role):
    if _occurs(variable, value, bindings):
        return False
    if ontology is not None and role is not None and is_ground(value) and value is not NULL:
        try:
            if not ontology.appropriate(resolve(value, bindings), role):
                return False
        except SitError:
            return False
    bindings[variable] = value
    return True


def _unify_terms(left, right, bindings, ontology=None, role=None):
    left = walk(left, bindings)
    right = walk(right, bindings)
    if left is NULL or right is NULL:
        return left is right
    if type(left) is type(right) and left == right:
        return True
    if isinstance(left, Variable):
        return _bind(left, right, bindings, ontology, role)
    if isinstance(right, Variable):
        return _bind(right, left, bindings, ontology, role)
    if isinstance(left, Infon) and isinstance(right, Infon):
        return _unify_infons(left, right, bindings, ontology)
    return False


def _unify_infons(left, right, bindings, ontology):
    if left.relation != right.relation or left.polarity != right.polarity or len(left.args) != len(right.args):
        return False
    roles = [None] * len(left.args)
    if ontology is not None and left.relation in ontology.relations:
        roles = ontology.relations[left.relation].roles
    return all(
        _unify_terms(a, b, bindings, ontology, role)
        for a, b, role in zip(left.args, right.args, roles)
    )


def unify(pattern, ground, bindings=None, ontology=None):
    """
    Extend bindings so that pattern equals ground.

    Args:
        pattern: infon whose args may include variables
        ground: infon to match (its variables, if any, are bound too)
        bindings: existing binding dict, left untouched
        ontology: when given, every bound value must fit its argument role

    Returns:
        the extended binding dict, or None on failure
    """
    extended = dict(bindings or {})
    if _unify_infons(pattern, ground, extended, ontology):
        return extended
    return None


def unify_atoms(left, right, bindings=None, ontology=None):
    if left.mode is not right.mode:
        return None
    extended = dict(bindings or {})
    if not _unify_terms(left.situation, right.situation, extended, ontology, SITUATION_ROLE):
        return None
    if not _unify_infons(left.infon, right.infon, extended, ontology):
        return None
    return extended


def _variant_key(situation, infon):
    """Goal identity up to variable renaming."""
    names = {}

    def canon(term):
        if isinstance(term, Variable):
            return names.setdefault(term, Variable(f"_{len(names)}"))
        if isinstance(term, Infon):
            return Infon(term.relation, tuple(canon(arg) for arg in term.args), term.polarity)
        return term

    return canon(situation), canon(infon)


# --- proof state ---

@dataclass
class GoalTable:
    answers: list = field(default_factory=list)  # (situation, infon), discovery order
    seen: set = field(default_factory=set)
    complete: bool = False


@dataclass
class _Frame:
    key: tuple
    index: int
    low: int
    members: list = field(default_factory=list)
    cyclic: bool = False  # reached a goal still being evaluated


@dataclass
class ProofContext:
    """Tables and bookkeeping for one query evaluation or one chaining round."""
    anchoring: str = None
    group_filter: str = None
    antecedent_perspectivity: frozenset = None
    tables: dict = field(default_factory=dict)
    stack: list = field(default_factory=list)
    on_stack: dict = field(default_factory=dict)
    answer_count: int = 0
    depth_cuts: int = 0
    renames: itertools.count = field(default_factory=itertools.count)

    @property
    def depth_hit(self):
        return self.depth_cuts > 0


def perspective(groups):
    """Normalize a group name, iterable of names or '*' into a frozenset."""
    if groups is None:
        return frozenset()
    if isinstance(groups, str):
        return frozenset({groups})
    return frozenset(groups)


class InferenceEngine:
    """
    Constraint registry plus the chaining machinery over one SituationStore.

    Installing the engine hooks forward chaining into every successful
    assertion when auto_chain is on.
    """

    def __init__(self, store, depth_limit=None, max_firings=None):
        self.store = store
        self.constraints = {}
        self.depth_limit = depth_limit if depth_limit is not None else sit_config.DEFAULT_DEPTH_LIMIT
        self.max_firings = max_firings if max_firings is not None else sit_config.DEFAULT_MAX_FIRINGS
        self.antecedent_perspectivity = None
        self.auto_chain = True
        # (situation, infon) asserted by forward chaining
        self.chained = set()
        store.after_assert = self._after_assert

    @property
    def ontology(self):
        return self.store.ontology

    # --- definition ---

    def groups(self):
        return sorted({group for group, _ in self.constraints})

    def sorted_constraints(self):
        return [self.constraints[key] for key in sorted(self.constraints)]

    def define_constraint(self, constraint):
        """
        Register a constraint after checking it is well formed.

        Returns:
            the (group, name) identifier
        """
        if constraint.key in self.constraints:
            raise ConstraintDefinitionError(f"constraint {constraint.group}/{constraint.name} already exists")
        if not constraint.antecedents or not constraint.consequents:
            raise ConstraintDefinitionError("a constraint needs antecedents and consequents")
        if constraint.label is not None and constraint.label not in CONSTRAINT_CLASSES:
            raise ConstraintDefinitionError(
                f"constraint class must be one of {', '.join(CONSTRAINT_CLASSES)}, got '{constraint.label}'"
            )
        for atom in constraint.consequents:
            if atom.mode is not Mode.SUPPORTS:
                raise ConstraintDefinitionError(f"consequents cannot use |/=: {atom}")
        for atom in constraint.antecedents + constraint.consequents:
            self._check_atom(atom)

        bound = set()
        for atom in constraint.antecedents:
            bound |= atom.variables()
        for atom in constraint.consequents:
            free = atom.infon.variables() - bound
            if free:
                names = ", ".join(sorted(str(variable) for variable in free))
                raise ConstraintDefinitionError(f"consequent variable(s) {names} do not occur in the antecedents")
            if isinstance(atom.situation, Variable) and atom.situation not in bound and constraint.backward:
                raise ConstraintDefinitionError(
                    f"situation {atom.situation} must occur in the antecedents of a backward constraint"
                )

        conditions = []
        for condition in constraint.conditions:
            if condition.variables():
                raise ConstraintDefinitionError(f"background conditions must be ground: {condition}")
            conditions.append(self._validated(condition))
        if tuple(conditions) != constraint.conditions:
            constraint = Constraint(
                constraint.group, constraint.name, constraint.antecedents, constraint.direction,
                constraint.consequents, tuple(conditions), constraint.label,
            )

        self.constraints[constraint.key] = constraint
        logger.debug("defined constraint %s/%s", constraint.group, constraint.name)
        return constraint.key

    def _validated(self, infon):
        try:
            return self.ontology.validate(infon)
        except UnknownNameError as exc:
            raise ConstraintDefinitionError(str(exc)) from exc

    def _check_atom(self, atom):
        if not isinstance(atom.situation, Variable) and not self.store.ontology.is_situation(atom.situation):
            raise ConstraintDefinitionError(f"'{atom.situation}' is not a situation")
        self._validated(atom.infon)

    # --- candidacy ---

    def is_candidate(self, constraint):
        """True unless w directly supports the dual of some background condition."""
        return not any(
            self.store.supports_directly(WORLD, dual(condition))
            for condition in constraint.conditions
        )

    def _in_perspective(self, constraint, persp, group_filter):
        if group_filter is not None and constraint.group != group_filter:
            return False
        return ALL_GROUPS in persp or constraint.group in persp

    def backward_constraints(self, persp, group_filter=None):
        return [
            c for c in self.sorted_constraints()
            if c.backward and self._in_perspective(c, persp, group_filter)
        ]

    # --- backward proof ---

    def new_context(self, anchoring=None, group_filter=None, antecedent_perspectivity=None):
        ant = antecedent_perspectivity
        if ant is None and self.antecedent_perspectivity is not None:
            ant = self.antecedent_perspectivity
        return ProofContext(
            anchoring=anchoring,
            group_filter=group_filter,
            antecedent_perspectivity=perspective(ant) if ant is not None else None,
        )

    def backward_prove(self, goal, persp, antecedent_persp=None, depth=None, context=None):
        """
        Yield each binding under which goal holds.

        Args:
            goal: an Atom (|= or |/=)
            persp: group name, iterable of groups, or '*'
            antecedent_persp: groups proving rule antecedents instead of each rule's own group
            depth: rule applications allowed along one branch

        Raises:
            DepthLimitError: no binding found and the depth limit cut the search
        """
        ctx = context or self.new_context(antecedent_perspectivity=antecedent_persp)
        depth = self.depth_limit if depth is None else depth
        found = False
        for bindings in self.prove_all([goal], {}, perspective(persp), depth, ctx):
            found = True
            yield bindings
        if not found and ctx.depth_hit:
            raise DepthLimitError(f"depth limit {depth} reached proving {goal}")

    def prove_all(self, atoms, bindings, persp, depth, ctx):
        """Prove atoms left to right, threading bindings."""
        if not atoms:
            yield bindings
            return
        first, rest = atoms[0], atoms[1:]
        for extended in self._prove_atom(first, bindings, persp, depth, ctx):
            yield from self.prove_all(rest, extended, persp, depth, ctx)

    def _prove_atom(self, atom, bindings, persp, depth, ctx):
        situation = resolve(atom.situation, bindings)
        infon = resolve(atom.infon, bindings)
        if isinstance(situation, str) and not self.ontology.is_situation(situation):
            return
        if atom.mode is Mode.NOT_SUPPORTS:
            if not is_ground(situation) or not is_ground(infon):
                raise NonGroundNegationError(
                    f"{render_proposition(situation, atom.mode, [infon])} is not ground when evaluated"
                )
            cuts = ctx.depth_cuts
            if self._solve(situation, infon, persp, depth, ctx):
                return
            if ctx.depth_cuts > cuts:
                raise DepthLimitError(f"depth limit reached; cannot decide {situation} |/= {infon}")
            yield bindings
            return
        for answer_situation, answer in self._solve(situation, infon, persp, depth, ctx):
            extended = dict(bindings)
            if not _unify_terms(situation, answer_situation, extended, self.ontology, SITUATION_ROLE):
                continue
            if _unify_infons(infon, answer, extended, self.ontology):
                yield extended

    def _solve(self, situation, infon, persp, depth, ctx):
        key = (_variant_key(situation, infon), persp)
        table = ctx.tables.get(key)
        if table is not None and table.complete:
            return list(table.answers)
        if key in ctx.on_stack:
            index = ctx.on_stack[key]
            top = ctx.stack[-1]
            top.low = min(top.low, index)
            for waiting in ctx.stack[index:]:
                waiting.cyclic = True
            return list(table.answers)
        if table is None:
            table = ctx.tables[key] = GoalTable()

        frame = _Frame(key, len(ctx.stack), len(ctx.stack))
        ctx.stack.append(frame)
        ctx.on_stack[key] = frame.index
        cuts = ctx.depth_cuts
        try:
            while True:
                mark = ctx.answer_count
                self._evaluate(situation, infon, persp, depth, table, ctx)
                if frame.low < frame.index or not frame.cyclic or ctx.answer_count == mark:
                    break
        finally:
            ctx.stack.pop()
            del ctx.on_stack[key]

        if frame.low == frame.index:
            if ctx.depth_cuts == cuts:
                table.complete = True
                for member in frame.members:
                    ctx.tables[member].complete = True
        else:
            parent = ctx.stack[-1]
            parent.low = min(parent.low, frame.low)
            parent.members.extend([key] + frame.members)
        return list(table.answers)

    def _record(self, table, ctx, situation, infon):
        answer = (situation, infon)
        if answer not in table.seen:
            table.seen.add(answer)
            table.answers.append(answer)
            ctx.answer_count += 1

    def _evaluate(self, situation, infon, persp, depth, table, ctx):
        store = self.store
        goal = Atom(situation, infon)
        situations = [situation] if isinstance(situation, str) else store.situation_names()
        for name in situations:
            for fact in store.candidate_infons(name, infon, ctx.anchoring):
                if unify(infon, fact, ontology=self.ontology) is not None:
                    self._record(table, ctx, name, fact)

        rules = [
            c for c in self.backward_constraints(persp, ctx.group_filter)
            if any(atom.infon.relation == infon.relation for atom in c.consequents)
        ]
        if not rules:
            return
        if depth <= 0:
            ctx.depth_cuts += 1
            return
        targets = sorted(store.descendants(situation)) if isinstance(situation, str) else [situation]
        for constraint in rules:
            if not self.is_candidate(constraint):
                continue
            renamed = self._rename(constraint, ctx)
            ant_persp = ctx.antecedent_perspectivity or frozenset({constraint.group})
            for consequent in renamed.consequents:
                if consequent.infon.relation != infon.relation or consequent.infon.polarity != infon.polarity:
                    continue
                for target in targets:
                    start = unify_atoms(consequent, Atom(target, goal.infon), ontology=self.ontology)
                    if start is None:
                        continue
                    for bindings in self.prove_all(renamed.antecedents, start, ant_persp, depth - 1, ctx):
                        where = resolve(consequent.situation, bindings)
                        derived = resolve(consequent.infon, bindings)
                        if not isinstance(where, str) or not is_ground(derived):
                            continue
                        if not store.ontology.is_situation(where):
                            continue
                        if isinstance(situation, str):
                            self._record(table, ctx, situation, derived)
                        else:
                            for holder in sorted(store.ancestors(where)):
                                self._record(table, ctx, holder, derived)

    def _rename(self, constraint, ctx):
        suffix = next(ctx.renames)
        mapping = {variable: Variable(f"{variable.name}#{suffix}") for variable in constraint.variables()}
        return Constraint(
            constraint.group, constraint.name,
            tuple(atom.substitute(mapping) for atom in constraint.antecedents),
            constraint.direction,
            tuple(atom.substitute(mapping) for atom in constraint.consequents),
            constraint.conditions, constraint.label,
        )

    # --- forward chaining ---

    def _after_assert(self, result):
        return self.auto_forward(trigger=result)

    def auto_forward(self, trigger=None):
        """Forward chaining as triggered by new assertions or declarations."""
        if not self.auto_chain or not any(c.forward for c in self.constraints.values()):
            return []
        return self.forward_chain(trigger=trigger)

    def forward_chain(self, trigger=None):
        """
        Fire forward and bidirectional constraints until nothing new is asserted.

        Returns:
            every Firing attempted, accepted and refused

        Raises:
            ChainingLimitError: the firing cap was reached first
        """
        store = self.store
        firings = []
        refused = set()
        if trigger is not None:
            logger.debug("forward chaining triggered by %s", trigger.situation)
        with store.lock:
            progress = True
            while progress:
                progress = False
                for constraint in self.sorted_constraints():
                    if not constraint.forward or not self.is_candidate(constraint):
                        continue
                    for fired in self._fire(constraint, refused, firings):
                        progress = progress or fired
        accepted = sum(1 for firing in firings if firing.accepted)
        if firings:
            logger.info("forward chaining: %d accepted, %d refused", accepted, len(firings) - accepted)
        return firings

    def _fire(self, constraint, refused, firings):
        ctx = self.new_context()
        persp = ctx.antecedent_perspectivity or frozenset({constraint.group})
        own_variables = constraint.variables()
        matches = []
        seen = set()
        for bindings in self.prove_all(list(constraint.antecedents), {}, persp, self.depth_limit, ctx):
            shown = tuple(sorted(
                ((str(variable), resolve(variable, bindings))
                 for variable in own_variables if is_ground(resolve(variable, bindings))),
                key=lambda pair: pair[0],
            ))
            if shown not in seen:
                seen.add(shown)
                matches.append((bindings, shown))

        for index, (bindings, shown) in enumerate(matches):
            bindings = self._bind_existential(constraint, bindings)
            if bindings is None:
                continue
            pending = [resolve_atom(atom, bindings) for atom in constraint.consequents]
            for position, atom in enumerate(pending):
                if not isinstance(atom.situation, str) or not atom.is_ground:
                    continue
                key = (constraint.key, atom.situation, atom.infon)
                if key in refused or self.store.supports_directly(atom.situation, atom.infon):
                    continue
                if len(firings) >= self.max_firings:
                    frontier = pending[position:] + [
                        resolve_atom(consequent, later)
                        for later, _ in matches[index + 1:]
                        for consequent in constraint.consequents
                    ]
                    raise ChainingLimitError(self.max_firings, frontier)
                text_bindings = tuple((name, str(value)) for name, value in shown)
                try:
                    self.store.assert_proposition(Proposition(atom.situation, (atom.infon,)), fire_hook=False)
                except SitError as exc:
                    refused.add(key)
                    firing = Firing(constraint.key, text_bindings, atom.situation, atom.infon, False, str(exc))
                    logger.warning("refused consequent of %s/%s: %s", *constraint.key, exc)
                    self._emit(firing, firings)
                    continue
                self.chained.add((atom.situation, atom.infon))
                self._emit(Firing(constraint.key, text_bindings, atom.situation, atom.infon, True), firings)
                yield True

    def _bind_existential(self, constraint, bindings):
        """
        Bind consequent situation variables the antecedents left open: reuse a
        situation already supporting every consequent placed there, or create
        a fresh one.
        """
        store = self.store
        open_variables = sorted(
            {atom.situation for atom in constraint.consequents
             if isinstance(walk(atom.situation, bindings), Variable)},
            key=str,
        )
        if not open_variables:
            return bindings
        bindings = dict(bindings)
        for variable in open_variables:
            needed = [
                resolve(atom.infon, bindings) for atom in constraint.consequents if atom.situation == variable
            ]
            holder = next(
                (name for name in store.situation_names()
                 if all(store.supports_directly(name, infon) for infon in needed)),
                None,
            )
            if holder is None:
                holder = self._fresh_situation(constraint.name)
            bindings[variable] = holder
        return bindings

    def _fresh_situation(self, constraint_name):
        ontology = self.ontology
        for index in itertools.count(1):
            name = sit_config.FRESH_SITUATION_TEMPLATE.format(constraint=constraint_name.lower(), index=index)
            if not ontology.is_declared(name):
                self.store.create_situation(name)
                logger.info("created situation %s", name)
                return name

    def _emit(self, firing, firings):
        firings.append(firing)
        logger.debug(firing.trace_line())
