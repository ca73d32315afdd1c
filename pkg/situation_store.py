"""
Situation Store

Owns situations, the supports relation, the part-of hierarchy, the
background situation w, coherence enforcement and anchoring situations.

Every change goes through assert_proposition: a proposition is applied to a
working copy of the hierarchy, coherence is re-verified for every situation
whose effective set changed, and the whole proposition is refused if any
check fails.
"""

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum

import sit_config
from ontology import NULL, BasicKind, Infon, Ontology, TypeRef, dual, kind_ref
from sit_errors import (
    AnchorKindError,
    AnchorRestrictionError,
    DuplicateAnchorError,
    IncoherenceError,
    KindError,
    LocationError,
    NegativeAssertionError,
    PartOfCycleError,
    SitError,
    UnknownNameError,
    VariableAssertionError,
)

logger = logging.getLogger(__name__)

WORLD = sit_config.WORLD_SITUATION

# support tiers, used to order candidate facts: local information first
OWN, PART, BACKGROUND = 0, 1, 2


class Mode(Enum):
    SUPPORTS = "|="
    NOT_SUPPORTS = "|/="

    def __str__(self):
        return self.value


@dataclass
class Situation:
    name: str
    own: set = field(default_factory=set)
    parents: set = field(default_factory=set)
    time: object = None
    place: object = None

    def copy(self):
        return Situation(self.name, set(self.own), set(self.parents), self.time, self.place)


@dataclass(frozen=True)
class Proposition:
    situation: str
    infons: tuple
    mode: Mode = Mode.SUPPORTS

    def __post_init__(self):
        if not self.infons:
            raise ValueError("a proposition needs at least one infon")

    def substitute(self, mapping):
        return Proposition(
            mapping.get(self.situation, self.situation),
            tuple(infon.substitute(mapping) for infon in self.infons),
            self.mode,
        )

    def __str__(self):
        return render_proposition(self.situation, self.mode, self.infons)


def render_proposition(situation, mode, infons):
    infons = list(infons)
    if len(infons) == 1:
        return f"{situation} {mode} {infons[0]}"
    return f"{situation} {mode} {{" + ", ".join(str(infon) for infon in infons) + "}"


@dataclass
class AssertResult:
    situation: str
    added: list = field(default_factory=list)    # (situation, infon)
    edges: list = field(default_factory=list)    # (child, parent)
    anchors: list = field(default_factory=list)  # (anchoring situation, parameter, target)
    firings: list = field(default_factory=list)

    @property
    def changed(self):
        return bool(self.added or self.edges)


class SituationStore:
    """
    Situations over a shared Ontology.

    after_assert, when set, is called with the AssertResult of every
    successful public assertion and returns the forward-chaining firings.
    """

    def __init__(self, ontology=None):
        self.ontology = ontology or Ontology()
        self.ontology.membership = self.of_type
        self.situations = {WORLD: Situation(WORLD)}
        self.children = {WORLD: set()}
        self.anchors = {}
        self.after_assert = None
        self._lock = threading.RLock()
        self._revision = 0
        self._ordered_cache = {}
        self._membership_stack = set()

    @property
    def lock(self):
        return self._lock

    @property
    def revision(self):
        return self._revision

    def _changed(self):
        self._revision += 1
        self._ordered_cache.clear()

    # --- declarations ---

    def declare_object(self, name, kind):
        """
        Declare an object; situations get a store record, and objects of a
        parametric type have the type's conditions asserted into its grounding
        situation.
        """
        with self._lock:
            entry = self.ontology.declare_object(name, kind)
            if entry.basic is BasicKind.SIT:
                self.situations[name] = Situation(name)
                self.children[name] = set()
                self._changed()
            if not entry.kind.is_basic:
                abstraction = self.ontology.types[entry.kind.name]
                conditions = self.ontology.instantiate(entry.kind.name, name)
                try:
                    self.assert_proposition(Proposition(abstraction.grounding, tuple(conditions)))
                except SitError:
                    self.situations.pop(name, None)
                    self.children.pop(name, None)
                    self.ontology.forget("object", name)
                    self._changed()
                    raise
            return entry

    def create_situation(self, name):
        self.declare_object(name, kind_ref(BasicKind.SIT))
        return self.situations[name]

    def situation_names(self):
        return sorted(self.situations)

    def require_situation(self, name):
        if name not in self.situations:
            raise UnknownNameError(name, "situation")
        return self.situations[name]

    # --- hierarchy ---

    def ancestors(self, name):
        """Situations that name is part of, including name itself."""
        if name == WORLD:
            return set(self.situations)
        seen = {name}
        frontier = [name]
        while frontier:
            current = frontier.pop()
            for parent in self.situations[current].parents:
                if parent not in seen:
                    seen.add(parent)
                    frontier.append(parent)
        return seen

    def descendants(self, name):
        """Situations that are part of name, including name and w."""
        seen = {name, WORLD}
        frontier = [name]
        while frontier:
            current = frontier.pop()
            for child in self.children.get(current, ()):
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        return seen

    def part_of(self, child, parent):
        self.require_situation(child)
        self.require_situation(parent)
        return child in self.descendants(parent)

    def parents_of(self, name):
        return sorted(self.require_situation(name).parents)

    def make_part_of(self, child, parent):
        return self.assert_proposition(
            Proposition(parent, (Infon("make-part-of", (child, parent), 1),))
        )

    def located(self, name):
        situation = self.require_situation(name)
        return situation.time, situation.place

    # --- supports ---

    def own_infons(self, name):
        return frozenset(self.require_situation(name).own)

    def effective_infons(self, name):
        """Own infons of name, of every situation part of it, and of w (typing facts included)."""
        self.require_situation(name)
        facts = set(self.ontology.typing_facts())
        for part in self.descendants(name):
            facts |= self.situations[part].own
        return frozenset(facts)

    def ordered_infons(self, name):
        """Effective infons as (tier, infon), own facts first, then parts, then w; stable order."""
        self.require_situation(name)
        key = name
        if key in self._ordered_cache:
            return self._ordered_cache[key]
        seen = set()
        ordered = []

        def take(tier, infons):
            for infon in sorted(infons, key=str):
                if infon not in seen:
                    seen.add(infon)
                    ordered.append((tier, infon))

        take(OWN, self.situations[name].own)
        for part in sorted(self.descendants(name) - {name, WORLD}):
            take(PART, self.situations[part].own)
        take(BACKGROUND, self.situations[WORLD].own)
        take(BACKGROUND, self.ontology.typing_facts())
        self._ordered_cache[key] = ordered
        return ordered

    def candidate_infons(self, name, pattern, anchoring=None):
        """
        Effective infons of name that could match pattern (same relation and
        polarity), in support order, viewed through anchoring when given.
        """
        mapping = self.anchors_of(anchoring) if anchoring else {}
        seen = set()
        for _, infon in self.ordered_infons(name):
            if infon.relation != pattern.relation or infon.polarity != pattern.polarity:
                continue
            if mapping:
                infon = infon.substitute(mapping)
            if infon not in seen:
                seen.add(infon)
                yield infon
        for infon in self.derived_typing(pattern):
            if infon not in seen:
                seen.add(infon)
                yield infon

    def derived_typing(self, pattern):
        """≪of-type, x, ~T, 1≫ for members x of a parametric type T named in pattern."""
        if pattern.relation != "of-type" or pattern.polarity != 1:
            return
        type_ref = pattern.args[1]
        if not isinstance(type_ref, TypeRef) or type_ref.is_basic or type_ref.name not in self.ontology.types:
            return
        base = self.ontology.type_base(type_ref.name)
        for name in sorted(self.ontology.objects):
            if self.ontology.objects[name].basic is base and self.of_type(name, type_ref.name):
                yield Infon("of-type", (name, type_ref), 1)

    def supports_directly(self, name, infon):
        if infon in self.effective_infons(name):
            return True
        if infon.relation == "of-type" and infon.polarity == 1:
            member, type_ref = infon.args
            if isinstance(type_ref, TypeRef) and not type_ref.is_basic:
                return self.of_type(member, type_ref.name)
        return False

    def supports(self, name, infon, prover=None):
        """
        name ⊨ infon: directly (own, parts, w) or, when a prover is given,
        by backward chaining through it.
        """
        self.require_situation(name)
        if self.supports_directly(name, infon):
            return True
        if prover is not None:
            return prover(name, infon)
        return False

    def not_supports(self, name, infon, prover=None):
        return not self.supports(name, infon, prover)

    def of_type(self, member, type_name):
        """
        Type membership. For a parametric type the member's basic kind must
        match and the grounding situation must support the instantiated
        conditions.
        """
        if not isinstance(member, str):
            return False
        ontology = self.ontology
        if type_name in BasicKind.__members__:
            try:
                return ontology.kind_of(member) is BasicKind(type_name)
            except UnknownNameError:
                return False
        if type_name not in ontology.types:
            return False
        entry = ontology.objects.get(member)
        if entry is None or entry.basic is not ontology.type_base(type_name):
            return False
        if entry.kind == TypeRef(type_name):
            return True
        key = (member, type_name)
        if key in self._membership_stack:
            return False
        self._membership_stack.add(key)
        try:
            grounding = ontology.types[type_name].grounding
            return all(
                self.supports_directly(grounding, condition)
                for condition in ontology.instantiate(type_name, member)
            )
        finally:
            self._membership_stack.discard(key)

    # --- anchoring ---

    def anchors_of(self, name):
        if name is None:
            return {}
        self.require_situation(name)
        return dict(self.anchors.get(name, {}))

    def register_anchor(self, anchoring, parameter, target):
        return self.assert_proposition(
            Proposition(anchoring, (Infon("anchor", (parameter, target), 1),))
        )

    def apply_anchoring(self, expr, anchoring):
        """Replace every parameter anchored in the anchoring situation; others stay."""
        mapping = self.anchors_of(anchoring)
        if not mapping:
            return expr
        if isinstance(expr, (list, tuple)):
            return type(expr)(item.substitute(mapping) for item in expr)
        return expr.substitute(mapping)

    def _check_anchor(self, anchoring, parameter, target):
        ontology = self.ontology
        if not ontology.is_parameter(parameter):
            raise AnchorKindError(f"only parameters can be anchored, got '{parameter}'")
        param = ontology.parameters[parameter]
        if target is NULL:
            raise AnchorKindError(f"{parameter} cannot be anchored to the null object")
        if ontology.is_parameter(target):
            target_kind = ontology.parameters[target].base
        else:
            target_kind = ontology.kind_of(target)
        if target_kind is not param.base:
            raise AnchorKindError(
                f"{parameter} ranges over ~{param.base.value}, but '{target}' is ~{target_kind.value}"
            )
        existing = self.anchors.get(anchoring, {}).get(parameter)
        if existing is not None and existing != target:
            raise DuplicateAnchorError(f"{parameter} is already anchored to '{existing}' in {anchoring}")
        for restriction in sorted(param.restrictions, key=str):
            needed = restriction.substitute({parameter: target})
            if not self.supports_directly(WORLD, needed):
                raise AnchorRestrictionError(
                    f"anchoring {parameter} to '{target}' needs {WORLD} |= {needed}"
                )

    # --- assertion ---

    def assert_infons(self, situation, infons, anchoring=None, fire_hook=True):
        return self.assert_proposition(Proposition(situation, tuple(infons)), anchoring, fire_hook)

    def assert_proposition(self, proposition, anchoring=None, fire_hook=True):
        """
        Assert a ⊨ proposition atomically.

        Args:
            proposition: target situation and infons
            anchoring: optional anchoring situation applied before anything else
            fire_hook: call after_assert on success (forward chaining)

        Returns:
            AssertResult describing what changed
        """
        return self.assert_propositions([proposition], anchoring, fire_hook)[0]

    def assert_propositions(self, propositions, anchoring=None, fire_hook=True):
        """
        Assert several propositions as one unit: either all are kept or none.

        Returns:
            one AssertResult per proposition, in order
        """
        with self._lock:
            prepared = [self._prepare(proposition, anchoring) for proposition in propositions]
            saved = self._save_state()
            results = []
            try:
                for target, infons in prepared:
                    result = AssertResult(target)
                    results.append(result)
                    for infon in infons:
                        self._apply(target, infon, result)
                for result in results:
                    self._verify_coherence(result)
            except SitError as exc:
                self._restore_state(saved)
                refused = "; ".join(
                    render_proposition(target, Mode.SUPPORTS, infons) for target, infons in prepared
                )
                logger.warning("refused %s: %s", refused, exc)
                raise
            if any(result.changed for result in results):
                self._changed()
        if fire_hook and self.after_assert is not None:
            for result in results:
                if result.changed:
                    result.firings = self.after_assert(result)
        return results

    def _prepare(self, proposition, anchoring):
        if proposition.mode is not Mode.SUPPORTS:
            raise NegativeAssertionError("|/= is only evaluated, never asserted")
        target = proposition.situation
        self.require_situation(target)
        infons = list(proposition.infons)
        if anchoring is not None:
            mapping = self.anchors_of(anchoring)
            infons = [infon.substitute(mapping) for infon in infons]
        for infon in infons:
            if infon.variables():
                raise VariableAssertionError(f"variables cannot be asserted: {infon}")
        return target, [self.ontology.validate(infon) for infon in infons]

    def _save_state(self):
        return (
            {name: situation.copy() for name, situation in self.situations.items()},
            {name: set(children) for name, children in self.children.items()},
            {name: dict(anchors) for name, anchors in self.anchors.items()},
        )

    def _restore_state(self, saved):
        situations, children, anchors = saved
        self.situations = situations
        self.children = children
        self.anchors = anchors
        self._ordered_cache.clear()

    def _store(self, situation, infon, result):
        own = self.situations[situation].own
        if infon not in own:
            own.add(infon)
            result.added.append((situation, infon))
            self._ordered_cache.clear()

    def _apply(self, target, infon, result):
        relation = infon.relation
        if relation == "make-part-of":
            if infon.polarity != 1:
                raise KindError("make-part-of cannot be asserted with polarity 0")
            self._link(*infon.args, result)
            return
        if relation == "part-of" and infon.polarity == 1:
            child, parent = infon.args
            self._link(child, parent, result)
            if target != parent:
                self._store(target, infon, result)
            return
        if relation == "anchor" and infon.polarity == 1:
            parameter, anchor = infon.args
            self._check_anchor(target, parameter, anchor)
            self.anchors.setdefault(target, {})[parameter] = anchor
            result.anchors.append((target, parameter, anchor))
            self._store(target, infon, result)
            return
        if relation in ("time-of", "place-of") and infon.polarity == 1:
            located, where = infon.args
            if not self.ontology.is_situation(located):
                raise KindError(f"{relation} needs a situation, got '{located}'")
            slot = "time" if relation == "time-of" else "place"
            current = getattr(self.situations[located], slot)
            if current is not None and current != where:
                raise LocationError(f"{located} already has {slot} '{current}'")
            setattr(self.situations[located], slot, where)
            self._store(target, infon, result)
            return
        if relation == "of-type":
            member, kind = infon.args
            holds = self._typing_holds(member, kind)
            if infon.polarity == 1 and not holds:
                raise KindError(f"{infon} contradicts the declaration of '{member}'")
            if infon.polarity == 0 and holds:
                raise KindError(f"{infon} contradicts the declaration of '{member}'")
            if infon.polarity == 1 and target == WORLD:
                return
        self._store(target, infon, result)

    def _typing_holds(self, member, kind):
        if not isinstance(kind, TypeRef) or member is NULL:
            return False
        if Infon("of-type", (member, kind), 1) in self.ontology.typing_facts():
            return True
        return self.of_type(member, kind.name)

    def _link(self, child, parent, result):
        for name in (child, parent):
            if not self.ontology.is_situation(name):
                raise KindError(f"part-of needs situations, got '{name}'")
        if child == parent:
            return
        if child != WORLD:
            if parent in self.descendants(child):
                raise PartOfCycleError(child, parent)
            if parent not in self.situations[child].parents:
                self.situations[child].parents.add(parent)
                self.children[parent].add(child)
                result.edges.append((child, parent))
                self._ordered_cache.clear()
        self._store(parent, Infon("part-of", (child, parent), 1), result)

    def _verify_coherence(self, result):
        affected = set()
        for situation, _ in result.added:
            affected |= self.ancestors(situation)
        for _, parent in result.edges:
            affected |= self.ancestors(parent)
        new_infons = [infon for _, infon in result.added]
        for name in sorted(affected):
            conflict = self.find_incoherence(name, prefer=new_infons)
            if conflict is not None:
                raise IncoherenceError(name, *conflict)

    def find_incoherence(self, name, prefer=()):
        """A pair (σ, dual σ) in the effective set of name, or None."""
        facts = self.effective_infons(name)
        for infon in list(prefer) + sorted(facts, key=str):
            if infon in facts and dual(infon) in facts:
                return infon, dual(infon)
        return None

    # --- audits ---

    def audit_coherence(self):
        """Every incoherent situation with one conflicting pair."""
        return [
            (name, conflict)
            for name in self.situation_names()
            if (conflict := self.find_incoherence(name)) is not None
        ]

    def snapshot(self):
        """Immutable copy of every situation's own infons."""
        with self._lock:
            return {name: frozenset(situation.own) for name, situation in self.situations.items()}
