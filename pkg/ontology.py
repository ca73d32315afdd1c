"""
Ontology: the nine primitive kinds and the things built from them

This module defines objects, relations (with appropriateness conditions and
a minimality count), parameters with restrictions, infons and parametric
type abstractions. The Ontology class is the shared name registry; the
situation store wraps it so that declarations also update situations.

Infon arguments are plain values:
    str        name of an object, situation, parameter or relation
    TypeRef    a basic kind or parametric type (written ~NAME)
    Infon      a nested infon (information nesting)
    Variable   only inside constraints and queries (written ?NAME)
    NULL       the null object (written -)
"""

import threading
from dataclasses import dataclass
from enum import Enum

import sit_config
from sit_errors import (
    AppropriatenessError,
    ArityError,
    DuplicateNameError,
    KindError,
    MinimalityError,
    RelationDeclarationError,
    TypeAbstractionError,
    UnknownNameError,
)


class BasicKind(Enum):
    IND = "IND"  # individuals
    TIM = "TIM"  # times
    LOC = "LOC"  # places
    REL = "REL"  # relations
    POL = "POL"  # polarities
    INF = "INF"  # infons
    PAR = "PAR"  # parameters
    SIT = "SIT"  # situations
    TYP = "TYP"  # types


BASIC_KIND_NAMES = frozenset(kind.value for kind in BasicKind)


@dataclass(frozen=True)
class TypeRef:
    """Reference to a basic kind or a parametric type; identity is sigil-free."""
    name: str

    @property
    def is_basic(self):
        return self.name in BASIC_KIND_NAMES

    def __str__(self):
        return f"{sit_config.TYPE_SIGIL}{self.name}"


def kind_ref(kind):
    return TypeRef(kind.value)


ANY_KIND = frozenset(kind_ref(kind) for kind in BasicKind)


class _Null:
    """The null object filling unsaturated argument roles. Equal only to itself."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NULL"

    def __str__(self):
        return sit_config.NULL_TOKEN

    def __reduce__(self):
        return (_Null, ())


NULL = _Null()


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return f"{sit_config.VARIABLE_SIGIL}{self.name}"


@dataclass(frozen=True)
class Infon:
    """≪relation, arg1, …, argn, polarity≫ with args padded to full arity."""
    relation: str
    args: tuple
    polarity: int

    def __str__(self):
        parts = [self.relation] + [str(arg) for arg in self.args] + [str(self.polarity)]
        return "<<" + ", ".join(parts) + ">>"

    @property
    def is_saturated(self):
        return all(arg is not NULL for arg in self.args)

    def substitute(self, mapping):
        """Replace args (recursively, through nested infons) found in mapping."""
        if not mapping:
            return self
        return Infon(self.relation, tuple(substitute_term(arg, mapping) for arg in self.args), self.polarity)

    def terms(self):
        """All leaf terms, nested infons flattened."""
        for arg in self.args:
            if isinstance(arg, Infon):
                yield from arg.terms()
            else:
                yield arg

    def variables(self):
        return {term for term in self.terms() if isinstance(term, Variable)}

    def mentions(self, term):
        return any(leaf == term for leaf in self.terms())


def substitute_term(term, mapping):
    if isinstance(term, Infon):
        return term.substitute(mapping)
    if term is NULL:
        return term
    return mapping.get(term, term)


def dual(infon):
    """The same infon with the opposite polarity."""
    return Infon(infon.relation, infon.args, 1 - infon.polarity)


@dataclass(frozen=True)
class Relation:
    name: str
    roles: tuple  # one frozenset of TypeRef per argument role
    minimality: int

    @property
    def arity(self):
        return len(self.roles)

    def __str__(self):
        roles = ", ".join("/".join(str(ref) for ref in sorted(role, key=str)) for role in self.roles)
        return f"<{self.name} | {roles}> [{self.minimality}]"


@dataclass(frozen=True)
class Parameter:
    name: str
    base: BasicKind
    restrictions: frozenset


@dataclass(frozen=True)
class TypeAbstraction:
    """[parameter | grounding ⊨ conditions]"""
    name: str
    parameter: str
    grounding: str
    conditions: tuple


@dataclass(frozen=True)
class ObjectEntry:
    name: str
    kind: TypeRef  # as declared (basic kind or parametric type)
    basic: BasicKind


BUILTIN_RELATIONS = [
    ("of-type", [ANY_KIND, {kind_ref(BasicKind.TYP)}], 2),
    ("anchor", [{kind_ref(BasicKind.PAR)}, ANY_KIND], 2),
    ("part-of", [{kind_ref(BasicKind.SIT)}, {kind_ref(BasicKind.SIT)}], 2),
    ("make-part-of", [{kind_ref(BasicKind.SIT)}, {kind_ref(BasicKind.SIT)}], 2),
    ("time-of", [{kind_ref(BasicKind.SIT)}, {kind_ref(BasicKind.TIM)}], 2),
    ("place-of", [{kind_ref(BasicKind.SIT)}, {kind_ref(BasicKind.LOC)}], 2),
]


class Ontology:
    """
    Registry of every declared name. Names are unique across objects,
    relations, parameters, types and infon names.
    """

    def __init__(self):
        self.objects = {}
        self.relations = {}
        self.parameters = {}
        self.types = {}
        self.infon_names = {}
        # user declarations in order: (category, name)
        self.history = []
        # (object name, type name) -> bool; installed by the situation store
        self.membership = None
        self._lock = threading.RLock()
        self._version = 0
        self._typing_cache = (None, frozenset())
        self._install_builtins()

    def _install_builtins(self):
        self.objects[sit_config.WORLD_SITUATION] = ObjectEntry(
            sit_config.WORLD_SITUATION, kind_ref(BasicKind.SIT), BasicKind.SIT
        )
        for name, roles, minimality in BUILTIN_RELATIONS:
            self.relations[name] = Relation(name, tuple(frozenset(role) for role in roles), minimality)
        for name, kind in sit_config.DEFAULT_SYSTEM_PARAMETERS.items():
            self.parameters[name] = Parameter(name, BasicKind(kind), frozenset())

    # --- names ---

    def is_declared(self, name):
        return (
            name in BASIC_KIND_NAMES
            or name in self.objects
            or name in self.relations
            or name in self.parameters
            or name in self.types
            or name in self.infon_names
        )

    def _claim(self, name):
        if self.is_declared(name):
            raise DuplicateNameError(name)

    def _touch(self, category, name):
        self.history.append((category, name))
        self._version += 1

    def is_situation(self, name):
        entry = self.objects.get(name) if isinstance(name, str) else None
        return entry is not None and entry.basic is BasicKind.SIT

    def is_parameter(self, term):
        return isinstance(term, str) and term in self.parameters

    def kind_of(self, term):
        """
        Basic kind of a term.

        Returns:
            BasicKind, or None for NULL and variables
        """
        if term is NULL or isinstance(term, Variable):
            return None
        if isinstance(term, TypeRef):
            if term.is_basic or term.name in self.types:
                return BasicKind.TYP
            raise UnknownNameError(term, "type")
        if isinstance(term, Infon):
            return BasicKind.INF
        if term in self.objects:
            return self.objects[term].basic
        if term in self.parameters:
            return BasicKind.PAR
        if term in self.relations:
            return BasicKind.REL
        if term in self.infon_names:
            return BasicKind.INF
        raise UnknownNameError(term)

    def type_base(self, type_name):
        """Basic kind of the members of a parametric type."""
        abstraction = self.types[type_name]
        return self.parameters[abstraction.parameter].base

    def resolve_kind(self, ref):
        if ref.is_basic or ref.name in self.types:
            return ref
        raise UnknownNameError(str(ref), "kind")

    # --- appropriateness ---

    def appropriate(self, arg, role):
        """True if arg may fill a role admitting the kinds in role."""
        if arg is NULL or isinstance(arg, Variable):
            return True
        if self.is_parameter(arg):
            base = self.parameters[arg].base
            for ref in role:
                if ref.is_basic and BasicKind(ref.name) in (BasicKind.PAR, base):
                    return True
                if not ref.is_basic and ref.name in self.types and self.type_base(ref.name) is base:
                    return True
            return False
        kind = self.kind_of(arg)
        if kind_ref(kind) in role:
            return True
        for ref in role:
            if ref.is_basic or ref.name not in self.types:
                continue
            entry = self.objects.get(arg) if isinstance(arg, str) else None
            if entry is not None and entry.kind == ref:
                return True
            if self.membership is not None and self.membership(arg, ref.name):
                return True
        return False

    # --- declarations ---

    def declare_object(self, name, kind):
        """
        Register an object of a basic kind or parametric type.

        Args:
            name: the new object's name
            kind: TypeRef of a basic kind or a defined parametric type

        Returns:
            the ObjectEntry (its basic kind is the type's base for parametric types)
        """
        with self._lock:
            self._claim(name)
            kind = self.resolve_kind(kind)
            basic = BasicKind(kind.name) if kind.is_basic else self.type_base(kind.name)
            entry = ObjectEntry(name, kind, basic)
            self.objects[name] = entry
            self._touch("object", name)
            return entry

    def forget(self, category, name):
        """Undo a declaration (used when the store refuses its side effects)."""
        with self._lock:
            registry = {
                "object": self.objects,
                "relation": self.relations,
                "parameter": self.parameters,
                "type": self.types,
                "infon": self.infon_names,
            }[category]
            registry.pop(name, None)
            if (category, name) in self.history:
                self.history.remove((category, name))
            self._version += 1

    def declare_relation(self, name, roles, minimality=None):
        with self._lock:
            self._claim(name)
            if not roles:
                raise RelationDeclarationError(f"relation '{name}' needs at least one argument role")
            resolved = []
            for role in roles:
                role = frozenset(role)
                if not role:
                    raise RelationDeclarationError(f"every role of '{name}' must admit a kind")
                resolved.append(frozenset(self.resolve_kind(ref) for ref in role))
            if minimality is None:
                minimality = len(resolved)
            if not 1 <= minimality <= len(resolved):
                raise RelationDeclarationError(
                    f"minimality of '{name}' must be between 1 and {len(resolved)}, got {minimality}"
                )
            relation = Relation(name, tuple(resolved), minimality)
            self.relations[name] = relation
            self._touch("relation", name)
            return relation

    def make_infon(self, relation, args, polarity):
        """
        Build a normalized infon: pad with NULL, check appropriateness and minimality.

        Variables count as filled arguments and fit any role.
        """
        if relation not in self.relations:
            raise UnknownNameError(relation, "relation")
        rel = self.relations[relation]
        if polarity not in (0, 1):
            raise KindError(f"polarity must be 0 or 1, got {polarity}")
        args = tuple(args)
        if len(args) > rel.arity:
            raise ArityError(relation, rel.arity, len(args))
        args = args + (NULL,) * (rel.arity - len(args))
        for position, (arg, role) in enumerate(zip(args, rel.roles), start=1):
            if arg is NULL:
                continue
            if not self.appropriate(arg, role):
                raise AppropriatenessError(relation, position, arg, {ref.name for ref in role})
        filled = sum(1 for arg in args if arg is not NULL)
        if filled < rel.minimality:
            raise MinimalityError(relation, filled, rel.minimality)
        return Infon(relation, args, polarity)

    def validate(self, infon):
        """Re-check an infon built elsewhere (e.g. after substitution)."""
        return self.make_infon(infon.relation, infon.args, infon.polarity)

    def declare_parameter(self, name, base, restrictions=()):
        """
        Declare a parameter over one basic kind.

        Args:
            name: the new parameter
            base: TypeRef of a basic kind, or the name of an existing parameter
            restrictions: infons mentioning the base parameter (or the new name), or a
                callable building them once the new name is registered

        Returns:
            Parameter with inherited and new restrictions, base replaced by name
        """
        with self._lock:
            self._claim(name)
            inherited = set()
            mapping = {}
            if isinstance(base, TypeRef):
                if not base.is_basic:
                    raise KindError(f"parameter '{name}' must range over a basic kind, not {base}")
                kind = BasicKind(base.name)
            elif base in self.parameters:
                parent = self.parameters[base]
                kind = parent.base
                mapping = {base: name}
                inherited = {restriction.substitute(mapping) for restriction in parent.restrictions}
            else:
                raise KindError(f"base of parameter '{name}' must be a basic kind or a parameter, got '{base}'")

            self.parameters[name] = Parameter(name, kind, frozenset())
            try:
                if callable(restrictions):
                    restrictions = restrictions()
                checked = set()
                for restriction in restrictions:
                    restriction = restriction.substitute(mapping)
                    if restriction.variables():
                        raise KindError(f"restrictions on '{name}' cannot contain variables")
                    checked.add(self.validate(restriction))
            except Exception:
                del self.parameters[name]
                raise
            parameter = Parameter(name, kind, frozenset(inherited | checked))
            self.parameters[name] = parameter
            self._touch("parameter", name)
            return parameter

    def define_type_abstraction(self, name, parameter, grounding, conditions):
        with self._lock:
            self._claim(name)
            if parameter not in self.parameters:
                raise UnknownNameError(parameter, "parameter")
            if not self.is_situation(grounding):
                raise UnknownNameError(grounding, "grounding situation")
            conditions = tuple(self.validate(condition) for condition in conditions)
            if not any(condition.mentions(parameter) for condition in conditions):
                raise TypeAbstractionError(f"parameter '{parameter}' does not occur in the conditions of ~{name}")
            abstraction = TypeAbstraction(name, parameter, grounding, conditions)
            self.types[name] = abstraction
            self._touch("type", name)
            return abstraction

    def instantiate(self, type_name, member):
        """Conditions of a parametric type with its parameter replaced by member."""
        abstraction = self.types[type_name]
        return [condition.substitute({abstraction.parameter: member}) for condition in abstraction.conditions]

    def name_infon(self, name, infon):
        with self._lock:
            self._claim(name)
            self.infon_names[name] = infon
            self._touch("infon", name)

    def resolve_name(self, name):
        """Named infons resolve to the infon itself; everything else must be declared."""
        if name in self.infon_names:
            return self.infon_names[name]
        self.kind_of(name)
        return name

    # --- bookkeeping facts in w ---

    def typing_facts(self):
        """≪of-type, x, ~K, 1≫ for every declared name; these live in w."""
        with self._lock:
            version, facts = self._typing_cache
            if version == self._version:
                return facts
            typ = kind_ref(BasicKind.TYP)
            built = set()
            for kind in BasicKind:
                built.add(Infon("of-type", (kind_ref(kind), typ), 1))
            for entry in self.objects.values():
                built.add(Infon("of-type", (entry.name, entry.kind), 1))
                if not entry.kind.is_basic:
                    built.add(Infon("of-type", (entry.name, kind_ref(entry.basic)), 1))
            for name in self.relations:
                built.add(Infon("of-type", (name, kind_ref(BasicKind.REL)), 1))
            for name in self.parameters:
                built.add(Infon("of-type", (name, kind_ref(BasicKind.PAR)), 1))
            for name in self.types:
                built.add(Infon("of-type", (TypeRef(name), typ), 1))
            for infon in self.infon_names.values():
                built.add(Infon("of-type", (infon, kind_ref(BasicKind.INF)), 1))
            facts = frozenset(built)
            self._typing_cache = (self._version, facts)
            return facts

    def declared_kind(self, term):
        """The kind a declaration gave term (what its of-type fact in w says)."""
        if isinstance(term, str) and term in self.objects:
            return self.objects[term].kind
        return kind_ref(self.kind_of(term))
