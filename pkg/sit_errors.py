"""
Errors raised by the situation kernel.

Every failure a user can provoke is a SitError; the REPL reports them per
line and keeps going.
"""


class SitError(Exception):
    """Base class for all interpreter errors."""


# --- declarations ---

class DuplicateNameError(SitError):
    def __init__(self, name):
        super().__init__(f"name '{name}' is already declared")
        self.name = name


class UnknownNameError(SitError):
    def __init__(self, name, what="name"):
        super().__init__(f"unknown {what} '{name}'")
        self.name = name


class KindError(SitError):
    pass


class RelationDeclarationError(SitError):
    pass


class TypeAbstractionError(SitError):
    pass


# --- infons ---

class AppropriatenessError(SitError):
    def __init__(self, relation, position, arg, admitted):
        kinds = "/".join(sorted(admitted))
        super().__init__(
            f"argument {position} of '{relation}' must be ~{kinds}, got '{arg}'"
        )
        self.relation = relation
        self.position = position


class MinimalityError(SitError):
    def __init__(self, relation, filled, minimality):
        super().__init__(
            f"'{relation}' needs at least {minimality} filled argument(s), got {filled}"
        )
        self.relation = relation


# --- store ---

class VariableAssertionError(SitError):
    pass


class NegativeAssertionError(SitError):
    pass


class IncoherenceError(SitError):
    def __init__(self, situation, infon, dual):
        super().__init__(f"{situation} would support both {infon} and {dual}")
        self.situation = situation
        self.pair = (infon, dual)


class PartOfCycleError(SitError):
    def __init__(self, child, parent):
        super().__init__(f"making {child} part of {parent} creates a cycle")
        self.child = child
        self.parent = parent


class LocationError(SitError):
    pass


class AnchorError(SitError):
    pass


class DuplicateAnchorError(AnchorError):
    pass


class AnchorKindError(AnchorError):
    pass


class AnchorRestrictionError(AnchorError):
    pass


# --- engine / query ---

class ConstraintDefinitionError(SitError):
    pass


class NonGroundNegationError(SitError):
    pass


class DepthLimitError(SitError):
    pass


class ChainingLimitError(SitError):
    def __init__(self, limit, frontier):
        super().__init__(
            f"forward chaining stopped after {limit} firings; "
            f"{len(frontier)} pending consequence(s)"
        )
        self.limit = limit
        self.frontier = frontier


# --- frontend ---

class SitSyntaxError(SitError):
    def __init__(self, message, line=None, column=None, expected=None):
        text = message if line is None else f"line {line}, column {column}: {message}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)
        self.line = line
        self.column = column
        self.expected = expected


class ReplayError(SitError):
    def __init__(self, path, line_number, statement, cause):
        super().__init__(f"{path}:{line_number}: '{statement}' refused: {cause}")
        self.line_number = line_number
        self.statement = statement
        self.cause = cause


class ArityError(SitError):
    def __init__(self, relation, arity, given):
        super().__init__(f"'{relation}' takes at most {arity} argument(s), got {given}")
        self.relation = relation
