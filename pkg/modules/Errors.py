"""
Exception hierarchy shared by every gcover module.

Diagnostic operations (validators, condition checks) report problems through
result objects; these exceptions are reserved for operations that cannot
produce a result.
"""


class GcoverError(Exception):
    """Base class for all gcover errors."""


class UnknownIdentifierError(GcoverError, KeyError):
    """An object, element, sort, index or morphism id is not known."""

    def __init__(self, identifier: str, kind: str = "identifier"):
        self.identifier = identifier
        self.kind = kind
        super().__init__(f"Unknown {kind} '{identifier}'")

    def __str__(self):
        return self.args[0]


class PreconditionError(GcoverError, ValueError):
    """An operation was called on input violating its precondition."""


class InconsistentSeedError(PreconditionError):
    """Seeded or replayed choices cannot be completed into a commuting system."""


class LocalStableEmbeddednessError(PreconditionError):
    """A fiber automorphism over a smaller subset does not lift to a larger one."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotCoherentError(GcoverError, ValueError):
    """A family of degree-1 maps has no witness at some subset."""

    def __init__(self, message: str, subset=None):
        super().__init__(message)
        self.subset = subset


class InvariantBreachError(GcoverError, RuntimeError):
    """A state that valid inputs can never reach, e.g. a square with no filler."""


class SchemaError(GcoverError, ValueError):
    """A document does not match its schema. `path` locates the problem."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{message} (at {path})")


class VersionMismatchError(SchemaError):
    """A document declares a format version this build does not read."""
