"""Exception hierarchy shared across the runtime."""

from __future__ import annotations


class MobisenseError(Exception):
    """Base class for every error raised by this package."""


class ProtocolError(MobisenseError):
    """A study protocol could not be loaded."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class ProtocolSyntaxError(ProtocolError):
    """The protocol document is not well-formed JSON."""


class SchemaError(ProtocolError):
    """A field is missing, unknown, or has the wrong JSON type."""


class InvariantError(ProtocolError):
    """A value is well-typed but violates a domain invariant."""


class ConflictError(MobisenseError):
    """Two packages claim the same measure type."""


class DuplicateError(MobisenseError):
    """A registry key was registered twice."""


class UnknownTypeError(MobisenseError, KeyError):
    def __init__(self, type_key: object, message: str | None = None):
        self.type_key = str(type_key)
        super().__init__(message or f"unknown measure type {self.type_key!r}")

    def __str__(self) -> str:
        return self.args[0]


class TypeMismatchError(MobisenseError):
    pass


class IllegalTransitionError(MobisenseError):
    pass


class TransformError(MobisenseError):
    """A registered datum transformer raised or produced a bad datum."""

    def __init__(self, source: object, cause: BaseException | str):
        self.source = str(source)
        super().__init__(f"transformer for {self.source} failed: {cause}")


class UnknownEndpointError(MobisenseError):
    pass


class UnknownNamespaceError(MobisenseError):
    pass


class EncryptUnsupportedError(MobisenseError):
    pass


class SinkClosedError(MobisenseError):
    """A data point arrived after the data manager was closed."""
