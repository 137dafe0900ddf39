"""Exception hierarchy shared across the package."""


class ProtoLearnError(Exception):
    """Base class for all package errors."""


class FormatError(ProtoLearnError):
    """Embedding file does not start with the expected magic/header."""


class CorruptionError(ProtoLearnError):
    """Embedding file is truncated or internally inconsistent."""


class ConfigurationError(ProtoLearnError):
    """Invalid configuration values (counts, splits, hyperparameters)."""


class ProtocolError(ProtoLearnError):
    """Violation of the incremental protocol (e.g. class overlap across tasks)."""


class LabelError(ProtoLearnError):
    """A label refers to a class unknown to the prototype set."""


class StateError(ProtoLearnError):
    """Operation called on an object in an invalid state (e.g. empty prototype set)."""


class InputError(ProtoLearnError):
    """Degenerate or invalid numerical input (zero-norm vectors, empty arrays)."""
