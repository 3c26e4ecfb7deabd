"""Exception hierarchy shared across the package."""

from __future__ import annotations


class VizAdvisorError(Exception):
    """Base class for all errors raised by this package."""


class TreeDocumentError(VizAdvisorError):
    """The tree document could not be parsed against the schema."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(message if location is None else f"{location}: {message}")


class TreeValidationError(VizAdvisorError):
    """A structurally parseable tree violates one or more invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        summary = "; ".join(str(v) for v in self.violations)
        super().__init__(f"tree failed validation: {summary}")


class UnknownLeafError(VizAdvisorError, KeyError):
    def __init__(self, leaf_id: str):
        self.leaf_id = leaf_id
        super().__init__(f"unknown leaf id: {leaf_id!r}")


class UnknownNodeError(VizAdvisorError, KeyError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node id: {node_id!r}")


class UnknownFeatureError(VizAdvisorError, KeyError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"unknown feature key: {key!r}")


class InvalidAnswerError(VizAdvisorError, ValueError):
    """Answer token does not match any option of the current question."""

    def __init__(self, value: str, valid_tokens: list[str]):
        self.value = value
        self.valid_tokens = list(valid_tokens)
        super().__init__(
            f"invalid answer {value!r}; valid answers: {', '.join(self.valid_tokens)}"
        )


class SessionFinishedError(VizAdvisorError):
    def __init__(self):
        super().__init__("session already finished; the trace remains available")


class AtRootError(VizAdvisorError):
    def __init__(self):
        super().__init__("cannot go back: session is at the root question")


class DontKnowNotAllowedError(VizAdvisorError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"question {node_id!r} does not accept a don't-know answer")


class UnknownTaskKeyError(VizAdvisorError, KeyError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"unknown task key: {key!r}")


class TaskFeatureError(VizAdvisorError, ValueError):
    """A task-side feature key was supplied where a data key is required."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"feature {key!r} requires user intent and cannot be "
                         "answered from a data profile")


class CsvFormatError(VizAdvisorError, ValueError):
    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(message if row is None else f"row {row}: {message}")


class UnknownColumnError(VizAdvisorError, KeyError):
    def __init__(self, name: str):
        self.column = name
        super().__init__(f"unknown column: {name!r}")


class AllNullColumnError(VizAdvisorError, ValueError):
    def __init__(self, name: str):
        self.column = name
        super().__init__(f"column {name!r} contains only missing values")


class ExtensionError(VizAdvisorError):
    """An extension could not be applied; the input tree is untouched."""
