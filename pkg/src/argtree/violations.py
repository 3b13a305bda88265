"""Structured validation errors.

Violations are values, not exceptions: validators gather every breach they
can find and report the whole list, so a user fixing a config or a GUI
highlighting a tree sees all problems at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

# A node address: (requirement key, positional index) steps from the root.
NodePath = tuple[tuple[str, int], ...]


class ViolationCode(str, Enum):
    # Build- and tree-level breaches
    UNKNOWN_MODULE = "UnknownModule"
    MISSING_MODULE = "MissingModule"
    COUNT_VIOLATION = "CountViolation"
    KIND_MISMATCH = "KindMismatch"
    TAG_MISMATCH = "TagMismatch"
    UNPARSED_KEY = "UnparsedKey"
    DUPLICATE_REQUIREMENT_KEY = "DuplicateRequirementKey"
    AMBIGUOUS_VALUE = "AmbiguousValue"
    COERCION_ERROR = "CoercionError"
    UNKNOWN_PLACEHOLDER = "UnknownPlaceholder"
    # Descriptor self-validation breaches
    DUPLICATE_ARGUMENT = "DuplicateArgument"
    BAD_REQUIREMENT_KEY = "BadRequirementKey"
    BAD_ARGUMENT_NAME = "BadArgumentName"
    BAD_DEFAULT = "BadDefault"
    BAD_COUNT_RANGE = "BadCountRange"
    BAD_NAME = "BadName"
    # Hand-built / GUI tree breaches
    MISSING_VALUE = "MissingValue"
    EXTRA_VALUE = "ExtraValue"
    INDEX_MISMATCH = "IndexMismatch"
    UNKNOWN_REQUIREMENT = "UnknownRequirement"


def path_text(path: NodePath) -> str:
    """Render a node path like ``cls_task#0/cls_trainer#0`` ('' for the root)."""
    return "/".join(f"{key}#{index}" for key, index in path)


@dataclass(frozen=True)
class Violation:
    """One validation breach, addressed to the node it occurred at."""

    code: ViolationCode
    detail: str
    path: NodePath = field(default=())

    def render(self) -> str:
        where = path_text(self.path) or "<root>"
        return f"{self.code.value} at {where}: {self.detail}"
