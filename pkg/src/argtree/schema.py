"""Self-description vocabulary carried by every module.

A module kind declares its hyper-parameters as :class:`ArgumentSpec` entries
and the child modules it needs as :class:`ChildRequirementSpec` entries; a
:class:`ModuleDescriptor` bundles both with identity and metadata. Everything
here is an immutable value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .errors import CoercionError
from .violations import Violation, ViolationCode

Scalar = Union[str, int, float, bool]
TagValue = Union[str, bool]

# Characters with structural meaning in configuration keys; argument names
# must avoid them or the key grammar cannot address the argument.
FORBIDDEN_NAME_CHARS = ".{}#,"

# Requirement keys carry this prefix so configs read unambiguously.
REQUIREMENT_PREFIX = "cls_"

# count_max value meaning "any number of children".
UNBOUNDED: None = None


class ValueKind(str, Enum):
    STRING = "string"
    INTEGER = "integer"
    REAL = "real"
    BOOLEAN = "boolean"


@dataclass(frozen=True)
class ArgumentSpec:
    """One hyper-parameter: its name, kind, raw default, and constraints."""

    name: str
    value_kind: ValueKind
    default: Scalar
    help: str = ""
    choices: tuple[str, ...] = ()


@dataclass(frozen=True)
class ChildRequirementSpec:
    """A declaration that a module needs N children of a given kind.

    ``tag_filter`` narrows the acceptable classes to those whose descriptor
    tags carry every listed (tag, value) pair. ``count_max=UNBOUNDED`` allows
    any number of children.
    """

    key: str
    allowed_kind: str
    tag_filter: dict[str, TagValue] = field(default_factory=dict)
    count_min: int = 1
    count_max: int | None = 1

    def count_text(self) -> str:
        upper = "*" if self.count_max is UNBOUNDED else str(self.count_max)
        return f"{self.count_min}..{upper}"

    def accepts_count(self, n: int) -> bool:
        if n < self.count_min:
            return False
        return self.count_max is UNBOUNDED or n <= self.count_max


@dataclass(frozen=True)
class ModuleDescriptor:
    """A registered module kind: identity, metadata, and self-description."""

    name: str
    kind: str
    tags: dict[str, TagValue] = field(default_factory=dict)
    arguments: tuple[ArgumentSpec, ...] = ()
    child_requirements: tuple[ChildRequirementSpec, ...] = ()
    source: str = ""
    help: str = ""

    def argument(self, name: str) -> ArgumentSpec:
        for spec in self.arguments:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def requirement(self, key: str) -> ChildRequirementSpec:
        for req in self.child_requirements:
            if req.key == key:
                return req
        raise KeyError(key)

    def matches(self, kind: str, tag_filter: dict[str, TagValue]) -> bool:
        if self.kind != kind:
            return False
        return all(self.tags.get(tag) == value for tag, value in tag_filter.items())


_TRUE_WORDS = ("True", "true")
_FALSE_WORDS = ("False", "false")


def coerce_value(spec: ArgumentSpec, raw: Scalar) -> Scalar:
    """Convert a raw config value to the argument's declared kind.

    Booleans accept native booleans and the words True/true/False/false;
    integers reject fractional input; reals must be finite. Idempotent on
    already-typed values. Raises :class:`CoercionError` when the conversion
    is impossible or a ``choices`` constraint is violated.
    """
    kind = spec.value_kind
    value: Scalar
    if kind is ValueKind.BOOLEAN:
        if isinstance(raw, bool):
            value = raw
        elif isinstance(raw, str) and raw in _TRUE_WORDS + _FALSE_WORDS:
            value = raw in _TRUE_WORDS
        else:
            raise CoercionError(spec.name, raw, "boolean")
    elif kind is ValueKind.INTEGER:
        if isinstance(raw, bool):
            raise CoercionError(spec.name, raw, "integer")
        elif isinstance(raw, int):
            value = raw
        elif isinstance(raw, float):
            if not raw.is_integer():
                raise CoercionError(spec.name, raw, "integer", "fractional input")
            value = int(raw)
        elif isinstance(raw, str):
            try:
                value = int(raw.strip())
            except ValueError:
                raise CoercionError(spec.name, raw, "integer") from None
        else:
            raise CoercionError(spec.name, raw, "integer")
    elif kind is ValueKind.REAL:
        if isinstance(raw, bool):
            raise CoercionError(spec.name, raw, "real")
        elif isinstance(raw, (int, float)):
            value = float(raw)
        elif isinstance(raw, str):
            try:
                value = float(raw.strip())
            except ValueError:
                raise CoercionError(spec.name, raw, "real") from None
        else:
            raise CoercionError(spec.name, raw, "real")
        if not math.isfinite(value):
            raise CoercionError(spec.name, raw, "real", "not finite")
    elif kind is ValueKind.STRING:
        if isinstance(raw, str):
            value = raw
        else:
            raise CoercionError(spec.name, raw, "string")
    else:  # pragma: no cover - enum is closed
        raise CoercionError(spec.name, raw, str(kind))

    if spec.choices and value not in spec.choices:
        raise CoercionError(
            spec.name, raw, kind.value, f"not one of {list(spec.choices)}"
        )
    return value


def validate_descriptor(descriptor: ModuleDescriptor) -> list[Violation]:
    """Check every descriptor invariant; one violation per breach."""
    found: list[Violation] = []

    def bad(code: ViolationCode, detail: str) -> None:
        found.append(Violation(code, detail))

    if not descriptor.name or descriptor.name != descriptor.name.strip():
        bad(ViolationCode.BAD_NAME, f"descriptor name {descriptor.name!r} is empty or padded")

    seen_args: set[str] = set()
    for spec in descriptor.arguments:
        if spec.name in seen_args:
            bad(ViolationCode.DUPLICATE_ARGUMENT, f"argument '{spec.name}' declared twice")
            continue
        seen_args.add(spec.name)
        if not spec.name or any(c in FORBIDDEN_NAME_CHARS for c in spec.name):
            bad(
                ViolationCode.BAD_ARGUMENT_NAME,
                f"argument name {spec.name!r} is empty or uses a reserved character",
            )
            continue
        try:
            coerce_value(spec, spec.default)
        except CoercionError as err:
            bad(ViolationCode.BAD_DEFAULT, str(err))

    seen_keys: set[str] = set()
    for req in descriptor.child_requirements:
        if req.key in seen_keys:
            bad(
                ViolationCode.DUPLICATE_REQUIREMENT_KEY,
                f"requirement key '{req.key}' declared twice",
            )
            continue
        seen_keys.add(req.key)
        if not req.key.startswith(REQUIREMENT_PREFIX) or len(req.key) <= len(REQUIREMENT_PREFIX):
            bad(
                ViolationCode.BAD_REQUIREMENT_KEY,
                f"requirement key '{req.key}' must start with '{REQUIREMENT_PREFIX}'",
            )
        if req.count_min < 0:
            bad(ViolationCode.BAD_COUNT_RANGE, f"'{req.key}': count_min must be >= 0")
        if req.count_max is not UNBOUNDED:
            if req.count_max < 1:
                bad(ViolationCode.BAD_COUNT_RANGE, f"'{req.key}': count_max must be >= 1")
            elif req.count_min > req.count_max:
                bad(
                    ViolationCode.BAD_COUNT_RANGE,
                    f"'{req.key}': count_min {req.count_min} exceeds count_max {req.count_max}",
                )

    return found
