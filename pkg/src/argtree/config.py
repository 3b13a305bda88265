"""Flat configuration documents.

A configuration is one JSON object of scalar values. Keys take exactly three
forms:

* ``cls_trainer`` - a *selection*: comma-separated class names filling that
  requirement.
* ``{cls_trainer}.max_epochs`` / ``{cls_callbacks#1}.top_n`` - a *wildcard*
  argument: binds to whichever class is selected for the requirement, the
  plain form to position 0 only.
* ``SimpleTrainer.max_epochs`` - an *explicit* argument: names the class
  directly.

The document tracks which keys have been read (``consumed``); the tree
builder uses that to reject configs containing keys nothing asked for.
Braced tokens in *values* (e.g. ``"{path_tmp}/run"``) are placeholders,
substituted from an environment map after lookup.
"""

from __future__ import annotations

import json
import re
import tempfile
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import (
    AmbiguousValueError,
    ConfigSyntaxError,
    MalformedKeyError,
    NonScalarValueError,
    UnknownPlaceholderError,
)
from .schema import REQUIREMENT_PREFIX, ArgumentSpec, Scalar, coerce_value

_REQ_KEY = r"cls_[A-Za-z0-9_]+"
# Argument names may use anything except the structural characters.
_ARG_NAME = r"[^.{}#,\s]+"
_CLASS_NAME = r"[A-Za-z_][A-Za-z0-9_]*"

SELECTION_RE = re.compile(rf"^{_REQ_KEY}$")
WILDCARD_RE = re.compile(rf"^\{{({_REQ_KEY})(?:#(\d+))?\}}\.({_ARG_NAME})$")
EXPLICIT_RE = re.compile(rf"^({_CLASS_NAME})\.({_ARG_NAME})$")

PLACEHOLDER_RE = re.compile(r"\{([^{}]+)\}")


@dataclass(frozen=True)
class Selection:
    req_key: str


@dataclass(frozen=True)
class WildcardArg:
    req_key: str
    arg_name: str
    index: int = 0
    indexed: bool = False  # whether the key spelled out "#i"


@dataclass(frozen=True)
class ExplicitArg:
    class_name: str
    arg_name: str


KeyForm = Union[Selection, WildcardArg, ExplicitArg]


def classify_key(key: str) -> KeyForm:
    """Parse a key into its form; raises MalformedKeyError otherwise."""
    m = WILDCARD_RE.match(key)
    if m:
        req_key, idx, arg = m.groups()
        return WildcardArg(req_key, arg, int(idx) if idx else 0, indexed=idx is not None)
    if SELECTION_RE.match(key):
        return Selection(key)
    m = EXPLICIT_RE.match(key)
    if m:
        return ExplicitArg(m.group(1), m.group(2))
    raise MalformedKeyError(key)


def default_env() -> dict[str, str]:
    """Built-in placeholder map; callers merge their own entries over it."""
    return {"path_tmp": tempfile.gettempdir()}


def expand_placeholders(raw: str, env: dict[str, str]) -> str:
    """Replace every ``{name}`` from ``env`` in a string value.

    Tokens with the requirement prefix are key syntax, never placeholders,
    and pass through untouched. Unknown tokens are an error.
    """
    def substitute(match: re.Match) -> str:
        name = match.group(1)
        if name.startswith(REQUIREMENT_PREFIX):
            return match.group(0)
        if name not in env:
            raise UnknownPlaceholderError(name)
        return env[name]

    return PLACEHOLDER_RE.sub(substitute, raw)


def _same_raw(a: Scalar, b: Scalar) -> bool:
    # bool == int in Python; raw agreement requires matching types too.
    return type(a) is type(b) and a == b


@dataclass
class ConfigDocument:
    """Ordered key -> scalar map plus the set of keys already read."""

    entries: dict[str, Scalar] = field(default_factory=dict)
    consumed: set[str] = field(default_factory=set)

    def reset_consumed(self) -> None:
        self.consumed = set()

    def unconsumed(self) -> list[str]:
        return [k for k in self.entries if k not in self.consumed]

    # -- reading -------------------------------------------------------------

    def get_used_classes(self, req_key: str) -> list[str]:
        """Class names selected for a requirement, in order; [] when unset.

        An empty-string selection means "nothing selected", same as an
        absent key. The selection key is marked consumed either way.
        """
        if req_key not in self.entries:
            return []
        self.consumed.add(req_key)
        raw = self.entries[req_key]
        text = raw if isinstance(raw, str) else str(raw)
        return [part.strip() for part in text.split(",") if part.strip()]

    def get_used_value(
        self, req_key: str, index: int, class_name: str, arg: ArgumentSpec
    ) -> Scalar:
        """Resolve one argument of the class at (req_key, index).

        Precedence: ``{req_key#index}.name``, then ``{req_key}.name`` (position
        0 only), then ``ClassName.name``; applicable keys carrying different
        raw values are an error. Falls back to the coerced default.
        """
        candidates = [f"{{{req_key}#{index}}}.{arg.name}"]
        if index == 0:
            candidates.append(f"{{{req_key}}}.{arg.name}")
        candidates.append(f"{class_name}.{arg.name}")

        hits = [k for k in candidates if k in self.entries]
        if not hits:
            return coerce_value(arg, arg.default)
        first = self.entries[hits[0]]
        for other in hits[1:]:
            if not _same_raw(first, self.entries[other]):
                raise AmbiguousValueError(arg.name, hits)
        # Agreeing aliases were all read to check agreement; consume them all.
        self.consumed.update(hits)
        return coerce_value(arg, first)

    # -- derivation ----------------------------------------------------------

    def merge_overrides(self, overrides: Iterable[tuple[str, Scalar]]) -> "ConfigDocument":
        """New document with later pairs winning; consumed state reset."""
        merged = dict(self.entries)
        for key, value in overrides:
            classify_key(key)  # MalformedKeyError on bad override keys
            merged[key] = value
        return ConfigDocument(merged)

    def to_json_text(self) -> str:
        return json.dumps(self.entries, indent=2, ensure_ascii=False) + "\n"


def parse_document(text: Union[bytes, str]) -> ConfigDocument:
    """Parse a UTF-8 JSON object into a ConfigDocument, validating key syntax."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigSyntaxError(f"configuration is not valid JSON: {err}") from None
    if not isinstance(data, dict):
        raise ConfigSyntaxError("configuration must be a JSON object")
    entries: dict[str, Scalar] = {}
    for key, value in data.items():
        if not isinstance(value, (str, int, float, bool)):
            raise NonScalarValueError(key)
        classify_key(key)
        entries[key] = value
    return ConfigDocument(entries)


def parse_overrides(pairs: Iterable[str]) -> list[tuple[str, str]]:
    """Split ``key=value`` strings as they arrive from a terminal."""
    parsed = []
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise MalformedKeyError(pair)
        parsed.append((key, value))
    return parsed


def load_document(path, overrides: Optional[Iterable[tuple[str, Scalar]]] = None) -> ConfigDocument:
    """Read a config file and apply terminal overrides."""
    with open(path, "rb") as fh:
        doc = parse_document(fh.read())
    if overrides:
        doc = doc.merge_overrides(overrides)
    return doc
