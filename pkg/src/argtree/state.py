"""Hierarchical module state: export, import, canonical bytes, finalization.

Every buildable module can describe itself as a recursive
``{name, kwargs, submodules}`` record and be rebuilt from one, using the
registry to resolve names back to classes. Over-complete structures
(multi-candidate nodes) can export a *finalized* subset: only the selected
candidates survive, and a single survivor replaces its wrapper entirely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import (
    ConfigSyntaxError,
    ConstructionError,
    MissingSelectionError,
    SelectionIndexError,
)
from .registry import Registry
from .schema import Scalar

Submodules = dict[str, Union["ModuleState", list["ModuleState"]]]

STATE_FILE_SUFFIX = ".state.json"


@dataclass(frozen=True)
class ModuleState:
    """Recursive record of a constructed module."""

    name: str
    kwargs: dict[str, Scalar] = field(default_factory=dict)
    submodules: Submodules = field(default_factory=dict)

    def to_obj(self) -> dict:
        subs = {}
        for slot, entry in self.submodules.items():
            if isinstance(entry, list):
                subs[slot] = [s.to_obj() for s in entry]
            else:
                subs[slot] = entry.to_obj()
        return {"name": self.name, "kwargs": dict(self.kwargs), "submodules": subs}

    @classmethod
    def from_obj(cls, obj: dict) -> "ModuleState":
        if not isinstance(obj, dict) or not isinstance(obj.get("name"), str):
            raise ConfigSyntaxError("state record must be an object with a 'name'")
        kwargs = obj.get("kwargs", {})
        if not isinstance(kwargs, dict):
            raise ConfigSyntaxError("state 'kwargs' must be an object")
        for key, value in kwargs.items():
            if not isinstance(value, (str, int, float, bool)):
                raise ConfigSyntaxError(f"state kwarg '{key}' must be a scalar")
        subs_obj = obj.get("submodules", {})
        if not isinstance(subs_obj, dict):
            raise ConfigSyntaxError("state 'submodules' must be an object")
        subs: Submodules = {}
        for slot, entry in subs_obj.items():
            if isinstance(entry, list):
                subs[slot] = [cls.from_obj(e) for e in entry]
            else:
                subs[slot] = cls.from_obj(entry)
        return cls(obj["name"], dict(kwargs), subs)


@dataclass(frozen=True)
class SelectionProvider:
    """Which candidate indices survive finalization, per node path name."""

    selections: dict[str, list[int]] = field(default_factory=dict)

    def indices_for(self, node_name: str, count: int) -> list[int]:
        if node_name not in self.selections:
            raise MissingSelectionError(node_name)
        indices = self.selections[node_name]
        for i in indices:
            if i < 0 or i >= count:
                raise SelectionIndexError(node_name, i, count)
        return list(indices)


EMPTY_SELECTION = SelectionProvider()


class BuildableModule:
    """Base for modules that can export their state and be rebuilt from it.

    Subclasses pass their scalar construction arguments to ``__init__`` here;
    anything structured belongs in :meth:`submodules`. The registered name is
    the class name by convention.
    """

    def __init__(self, **kwargs: Scalar):
        self._kwargs: dict[str, Scalar] = dict(kwargs)
        self.path_name: str = ""  # assigned when composed into a running task

    @property
    def module_name(self) -> str:
        return type(self).__name__

    def submodules(self) -> Submodules | dict:
        return {}

    def finalize_substitute(self, selections: SelectionProvider) -> Optional[ModuleState]:
        """Hook: return another module's state to stand in for this one."""
        return None

    def state_config(
        self, finalize: bool = False, selections: SelectionProvider = EMPTY_SELECTION
    ) -> ModuleState:
        if finalize:
            substitute = self.finalize_substitute(selections)
            if substitute is not None:
                return substitute
        subs: Submodules = {}
        for slot, entry in self.submodules().items():
            if isinstance(entry, list):
                subs[slot] = [m.state_config(finalize, selections) for m in entry]
            else:
                subs[slot] = entry.state_config(finalize, selections)
        return ModuleState(self.module_name, dict(self._kwargs), subs)

    def structure_lines(self, label: str = "", depth: int = 0) -> list[str]:
        """Indented per-module overview: name plus child slot shapes."""
        prefix = "  " * depth
        head = f"{prefix}{label}: " if label else prefix
        lines = [f"{head}{self.module_name}"]
        for slot, entry in self.submodules().items():
            if isinstance(entry, list):
                for i, m in enumerate(entry):
                    lines.extend(m.structure_lines(f"{slot}[{i}]", depth + 1))
            else:
                lines.extend(entry.structure_lines(slot, depth + 1))
        return lines


def export_state(
    module: BuildableModule,
    finalize: bool = False,
    selections: SelectionProvider = EMPTY_SELECTION,
) -> ModuleState:
    return module.state_config(finalize, selections)


def import_state(registry: Registry, state: ModuleState) -> BuildableModule:
    """Rebuild a module graph depth-first from its state record."""
    constructor = registry.constructor(state.name)  # Unknown/Missing raised here
    rebuilt: dict[str, object] = {}
    for slot, entry in state.submodules.items():
        if isinstance(entry, list):
            rebuilt[slot] = [import_state(registry, e) for e in entry]
        else:
            rebuilt[slot] = import_state(registry, entry)
    try:
        return constructor(**state.kwargs, **rebuilt)
    except TypeError as err:
        raise ConstructionError(state.name, str(err)) from err


def canonical_serialize(state: ModuleState) -> bytes:
    """Canonical UTF-8 JSON: sorted keys, no optional whitespace, minimal numbers."""
    return canonical_json_bytes(state.to_obj())


def canonical_json_bytes(obj: object) -> bytes:
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def parse_state(data: Union[bytes, str]) -> ModuleState:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as err:
        raise ConfigSyntaxError(f"state file is not valid JSON: {err}") from None
    return ModuleState.from_obj(obj)
