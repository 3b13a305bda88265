"""Global module register.

Every module kind registers its descriptor here once, at startup; after
``freeze()`` the registry is an immutable snapshot that every build, lookup,
and GUI request reads from. Modules whose optional backing import failed are
recorded as *missing* with a human-readable reason, so configs that name them
fail with an install hint instead of an anonymous lookup error.
"""

from __future__ import annotations

from typing import Callable, Optional

from .errors import (
    ConstructionError,
    DuplicateNameError,
    InvalidDescriptorError,
    MissingModuleError,
    RegistryFrozenError,
    UnknownModuleError,
)
from .schema import ModuleDescriptor, TagValue, validate_descriptor


class Registry:
    """Name -> descriptor map with kind/tag filtering and missing-module records."""

    def __init__(self) -> None:
        self._descriptors: dict[str, ModuleDescriptor] = {}
        self._missing: dict[str, str] = {}
        # Optional implementation factory per name, used by instantiation
        # and state import; descriptors alone cannot produce objects.
        self._constructors: dict[str, Callable] = {}
        self._frozen = False

    # -- construction phase -------------------------------------------------

    def register(
        self, descriptor: ModuleDescriptor, constructor: Optional[Callable] = None
    ) -> "Registry":
        self._check_mutable()
        name = descriptor.name
        if name in self._descriptors or name in self._missing:
            raise DuplicateNameError(name)
        violations = validate_descriptor(descriptor)
        if violations:
            raise InvalidDescriptorError(name, violations)
        self._descriptors[name] = descriptor
        if constructor is not None:
            self._constructors[name] = constructor
        return self

    def register_missing(self, name: str, reason: str) -> "Registry":
        self._check_mutable()
        if name in self._descriptors or name in self._missing:
            raise DuplicateNameError(name)
        self._missing[name] = reason
        return self

    def freeze(self) -> "Registry":
        self._frozen = True
        return self

    def _check_mutable(self) -> None:
        if self._frozen:
            raise RegistryFrozenError("registry is frozen; register before freeze()")

    # -- query phase ---------------------------------------------------------

    @property
    def frozen(self) -> bool:
        return self._frozen

    def lookup(self, name: str) -> ModuleDescriptor:
        """Return the descriptor registered under ``name`` (whitespace-trimmed)."""
        name = name.strip()
        descriptor = self._descriptors.get(name)
        if descriptor is not None:
            return descriptor
        if name in self._missing:
            raise MissingModuleError(name, self._missing[name])
        raise UnknownModuleError(name)

    def constructor(self, name: str) -> Callable:
        """Return the implementation factory for ``name``; same errors as lookup."""
        name = name.strip()
        ctor = self._constructors.get(name)
        if ctor is not None:
            return ctor
        self.lookup(name)  # raise Unknown/Missing consistently
        raise ConstructionError(name, "descriptor was registered without a constructor")

    def filter(self, kind: str, tag_filter: Optional[dict[str, TagValue]] = None) -> list[ModuleDescriptor]:
        """All descriptors of ``kind`` carrying every (tag, value) pair, by name.

        Missing modules never match; an unknown kind yields [].
        """
        tag_filter = tag_filter or {}
        hits = [d for d in self._descriptors.values() if d.matches(kind, tag_filter)]
        return sorted(hits, key=lambda d: d.name)

    def descriptors(self) -> list[ModuleDescriptor]:
        return sorted(self._descriptors.values(), key=lambda d: d.name)

    def missing(self) -> dict[str, str]:
        return dict(self._missing)

    def kinds(self) -> list[str]:
        return sorted({d.kind for d in self._descriptors.values()})

    def __contains__(self, name: str) -> bool:
        name = name.strip()
        return name in self._descriptors or name in self._missing

    def __len__(self) -> int:
        return len(self._descriptors)
