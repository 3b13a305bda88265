"""Demo module set: a small runnable experiment domain."""

from __future__ import annotations

from ..registry import Registry
from . import extras, modules, structure  # noqa: F401  (import populates module lists)
from .runtime import RunReport, instantiate, run, run_tree

__all__ = [
    "build_demo_registry",
    "instantiate",
    "run",
    "run_tree",
    "RunReport",
]


def build_demo_registry() -> Registry:
    """Fresh frozen registry holding every demo module.

    Optional plugin modules are probed through the environment (see
    :mod:`argtree.demo.extras`) at call time.
    """
    registry = Registry()
    for descriptor, cls in modules.DEMO_MODULES:
        registry.register(descriptor, cls)
    extras.register_extras(registry)
    return registry.freeze()
