"""Synthetic optional plugin.

Stands in for wrapped third-party code: its modules register normally when
the plugin is "installed" (environment flag set) and are recorded as missing
with an install hint otherwise, so configs naming them fail helpfully.
"""

from __future__ import annotations

import dataclasses
import math
import os

from ..registry import Registry
from ..schema import ValueKind
from ..state import BuildableModule
from .modules import arg, demo_module

ENABLE_FLAG = "ARGTREE_ENABLE_EXTRAS"
MISSING_REASON = "optional plugin 'extras' not installed"

EXTRAS_MODULES: list = []


def extras_enabled() -> bool:
    return os.environ.get(ENABLE_FLAG) == "1"


def _extras_module(kind: str, tags=None, args=(), requires=()):
    decorator = demo_module(kind, tags, args, requires)

    def wrap(cls):
        from .modules import DEMO_MODULES

        decorator(cls)
        entry = DEMO_MODULES.pop()  # keep plugin modules out of the core list
        EXTRAS_MODULES.append(entry)
        return cls

    return wrap


@_extras_module(
    kind="optimizer",
    args=[
        arg("lr", ValueKind.REAL, 0.001, "step size"),
        arg("eps", ValueKind.REAL, 1e-8, "denominator floor"),
    ],
)
class AdaBeliefOptimizer(BuildableModule):
    """Scalar variant of belief-tracking adaptive gradient descent."""

    def __init__(self, lr: float = 0.001, eps: float = 1e-8):
        super().__init__(lr=lr, eps=eps)
        self.lr = lr
        self.eps = eps
        self._m = 0.0
        self._s = 0.0
        self._t = 0

    def step(self, x: float, grad: float, scale: float = 1.0) -> float:
        self._t += 1
        beta1, beta2 = 0.9, 0.999
        self._m = beta1 * self._m + (1 - beta1) * grad
        self._s = beta2 * self._s + (1 - beta2) * (grad - self._m) ** 2
        m_hat = self._m / (1 - beta1 ** self._t)
        s_hat = self._s / (1 - beta2 ** self._t)
        return x - self.lr * scale * m_hat / (math.sqrt(s_hat) + self.eps)


def register_extras(registry: Registry) -> None:
    """Register plugin modules, or record them as missing with an install hint."""
    if extras_enabled():
        for descriptor, cls in EXTRAS_MODULES:
            registry.register(dataclasses.replace(descriptor, source="plugin 'extras'"), cls)
    else:
        for descriptor, _ in EXTRAS_MODULES:
            registry.register_missing(descriptor.name, MISSING_REASON)
