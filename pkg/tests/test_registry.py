"""Registration, lookup, filtering, and missing-module records."""

import random

import pytest

from argtree import (
    ArgumentSpec,
    ChildRequirementSpec,
    DuplicateNameError,
    InvalidDescriptorError,
    MissingModuleError,
    ModuleDescriptor,
    Registry,
    UnknownModuleError,
    ValueKind,
)
from argtree.demo import build_demo_registry
from argtree.demo.extras import MISSING_REASON
from argtree.errors import RegistryFrozenError


def make_descriptor(name, kind="trainer", tags=None):
    return ModuleDescriptor(name=name, kind=kind, tags=dict(tags or {}))


class TestRegister:
    def test_registered_descriptor_is_retrievable(self):
        reg = Registry()
        d = make_descriptor("SimpleTrainer")
        reg.register(d)
        assert reg.lookup("SimpleTrainer") is d

    def test_duplicate_name_rejected(self):
        reg = Registry().register(make_descriptor("SimpleTrainer"))
        with pytest.raises(DuplicateNameError):
            reg.register(make_descriptor("SimpleTrainer"))

    def test_name_clash_with_missing_rejected(self):
        reg = Registry().register_missing("Gone", "why")
        with pytest.raises(DuplicateNameError):
            reg.register(make_descriptor("Gone"))

    def test_invalid_descriptor_rejected(self):
        bad = ModuleDescriptor(
            name="Bad",
            kind="trainer",
            arguments=(ArgumentSpec("seed", ValueKind.INTEGER, "nope"),),
        )
        with pytest.raises(InvalidDescriptorError):
            Registry().register(bad)

    def test_frozen_registry_rejects_mutation(self):
        reg = Registry().freeze()
        with pytest.raises(RegistryFrozenError):
            reg.register(make_descriptor("Late"))


class TestLookup:
    def test_lookup_demo_device(self, registry):
        assert registry.lookup("CudaDevicesManager").kind == "device"

    def test_empty_name_unknown(self, registry):
        with pytest.raises(UnknownModuleError):
            registry.lookup("")

    def test_whitespace_trimmed(self, registry):
        # names arrive from comma-separated lists, so padding must not matter
        assert registry.lookup("SimpleTrainer ") is registry.lookup("SimpleTrainer")
        assert registry.lookup(" SimpleTrainer") is registry.lookup("SimpleTrainer")

    def test_missing_module_carries_reason(self):
        reg = Registry().register_missing(
            "AdaBeliefOptimizer", "optional plugin 'extras' not installed"
        )
        with pytest.raises(MissingModuleError) as err:
            reg.lookup("AdaBeliefOptimizer")
        assert "optional plugin 'extras' not installed" in str(err.value)


class TestFilter:
    def test_search_methods_match_brute_force(self, registry):
        # oracle: linear scan applying the predicate by hand
        expected = sorted(
            d.name
            for d in registry.descriptors()
            if d.kind == "method" and d.tags.get("search") is True
        )
        got = [d.name for d in registry.filter("method", {"search": True})]
        assert got == expected
        assert "StaticEvalMethod" not in got  # method without the search tag

    def test_empty_tag_filter_returns_whole_kind(self, registry):
        all_methods = registry.filter("method", {})
        assert {d.name for d in all_methods} >= {
            "GradientDescentMethod",
            "UniformRandomMethod",
            "StaticEvalMethod",
        }

    def test_unmatched_tag_yields_nothing(self, registry):
        assert registry.filter("optimizer", {"nonexistent_tag": True}) == []

    def test_unknown_kind_yields_nothing(self, registry):
        assert registry.filter("starship") == []

    def test_missing_modules_never_match(self):
        reg = Registry().register_missing("GhostOptimizer", "gone")
        assert reg.filter("optimizer") == []

    def test_unrelated_registration_does_not_change_results(self):
        reg = Registry()
        reg.register(make_descriptor("A", kind="method", tags={"search": True}))
        before = [d.name for d in reg.filter("method", {"search": True})]
        reg.register(make_descriptor("Z", kind="callback"))
        assert [d.name for d in reg.filter("method", {"search": True})] == before


class TestOrderIndependence:
    def test_registration_order_is_invisible(self):
        descriptors = [
            make_descriptor(f"Mod{i}", kind=random.Random(i).choice(["a", "b"]))
            for i in range(12)
        ]
        results = []
        for seed in (1, 2, 3):
            shuffled = descriptors[:]
            random.Random(seed).shuffle(shuffled)
            reg = Registry()
            for d in shuffled:
                reg.register(d)
            reg.freeze()
            results.append(
                ([d.name for d in reg.filter("a")], [d.name for d in reg.filter("b")])
            )
        assert results[0] == results[1] == results[2]


class TestDemoRegistry:
    def test_extras_missing_by_default(self, registry, monkeypatch):
        monkeypatch.delenv("ARGTREE_ENABLE_EXTRAS", raising=False)
        reg = build_demo_registry()
        with pytest.raises(MissingModuleError) as err:
            reg.lookup("AdaBeliefOptimizer")
        assert err.value.reason == MISSING_REASON

    def test_extras_register_when_enabled(self, monkeypatch):
        monkeypatch.setenv("ARGTREE_ENABLE_EXTRAS", "1")
        reg = build_demo_registry()
        descriptor = reg.lookup("AdaBeliefOptimizer")
        assert descriptor.kind == "optimizer"
        assert descriptor.source == "plugin 'extras'"
