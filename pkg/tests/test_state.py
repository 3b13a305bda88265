"""State export/import round-trips, canonical bytes, finalization subsets."""

import itertools
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from argtree import (
    ConstructionError,
    MissingModuleError,
    MissingSelectionError,
    ModuleState,
    SelectionIndexError,
    SelectionProvider,
    canonical_serialize,
    export_state,
    import_state,
    parse_state,
)
from argtree.demo.structure import (
    CandidateChoice,
    LinearSkip,
    MobileInvConvLayer,
    SingleLayerCell,
    SkipConnection,
)

from tests.conftest import DATA_DIR
from tests.generators import random_structure_module

GOLDEN_CELL = DATA_DIR / "golden_cell.state.json"


def golden_cell_module():
    return SingleLayerCell(
        features_mult=1,
        features_fixed=-1,
        op=MobileInvConvLayer(
            kernel_size=3,
            kernel_size_in=1,
            kernel_size_out=1,
            stride=1,
            expansion=6.0,
            padding="same",
            dilation=1,
            bn_affine=True,
            act_fun="relu6",
            act_inplace=True,
            fused=False,
        ),
    )


class TestExportState:
    def test_cell_wrapping_one_op(self):
        state = export_state(golden_cell_module())
        assert state.name == "SingleLayerCell"
        assert state.kwargs == {"features_mult": 1, "features_fixed": -1}
        op = state.submodules["op"]
        assert op.name == "MobileInvConvLayer"
        assert op.kwargs["kernel_size"] == 3
        assert op.kwargs["expansion"] == 6.0
        assert isinstance(op.kwargs["expansion"], float)
        assert op.kwargs["stride"] == 1
        assert op.kwargs["act_fun"] == "relu6"
        assert op.submodules == {}

    def test_leaf_without_recursion(self):
        state = export_state(SkipConnection())
        assert state == ModuleState("SkipConnection", {}, {})


class TestCanonicalSerialize:
    def test_key_order_insensitive(self):
        a = ModuleState("X", {"a": 1, "b": 2}, {})
        b = ModuleState("X", {"b": 2, "a": 1}, {})
        assert canonical_serialize(a) == canonical_serialize(b)

    def test_golden_cell_bytes(self):
        assert canonical_serialize(export_state(golden_cell_module())) == (
            GOLDEN_CELL.read_bytes()
        )

    def test_serialize_parse_serialize_fixed_point(self):
        rng = random.Random(4)
        for _ in range(25):
            state = export_state(random_structure_module(rng))
            data = canonical_serialize(state)
            assert canonical_serialize(parse_state(data)) == data

    def test_numbers_render_minimally(self):
        data = canonical_serialize(ModuleState("X", {"i": 6, "r": 6.0}, {}))
        assert b'"i":6' in data
        assert b'"r":6.0' in data

    @given(
        st.dictionaries(
            st.text(st.characters(min_codepoint=32, max_codepoint=126), min_size=1, max_size=8),
            st.one_of(
                st.booleans(),
                st.integers(-10**6, 10**6),
                st.floats(allow_nan=False, allow_infinity=False, width=64),
                st.text(max_size=12),
            ),
            max_size=6,
        )
    )
    def test_fixed_point_arbitrary_kwargs(self, kwargs):
        state = ModuleState("X", kwargs, {})
        data = canonical_serialize(state)
        assert canonical_serialize(parse_state(data)) == data


class TestImportState:
    def test_golden_file_round_trips_byte_exact(self, registry):
        data = GOLDEN_CELL.read_bytes()
        module = import_state(registry, parse_state(data))
        assert canonical_serialize(export_state(module)) == data

    def test_simple_leaf(self, registry):
        module = import_state(registry, ModuleState("SkipConnection", {}, {}))
        assert isinstance(module, SkipConnection)

    def test_missing_plugin_reports_install_hint(self, registry):
        state = ModuleState("AdaBeliefOptimizer", {"lr": 0.1}, {})
        with pytest.raises(MissingModuleError) as err:
            import_state(registry, state)
        assert "optional plugin 'extras' not installed" in str(err.value)

    def test_unexpected_kwarg_is_a_construction_error(self, registry):
        state = ModuleState("SkipConnection", {"bogus": 1}, {})
        with pytest.raises(ConstructionError):
            import_state(registry, state)

    def test_random_modules_round_trip(self, registry):
        rng = random.Random(11)
        for _ in range(40):
            module = random_structure_module(rng)
            state = export_state(module)
            again = export_state(import_state(registry, state))
            assert canonical_serialize(again) == canonical_serialize(state)


def five_candidates():
    return [MobileInvConvLayer(kernel_size=k) for k in (1, 3, 5, 7, 9)]


class TestFinalization:
    def test_all_non_empty_subsets(self):
        # oracle: export unfinalized, filter the candidate list by hand
        for subset in itertools.chain.from_iterable(
            itertools.combinations(range(5), n) for n in range(1, 6)
        ):
            group = CandidateChoice(name="n/block-0/op-0", candidates=five_candidates())
            full = export_state(group)
            expected_candidates = [full.submodules["candidates"][i] for i in subset]

            selections = SelectionProvider({"n/block-0/op-0": list(subset)})
            finalized = export_state(group, finalize=True, selections=selections)
            if len(subset) == 1:
                assert finalized == expected_candidates[0]  # wrapper elided
            else:
                assert finalized.name == "CandidateChoice"
                assert finalized.submodules["candidates"] == expected_candidates
                assert finalized.kwargs == full.kwargs

    def test_missing_selection(self):
        group = CandidateChoice(name="g", candidates=five_candidates())
        with pytest.raises(MissingSelectionError):
            export_state(group, finalize=True, selections=SelectionProvider({}))

    def test_index_out_of_range(self):
        group = CandidateChoice(name="g", candidates=five_candidates())
        with pytest.raises(SelectionIndexError):
            export_state(group, finalize=True, selections=SelectionProvider({"g": [5]}))

    def test_nested_groups_finalize_recursively(self):
        inner = CandidateChoice(name="inner", candidates=[SkipConnection(), LinearSkip()])
        outer = CandidateChoice(
            name="outer", candidates=[inner, MobileInvConvLayer(kernel_size=5)]
        )
        selections = SelectionProvider({"outer": [0], "inner": [0]})
        finalized = export_state(outer, finalize=True, selections=selections)
        # both wrappers elide down to the innermost selection
        assert finalized == ModuleState("SkipConnection", {}, {})

    def test_substitution_hook_swaps_descriptor(self):
        cell = SingleLayerCell(op=LinearSkip(features=32))
        plain = export_state(cell)
        assert plain.submodules["op"].name == "LinearSkip"
        finalized = export_state(cell, finalize=True, selections=SelectionProvider({}))
        assert finalized.submodules["op"] == ModuleState("SkipConnection", {}, {})

    def test_finalize_invents_no_kwargs(self):
        # every kwarg in the finalized export appears in the unfinalized one,
        # except below substitution hooks (there are none in this structure)
        group = CandidateChoice(name="g", candidates=five_candidates())
        cell = SingleLayerCell(op=group)
        full = export_state(cell)
        finalized = export_state(
            cell, finalize=True, selections=SelectionProvider({"g": [1, 3]})
        )

        def kwarg_pairs(state):
            yield from state.kwargs.items()
            for entry in state.submodules.values():
                for sub in entry if isinstance(entry, list) else [entry]:
                    yield from kwarg_pairs(sub)

        assert set(kwarg_pairs(finalized)) <= set(kwarg_pairs(full))

    def test_candidate_order_preserved(self):
        group = CandidateChoice(name="g", candidates=five_candidates())
        full = export_state(group)
        finalized = export_state(
            group, finalize=True, selections=SelectionProvider({"g": [4, 0, 2]})
        )
        kernels = [s.kwargs["kernel_size"] for s in finalized.submodules["candidates"]]
        expected = [full.submodules["candidates"][i].kwargs["kernel_size"] for i in (4, 0, 2)]
        assert kernels == expected


class TestStateFileFormat:
    def test_state_files_are_plain_json(self):
        obj = json.loads(GOLDEN_CELL.read_text())
        assert obj["name"] == "SingleLayerCell"
        assert set(obj) == {"name", "kwargs", "submodules"}

    def test_parse_rejects_garbage(self):
        from argtree import ConfigSyntaxError

        with pytest.raises(ConfigSyntaxError):
            parse_state(b"certainly not json")
        with pytest.raises(ConfigSyntaxError):
            parse_state(b'{"kwargs": {}}')

    def test_parse_rejects_structured_kwargs(self):
        from argtree import ConfigSyntaxError

        with pytest.raises(ConfigSyntaxError):
            parse_state(b'{"name": "X", "kwargs": {"a": {"nested": 1}}, "submodules": {}}')
        with pytest.raises(ConfigSyntaxError):
            parse_state(b'{"name": "X", "kwargs": {"a": null}, "submodules": {}}')
