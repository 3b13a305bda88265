"""Key grammar, selection lists, value resolution, placeholders, overrides."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from argtree import (
    AmbiguousValueError,
    ArgumentSpec,
    ConfigSyntaxError,
    MalformedKeyError,
    NonScalarValueError,
    UnknownPlaceholderError,
    ValueKind,
    expand_placeholders,
    parse_document,
    parse_overrides,
)
from argtree.config import ExplicitArg, Selection, WildcardArg, classify_key

from tests.conftest import load_config

SEED = ArgumentSpec("seed", ValueKind.INTEGER, 0)
EPOCHS = ArgumentSpec("max_epochs", ValueKind.INTEGER, 10)


class TestKeyGrammar:
    def test_selection_form(self):
        assert classify_key("cls_task") == Selection("cls_task")

    def test_plain_wildcard_form(self):
        assert classify_key("{cls_task}.save_dir") == WildcardArg("cls_task", "save_dir")

    def test_indexed_wildcard_form(self):
        form = classify_key("{cls_callbacks#1}.top_n")
        assert form == WildcardArg("cls_callbacks", "top_n", 1, indexed=True)

    def test_explicit_form(self):
        assert classify_key("SingleSearchTask.save_dir") == ExplicitArg(
            "SingleSearchTask", "save_dir"
        )

    @pytest.mark.parametrize(
        "key",
        [
            "{cls_task.save_dir",   # unclosed brace
            "{cls_task}.a.b",       # dotted argument
            "cls_",                 # empty requirement suffix
            "{task}.arg",           # wildcard without the prefix
            "{cls_task}",           # wildcard without an argument
            "3Class.arg",           # class names cannot start with a digit
            "{cls_task#-1}.arg",    # negative index
            "a b.c",                # whitespace in the class segment
            "cls_task ",            # keys are never trimmed
            "{cls_task}.arg ",      # trailing space in the argument
        ],
    )
    def test_malformed_keys(self, key):
        with pytest.raises(MalformedKeyError):
            classify_key(key)

    @given(st.text(max_size=40))
    def test_classifier_never_crashes(self, key):
        # any string either classifies into one form or fails loudly
        try:
            form = classify_key(key)
        except MalformedKeyError:
            return
        assert isinstance(form, (Selection, WildcardArg, ExplicitArg))

    @given(
        st.sampled_from(["cls_a", "cls_trainer", "cls_network_cells"]),
        st.integers(0, 40),
        st.sampled_from(["seed", "max_epochs", "lr"]),
    )
    def test_canonical_keys_always_classify(self, req_key, index, arg):
        assert classify_key(req_key) == Selection(req_key)
        indexed = classify_key(f"{{{req_key}#{index}}}.{arg}")
        assert indexed == WildcardArg(req_key, arg, index, indexed=True)


class TestParseDocument:
    def test_golden_file_parses_fully(self):
        doc = load_config("search_quickstart.json")
        assert len(doc.entries) == 16
        assert doc.entries["cls_task"] == "SingleSearchTask"
        assert doc.entries["{cls_trainer}.max_epochs"] == 3
        assert doc.consumed == set()

    def test_empty_object(self):
        doc = parse_document(b"{}")
        assert doc.entries == {}

    def test_malformed_key_rejected(self):
        with pytest.raises(MalformedKeyError):
            parse_document(b'{"{cls_task.save_dir": 1}')

    def test_non_scalar_value_rejected(self):
        with pytest.raises(NonScalarValueError):
            parse_document(b'{"cls_task": ["A"]}')
        with pytest.raises(NonScalarValueError):
            parse_document(b'{"cls_task": null}')

    def test_invalid_json_rejected(self):
        with pytest.raises(ConfigSyntaxError):
            parse_document(b"not json")
        with pytest.raises(ConfigSyntaxError):
            parse_document(b"[1, 2]")


class TestGetUsedClasses:
    def test_single_name(self):
        doc = parse_document(b'{"cls_callbacks": "CheckpointCallback"}')
        assert doc.get_used_classes("cls_callbacks") == ["CheckpointCallback"]
        assert "cls_callbacks" in doc.consumed

    def test_comma_list_preserves_order_and_trims(self):
        doc = parse_document(
            b'{"cls_network_cells": "Bench201CNNSearchCell, Bench201ReductionCell"}'
        )
        assert doc.get_used_classes("cls_network_cells") == [
            "Bench201CNNSearchCell",
            "Bench201ReductionCell",
        ]

    def test_absent_key_yields_nothing(self):
        doc = parse_document(b"{}")
        assert doc.get_used_classes("cls_benchmark") == []

    def test_empty_string_means_no_selection(self):
        doc = parse_document(b'{"cls_benchmark": ""}')
        assert doc.get_used_classes("cls_benchmark") == []
        assert "cls_benchmark" in doc.consumed


class TestGetUsedValue:
    def test_plain_wildcard_hit(self):
        doc = parse_document(b'{"{cls_trainer}.max_epochs": 3}')
        assert doc.get_used_value("cls_trainer", 0, "SimpleTrainer", EPOCHS) == 3
        assert "{cls_trainer}.max_epochs" in doc.consumed

    def test_absent_key_falls_back_to_default(self):
        doc = parse_document(b"{}")
        assert doc.get_used_value("cls_task", 0, "SingleSearchTask", SEED) == 0

    def test_conflicting_keys_are_ambiguous(self):
        doc = parse_document(
            b'{"{cls_task}.seed": 1, "SingleSearchTask.seed": 2}'
        )
        with pytest.raises(AmbiguousValueError):
            doc.get_used_value("cls_task", 0, "SingleSearchTask", SEED)

    def test_agreeing_aliases_resolve_and_consume_both(self):
        doc = parse_document(b'{"{cls_task}.seed": 2, "SingleSearchTask.seed": 2}')
        assert doc.get_used_value("cls_task", 0, "SingleSearchTask", SEED) == 2
        assert doc.consumed == {"{cls_task}.seed", "SingleSearchTask.seed"}

    def test_same_number_different_type_is_ambiguous(self):
        doc = parse_document(b'{"{cls_task}.seed": 1, "SingleSearchTask.seed": "1"}')
        with pytest.raises(AmbiguousValueError):
            doc.get_used_value("cls_task", 0, "SingleSearchTask", SEED)

    def test_indexed_beats_explicit(self):
        doc = parse_document(
            b'{"{cls_callbacks#1}.top_n": 5, "CheckpointCallback.top_n": 5}'
        )
        top_n = ArgumentSpec("top_n", ValueKind.INTEGER, 1)
        assert doc.get_used_value("cls_callbacks", 1, "CheckpointCallback", top_n) == 5

    def test_plain_wildcard_binds_only_index_zero(self):
        doc = parse_document(b'{"{cls_callbacks}.top_n": 5}')
        top_n = ArgumentSpec("top_n", ValueKind.INTEGER, 1)
        assert doc.get_used_value("cls_callbacks", 1, "CheckpointCallback", top_n) == 1
        assert doc.get_used_value("cls_callbacks", 0, "CheckpointCallback", top_n) == 5

    def test_resolution_is_deterministic(self):
        raw = b'{"{cls_task}.seed": 7}'
        results = []
        for _ in range(2):
            doc = parse_document(raw)
            value = doc.get_used_value("cls_task", 0, "SingleSearchTask", SEED)
            results.append((value, sorted(doc.consumed)))
        assert results[0] == results[1]


class TestExpandPlaceholders:
    def test_known_placeholder_substitutes(self):
        assert expand_placeholders("{path_tmp}/", {"path_tmp": "/tmp/argtree"}) == "/tmp/argtree/"

    def test_plain_string_untouched(self):
        assert expand_placeholders("plain", {"path_tmp": "x"}) == "plain"

    def test_unknown_placeholder_raises(self):
        with pytest.raises(UnknownPlaceholderError):
            expand_placeholders("{path_data}/set", {"path_tmp": "x"})

    def test_requirement_tokens_pass_through(self):
        assert expand_placeholders("{cls_task}.save_dir", {}) == "{cls_task}.save_dir"

    @given(st.text(alphabet=st.characters(blacklist_characters="{"), max_size=60))
    def test_noop_without_braces(self, text):
        assert expand_placeholders(text, {}) == text


class TestMergeOverrides:
    def test_later_pairs_win(self):
        doc = load_config("search_quickstart.json")
        merged = doc.merge_overrides(parse_overrides(["{cls_trainer}.max_epochs=10"]))
        assert merged.get_used_value("cls_trainer", 0, "SimpleTrainer", EPOCHS) == 10
        # oracle: last-write-wins map built by hand
        expected = dict(doc.entries)
        expected["{cls_trainer}.max_epochs"] = "10"
        assert merged.entries == expected

    def test_empty_override_list_is_identity(self):
        doc = load_config("search_quickstart.json")
        assert doc.merge_overrides([]).entries == doc.entries

    def test_selection_can_be_replaced(self):
        doc = load_config("search_quickstart.json")
        merged = doc.merge_overrides(parse_overrides(["cls_trainer=OtherTrainer"]))
        assert merged.get_used_classes("cls_trainer") == ["OtherTrainer"]

    def test_override_keys_validated(self):
        doc = load_config("search_quickstart.json")
        with pytest.raises(MalformedKeyError):
            doc.merge_overrides([("{cls_task.save_dir", "x")])

    def test_consumed_reset(self):
        doc = load_config("search_quickstart.json")
        doc.get_used_classes("cls_task")
        assert doc.merge_overrides([]).consumed == set()


class TestJsonRoundTrip:
    def test_document_serialization_round_trips(self):
        doc = load_config("search_quickstart.json")
        again = parse_document(doc.to_json_text())
        assert again.entries == doc.entries
        assert list(again.entries) == list(doc.entries)  # order preserved

    def test_values_keep_json_types(self):
        doc = load_config("search_quickstart.json")
        assert isinstance(doc.entries["{cls_trainer}.ema_decay"], float)
        assert isinstance(doc.entries["{cls_trainer}.max_epochs"], int)
        assert isinstance(doc.entries["{cls_task}.is_test_run"], bool)
        assert json.loads(doc.to_json_text()) == doc.entries
