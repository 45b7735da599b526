import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mosaic import ConfigError, SeededRng, default_registry, load_registry
from mosaic.ruleset import (
    DEFAULT_BRACKET_PAIRS,
    DEFAULT_DIGIT_TEMPLATES,
    DEFAULT_TEXT_PAIRS,
    MASKOUT_RULE_NAMES,
    PERMUTE_RULE_NAMES,
    FormatSpec,
    MetaRule,
    apply_meta_rule,
    assemble_markers,
    sample_format,
    sample_meta_rule,
)

from reference import is_permutation_of_1_to_k, ref_maskout, ref_permute

texts = st.lists(st.text(alphabet="abcz AB?!9", min_size=1, max_size=30), min_size=2, max_size=12)


def _permute(name, k, params=None):
    return MetaRule("permute", name, k, params)


def _maskout(name, k, params=None):
    return MetaRule("maskout", name, k, params)


class TestRegistryDefaults:
    def test_table_sizes(self, registry):
        assert len(registry.digit_templates) == 10
        assert len(registry.bracket_pairs) == 10
        assert len(registry.text_pairs) == 10
        assert len(registry.permute_templates) == 10
        assert len(registry.maskout_templates) == 5

    def test_ships_published_rows(self, registry):
        assert "###{i}." in registry.digit_templates
        assert "||{i}||." in registry.digit_templates
        assert ("[", "]") in registry.bracket_pairs
        assert ("<|", "|>") in registry.bracket_pairs
        assert ("START", "END") in registry.text_pairs
        assert ("RES", "/RES") in registry.text_pairs

    def test_reverse_template_sentence(self, registry):
        assert registry.permute_templates["REVERSE"] == (
            "Respond to each of the following instructions in reverse of the original order."
        )

    def test_assembled_example(self):
        open_marker, close_marker = assemble_markers(("[", "]"), ("START", "END"))
        assert open_marker == "[START]"
        assert close_marker == "[END]"
        rendered = "###{i}.".format(i=1) + " " + open_marker + "response" + close_marker
        assert rendered == "###1. [START]response[END]"


class TestSampleFormat:
    def test_wrap_probability_zero_has_no_markers(self, registry):
        spec = sample_format(registry, SeededRng(3), wrap_probability=0.0)
        assert spec.open_marker is None and spec.close_marker is None
        assert spec.digit_template in DEFAULT_DIGIT_TEMPLATES
        assert spec.meta_text

    def test_deterministic_for_fixed_seed(self, registry):
        a = sample_format(registry, SeededRng(99))
        b = sample_format(registry, SeededRng(99))
        assert a == b

    def test_markers_assemble_bracket_around_text(self, registry):
        spec = sample_format(registry, SeededRng(5), wrap_probability=1.0)
        assert any(
            spec.open_marker == b[0] + t[0] + b[1] and spec.close_marker == b[0] + t[1] + b[1]
            for b in DEFAULT_BRACKET_PAIRS for t in DEFAULT_TEXT_PAIRS
        )
        assert spec.open_marker in spec.meta_text
        assert spec.close_marker in spec.meta_text

    def test_digit_template_frequency(self, registry):
        rng = SeededRng(11)
        counts = {}
        n = 10_000
        for _ in range(n):
            spec = sample_format(registry, rng, wrap_probability=0.0)
            counts[spec.digit_template] = counts.get(spec.digit_template, 0) + 1
        for template in DEFAULT_DIGIT_TEMPLATES:
            assert abs(counts.get(template, 0) / n - 0.1) <= 0.02


class TestSampleMetaRule:
    def test_reverse_k3(self, registry):
        items = ["a one", "b two", "c three"]
        rule = MetaRule("permute", "REVERSE", 3)
        assert apply_meta_rule(rule, items) == [3, 2, 1]

    def test_even_maskout_k5(self, registry):
        rule = MetaRule("maskout", "EVEN", 5)
        assert apply_meta_rule(rule, ["a"] * 5) == [1, 3, 5]

    def test_alpha_hand_example(self):
        items = ["banana split now", "apple pie", "cherry tart"]
        rule = MetaRule("permute", "ALPHA", 3)
        assert apply_meta_rule(rule, items) == [2, 1, 3]

    def test_rule_name_frequencies(self, registry):
        rng = SeededRng(21)
        items = ["one two", "three four five", "six"]
        n = 10_000
        permute_counts, maskout_counts = {}, {}
        for _ in range(n):
            rule = sample_meta_rule(registry, rng, "permute", 3, items)
            permute_counts[rule.name] = permute_counts.get(rule.name, 0) + 1
        for _ in range(n):
            rule = sample_meta_rule(registry, rng, "maskout", 3, items)
            maskout_counts[rule.name] = maskout_counts.get(rule.name, 0) + 1
        for name in PERMUTE_RULE_NAMES:
            assert abs(permute_counts.get(name, 0) / n - 0.1) <= 0.02
        for name in MASKOUT_RULE_NAMES:
            assert abs(maskout_counts.get(name, 0) / n - 0.2) <= 0.02

    def test_k_too_small_errors(self, registry):
        for kind in ("permute", "maskout"):
            with pytest.raises(ConfigError, match="at least 2"):
                sample_meta_rule(registry, SeededRng(0), kind, 1, ["solo"])

    def test_fix_permute_params_is_permutation(self, registry):
        rng = SeededRng(8)
        for _ in range(200):
            rule = sample_meta_rule(registry, rng, "permute", 6, ["w"] * 6)
            if rule.name == "FIX":
                assert sorted(rule.params) == [1, 2, 3, 4, 5, 6]
                assert str(rule.params[0]) in rule.meta_text

    def test_fix_maskout_params_strict_subset(self, registry):
        rng = SeededRng(9)
        seen_fix = False
        for _ in range(300):
            rule = sample_meta_rule(registry, rng, "maskout", 5, ["w"] * 5)
            if rule.name == "FIX":
                seen_fix = True
                assert 1 <= len(rule.params) <= 4
                assert set(rule.params) < set(range(1, 6))
                assert list(rule.params) == sorted(rule.params)
        assert seen_fix

    def test_word_maskout_count_capped_at_half(self, registry):
        rng = SeededRng(10)
        for _ in range(300):
            rule = sample_meta_rule(registry, rng, "maskout", 7, ["w"] * 7)
            if rule.name in ("WORD_LONG", "WORD_SHORT"):
                assert 1 <= rule.params[0] <= 3
                assert str(rule.params[0]) in rule.meta_text

    def test_deterministic_for_fixed_seed(self, registry):
        items = ["left side", "right side"]
        a = sample_meta_rule(registry, SeededRng(4), "maskout", 2, items)
        b = sample_meta_rule(registry, SeededRng(4), "maskout", 2, items)
        assert a == b


class TestApplyMetaRule:
    def test_length_word_hand_example(self):
        items = ["one two three four five", "one two", "a b c d e f g h i"]
        assert apply_meta_rule(_permute("LENGTH_WORD", 3), items) == [2, 1, 3]

    def test_odd_even_k4(self):
        assert apply_meta_rule(_permute("ODD_EVEN", 4), ["a"] * 4) == [1, 3, 2, 4]

    def test_even_odd_k5(self):
        assert apply_meta_rule(_permute("EVEN_ODD", 5), ["a"] * 5) == [2, 4, 1, 3, 5]

    def test_word_long_removal_hand_example(self):
        items = ["one two three four five", "one two", "a b c d e f g h i"]
        assert apply_meta_rule(_maskout("WORD_LONG", 3, (1,)), items) == [1, 2]

    def test_word_short_removal(self):
        items = ["one two three four five", "one two", "a b c d e f g h i"]
        assert apply_meta_rule(_maskout("WORD_SHORT", 3, (1,)), items) == [1, 3]

    def test_fix_maskout_survivors(self):
        assert apply_meta_rule(_maskout("FIX", 4, (2, 4)), ["a"] * 4) == [1, 3]

    def test_fix_permute_returns_params(self):
        assert apply_meta_rule(_permute("FIX", 3, (3, 1, 2)), ["a"] * 3) == [3, 1, 2]

    def test_length_mismatch_errors(self):
        with pytest.raises(ConfigError, match="k=3"):
            apply_meta_rule(_permute("REVERSE", 3), ["a", "b"])

    def test_ties_keep_original_index_order(self):
        same = ["same words here", "same words here", "same words here"]
        for name in ("ALPHA", "REVERSE_ALPHA", "LENGTH_WORD", "REVERSE_LENGTH_WORD",
                     "LENGTH_CHAR", "REVERSE_CHAR_WORD"):
            assert apply_meta_rule(_permute(name, 3), same) == [1, 2, 3]

    def test_alpha_non_letter_sorts_before_a(self):
        items = ["apple pie", "9 things", "zebra"]
        assert apply_meta_rule(_permute("ALPHA", 3), items) == [2, 1, 3]

    def test_alpha_case_folds(self):
        items = ["Banana", "apple"]
        assert apply_meta_rule(_permute("ALPHA", 2), items) == [2, 1]

    def test_reverse_composed_with_itself_is_identity(self):
        for k in range(2, 8):
            order = apply_meta_rule(_permute("REVERSE", k), ["x"] * k)
            composed = [order[order[i - 1] - 1] for i in range(1, k + 1)]
            assert composed == list(range(1, k + 1))

    @given(items=st.lists(st.sampled_from(["arc b", "brine c", "cedar d", "dew e", "elm f"]),
                          min_size=2, max_size=5, unique=True))
    def test_reverse_alpha_is_exact_reverse_of_alpha_without_ties(self, items):
        alpha = apply_meta_rule(_permute("ALPHA", len(items)), items)
        rev = apply_meta_rule(_permute("REVERSE_ALPHA", len(items)), items)
        assert rev == alpha[::-1]

    @settings(max_examples=200)
    @given(items=texts, data=st.data())
    def test_every_permute_rule_returns_permutation(self, items, data):
        k = len(items)
        for name in PERMUTE_RULE_NAMES:
            if name == "FIX":
                params = tuple(data.draw(st.permutations(list(range(1, k + 1)))))
                rule = _permute(name, k, params)
            else:
                rule = _permute(name, k)
            assert is_permutation_of_1_to_k(apply_meta_rule(rule, items), k)

    @settings(max_examples=200)
    @given(items=texts, data=st.data())
    def test_every_maskout_rule_survivors_valid(self, items, data):
        k = len(items)
        for name in MASKOUT_RULE_NAMES:
            if name == "FIX":
                size = data.draw(st.integers(1, k - 1))
                params = tuple(sorted(data.draw(
                    st.lists(st.integers(1, k), min_size=size, max_size=size, unique=True))))
                rule = _maskout(name, k, params)
            elif name in ("WORD_LONG", "WORD_SHORT"):
                rule = _maskout(name, k, (data.draw(st.integers(1, max(1, k // 2))),))
            else:
                rule = _maskout(name, k)
            survivors = apply_meta_rule(rule, items)
            assert survivors
            assert len(survivors) < k
            assert survivors == sorted(survivors)
            assert set(survivors) < set(range(1, k + 1))

    @settings(max_examples=150)
    @given(items=texts)
    def test_rules_match_reference_implementation(self, items):
        k = len(items)
        for name in PERMUTE_RULE_NAMES:
            if name == "FIX":
                continue
            assert apply_meta_rule(_permute(name, k), items) == ref_permute(name, items)
        for name in ("ODD", "EVEN"):
            assert apply_meta_rule(_maskout(name, k), items) == ref_maskout(name, items)
        for n in range(1, max(1, k // 2) + 1):
            assert apply_meta_rule(_maskout("WORD_LONG", k, (n,)), items) == \
                ref_maskout("WORD_LONG", items, (n,))


class TestFormatSpecValidation:
    def test_template_needs_single_placeholder(self):
        with pytest.raises(ConfigError):
            FormatSpec("no placeholder")
        with pytest.raises(ConfigError):
            FormatSpec("{i} and {i}.")

    def test_markers_come_in_pairs(self):
        with pytest.raises(ConfigError):
            FormatSpec("{i}.", open_marker="[X]", close_marker=None)
        with pytest.raises(ConfigError):
            FormatSpec("{i}.", open_marker="[X]", close_marker="[X]")
        with pytest.raises(ConfigError):
            FormatSpec("{i}.", open_marker="", close_marker="[X]")


class TestRegistryOverride:
    def test_replaces_text_pairs(self, tmp_path):
        pairs = [[f"T{i}", f"U{i}"] for i in range(17)]
        path = tmp_path / "reg.json"
        path.write_text(json.dumps({"text_pairs": pairs}), encoding="utf-8")
        reg = load_registry(path)
        assert len(reg.text_pairs) == 17
        assert len(reg.digit_templates) == 10  # untouched lists keep defaults

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "reg.json"
        path.write_text(json.dumps({"digit_formats": []}), encoding="utf-8")
        with pytest.raises(ConfigError, match="unknown keys"):
            load_registry(path)

    def test_malformed_json_rejected(self, tmp_path):
        path = tmp_path / "reg.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_registry(path)

    def test_bad_digit_template_rejected(self, tmp_path):
        path = tmp_path / "reg.json"
        path.write_text(json.dumps({"digit_templates": ["1."]}), encoding="utf-8")
        with pytest.raises(ConfigError, match="exactly once"):
            load_registry(path)

    def test_partial_template_override(self, tmp_path):
        path = tmp_path / "reg.json"
        path.write_text(json.dumps({"permute_templates": {"REVERSE": "Answer backwards."}}),
                        encoding="utf-8")
        reg = load_registry(path)
        assert reg.permute_templates["REVERSE"] == "Answer backwards."
        assert reg.permute_templates["ALPHA"] == default_registry().permute_templates["ALPHA"]

    def test_unknown_rule_name_rejected(self, tmp_path):
        path = tmp_path / "reg.json"
        path.write_text(json.dumps({"maskout_templates": {"HALF": "Drop half."}}), encoding="utf-8")
        with pytest.raises(ConfigError, match="unknown rule name"):
            load_registry(path)
