"""Serial-digit formats, response markers, and the permute/maskout rules.

The default registry ships ten digit templates, ten bracket pairs, ten text
pairs, ten permute rules, and five maskout rules.  All lists can be replaced
wholesale through a JSON override file, so deployments can grow the bracket
and text-pair inventories well past the defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import ConfigError
from .rng import SeededRng

PERMUTE = "permute"
MASKOUT = "maskout"

PERMUTE_RULE_NAMES = (
    "FIX",
    "REVERSE",
    "ALPHA",
    "REVERSE_ALPHA",
    "LENGTH_WORD",
    "REVERSE_LENGTH_WORD",
    "LENGTH_CHAR",
    "REVERSE_CHAR_WORD",
    "ODD_EVEN",
    "EVEN_ODD",
)

MASKOUT_RULE_NAMES = ("FIX", "WORD_LONG", "WORD_SHORT", "ODD", "EVEN")

DEFAULT_DIGIT_TEMPLATES = (
    "{i}.",
    "({i}).",
    "[{i}].",
    "<{i}>.",
    "<<{i}>>.",
    "###{i}.",
    "##{i}.",
    "##{i}##.",
    "|{i}|.",
    "||{i}||.",
)

# (prefix, suffix) applied around each parsing word
DEFAULT_BRACKET_PAIRS = (
    ("(", ")"),
    ("[", "]"),
    ("<", ">"),
    ("<<", ">>"),
    ("|", "|"),
    ("[|", "|]"),
    ("<|", "|>"),
    ("#", "#"),
    ("*", "*"),
    ("@", "@"),
)

DEFAULT_TEXT_PAIRS = (
    ("BEGIN", "END"),
    ("START", "END"),
    ("RESPONSE", "END"),
    ("RESPONSE", "END OF RESPONSE"),
    ("OPEN", "CLOSE"),
    ("OPEN RESPONSE", "CLOSE"),
    ("INITIATE", "TERMINATE"),
    ("START POINT", "END POINT"),
    ("RES_START", "RES_END"),
    ("RES", "/RES"),
)

FORMAT_TEMPLATE = (
    'Respond to each of the following instructions. Begin each response with '
    'the serial number of its instruction, written in the format "{example}".'
)
FORMAT_WRAP_SUFFIX = ' Wrap every response between "{open}" and "{close}".'

DEFAULT_PERMUTE_TEMPLATES = {
    "FIX": (
        "Respond to each of the following instructions, giving the responses "
        "in this exact order of instruction numbers: {order}."
    ),
    "REVERSE": "Respond to each of the following instructions in reverse of the original order.",
    "ALPHA": (
        "Respond to each of the following instructions in the alphabetical "
        "order of the first letter of the instructions."
    ),
    "REVERSE_ALPHA": (
        "Respond to each of the following instructions in the reverse "
        "alphabetical order of the first letter of the instructions."
    ),
    "LENGTH_WORD": (
        "Respond to each of the following instructions in order of their "
        "length in words, answering the shortest one first."
    ),
    "REVERSE_LENGTH_WORD": (
        "Respond to each of the following instructions in order of their "
        "length in words, answering the longest one first."
    ),
    "LENGTH_CHAR": (
        "Respond to each of the following instructions in order of their "
        "length in characters, answering the shortest one first."
    ),
    "REVERSE_CHAR_WORD": (
        "Respond to each of the following instructions in order of their "
        "length in characters, answering the longest one first."
    ),
    "ODD_EVEN": "First respond to the odd-numbered instructions, then respond to the even-numbered ones.",
    "EVEN_ODD": "First respond to the even-numbered instructions, then respond to the odd-numbered ones.",
}

DEFAULT_MASKOUT_TEMPLATES = {
    "FIX": (
        "Ignore the instructions numbered {indices} and respond to each of "
        "the remaining instructions."
    ),
    "WORD_LONG": (
        "Ignore the {n} longest instruction(s) according to word count and "
        "respond to each of the remaining instructions."
    ),
    "WORD_SHORT": (
        "Ignore the {n} shortest instruction(s) according to word count and "
        "respond to each of the remaining instructions."
    ),
    "ODD": "Ignore the odd-numbered instructions and respond to each of the remaining instructions.",
    "EVEN": "Ignore the even-numbered instructions and respond to each of the remaining instructions.",
}


@dataclass(frozen=True)
class FormatSpec:
    """A sampled serial-digit template plus optional response markers."""

    digit_template: str
    open_marker: str | None = None
    close_marker: str | None = None
    meta_text: str = ""

    def __post_init__(self):
        if self.digit_template.count("{i}") != 1:
            raise ConfigError(f"digit template {self.digit_template!r} must contain {{i}} exactly once")
        if (self.open_marker is None) != (self.close_marker is None):
            raise ConfigError("open_marker and close_marker must be set together")
        if self.open_marker is not None:
            if not self.open_marker or not self.close_marker:
                raise ConfigError("markers must be non-empty")
            if self.open_marker == self.close_marker:
                raise ConfigError("open and close markers must differ")

    def digit(self, i: int) -> str:
        return self.digit_template.format(i=i)

    @property
    def has_markers(self) -> bool:
        return self.open_marker is not None


@dataclass(frozen=True)
class MetaRule:
    """One sampled permute or maskout rule instance bound to a member count."""

    kind: str
    name: str
    k: int
    params: tuple[int, ...] | None = None
    meta_text: str = ""


@dataclass(frozen=True)
class RuleRegistry:
    digit_templates: tuple[str, ...] = DEFAULT_DIGIT_TEMPLATES
    bracket_pairs: tuple[tuple[str, str], ...] = DEFAULT_BRACKET_PAIRS
    text_pairs: tuple[tuple[str, str], ...] = DEFAULT_TEXT_PAIRS
    permute_templates: dict = field(default_factory=lambda: dict(DEFAULT_PERMUTE_TEMPLATES))
    maskout_templates: dict = field(default_factory=lambda: dict(DEFAULT_MASKOUT_TEMPLATES))

    def __post_init__(self):
        for name, items in (("digit_templates", self.digit_templates),
                            ("bracket_pairs", self.bracket_pairs),
                            ("text_pairs", self.text_pairs)):
            if not items:
                raise ConfigError(f"registry list {name} is empty")
        for tpl in self.digit_templates:
            if not isinstance(tpl, str) or tpl.count("{i}") != 1:
                raise ConfigError(f"digit template {tpl!r} must be a string containing {{i}} exactly once")
        for pair_name, pairs in (("bracket_pairs", self.bracket_pairs), ("text_pairs", self.text_pairs)):
            for pair in pairs:
                if len(pair) != 2 or not all(isinstance(p, str) for p in pair):
                    raise ConfigError(f"{pair_name} entries must be [open, close] string pairs, got {pair!r}")
        for word_pair in self.text_pairs:
            if word_pair[0] == word_pair[1]:
                raise ConfigError(f"text pair {word_pair!r} must have distinct open/close words")
        if set(self.permute_templates) != set(PERMUTE_RULE_NAMES):
            raise ConfigError(f"permute_templates must cover exactly {sorted(PERMUTE_RULE_NAMES)}")
        if set(self.maskout_templates) != set(MASKOUT_RULE_NAMES):
            raise ConfigError(f"maskout_templates must cover exactly {sorted(MASKOUT_RULE_NAMES)}")


_OVERRIDE_KEYS = ("digit_templates", "bracket_pairs", "text_pairs",
                  "permute_templates", "maskout_templates")


def default_registry() -> RuleRegistry:
    return RuleRegistry()


def load_registry(path: str | Path) -> RuleRegistry:
    """Registry with lists replaced by the override file's values."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read registry override {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"registry override {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"registry override {path} must be a JSON object")
    unknown = set(raw) - set(_OVERRIDE_KEYS)
    if unknown:
        raise ConfigError(f"registry override {path}: unknown keys {sorted(unknown)}")

    kwargs: dict = {}
    for key in ("digit_templates",):
        if key in raw:
            if not isinstance(raw[key], list):
                raise ConfigError(f"registry override {path}: {key} must be a list of strings")
            kwargs[key] = tuple(raw[key])
    for key in ("bracket_pairs", "text_pairs"):
        if key in raw:
            if not isinstance(raw[key], list):
                raise ConfigError(f"registry override {path}: {key} must be a list of pairs")
            kwargs[key] = tuple(tuple(p) for p in raw[key])
    for key in ("permute_templates", "maskout_templates"):
        if key in raw:
            if not isinstance(raw[key], dict):
                raise ConfigError(f"registry override {path}: {key} must be an object")
            base = dict(DEFAULT_PERMUTE_TEMPLATES if key == "permute_templates" else DEFAULT_MASKOUT_TEMPLATES)
            names = PERMUTE_RULE_NAMES if key == "permute_templates" else MASKOUT_RULE_NAMES
            for name, tpl in raw[key].items():
                if name not in names:
                    raise ConfigError(f"registry override {path}: unknown rule name {name!r} in {key}")
                if not isinstance(tpl, str):
                    raise ConfigError(f"registry override {path}: template for {name!r} must be a string")
                base[name] = tpl
            kwargs[key] = base
    return RuleRegistry(**kwargs)


def assemble_markers(bracket: tuple[str, str], words: tuple[str, str]) -> tuple[str, str]:
    """Bracket wraps each parsing word: ("[","]") + ("START","END") -> "[START]", "[END]"."""
    prefix, suffix = bracket
    return prefix + words[0] + suffix, prefix + words[1] + suffix


def sample_format(registry: RuleRegistry, rng: SeededRng, wrap_probability: float = 1.0) -> FormatSpec:
    """Draw a digit template and, with the given probability, a marker pair."""
    digit_template = rng.choice(registry.digit_templates)
    open_marker = close_marker = None
    if rng.random() < wrap_probability:
        bracket = rng.choice(registry.bracket_pairs)
        words = rng.choice(registry.text_pairs)
        open_marker, close_marker = assemble_markers(bracket, words)
    meta = FORMAT_TEMPLATE.format(example=digit_template.format(i=1))
    if open_marker is not None:
        meta += FORMAT_WRAP_SUFFIX.format(open=open_marker, close=close_marker)
    return FormatSpec(digit_template=digit_template, open_marker=open_marker,
                      close_marker=close_marker, meta_text=meta)


def sample_meta_rule(registry: RuleRegistry, rng: SeededRng, kind: str, k: int,
                     items: Sequence[str]) -> MetaRule:
    """Draw a rule name for `kind` and materialize its parameters for k members."""
    if kind not in (PERMUTE, MASKOUT):
        raise ConfigError(f"unknown rule kind {kind!r}")
    if k < 2:
        raise ConfigError(f"{kind} rules need at least 2 members, got k={k}")
    if len(items) != k:
        raise ConfigError(f"got {len(items)} items for k={k}")

    if kind == PERMUTE:
        name = rng.choice(PERMUTE_RULE_NAMES)
        template = registry.permute_templates[name]
        if name == "FIX":
            order = list(range(1, k + 1))
            rng.shuffle(order)
            meta = template.format(order=", ".join(str(i) for i in order))
            return MetaRule(kind, name, k, tuple(order), meta)
        return MetaRule(kind, name, k, None, template)

    name = rng.choice(MASKOUT_RULE_NAMES)
    template = registry.maskout_templates[name]
    if name == "FIX":
        size = rng.randint(1, k - 1)
        removal = sorted(i + 1 for i in rng.sample_indices(k, size))
        meta = template.format(indices=", ".join(str(i) for i in removal))
        return MetaRule(kind, name, k, tuple(removal), meta)
    if name in ("WORD_LONG", "WORD_SHORT"):
        n = rng.randint(1, max(1, k // 2))
        return MetaRule(kind, name, k, (n,), template.format(n=n))
    return MetaRule(kind, name, k, None, template)


def word_count(text: str) -> int:
    return len(text.split())


def char_count(text: str) -> int:
    return len(text)


def _alpha_key(text: str) -> tuple[int, str]:
    # non-letter first characters sort before any letter
    c = text[0] if text else ""
    if c.isalpha():
        return (1, c.casefold())
    return (0, c)


def _sorted_indices(items: Sequence[str], key, reverse: bool) -> list[int]:
    # stable sort: ties stay in original index order either direction
    return sorted(range(1, len(items) + 1), key=lambda i: key(items[i - 1]), reverse=reverse)


def apply_meta_rule(rule: MetaRule, items: Sequence[str]) -> list[int]:
    """Target response order (permute) or surviving indices (maskout), 1-based."""
    k = len(items)
    if k != rule.k:
        raise ConfigError(f"rule was sampled for k={rule.k} but got {k} items")

    if rule.kind == PERMUTE:
        name = rule.name
        if name == "FIX":
            return list(rule.params)
        if name == "REVERSE":
            return list(range(k, 0, -1))
        if name == "ALPHA":
            return _sorted_indices(items, _alpha_key, reverse=False)
        if name == "REVERSE_ALPHA":
            return _sorted_indices(items, _alpha_key, reverse=True)
        if name == "LENGTH_WORD":
            return _sorted_indices(items, word_count, reverse=False)
        if name == "REVERSE_LENGTH_WORD":
            return _sorted_indices(items, word_count, reverse=True)
        if name == "LENGTH_CHAR":
            return _sorted_indices(items, char_count, reverse=False)
        if name == "REVERSE_CHAR_WORD":
            return _sorted_indices(items, char_count, reverse=True)
        if name == "ODD_EVEN":
            return [i for i in range(1, k + 1) if i % 2 == 1] + [i for i in range(1, k + 1) if i % 2 == 0]
        if name == "EVEN_ODD":
            return [i for i in range(1, k + 1) if i % 2 == 0] + [i for i in range(1, k + 1) if i % 2 == 1]
        raise ConfigError(f"unknown permute rule {name!r}")

    if rule.kind == MASKOUT:
        name = rule.name
        if name == "FIX":
            removal = set(rule.params)
        elif name in ("WORD_LONG", "WORD_SHORT"):
            n = rule.params[0]
            ranking = _sorted_indices(items, word_count, reverse=(name == "WORD_LONG"))
            removal = set(ranking[:n])
        elif name == "ODD":
            removal = {i for i in range(1, k + 1) if i % 2 == 1}
        elif name == "EVEN":
            removal = {i for i in range(1, k + 1) if i % 2 == 0}
        else:
            raise ConfigError(f"unknown maskout rule {name!r}")
        survivors = [i for i in range(1, k + 1) if i not in removal]
        if not survivors or len(survivors) == k:
            raise ConfigError(f"maskout rule {name} left an invalid survivor set for k={k}")
        return survivors

    raise ConfigError(f"unknown rule kind {rule.kind!r}")
