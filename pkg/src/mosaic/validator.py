"""Scoring responses against the meta-instructions of generated samples.

A response is parsed into labeled items: a serial-digit label counts only at
the start of a line (after optional whitespace) and must be followed by
whitespace or the end of the line.  When the format carries markers, the
open marker must follow the label on the same line and the body runs to the
close marker; label-shaped lines inside a still-open marker region are body
text, not new items.  Success requires the format, the expected order, the
mask, and no missing label, all at once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import Dataset
from .engine import (
    PRIMARY_DIGIT_TEMPLATE,
    STRATEGY_FORMAT,
    STRATEGY_MASKOUT,
    STRATEGY_PERMUTE,
    EngineConfig,
    MosaicSample,
    StrategyWeights,
    render_sample,
)
from .errors import DataError
from .rng import SeededRng, derive_seed
from .ruleset import RuleRegistry

logger = logging.getLogger(__name__)

EVAL_STRATEGIES = (STRATEGY_FORMAT, STRATEGY_PERMUTE, STRATEGY_MASKOUT)

# effectively unlimited: eval splits must keep their exact k
EVAL_BUDGET = 10**9


@dataclass(frozen=True)
class AnswerKey:
    """Everything needed to score one sample without the source records."""

    sample_id: str
    strategy: str
    rule: str | None
    labels_expected: tuple[str, ...]
    labels_masked: tuple[str, ...]
    digit_template: str
    open_marker: str | None
    close_marker: str | None

    @property
    def k(self) -> int:
        return len(self.labels_expected) + len(self.labels_masked)

    def to_row(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "strategy": self.strategy,
            "rule": self.rule,
            "labels_expected": list(self.labels_expected),
            "labels_masked": list(self.labels_masked),
            "digit_template": self.digit_template,
            "open_marker": self.open_marker,
            "close_marker": self.close_marker,
        }

    @classmethod
    def from_row(cls, row: Mapping) -> "AnswerKey":
        try:
            return cls(
                sample_id=row["sample_id"],
                strategy=row["strategy"],
                rule=row.get("rule"),
                labels_expected=tuple(row["labels_expected"]),
                labels_masked=tuple(row.get("labels_masked") or ()),
                digit_template=row["digit_template"],
                open_marker=row.get("open_marker"),
                close_marker=row.get("close_marker"),
            )
        except KeyError as exc:
            raise DataError(f"answer key row missing field {exc}") from exc


def make_answer_key(sample: MosaicSample) -> AnswerKey:
    if sample.sample_id is None:
        raise DataError("sample has no sample_id; assign one before keying")
    template = sample.format.digit_template if sample.format else PRIMARY_DIGIT_TEMPLATE
    expected = tuple(template.format(i=i) for i in sample.response_order)
    masked = tuple(template.format(i=i) for i in range(1, sample.k + 1)
                   if i not in sample.response_order)
    return AnswerKey(
        sample_id=sample.sample_id,
        strategy=sample.strategy,
        rule=sample.rule.name if sample.rule else None,
        labels_expected=expected,
        labels_masked=masked,
        digit_template=template,
        open_marker=sample.format.open_marker if sample.format else None,
        close_marker=sample.format.close_marker if sample.format else None,
    )


def make_prompt_row(sample: MosaicSample) -> dict:
    if sample.sample_id is None:
        raise DataError("sample has no sample_id")
    return {"sample_id": sample.sample_id, "instruction": sample.overall_instruction}


@dataclass
class SampleVerdict:
    sample_id: str
    parsed_count: int
    format_ok: bool
    order_ok: bool
    maskout_ok: bool
    missing_labels: list[str]
    extra_labels: list[str]
    success: bool

    def as_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "parsed_count": self.parsed_count,
            "format_ok": self.format_ok,
            "order_ok": self.order_ok,
            "maskout_ok": self.maskout_ok,
            "missing_labels": self.missing_labels,
            "extra_labels": self.extra_labels,
            "success": self.success,
        }


@dataclass
class ValidationReport:
    per_sample: list[SampleVerdict]
    aggregate: dict

    def as_dict(self) -> dict:
        return {
            "per_sample": [v.as_dict() for v in self.per_sample],
            "aggregate": self.aggregate,
        }


@dataclass
class _Item:
    label: str
    body_parts: list[str] = field(default_factory=list)
    has_open: bool = False
    has_close: bool = False
    closed: bool = False  # close marker seen; later lines are trailing junk

    def body(self) -> str:
        return "\n".join(self.body_parts)


def _match_label(line: str, labels: Sequence[str]) -> tuple[str, str] | None:
    """Label at line start (post-whitespace), followed by whitespace or EOL."""
    stripped = line.lstrip()
    for label in labels:
        if stripped.startswith(label):
            rest = stripped[len(label):]
            if rest == "" or rest[0] in " \t":
                return label, rest.lstrip(" \t")
    return None


def _parse_items(text: str, labels: Sequence[str],
                 open_marker: str | None, close_marker: str | None) -> list[_Item]:
    by_length = sorted(labels, key=len, reverse=True)
    items: list[_Item] = []
    current: _Item | None = None
    in_marked_body = False

    for line in text.split("\n"):
        if not in_marked_body:
            match = _match_label(line, by_length)
            if match is not None:
                label, rest = match
                current = _Item(label)
                items.append(current)
                if open_marker is None:
                    current.body_parts.append(rest)
                elif rest.startswith(open_marker):
                    current.has_open = True
                    rest = rest[len(open_marker):]
                    if close_marker in rest:
                        body, _, _ = rest.partition(close_marker)
                        current.body_parts.append(body)
                        current.has_close = True
                        current.closed = True
                    else:
                        current.body_parts.append(rest)
                        in_marked_body = True
                else:
                    current.body_parts.append(rest)  # marker missing: format violation
                continue

        if current is None:
            continue  # preamble before the first label
        if in_marked_body:
            if close_marker is not None and close_marker in line:
                body, _, _ = line.partition(close_marker)
                current.body_parts.append(body)
                current.has_close = True
                current.closed = True
                in_marked_body = False
            else:
                current.body_parts.append(line)
        elif not current.closed:
            current.body_parts.append(line)
    return items


def score_response(key: AnswerKey, response_text: str) -> SampleVerdict:
    """Verdict for one response against its answer key."""
    labels = [key.digit_template.format(i=i) for i in range(1, key.k + 1)]
    items = _parse_items(response_text, labels, key.open_marker, key.close_marker)

    detected = [item.label for item in items]
    detected_set = set(detected)
    expected = list(key.labels_expected)
    expected_set = set(expected)
    masked_set = set(key.labels_masked)

    def item_ok(item: _Item) -> bool:
        if key.open_marker is not None and not (item.has_open and item.has_close):
            return False
        return bool(item.body().strip())

    format_ok = all(item_ok(item) for item in items)
    order_ok = detected == expected
    maskout_ok = not any(label in masked_set for label in detected)
    missing = [label for label in expected if label not in detected_set]

    extra: list[str] = []
    seen: set[str] = set()
    for label in detected:
        if label not in expected_set or label in seen:
            extra.append(label)
        else:
            seen.add(label)

    return SampleVerdict(
        sample_id=key.sample_id,
        parsed_count=len(items),
        format_ok=format_ok,
        order_ok=order_ok,
        maskout_ok=maskout_ok,
        missing_labels=missing,
        extra_labels=extra,
        success=format_ok and order_ok and maskout_ok and not missing,
    )


def build_eval_set(test_dataset: Dataset, registry: RuleRegistry, ks: Sequence[int],
                   seed: int = 0, strategies: Sequence[str] = EVAL_STRATEGIES,
                   wrap_probability: float = 1.0,
                   length_counter: str = "whitespace_words") -> list[MosaicSample]:
    """Fixed-k prompts for each strategy; remainder records are dropped.

    Each (strategy, k) split partitions a fresh shuffle of the test set into
    floor(n/k) full groups, so every split has exactly that many prompts.
    """
    weight_by_strategy = {
        STRATEGY_FORMAT: StrategyWeights(1.0, 0.0, 0.0),
        STRATEGY_PERMUTE: StrategyWeights(0.0, 1.0, 0.0),
        STRATEGY_MASKOUT: StrategyWeights(0.0, 0.0, 1.0),
    }
    samples: list[MosaicSample] = []
    for strategy in strategies:
        if strategy not in weight_by_strategy:
            raise DataError(f"unknown eval strategy {strategy!r}")
        for k in ks:
            if k < 1:
                raise DataError(f"eval k must be >= 1, got {k}")
            if len(test_dataset.records) < k:
                raise DataError(f"dataset of {len(test_dataset.records)} records is smaller than k={k}")
            config = EngineConfig(
                seed=seed,
                budget=EVAL_BUDGET,
                length_counter=length_counter,
                strategy_weights=weight_by_strategy[strategy],
                wrap_probability=wrap_probability,
            )
            records = list(test_dataset.records)
            split_rng = SeededRng(derive_seed(seed, "eval", strategy, k))
            split_rng.shuffle(records)
            for g in range(len(records) // k):
                group = records[g * k:(g + 1) * k]
                group_rng = SeededRng(derive_seed(seed, "eval", strategy, k, g))
                sample = render_sample(group, config, registry, group_rng, epoch=0)
                sample.sample_id = f"{strategy}-k{k}-{g:04d}"
                samples.append(sample)
    return samples


def _rate(verdicts: list[SampleVerdict]) -> float:
    return sum(1 for v in verdicts if v.success) / len(verdicts)


def score_rows(keys: Iterable[AnswerKey], responses: Iterable[Mapping]) -> ValidationReport:
    """Score response rows ({sample_id, response}) against their keys.

    Duplicate sample_ids keep the last response (warned); keys with no
    response row are scored as empty text.
    """
    key_by_id = {key.sample_id: key for key in keys}
    if not key_by_id:
        raise DataError("no answer keys given")

    response_by_id: dict[str, str] = {}
    for row in responses:
        sample_id = row.get("sample_id")
        if sample_id not in key_by_id:
            raise DataError(f"response references unknown sample_id {sample_id!r}")
        if sample_id in response_by_id:
            logger.warning("duplicate response for sample_id %s: keeping the last one", sample_id)
        text = row.get("response")
        response_by_id[sample_id] = text if isinstance(text, str) else ""

    per_sample = []
    by_strategy: dict[str, list[SampleVerdict]] = {}
    by_k: dict[int, list[SampleVerdict]] = {}
    by_strategy_k: dict[str, dict[int, list[SampleVerdict]]] = {}
    for sample_id, key in key_by_id.items():
        verdict = score_response(key, response_by_id.get(sample_id, ""))
        per_sample.append(verdict)
        by_strategy.setdefault(key.strategy, []).append(verdict)
        by_k.setdefault(key.k, []).append(verdict)
        by_strategy_k.setdefault(key.strategy, {}).setdefault(key.k, []).append(verdict)

    aggregate = {
        "overall": _rate(per_sample),
        "by_strategy": {s: _rate(v) for s, v in sorted(by_strategy.items())},
        "by_k": {str(k): _rate(v) for k, v in sorted(by_k.items())},
        "by_strategy_k": {
            s: {str(k): _rate(v) for k, v in sorted(inner.items())}
            for s, inner in sorted(by_strategy_k.items())
        },
    }
    return ValidationReport(per_sample=per_sample, aggregate=aggregate)


def score_file(keys_path, responses_path) -> ValidationReport:
    """File-level wrapper over score_rows (both JSONL)."""
    from .corpus import read_jsonl

    keys = [AnswerKey.from_row(row) for row in read_jsonl(keys_path)]
    return score_rows(keys, read_jsonl(responses_path))
