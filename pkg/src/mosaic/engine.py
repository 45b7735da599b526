"""Rendering passes: group members, pick a strategy, assemble the sample.

One pass shuffles the dataset, partitions it greedily by drawn k, and
renders every group.  A run is n independent passes with seeds derived from
(master seed, epoch), so identical configs reproduce identical bytes and
parallel rendering could never reorder output.
"""

from __future__ import annotations

import importlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .corpus import Dataset, InstructionRecord
from .errors import ConfigError, DataError
from .ksampler import KDistribution, draw_k, summarize_ks
from .rng import SeededRng, derive_seed
from .ruleset import (
    MASKOUT,
    PERMUTE,
    FormatSpec,
    MetaRule,
    RuleRegistry,
    apply_meta_rule,
    sample_format,
    sample_meta_rule,
)

STRATEGY_PRIMARY = "primary"
STRATEGY_FORMAT = "format"
STRATEGY_PERMUTE = "format_permute"
STRATEGY_MASKOUT = "format_maskout"
STRATEGIES = (STRATEGY_PRIMARY, STRATEGY_FORMAT, STRATEGY_PERMUTE, STRATEGY_MASKOUT)

GROUPINGS = ("random", "by_cluster")

# plain serial digits used by the primary strategy
PRIMARY_DIGIT_TEMPLATE = "{i}."


@dataclass(frozen=True)
class StrategyWeights:
    """Draw weights over the three meta-instruction strategies."""

    format: float = 1.0 / 3.0
    permute: float = 1.0 / 3.0
    maskout: float = 1.0 / 3.0

    def __post_init__(self):
        total = self.format + self.permute + self.maskout
        if min(self.format, self.permute, self.maskout) < 0 or abs(total - 1.0) > 1e-6:
            raise ConfigError(
                f"strategy_weights must be non-negative and sum to 1, got "
                f"{self.format}, {self.permute}, {self.maskout} (sum {total})"
            )


@dataclass(frozen=True)
class EngineConfig:
    seed: int = 0
    epochs: int = 1
    budget: int = 1400
    length_counter: str = "whitespace_words"
    strategy_weights: StrategyWeights = field(default_factory=StrategyWeights)
    primary_mode: bool = False
    wrap_probability: float = 1.0
    grouping: str = "random"

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.budget <= 0:
            raise ConfigError(f"budget must be > 0, got {self.budget}")
        if not 0.0 <= self.wrap_probability <= 1.0:
            raise ConfigError(f"wrap_probability must be in [0, 1], got {self.wrap_probability}")
        if self.grouping not in GROUPINGS:
            raise ConfigError(f"grouping must be one of {GROUPINGS}, got {self.grouping!r}")
        resolve_length_counter(self.length_counter)


def resolve_length_counter(name: str) -> Callable[[str], int]:
    """Built-in counters, or a "module:attr" plugin for tokenizer parity."""
    if name == "whitespace_words":
        return lambda text: len(text.split())
    if name == "unicode_chars":
        return len
    if ":" in name:
        module_name, _, attr = name.partition(":")
        try:
            counter = getattr(importlib.import_module(module_name), attr)
        except (ImportError, AttributeError) as exc:
            raise ConfigError(f"cannot load length counter plugin {name!r}: {exc}") from exc
        if not callable(counter):
            raise ConfigError(f"length counter plugin {name!r} is not callable")
        return counter
    raise ConfigError(f"unknown length_counter {name!r}")


@dataclass
class MosaicSample:
    """One synthesized sample plus its provenance."""

    member_ids: tuple[int, ...]
    k: int
    strategy: str
    format: FormatSpec | None
    rule: MetaRule | None
    response_order: tuple[int, ...]
    overall_instruction: str
    overall_response: str
    epoch: int
    length_units: int
    oversize: bool = False
    seed: int = 0
    sample_id: str | None = None


def plan_pass(dataset: Dataset, config: EngineConfig, kdist: KDistribution,
              rng: SeededRng) -> list[list[InstructionRecord]]:
    """Shuffle and greedily partition the records of one pass.

    The final group of each (cluster) stream takes whatever remains, so every
    record id appears exactly once per pass.
    """
    if config.grouping == "by_cluster":
        clusters: dict[int, list[InstructionRecord]] = {}
        for rec in dataset.records:
            if rec.cluster is None:
                raise DataError(
                    f"grouping=by_cluster but record {rec.id} has no cluster label"
                )
            clusters.setdefault(rec.cluster, []).append(rec)
        streams = [clusters[c] for c in sorted(clusters)]
    else:
        streams = [list(dataset.records)]

    groups: list[list[InstructionRecord]] = []
    for stream in streams:
        rng.shuffle(stream)
        pos = 0
        while pos < len(stream):
            k = draw_k(kdist, rng)
            groups.append(stream[pos:pos + k])
            pos += k
    return groups


def _pick_strategy(config: EngineConfig, rng: SeededRng) -> str:
    w = config.strategy_weights
    u = rng.random()
    if u < w.format:
        return STRATEGY_FORMAT
    if u < w.format + w.permute:
        return STRATEGY_PERMUTE
    return STRATEGY_MASKOUT


def _assemble(members: Sequence[InstructionRecord],
              fmt: FormatSpec | None, rule: MetaRule | None,
              counter: Callable[[str], int]) -> tuple[str, str, list[int], int]:
    k = len(members)
    digit_template = fmt.digit_template if fmt is not None else PRIMARY_DIGIT_TEMPLATE
    digits = [digit_template.format(i=i) for i in range(1, k + 1)]
    instructions = [rec.instruction for rec in members]

    item_lines = [f"{digits[i - 1]} {instructions[i - 1]}" for i in range(1, k + 1)]
    meta_lines = []
    if fmt is not None:
        meta_lines.append(fmt.meta_text)
    if rule is not None:
        meta_lines.append(rule.meta_text)
    if meta_lines:
        overall_instruction = "\n".join(meta_lines) + "\n\n" + "\n".join(item_lines)
    else:
        overall_instruction = "\n".join(item_lines)

    order = apply_meta_rule(rule, instructions) if rule is not None else list(range(1, k + 1))

    blocks = []
    for i in order:
        body = members[i - 1].response
        if fmt is not None and fmt.has_markers:
            body = fmt.open_marker + body + fmt.close_marker
        blocks.append(f"{digits[i - 1]} {body}")
    overall_response = "\n\n".join(blocks)

    units = counter(overall_instruction) + counter(overall_response)
    return overall_instruction, overall_response, order, units


def render_sample(group: Sequence[InstructionRecord], config: EngineConfig,
                  registry: RuleRegistry, rng: SeededRng, epoch: int = 0) -> MosaicSample:
    """Render one group, shrinking it from the tail until it fits the budget."""
    if not group:
        raise DataError("cannot render an empty group")
    counter = resolve_length_counter(config.length_counter)

    if config.primary_mode:
        strategy = STRATEGY_PRIMARY
    elif len(group) == 1:
        strategy = STRATEGY_FORMAT
    else:
        strategy = _pick_strategy(config, rng)

    members = list(group)
    while True:
        k = len(members)
        effective = strategy
        if k == 1 and effective in (STRATEGY_PERMUTE, STRATEGY_MASKOUT):
            effective = STRATEGY_FORMAT

        fmt = rule = None
        if effective != STRATEGY_PRIMARY:
            fmt = sample_format(registry, rng, config.wrap_probability)
        if effective == STRATEGY_PERMUTE:
            rule = sample_meta_rule(registry, rng, PERMUTE, k, [m.instruction for m in members])
        elif effective == STRATEGY_MASKOUT:
            rule = sample_meta_rule(registry, rng, MASKOUT, k, [m.instruction for m in members])

        instruction, response, order, units = _assemble(members, fmt, rule, counter)
        if units <= config.budget or k == 1:
            return MosaicSample(
                member_ids=tuple(m.id for m in members),
                k=k,
                strategy=effective,
                format=fmt,
                rule=rule,
                response_order=tuple(order),
                overall_instruction=instruction,
                overall_response=response,
                epoch=epoch,
                length_units=units,
                oversize=units > config.budget,
                seed=config.seed,
            )
        members.pop()


@dataclass
class RunReport:
    input_records: int
    epochs: int
    samples: int
    total_member_slots: int
    count_reduction_ratio: float
    k_histogram: dict[int, int]
    mix_le_5: float
    strategy_counts: dict[str, int]
    oversize_count: int
    seed: int
    dropped_records: int = 0

    def as_dict(self) -> dict:
        return {
            "input_records": self.input_records,
            "dropped_records": self.dropped_records,
            "epochs": self.epochs,
            "samples": self.samples,
            "total_member_slots": self.total_member_slots,
            "count_reduction_ratio": self.count_reduction_ratio,
            "k_histogram": {str(k): v for k, v in self.k_histogram.items()},
            "mix_le_5": self.mix_le_5,
            "strategy_counts": self.strategy_counts,
            "oversize_count": self.oversize_count,
            "seed": self.seed,
        }


def build_report(dataset: Dataset, config: EngineConfig, samples: list[MosaicSample]) -> RunReport:
    summary = summarize_ks(s.k for s in samples)
    strategy_counts = {name: 0 for name in STRATEGIES}
    for s in samples:
        strategy_counts[s.strategy] += 1
    slots = sum(s.k for s in samples)
    return RunReport(
        input_records=len(dataset.records),
        dropped_records=dataset.dropped_count,
        epochs=config.epochs,
        samples=len(samples),
        total_member_slots=slots,
        count_reduction_ratio=len(samples) / slots,
        k_histogram=summary.histogram,
        mix_le_5=summary.fraction_k_le_5,
        strategy_counts=strategy_counts,
        oversize_count=sum(1 for s in samples if s.oversize),
        seed=config.seed,
    )


def run(dataset: Dataset, config: EngineConfig, kdist: KDistribution,
        registry: RuleRegistry | None = None) -> tuple[list[MosaicSample], RunReport]:
    """n independent passes over the dataset; samples carry their epoch."""
    if registry is None:
        registry = RuleRegistry()
    samples: list[MosaicSample] = []
    for epoch in range(config.epochs):
        pass_rng = SeededRng(derive_seed(config.seed, "pass", epoch))
        groups = plan_pass(dataset, config, kdist, pass_rng)
        for group_index, group in enumerate(groups):
            group_rng = SeededRng(derive_seed(config.seed, "render", epoch, group_index))
            samples.append(render_sample(group, config, registry, group_rng, epoch=epoch))
    return samples, build_report(dataset, config, samples)
