"""Command-line front end: build, stats, eval make/score, rules.

Exit codes: 0 success, 1 usage/config error, 2 data error.  Flag values
override config-file values, which override built-in defaults; MOSAIC_SEED
is the seed fallback when neither a flag nor the config provides one.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config_file, parse_config
from .corpus import load_dataset, read_jsonl, sample_rows, write_jsonl
from .engine import run
from .errors import ConfigError, DataError, MosaicError
from .ksampler import summarize_ks
from .ruleset import (
    MASKOUT_RULE_NAMES,
    PERMUTE_RULE_NAMES,
    RuleRegistry,
    default_registry,
    load_registry,
)
from .validator import AnswerKey, build_eval_set, make_answer_key, make_prompt_row, score_rows

ENV_SEED = "MOSAIC_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are exit code 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _parse_weights(text: str) -> dict:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError("strategy_weights flag expects three comma-separated numbers: format,permute,maskout")
    try:
        fmt, permute, maskout = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"strategy_weights flag is not numeric: {text!r}") from exc
    return {"format": fmt, "permute": permute, "maskout": maskout}


def _merged_config(args) -> tuple[dict, RunConfig]:
    """Raw config dict after precedence merging, plus its parsed form."""
    raw = load_config_file(args.config) if args.config else {}

    if args.seed is not None:
        raw["seed"] = args.seed
    elif "seed" not in raw and os.environ.get(ENV_SEED):
        try:
            raw["seed"] = int(os.environ[ENV_SEED])
        except ValueError as exc:
            raise ConfigError(f"{ENV_SEED} must be an integer, got {os.environ[ENV_SEED]!r}") from exc

    for flag, key in (("epochs", "epochs"), ("budget", "budget"),
                      ("wrap_prob", "wrap_probability"), ("grouping", "grouping"),
                      ("input_format", "input_format"), ("registry", "registry")):
        value = getattr(args, flag, None)
        if value is not None:
            raw[key] = value
    if getattr(args, "primary_mode", False):
        raw["primary_mode"] = True
    if getattr(args, "strategy_weights", None) is not None:
        raw["strategy_weights"] = _parse_weights(args.strategy_weights)

    kd = dict(raw.get("k_distribution", {}))
    if getattr(args, "distribution", None) is not None:
        kd["family"] = args.distribution
    if getattr(args, "k_max", None) is not None:
        kd["k_max"] = args.k_max
    if kd:
        raw["k_distribution"] = kd

    return raw, parse_config(raw)


def _load_registry_arg(config: RunConfig) -> RuleRegistry:
    if config.registry_path:
        return load_registry(config.registry_path)
    return default_registry()


def _out_base(out: Path) -> Path:
    return out.with_suffix("") if out.suffix in (".jsonl", ".json") else out


def cmd_build(args) -> int:
    raw, config = _merged_config(args)
    if args.jobs is not None and args.jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
    registry = _load_registry_arg(config)
    dataset = load_dataset(args.input, format_tag=config.input_format)

    started = time.perf_counter()
    samples, report = run(dataset, config.engine, config.k_dist, registry)
    elapsed = time.perf_counter() - started

    out = Path(args.out)
    rows = sample_rows(samples, include_metadata=not args.no_metadata)
    if args.format == "json":
        out.write_text(json.dumps(rows, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    else:
        write_jsonl(rows, out)

    base = _out_base(out)
    report_path = base.with_name(base.name + ".report.json")
    report_path.write_text(json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8")

    manifest = {
        "version": __version__,
        "config": raw,
        "seed": config.engine.seed,
        "input_path": str(args.input),
        "input_sha256": _sha256_file(Path(args.input)),
        "output_path": str(out),
        "output_sha256": _sha256_file(out),
        "counts": {
            "input_records": report.input_records,
            "dropped_records": report.dropped_records,
            "samples": report.samples,
            "total_member_slots": report.total_member_slots,
        },
        "timing_seconds": round(elapsed, 6),
    }
    manifest_path = base.with_name(base.name + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    print(f"wrote {report.samples} samples to {out} "
          f"({report.input_records} records x {report.epochs} epoch(s), "
          f"ratio {report.count_reduction_ratio:.4f}, {elapsed:.2f}s)")
    print(f"report: {report_path}")
    print(f"manifest: {manifest_path}")
    return 0


def cmd_stats(args) -> int:
    rows = read_jsonl(args.input)
    if not rows:
        raise DataError(f"{args.input}: no samples")
    for required in ("k", "strategy", "epoch"):
        if required not in rows[0]:
            raise DataError(f"{args.input}: metadata field {required!r} missing; "
                            "rebuild without --no-metadata")
    summary = summarize_ks(row["k"] for row in rows)
    strategy_counts: dict[str, int] = {}
    for row in rows:
        strategy_counts[row["strategy"]] = strategy_counts.get(row["strategy"], 0) + 1
    epochs = max(row["epoch"] for row in rows) + 1
    total_slots = sum(row["k"] for row in rows)
    stats = {
        "samples": summary.total,
        "epochs": epochs,
        "k_histogram": {str(k): v for k, v in summary.histogram.items()},
        "mix_le_5": summary.fraction_k_le_5,
        "strategy_counts": dict(sorted(strategy_counts.items())),
        "count_reduction_ratio": summary.total / total_slots,
    }
    if args.json:
        print(json.dumps(stats, indent=2))
        return 0
    print(f"samples: {stats['samples']}  epochs: {epochs}")
    print("k histogram:")
    for k, count in summary.histogram.items():
        print(f"  k={k:<3d} {count:>8d}  {count / summary.total:6.2%}")
    print(f"Mix<=5: {summary.fraction_k_le_5:.4f}")
    print("strategy mix:")
    for name, count in sorted(strategy_counts.items()):
        print(f"  {name:<16s} {count:>8d}  {count / summary.total:6.2%}")
    print(f"count reduction ratio (samples / member slots): {stats['count_reduction_ratio']:.4f}")
    return 0


def _parse_k_list(text: str) -> list[int]:
    try:
        ks = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"--k expects comma-separated integers, got {text!r}") from exc
    if not ks:
        raise ConfigError("--k list is empty")
    return ks


def cmd_eval_make(args) -> int:
    raw, config = _merged_config(args)
    registry = _load_registry_arg(config)
    dataset = load_dataset(args.input, format_tag=config.input_format)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for k in _parse_k_list(args.k):
        samples = build_eval_set(
            dataset, registry, [k], seed=config.engine.seed,
            wrap_probability=config.engine.wrap_probability,
            length_counter=config.engine.length_counter,
        )
        write_jsonl([make_prompt_row(s) for s in samples], out_dir / f"prompts_k{k}.jsonl")
        write_jsonl([make_answer_key(s).to_row() for s in samples], out_dir / f"keys_k{k}.jsonl")
        write_jsonl([{"sample_id": s.sample_id, "response": s.overall_response} for s in samples],
                    out_dir / f"gold_k{k}.jsonl")
        print(f"k={k}: {len(samples)} prompts "
              f"({len(samples) // max(1, len(set(s.strategy for s in samples)))} per strategy) "
              f"-> {out_dir}/prompts_k{k}.jsonl")
    return 0


def cmd_eval_score(args) -> int:
    keys = [AnswerKey.from_row(row) for row in read_jsonl(args.keys)]
    responses = read_jsonl(args.responses)
    report = score_rows(keys, responses)
    if args.out:
        Path(args.out).write_text(json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8")
        print(f"report: {args.out}")
    aggregate = report.aggregate
    print(f"overall success rate: {aggregate['overall']:.2%}")
    for strategy, by_k in aggregate["by_strategy_k"].items():
        cells = "  ".join(f"k={k}: {rate:.2%}" for k, rate in by_k.items())
        print(f"  {strategy:<16s} {cells}")
    return 0


def cmd_rules(args) -> int:
    registry = load_registry(args.registry) if args.registry else default_registry()
    print(f"digit templates ({len(registry.digit_templates)}):")
    for tpl in registry.digit_templates:
        print(f"  {tpl!r}  e.g. {tpl.format(i=1)}")
    print(f"bracket pairs ({len(registry.bracket_pairs)}):")
    for pair in registry.bracket_pairs:
        print(f"  {pair[0]!r} ... {pair[1]!r}")
    print(f"text pairs ({len(registry.text_pairs)}):")
    for pair in registry.text_pairs:
        print(f"  {pair[0]!r} / {pair[1]!r}")
    print(f"permute rules ({len(PERMUTE_RULE_NAMES)}):")
    for name in PERMUTE_RULE_NAMES:
        print(f"  {name:<20s} {registry.permute_templates[name]}")
    print(f"maskout rules ({len(MASKOUT_RULE_NAMES)}):")
    for name in MASKOUT_RULE_NAMES:
        print(f"  {name:<20s} {registry.maskout_templates[name]}")
    return 0


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help=f"master seed (fallback: ${ENV_SEED})")
    parser.add_argument("--input-format", dest="input_format",
                        choices=("alpaca-triplet", "pair"), help="input record format")
    parser.add_argument("--registry", help="registry override JSON file")
    parser.add_argument("--wrap-prob", dest="wrap_prob", type=float,
                        help="probability of response markers per format sample")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mosaic", description="Multi-instruction training sample synthesis")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_build = sub.add_parser("build", help="synthesize samples from a dataset")
    p_build.add_argument("--input", required=True)
    p_build.add_argument("--out", required=True)
    _add_config_flags(p_build)
    p_build.add_argument("--epochs", type=int)
    p_build.add_argument("--k-max", dest="k_max", type=int)
    p_build.add_argument("--distribution",
                         choices=("fix", "uniform", "exponential", "lognormal", "logistic", "pareto"))
    p_build.add_argument("--budget", type=int)
    p_build.add_argument("--strategy-weights", dest="strategy_weights",
                         help="format,permute,maskout fractions summing to 1")
    p_build.add_argument("--primary-mode", dest="primary_mode", action="store_true",
                         help="plain concatenation only, no meta-instructions")
    p_build.add_argument("--grouping", choices=("random", "by_cluster"))
    p_build.add_argument("--jobs", type=int, help="worker count; output bytes do not depend on it")
    p_build.add_argument("--format", choices=("jsonl", "json"), default="jsonl")
    p_build.add_argument("--no-metadata", action="store_true",
                         help="emit only instruction/output fields")
    p_build.set_defaults(func=cmd_build)

    p_stats = sub.add_parser("stats", help="summarize a built sample file")
    p_stats.add_argument("--input", required=True)
    p_stats.add_argument("--json", action="store_true", help="machine-readable output")
    p_stats.set_defaults(func=cmd_stats)

    p_eval = sub.add_parser("eval", help="evaluation set construction and scoring")
    eval_sub = p_eval.add_subparsers(dest="eval_command", required=True, parser_class=_Parser)

    p_make = eval_sub.add_parser("make", help="test set -> prompts + answer keys")
    p_make.add_argument("--input", required=True)
    p_make.add_argument("--out-dir", dest="out_dir", required=True)
    p_make.add_argument("--k", required=True, help="comma-separated member counts, e.g. 3,5,7")
    _add_config_flags(p_make)
    p_make.set_defaults(func=cmd_eval_make)

    p_score = eval_sub.add_parser("score", help="keys + responses -> compliance report")
    p_score.add_argument("--keys", required=True)
    p_score.add_argument("--responses", required=True)
    p_score.add_argument("--out", help="write the full report JSON here")
    p_score.set_defaults(func=cmd_eval_score)

    p_rules = sub.add_parser("rules", help="list the active rule registry")
    p_rules.add_argument("--registry", help="registry override JSON file")
    p_rules.set_defaults(func=cmd_rules)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MosaicError as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
