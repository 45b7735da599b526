"""Deterministic synthesis of multi-instruction training samples.

Concatenates k instruction-response pairs per sample under one of four
strategies (primary / format / permute / maskout), prepending rule-based
meta-instructions, and scores arbitrary responses for compliance.
"""

__version__ = "0.1.0"

from .config import RunConfig, load_config_file, parse_config
from .corpus import (
    Dataset,
    InstructionRecord,
    from_records,
    load_dataset,
    sample_rows,
    write_mosaics,
)
from .engine import (
    EngineConfig,
    MosaicSample,
    RunReport,
    StrategyWeights,
    plan_pass,
    render_sample,
    run,
)
from .errors import ConfigError, DataError, MosaicError
from .ksampler import KDistribution, KSummary, draw_k, summarize_k, summarize_ks
from .rng import SeededRng, derive_seed
from .ruleset import (
    FormatSpec,
    MetaRule,
    RuleRegistry,
    apply_meta_rule,
    default_registry,
    load_registry,
    sample_format,
    sample_meta_rule,
)
from .validator import (
    AnswerKey,
    SampleVerdict,
    ValidationReport,
    build_eval_set,
    make_answer_key,
    make_prompt_row,
    score_file,
    score_response,
    score_rows,
)

__all__ = [
    "__version__",
    "AnswerKey",
    "ConfigError",
    "DataError",
    "Dataset",
    "EngineConfig",
    "FormatSpec",
    "InstructionRecord",
    "KDistribution",
    "KSummary",
    "MetaRule",
    "MosaicError",
    "MosaicSample",
    "RuleRegistry",
    "RunConfig",
    "RunReport",
    "SampleVerdict",
    "SeededRng",
    "StrategyWeights",
    "ValidationReport",
    "apply_meta_rule",
    "build_eval_set",
    "default_registry",
    "derive_seed",
    "draw_k",
    "from_records",
    "load_config_file",
    "load_dataset",
    "load_registry",
    "make_answer_key",
    "make_prompt_row",
    "parse_config",
    "plan_pass",
    "render_sample",
    "run",
    "sample_format",
    "sample_meta_rule",
    "sample_rows",
    "score_file",
    "score_response",
    "score_rows",
    "summarize_k",
    "summarize_ks",
    "write_mosaics",
]
