"""In-process bindings over the mosaic pipeline for data-pipeline users.

Stateless wrappers: records and configs go in as plain mappings, sample rows
and reports come back as plain mappings, identical field-by-field to what
the CLI writes.  Pipeline errors surface as ValueError carrying the native
diagnostic text.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Mapping

import mosaic
from mosaic import (
    AnswerKey,
    MosaicError,
    default_registry,
    from_records,
    load_registry,
    parse_config,
    sample_rows,
    score_rows,
)

__all__ = ["py_build", "py_score", "version"]


def version() -> str:
    return mosaic.__version__


def py_build(records: Iterable[Mapping], config: Mapping | None, seed: int) -> list[dict]:
    """Synthesize samples from in-memory records; rows match CLI output."""
    try:
        run_config = parse_config(dict(config or {}))
        engine_config = replace(run_config.engine, seed=seed)
        registry = (load_registry(run_config.registry_path)
                    if run_config.registry_path else default_registry())
        dataset = from_records(records, format_tag=run_config.input_format)
        samples, _ = mosaic.run(dataset, engine_config, run_config.k_dist, registry)
        return sample_rows(samples, include_metadata=True)
    except MosaicError as exc:
        raise ValueError(str(exc)) from exc


def py_score(samples_with_keys: Iterable[Mapping], responses: Iterable[Mapping]) -> dict:
    """Score response rows against answer-key rows; returns the report mapping."""
    try:
        keys = [AnswerKey.from_row(row) for row in samples_with_keys]
        return score_rows(keys, list(responses)).as_dict()
    except MosaicError as exc:
        raise ValueError(str(exc)) from exc
