import json

import pytest

from mosaic import DataError, from_records, load_dataset, write_mosaics
from mosaic.corpus import read_jsonl, sample_rows
from mosaic.engine import MosaicSample


def _write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")


def _sample(instruction="inst", response="resp", **kwargs):
    defaults = dict(
        member_ids=(0,), k=1, strategy="primary", format=None, rule=None,
        response_order=(1,), overall_instruction=instruction,
        overall_response=response, epoch=0, length_units=2, seed=0,
    )
    defaults.update(kwargs)
    return MosaicSample(**defaults)


def test_empty_input_passthrough():
    ds = from_records([{"instruction": "Sum 2 and 3", "input": "", "output": "5"}])
    assert ds.records[0].instruction == "Sum 2 and 3"
    assert ds.records[0].response == "5"


def test_input_unified_with_newline():
    ds = from_records([{"instruction": "Translate:", "input": "bonjour", "output": "hello"}])
    assert ds.records[0].instruction == "Translate:\nbonjour"


def test_invalid_records_dropped_and_counted(tmp_path):
    rows = [
        {"instruction": "a", "input": "", "output": "x"},
        {"instruction": "b", "input": "", "output": "  "},  # empty after trim
        {"instruction": "c", "input": "", "output": "y"},
        {"instruction": "d", "input": "", "output": "z"},
    ]
    path = tmp_path / "ds.jsonl"
    _write_jsonl(path, rows)
    ds = load_dataset(path)
    assert len(ds) == 3
    assert ds.dropped_count == 1
    assert [r.id for r in ds.records] == [0, 1, 2]


def test_malformed_line_reports_line_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"instruction":"a","output":"x"}\nnot json\n', encoding="utf-8")
    with pytest.raises(DataError, match="line 2"):
        load_dataset(path)


def test_missing_key_is_error():
    with pytest.raises(DataError, match="instruction"):
        from_records([{"output": "x"}])


def test_zero_valid_records_is_error():
    with pytest.raises(DataError, match="no valid records"):
        from_records([{"instruction": " ", "output": "x"}])


def test_unreadable_file_is_error(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        load_dataset(tmp_path / "missing.jsonl")


def test_json_array_input(tmp_path):
    path = tmp_path / "ds.json"
    path.write_text(json.dumps([{"instruction": "a", "output": "x"}]), encoding="utf-8")
    ds = load_dataset(path)
    assert len(ds) == 1


def test_output_key_accepted_as_response():
    ds = from_records([{"instruction": "a", "response": "x"}], format_tag="alpaca-triplet")
    assert ds.records[0].response == "x"


def test_pair_format_requires_response():
    ds = from_records([{"instruction": "a", "response": "x"}], format_tag="pair")
    assert ds.records[0].response == "x"
    with pytest.raises(DataError, match="response"):
        from_records([{"instruction": "a", "output": "x"}], format_tag="pair")


def test_cluster_parsing():
    ds = from_records([{"instruction": "a", "output": "x", "cluster": 3}])
    assert ds.records[0].cluster == 3
    with pytest.raises(DataError, match="cluster"):
        from_records([{"instruction": "a", "output": "x", "cluster": -1}])
    with pytest.raises(DataError, match="cluster"):
        from_records([{"instruction": "a", "output": "x", "cluster": "3"}])


def test_unknown_format_tag():
    with pytest.raises(DataError, match="format_tag"):
        from_records([{"instruction": "a", "output": "x"}], format_tag="csv")


def test_load_preserves_pair_text_exactly(tmp_path):
    rows = [{"instruction": "Keep  inner   spacing?", "response": "line one\nline  two"}]
    path = tmp_path / "pair.jsonl"
    _write_jsonl(path, rows)
    ds = load_dataset(path, format_tag="pair")
    assert ds.records[0].instruction == "Keep  inner   spacing?"
    assert ds.records[0].response == "line one\nline  two"
    # trim is idempotent: re-serializing and re-loading changes nothing
    _write_jsonl(path, [{"instruction": r.instruction, "response": r.response} for r in ds.records])
    again = load_dataset(path, format_tag="pair")
    assert [(r.instruction, r.response) for r in again.records] == \
           [(r.instruction, r.response) for r in ds.records]


def test_write_mosaics_minimal_keys(tmp_path):
    path = tmp_path / "out.jsonl"
    write_mosaics([_sample()], path, include_metadata=False)
    rows = read_jsonl(path)
    assert len(rows) == 1
    assert list(rows[0].keys()) == ["instruction", "output"]


def test_write_mosaics_metadata_keys(tmp_path):
    path = tmp_path / "out.jsonl"
    write_mosaics([_sample()], path, include_metadata=True)
    rows = read_jsonl(path)
    assert list(rows[0].keys()) == [
        "instruction", "output", "strategy", "rule", "k", "member_ids", "epoch", "seed",
    ]


def test_write_mosaics_byte_identical(tmp_path):
    samples = [_sample(instruction=f"i{n}", response=f"r{n}") for n in range(5)]
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_mosaics(samples, a)
    write_mosaics(samples, b)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().endswith(b"\n")
    assert b"\r" not in a.read_bytes()


def test_write_mosaics_one_line_per_sample(tmp_path):
    samples = [_sample(instruction=f"i{n}", response=f"r{n}") for n in range(100)]
    path = tmp_path / "out.jsonl"
    write_mosaics(samples, path)
    assert len(path.read_text(encoding="utf-8").splitlines()) == 100


def test_write_mosaics_rejects_empty(tmp_path):
    with pytest.raises(DataError, match="empty"):
        write_mosaics([], tmp_path / "out.jsonl")


def test_sample_rows_round_trips_as_json(tmp_path):
    sample = _sample(instruction="multi\nline", response="uniçode ☃")
    path = tmp_path / "out.jsonl"
    write_mosaics([sample], path)
    row = read_jsonl(path)[0]
    assert row["instruction"] == "multi\nline"
    assert row["output"] == "uniçode ☃"
    assert sample_rows([sample])[0] == row
