import io

import pytest
from hypothesis import given, strategies as st

from langbench.records import (
    AnnotatedRecord,
    DatabaseWeights,
    IngestError,
    LanguageCategory,
    MetadataConfig,
    SubgroupKey,
    classify_config,
    ingest_records,
    load_weights,
    map_language,
    serialize_records,
)

from conftest import make_record, records_jsonl


def test_language_category_has_exactly_12_members():
    assert len(LanguageCategory) == 12
    assert LanguageCategory.OTHER in LanguageCategory


def test_map_language_named_codes():
    assert map_language("en") is LanguageCategory.EN
    assert map_language("ZH") is LanguageCategory.ZH
    assert map_language(" Fr ") is LanguageCategory.FR


def test_map_language_unknown_codes_go_to_other():
    for code in ("nl", "xx", "unknown", "eng", "zz"):
        assert map_language(code) is LanguageCategory.OTHER


@given(st.text(min_size=1))
def test_map_language_is_total(code):
    assert map_language(code) in LanguageCategory


def test_classify_config_cases():
    assert classify_config(make_record("a", "X")) is MetadataConfig.TITLE_ONLY
    assert (
        classify_config(make_record("b", "X", abstract="Y."))
        is MetadataConfig.TITLE_ABSTRACT
    )
    assert (
        classify_config(make_record("c", "X", journal="J"))
        is MetadataConfig.TITLE_JOURNAL
    )
    assert (
        classify_config(make_record("d", "X", abstract="Y", journal="J"))
        is MetadataConfig.TITLE_ABSTRACT_JOURNAL
    )


def test_classify_config_whitespace_only_counts_as_absent():
    record = make_record("e", "X", abstract="  ", journal="J")
    assert classify_config(record) is MetadataConfig.TITLE_JOURNAL


def test_classify_config_partitions_record_set(sample_records):
    configs = [classify_config(r) for r in sample_records]
    assert len(configs) == len(sample_records)
    assert set(configs) <= set(MetadataConfig)


def test_record_requires_nonempty_title():
    with pytest.raises(ValueError, match="title"):
        AnnotatedRecord(
            id="x", title="   ", abstract=None, journal_name=None,
            true_language=LanguageCategory.EN,
        )


def test_ingest_jsonl_full_record():
    data = (
        b'{"id": "1", "title": "T", "abstract": "A", '
        b'"journal_name": "J", "true_language": "en"}\n'
    )
    (record,) = ingest_records(io.BytesIO(data), format="jsonl")
    assert record.id == "1"
    assert record.true_language is LanguageCategory.EN
    assert classify_config(record) is MetadataConfig.TITLE_ABSTRACT_JOURNAL


def test_ingest_missing_title_names_line():
    data = (
        b'{"id": "1", "title": "T", "true_language": "en"}\n'
        b'{"id": "2", "true_language": "fr"}\n'
    )
    with pytest.raises(IngestError) as exc:
        ingest_records(io.BytesIO(data), format="jsonl")
    assert exc.value.line == 2


def test_ingest_invalid_json_names_line():
    with pytest.raises(IngestError) as exc:
        ingest_records(io.BytesIO(b'{"id": "1"\n'), format="jsonl")
    assert exc.value.line == 1


def test_ingest_rejects_non_utf8():
    with pytest.raises(IngestError, match="UTF-8"):
        ingest_records(io.BytesIO(b'{"id": "\xff"}\n'), format="jsonl")


def test_ingest_csv():
    data = (
        b"id,title,abstract,journal_name,true_language\n"
        b"1,Title one,,Journal,en\n"
        b"2,Titre deux,Un abstrait.,,fr\n"
    )
    out = ingest_records(io.BytesIO(data), format="csv")
    assert [r.id for r in out] == ["1", "2"]
    assert out[0].abstract is None
    assert classify_config(out[0]) is MetadataConfig.TITLE_JOURNAL
    assert out[1].journal_name is None


def test_ingest_preserves_order_and_count():
    n = (2701, 3300, 300)
    lines = []
    for i in range(sum(n)):
        lines.append(
            '{"id": "%d", "title": "T%d", "true_language": "en"}' % (i, i)
        )
    data = ("\n".join(lines) + "\n").encode()
    out = ingest_records(io.BytesIO(data), format="jsonl")
    assert len(out) == 6301
    assert [r.id for r in out] == [str(i) for i in range(6301)]


def test_ingest_roundtrip(sample_records):
    data = serialize_records(sample_records)
    again = ingest_records(io.BytesIO(data), format="jsonl")
    assert again == sample_records
    assert serialize_records(again) == data


def test_load_weights_fixture(weights_csv_path):
    with open(weights_csv_path, "rb") as fh:
        weights, dropped = load_weights(fh)
    assert dropped == 4  # the four unmapped-label rows
    assert len(weights.counts) == 48
    key = SubgroupKey(LanguageCategory.EN, MetadataConfig.TITLE_ONLY)
    assert weights.counts[key] == 17_915_165
    key = SubgroupKey(LanguageCategory.DE, MetadataConfig.TITLE_ONLY)
    assert weights.counts[key] == 615_864


def test_load_weights_sum_excludes_dropped(weights_csv_path):
    raw_total = 0
    dropped_total = 0
    for line in weights_csv_path.read_text().splitlines()[1:]:
        label, _, count = line.split(",")
        raw_total += int(count)
        if label == "unknown":
            dropped_total += int(count)
    with open(weights_csv_path, "rb") as fh:
        weights, _ = load_weights(fh)
    assert sum(weights.counts.values()) == raw_total - dropped_total


def test_load_weights_rejects_negative_and_duplicates():
    with pytest.raises(IngestError, match="negative"):
        load_weights(io.BytesIO(b"language,config,count\nen,T,-1\n"))
    with pytest.raises(IngestError, match="duplicate"):
        load_weights(io.BytesIO(b"language,config,count\nen,T,1\nen,T,2\n"))


def test_database_weights_invariants():
    key = SubgroupKey(LanguageCategory.EN, MetadataConfig.TITLE_ONLY)
    with pytest.raises(ValueError):
        DatabaseWeights({key: -1})
    with pytest.raises(ValueError):
        DatabaseWeights({key: 0})
    with pytest.raises(ValueError):
        DatabaseWeights({})
