import json

import pytest

from bench_lab.corpus import SYMBOLS, generate_corpus
from bench_lab.harness import (
    BenchConfig,
    calibrate_c_sort,
    load_bench_config,
    run_bench,
)
from bench_lab.report import CSV_COLUMNS, emit_report, read_report
from index_core.errors import BenchConfigError
from index_core.text_index import SuffixIndex
from match_engine.engine import StrategyKind

PATTERN_COLUMNS = [c for c in CSV_COLUMNS if c not in ("micros", "verified")]


@pytest.fixture(scope="module")
def corpus_index():
    return SuffixIndex.build(generate_corpus(20_000, alphabet_size=4, seed=3))


@pytest.fixture
def small_config():
    return BenchConfig(
        dataset="tiny",
        k_values=[2, 3],
        m_values=[3],
        gap_bands={"S": (5, 10)},
        patterns_per_cell=3,
        strategies=list(StrategyKind),
        repetitions=1,
        pool_size=20,
        verify=True,
    )


def test_corpus_is_reproducible():
    a = generate_corpus(10_000, alphabet_size=20, seed=9, repetitiveness=0.5, segment=256)
    b = generate_corpus(10_000, alphabet_size=20, seed=9, repetitiveness=0.5, segment=256)
    assert a == b
    assert len(a) == 10_000
    assert set(a) <= set(SYMBOLS[:20].tolist())
    assert generate_corpus(10_000, alphabet_size=20, seed=10) != a
    assert generate_corpus(0) == b""


def test_corpus_rejects_bad_arguments():
    with pytest.raises(ValueError):
        generate_corpus(10, alphabet_size=0)
    with pytest.raises(ValueError):
        generate_corpus(10, repetitiveness=1.5)


def test_run_bench_record_count_and_verification(corpus_index, small_config):
    records = run_bench(small_config, corpus_index)
    assert len(records) == 2 * 1 * 1 * len(StrategyKind) * 3
    assert all(r.verified for r in records)
    assert all(r.cand_stage0 >= r.cand_stage1 >= r.cand_stage2 for r in records)
    for r in records:
        if r.strategy in ("baseline", "radix", "textcheck"):
            assert r.block_size == 0
        else:
            assert r.block_size >= 1


def test_run_bench_is_reproducible(corpus_index, small_config):
    config = small_config.model_copy(update={"verify": False})
    first = [r.model_dump(include=set(PATTERN_COLUMNS)) for r in run_bench(config, corpus_index)]
    second = [r.model_dump(include=set(PATTERN_COLUMNS)) for r in run_bench(config, corpus_index)]
    assert first == second


def test_run_bench_block_size_sweep(corpus_index, small_config):
    config = small_config.model_copy(
        update={"strategies": [StrategyKind.FILTER], "block_sizes": [1, 64], "k_values": [2]}
    )
    records = run_bench(config, corpus_index)
    assert sorted({r.block_size for r in records}) == [1, 64]
    assert len(records) == 2 * 3


def test_run_bench_rejects_short_text(small_config):
    index = SuffixIndex.build(b"abcabc")
    with pytest.raises(BenchConfigError):
        run_bench(small_config, index)


def test_load_bench_config_file_and_overrides(tmp_path):
    path = tmp_path / "bench.cfg"
    path.write_text(
        "# protocolo reducido\n"
        "k_values = 2,4\n"
        "m_values=3\n"
        "gap_bands=C_S:100:110,C_M:1000:1100\n"
        "strategies=radix,filter\n"
        "seed=5\n",
        encoding="utf-8",
    )
    config = load_bench_config(path, {"seed": 11, "m_values": "5,7", "dataset": None})
    assert config.k_values == [2, 4]
    assert config.m_values == [5, 7]
    assert config.gap_bands == {"C_S": (100, 110), "C_M": (1000, 1100)}
    assert config.strategies == [StrategyKind.RADIX, StrategyKind.FILTER]
    assert config.seed == 11
    assert config.patterns_per_cell == 20


@pytest.mark.parametrize(
    "content",
    [
        "unknown_key=1\n",
        "k_values=0\n",
        "gap_bands=C_S:100\n",
        "gap_bands=C_S:110:100\n",
        "block_sizes=3\n",
        "strategies=quantum\n",
        "just a line\n",
    ],
)
def test_load_bench_config_rejects_bad_input(tmp_path, content):
    path = tmp_path / "bad.cfg"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(BenchConfigError):
        load_bench_config(path)


def test_emit_report_empty_is_header_only(tmp_path):
    out = tmp_path / "empty.csv"
    emit_report([], out)
    assert out.read_bytes() == (",".join(CSV_COLUMNS) + "\r\n").encode()
    assert read_report(out) == []


def test_emit_report_round_trip_and_summaries(tmp_path, corpus_index, small_config):
    records = run_bench(small_config, corpus_index)
    out = tmp_path / "bench.csv"
    summary = emit_report(records, out)

    assert read_report(out) == records
    assert out.read_bytes().count(b"\r\n") == len(records) + 1
    assert len(summary) == 2 * len(StrategyKind)
    assert summary["patterns"].tolist() == [3] * len(summary)

    payload = json.loads((tmp_path / "bench_summary.json").read_text(encoding="utf-8"))
    assert payload["rows"] == len(records)
    assert payload["all_verified"] is True
    assert payload["generated_at"].endswith("+00:00")
    assert (tmp_path / "bench_summary.csv").exists()


def test_calibrate_c_sort(corpus_index):
    measured = calibrate_c_sort(corpus_index, sample_size=5000, window=5000)
    assert measured["c_sort"] > 0
    assert measured["sort_ns_per_element"] > 0
    assert measured["text_ns_per_byte"] > 0
