import pytest

import cli
from bench_lab.corpus import generate_corpus
from index_core import text_index
from index_core.text_index import SuffixIndex


@pytest.fixture
def abra_index(tmp_path):
    path = tmp_path / "abra.vlg"
    SuffixIndex.build(b"abracadabra").save(path)
    return str(path)


def test_build_writes_loadable_index(tmp_path, capsys):
    src = tmp_path / "banana.txt"
    src.write_bytes(b"banana")
    out = tmp_path / "banana.vlg"

    assert cli.main(["build", str(src), "-o", str(out), "--width", "8"]) == 0
    assert "n=6" in capsys.readouterr().err
    assert out.read_bytes()[8] == 8
    assert SuffixIndex.load(out).sa.tolist() == [5, 3, 1, 0, 4, 2]


def test_build_missing_file_exits_2(tmp_path):
    assert cli.main(["build", str(tmp_path / "nope.txt"), "-o", str(tmp_path / "x.vlg")]) == 2


def test_build_capacity_exits_3(tmp_path, monkeypatch):
    src = tmp_path / "big.txt"
    src.write_bytes(b"abcdef")
    monkeypatch.setattr(text_index, "MAX_TEXT_LEN", 4)
    assert cli.main(["build", str(src), "-o", str(tmp_path / "big.vlg")]) == 3


@pytest.mark.parametrize("strategy", ["auto", "baseline", "radix", "filter", "textcheck"])
def test_search_prints_endpoints(abra_index, capsys, strategy):
    assert cli.main(["search", abra_index, "ab[2,2]ra", "--strategy", strategy]) == 0
    assert capsys.readouterr().out == "2\n9\n"


def test_search_no_match_exits_1(abra_index, capsys):
    assert cli.main(["search", abra_index, "ab[3,4]ra"]) == 1
    assert capsys.readouterr().out == ""


def test_search_parse_error_exits_2(abra_index, capsys):
    assert cli.main(["search", abra_index, "ab[5,3]ra"]) == 2
    err = capsys.readouterr().err
    assert "δ > Δ" in err and "offset 2" in err


def test_search_tuples_count_and_gap_mode(abra_index, capsys):
    assert cli.main(["search", abra_index, "ab[2,2]ra", "--tuples"]) == 0
    assert capsys.readouterr().out == "0\t2\n7\t9\n"

    assert cli.main(["search", abra_index, "ab[2,2]ra", "--count"]) == 0
    assert capsys.readouterr().out == "2\n"

    # En modo end el salto [0,0] equivale a [2,2] inicio-a-inicio
    assert cli.main(["search", abra_index, "ab[0,0]ra", "--gap-mode", "end"]) == 0
    assert capsys.readouterr().out == "2\n9\n"


def test_search_verify_and_trace(abra_index, capsys):
    assert cli.main(["search", abra_index, "a[0,3]a", "--verify", "--trace"]) == 0
    err = capsys.readouterr().err
    assert "verificado" in err
    assert "distancia 0" in err
    assert "salto 0" in err


def test_search_verify_mismatch_exits_4(abra_index, monkeypatch):
    import numpy as np

    from match_engine.engine import MatchResult

    monkeypatch.setattr(cli, "oracle_search", lambda *a, **kw: MatchResult(np.array([1], dtype=np.int64)))
    assert cli.main(["search", abra_index, "ab[2,2]ra", "--verify"]) == 4


def test_search_pattern_file(abra_index, tmp_path, capsys):
    patterns = tmp_path / "p.txt"
    patterns.write_text("# dos patrones\nab[2,2]ra\ncad\n", encoding="utf-8")
    assert cli.main(["search", abra_index, "--pattern-file", str(patterns)]) == 0
    assert capsys.readouterr().out == "1\t2\n1\t9\n2\t4\n"


def test_search_usage_errors(abra_index, tmp_path):
    assert cli.main(["search", abra_index]) == 2
    assert cli.main(["search", abra_index, "ab", "--block-size", "3"]) == 2
    assert cli.main(["search", str(tmp_path / "missing.vlg"), "ab"]) == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["search", abra_index, "ab", "--bogus"])
    assert info.value.code == 2


def test_search_corrupted_index_exits_2(abra_index):
    with open(abra_index, "r+b") as f:
        f.seek(30)
        f.write(b"Z")
    assert cli.main(["search", abra_index, "ab"]) == 2


@pytest.fixture
def corpus_index_path(tmp_path):
    path = tmp_path / "corpus.vlg"
    SuffixIndex.build(generate_corpus(20_000, alphabet_size=4, seed=1)).save(path)
    return str(path)


def test_bench_writes_expected_rows(corpus_index_path, tmp_path):
    out = tmp_path / "bench.csv"
    code = cli.main(
        [
            "bench",
            corpus_index_path,
            "--out",
            str(out),
            "--k",
            "2,3",
            "--m",
            "3",
            "--bands",
            "S:5:10",
            "--patterns",
            "2",
            "--strategies",
            "radix,filter,textcheck",
            "--repetitions",
            "1",
            "--pool-size",
            "10",
            "--verify",
        ]
    )
    assert code == 0
    lines = out.read_bytes().split(b"\r\n")
    assert len([line for line in lines if line]) == 1 + 2 * 3 * 2
    assert all(line.endswith(b",True") for line in lines[1:] if line)


def test_bench_bad_config_key_exits_2(corpus_index_path, tmp_path):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text("colour=blue\n", encoding="utf-8")
    assert cli.main(["bench", corpus_index_path, "--out", str(tmp_path / "b.csv"), "--config", str(cfg)]) == 2


def test_calibrate_writes_env(corpus_index_path, tmp_path, capsys):
    env = tmp_path / ".env"
    env.write_text("", encoding="utf-8")
    assert cli.main(["calibrate", corpus_index_path, "--write-env", str(env)]) == 0
    assert capsys.readouterr().out.startswith("c_sort=")
    assert "VLG_C_SORT" in env.read_text(encoding="utf-8")


def test_search_rejects_negative_tuple_cap(abra_index, capsys):
    assert cli.main(["search", abra_index, "ab[2,2]ra", "--tuples", "--tuple-cap", "-1"]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "--tuple-cap" in captured.err

    assert cli.main(["search", abra_index, "ab[2,2]ra", "--tuples", "--tuple-cap", "0"]) == 0
