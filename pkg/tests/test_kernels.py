import numpy as np
import pytest

from match_engine.kernels import intersect_gapped, kmp_search, radix_sort, scan_windows
from match_engine.oracle import naive_occurrences


def test_radix_sort_examples():
    assert radix_sort([3, 1, 2]).tolist() == [1, 2, 3]
    assert radix_sort([]).tolist() == []
    assert radix_sort([7]).tolist() == [7]


def test_radix_sort_matches_comparison_sort():
    rng = np.random.default_rng(40)
    values = rng.integers(0, 1 << 40, size=100_000, dtype=np.int64)
    assert np.array_equal(radix_sort(values), np.sort(values))


def test_radix_sort_keeps_input_untouched():
    values = np.array([9, 256, 3, 65536, 0], dtype=np.int64)
    before = values.copy()
    assert radix_sort(values).tolist() == [0, 3, 9, 256, 65536]
    assert np.array_equal(values, before)


def test_radix_sort_rejects_negative():
    with pytest.raises(ValueError):
        radix_sort([3, -1])


@pytest.mark.parametrize(
    "a, b, lo, hi, expected",
    [
        ([0, 7], [2, 9], 2, 2, [2, 9]),
        ([0, 7], [2, 9], 3, 4, []),
        ([], [2, 9], 0, 5, []),
        ([0, 1, 2], [3], 1, 3, [3]),
        ([5], [5, 6], 0, 0, [5]),
    ],
)
def test_intersect_gapped_examples(a, b, lo, hi, expected):
    assert intersect_gapped(a, b, lo, hi).tolist() == expected


def test_intersect_gapped_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(300):
        a = np.unique(rng.integers(0, 300, size=int(rng.integers(0, 40))))
        b = np.unique(rng.integers(0, 300, size=int(rng.integers(0, 40))))
        lo = int(rng.integers(0, 30))
        hi = lo + int(rng.integers(0, 30))
        expected = [j for j in b.tolist() if any(i + lo <= j <= i + hi for i in a.tolist())]
        assert intersect_gapped(a, b, lo, hi).tolist() == expected


@pytest.mark.parametrize(
    "hay, needle, expected",
    [
        (b"banana", b"ana", [1, 3]),
        (b"aaaa", b"aa", [0, 1, 2]),
        (b"abc", b"x", []),
        (b"ab", b"abc", []),
    ],
)
def test_kmp_search_examples(hay, needle, expected):
    assert kmp_search(hay, needle).tolist() == expected


def test_kmp_search_matches_naive():
    rng = np.random.default_rng(3)
    for _ in range(200):
        hay = rng.integers(0, 3, size=int(rng.integers(0, 200)), dtype=np.uint8).tobytes()
        needle = rng.integers(0, 3, size=int(rng.integers(1, 6)), dtype=np.uint8).tobytes()
        assert kmp_search(hay, needle).tolist() == naive_occurrences(hay, needle)


def test_kmp_search_rejects_empty_needle():
    with pytest.raises(ValueError):
        kmp_search(b"abc", b"")


def test_scan_windows_equals_per_window_union():
    rng = np.random.default_rng(21)
    for _ in range(200):
        text = rng.integers(0, 2, size=int(rng.integers(5, 300)), dtype=np.uint8).tobytes()
        needle = rng.integers(0, 2, size=int(rng.integers(1, 4)), dtype=np.uint8).tobytes()
        bases = np.unique(rng.integers(0, len(text), size=int(rng.integers(0, 20))))
        lo = int(rng.integers(-20, 20))
        hi = lo + int(rng.integers(0, 40))

        starts = set(naive_occurrences(text, needle))
        expected = sorted({s for base in bases.tolist() for s in starts if base + lo <= s <= base + hi})
        assert scan_windows(text, bases, needle, lo, hi).tolist() == expected
