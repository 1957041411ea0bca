"""
Oráculo de verificación: búsqueda ingenua en el texto y programación dinámica
por niveles. Independiente del índice y de los núcleos compilados; se usa en
tests y en modo --verify.
"""
from bisect import bisect_left, bisect_right
from itertools import accumulate

import numpy as np

from index_core.pattern import VlgPattern
from match_engine.engine import MatchResult


def naive_occurrences(text: bytes, sub: bytes) -> list[int]:
    """Todas las posiciones (con solapamiento) de sub en text."""
    found = []
    pos = text.find(sub)
    while pos != -1:
        found.append(pos)
        pos = text.find(sub, pos + 1)
    return found


def _has_partner(sorted_positions: list[int], lo: int, hi: int) -> bool:
    idx = bisect_left(sorted_positions, lo)
    return idx < len(sorted_positions) and sorted_positions[idx] <= hi


def _reachable_levels(text: bytes, pattern: VlgPattern) -> list[list[int]]:
    # reach[j] = ocurrencias de p_j con cadena válida desde p_0
    reach = [naive_occurrences(text, pattern.subpatterns[0])]
    for j, gap in enumerate(pattern.gaps):
        prev = reach[-1]
        reach.append(
            [
                q
                for q in naive_occurrences(text, pattern.subpatterns[j + 1])
                if _has_partner(prev, q - gap.max_gap, q - gap.min_gap)
            ]
        )
    return reach


def _alive_levels(reach: list[list[int]], pattern: VlgPattern) -> list[list[int]]:
    # alive[j] = posiciones de reach[j] que además completan la cadena hasta p_{k-1}
    alive = [None] * len(reach)
    alive[-1] = reach[-1]
    for j in range(len(pattern.gaps) - 1, -1, -1):
        gap = pattern.gaps[j]
        nxt = alive[j + 1]
        alive[j] = [i for i in reach[j] if _has_partner(nxt, i + gap.min_gap, i + gap.max_gap)]
    return alive


def count_tuples(text: bytes, pattern: VlgPattern) -> int:
    """Número exacto de k-tuplas válidas (sumas prefijas por nivel)."""
    reach = _reachable_levels(text, pattern)
    ways = [1] * len(reach[0])
    for j, gap in enumerate(pattern.gaps):
        prev, nxt = reach[j], reach[j + 1]
        prefix = [0, *accumulate(ways)]
        ways = [
            prefix[bisect_right(prev, q - gap.min_gap)] - prefix[bisect_left(prev, q - gap.max_gap)]
            for q in nxt
        ]
    return sum(ways)


def oracle_search(
    text: bytes,
    pattern: VlgPattern,
    want_tuples: bool = True,
    tuple_cap: int | None = None,
) -> MatchResult:
    text = bytes(text)
    reach = _reachable_levels(text, pattern)
    endpoints = np.asarray(reach[-1], dtype=np.int64)
    if not want_tuples:
        return MatchResult(endpoints)

    alive = _alive_levels(reach, pattern)
    tuples: list[tuple[int, ...]] = []
    truncated = False

    def expand(level, prefix):
        nonlocal truncated
        if truncated:
            return
        if level == len(alive):
            if tuple_cap is not None and len(tuples) >= tuple_cap:
                truncated = True
                return
            tuples.append(prefix)
            return
        row = alive[level]
        if level > 0:
            gap = pattern.gaps[level - 1]
            row = row[bisect_left(row, prefix[-1] + gap.min_gap) : bisect_right(row, prefix[-1] + gap.max_gap)]
        for pos in row:
            expand(level + 1, prefix + (pos,))

    expand(0, ())
    return MatchResult(endpoints, tuples, truncated)
