from dataclasses import dataclass, field
from enum import Enum
from itertools import islice

import numpy as np

from index_core import settings
from index_core.errors import GapConstraintError
from index_core.pattern import GapConstraint, VlgPattern
from index_core.text_index import SuffixIndex
from match_engine.block_filter import BlockFilter, default_block_size
from match_engine.kernels import (
    as_positions,
    intersect_gapped,
    is_sorted,
    radix_sort,
    scan_windows,
)


class StrategyKind(str, Enum):
    BASELINE = "baseline"
    RADIX = "radix"
    FILTER = "filter"
    TEXTCHECK = "textcheck"
    AUTO = "auto"


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass
class PairStep:
    """Traza de una adyacencia p_j -> p_{j+1}."""

    level: int
    strategy: StrategyKind
    anchors_in: int
    occ_next: int
    kept_anchors: int
    kept_next: int
    out: int
    block_size: int = 0

    @property
    def stage_in(self) -> int:
        return self.anchors_in + self.occ_next

    @property
    def stage_filtered(self) -> int:
        return self.kept_anchors + self.kept_next


@dataclass
class MatchResult:
    endpoints: np.ndarray
    tuples: list[tuple[int, ...]] | None = None
    truncated: bool = False
    steps: list[PairStep] = field(default_factory=list)

    @property
    def stage_counts(self) -> list[int]:
        """Totales de candidatos por etapa: entrada, tras filtrar, salida. No crecientes."""
        if not self.steps:
            size = int(self.endpoints.size)
            return [size, size, size]
        return [
            sum(s.stage_in for s in self.steps),
            sum(s.stage_filtered for s in self.steps),
            sum(s.out for s in self.steps),
        ]


def _empty() -> np.ndarray:
    return np.empty(0, dtype=np.int64)


def _sorted(positions: np.ndarray) -> np.ndarray:
    return positions if is_sorted(positions) else radix_sort(positions)


# --- Chequeo directo en el texto ---


def text_check_forward(anchors, text, next_sub: bytes, min_gap: int, max_gap: int) -> np.ndarray:
    """
    Para cada ancla i busca next_sub en T[i+δ .. min(n, i+Δ+m)-1] con KMP.
    Devuelve la unión ascendente y sin duplicados de las posiciones halladas.
    """
    anchors = as_positions(anchors)
    if anchors.size == 0:
        return _empty()
    return scan_windows(text, _sorted(anchors), next_sub, min_gap, max_gap)


def text_check_backward(anchors, text, prev_sub: bytes, min_gap: int, max_gap: int) -> np.ndarray:
    """
    Filtra las anclas j (ocurrencias del subpatrón posterior) que tienen una
    ocurrencia i de prev_sub con i+δ <= j <= i+Δ, buscando en
    T[max(0, j-Δ) .. min(n, j-δ+m)-1].
    """
    anchors = as_positions(anchors)
    if anchors.size == 0:
        return _empty()
    anchors = _sorted(anchors)
    hits = scan_windows(text, anchors, prev_sub, -max_gap, -min_gap)
    return intersect_gapped(hits, anchors, min_gap, max_gap)


# --- Filtro por bloques ---


def filter_pair(
    pos_small,
    pos_large,
    direction: Direction,
    min_gap: int,
    max_gap: int,
    block_size: int,
    n: int,
    scratch: BlockFilter | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Marca el filtro desde el lado pequeño y poda el grande. Si sobreviven menos
    de |pos_small|/2, segunda ronda: se limpia, se marca desde los
    sobrevivientes en sentido opuesto y se poda también el lado pequeño.
    direction=FORWARD: el lado pequeño es el subpatrón anterior.
    """
    pos_small = as_positions(pos_small)
    pos_large = as_positions(pos_large)
    f = scratch
    if f is None or f.n != n or f.block_size != block_size:
        f = BlockFilter(n, block_size)
    else:
        f.clear()

    forward = Direction(direction) is Direction.FORWARD
    if forward:
        f.mark_forward(pos_small, min_gap, max_gap)
    else:
        f.mark_backward(pos_small, min_gap, max_gap)
    large_kept = f.prune(pos_large)

    if 2 * large_kept.size < pos_small.size:
        f.clear()
        if forward:
            f.mark_backward(large_kept, min_gap, max_gap)
        else:
            f.mark_forward(large_kept, min_gap, max_gap)
        pos_small = f.prune(pos_small)
    return pos_small, large_kept


# --- Planificador ---


def plan_pair(
    occ_a: int,
    occ_b: int,
    m_next: int,
    min_gap: int,
    max_gap: int,
    c_sort: float = None,
) -> StrategyKind:
    """
    Costo chequeo de texto ~ min(occ_a, occ_b) * (Δ-δ+m_next);
    costo ordenar ~ c_sort * (occ_a + occ_b). Gana el menor.
    """
    c_sort = settings.C_SORT if c_sort is None else c_sort
    if occ_a == 0 or occ_b == 0:
        return StrategyKind.TEXTCHECK
    text_cost = min(occ_a, occ_b) * (max_gap - min_gap + m_next)
    sort_cost = c_sort * (occ_a + occ_b)
    return StrategyKind.TEXTCHECK if text_cost < sort_cost else StrategyKind.FILTER


# --- Motor ---


class VlgMatcher:
    """
    Responde consultas VLG sobre un índice. Cada llamada a search() usa su
    propio scratch (buffers y un BlockFilter), así que una instancia de índice
    puede compartirse entre consultas concurrentes.
    """

    def __init__(
        self,
        index: SuffixIndex,
        c_sort: float = None,
        block_size: int | None = None,
        l3_budget: int = None,
    ):
        self.index = index
        self.c_sort = settings.C_SORT if c_sort is None else c_sort
        self.block_size = block_size
        self.l3_budget = settings.L3_BUDGET_BYTES if l3_budget is None else l3_budget

    def block_size_for(self, gap: GapConstraint) -> int:
        if self.block_size is not None:
            return self.block_size
        return default_block_size(self.index.n, gap.min_gap, gap.max_gap, self.l3_budget)

    def _validate(self, pattern: VlgPattern):
        n = self.index.n
        for i, gap in enumerate(pattern.gaps):
            if gap.max_gap >= n:
                raise GapConstraintError(
                    f"salto {i}: Δ={gap.max_gap} debe ser menor que n={n}"
                )

    def search(
        self,
        pattern: VlgPattern,
        strategy: StrategyKind = StrategyKind.AUTO,
        want_tuples: bool = False,
        tuple_cap: int | None = None,
    ) -> MatchResult:
        strategy = StrategyKind(strategy)
        self._validate(pattern)

        # 1. Intervalos del SA; cualquier vacío corta la consulta
        intervals = [self.index.find_interval(p) for p in pattern.subpatterns]
        if any(iv.is_empty for iv in intervals):
            return MatchResult(_empty(), [] if want_tuples else None)

        # 2. Encadenamiento de izquierda a derecha
        anchors = self.index.extract_positions(intervals[0])
        levels = [anchors]
        steps = []
        scratch: dict[int, BlockFilter] = {}
        for j, gap in enumerate(pattern.gaps):
            anchors, step = self._combine(j, anchors, intervals[j + 1], pattern, strategy, scratch)
            steps.append(step)
            levels.append(anchors)
            if anchors.size == 0:
                break

        # 3. Extremos ascendentes
        endpoints = _sorted(anchors) if len(levels) == pattern.k else _empty()
        result = MatchResult(endpoints, steps=steps)

        # 4. Tuplas (opcional)
        if want_tuples:
            if endpoints.size == 0:
                result.tuples = []
            else:
                levels[0] = _sorted(levels[0])
                levels[-1] = endpoints
                result.tuples, result.truncated = enumerate_tuples(levels, pattern.gaps, tuple_cap)
        return result

    def _combine(self, j, anchors, iv_next, pattern, strategy, scratch):
        gap = pattern.gaps[j]
        lo, hi = gap.min_gap, gap.max_gap
        occ_a, occ_b = int(anchors.size), iv_next.width
        # En j == 0 las anclas son todas las ocurrencias de p_0
        complete = j == 0

        kind = strategy
        if kind is StrategyKind.AUTO:
            kind = plan_pair(occ_a, occ_b, len(pattern.subpatterns[j + 1]), lo, hi, self.c_sort)

        step = PairStep(j, kind, occ_a, occ_b, occ_a, occ_b, 0)

        if kind is StrategyKind.BASELINE:
            a = anchors if is_sorted(anchors) else np.sort(anchors, kind="quicksort")
            b = np.sort(self.index.extract_positions(iv_next), kind="quicksort")
            out = intersect_gapped(a, b, lo, hi)

        elif kind is StrategyKind.RADIX:
            a = _sorted(anchors)
            b = radix_sort(self.index.extract_positions(iv_next))
            out = intersect_gapped(a, b, lo, hi)

        elif kind is StrategyKind.FILTER:
            b = self.index.extract_positions(iv_next)
            bs = self.block_size_for(gap)
            f = scratch.get(bs)
            if f is None:
                f = scratch[bs] = BlockFilter(self.index.n, bs)
            if occ_a <= occ_b:
                a, b = filter_pair(anchors, b, Direction.FORWARD, lo, hi, bs, self.index.n, f)
            else:
                b, a = filter_pair(b, anchors, Direction.BACKWARD, lo, hi, bs, self.index.n, f)
            step.kept_anchors, step.kept_next, step.block_size = int(a.size), int(b.size), bs
            out = intersect_gapped(_sorted(a), radix_sort(b), lo, hi)

        elif kind is StrategyKind.TEXTCHECK:
            text = self.index.text_array
            if occ_a <= occ_b:
                out = text_check_forward(anchors, text, pattern.subpatterns[j + 1], lo, hi)
                step.kept_next = int(out.size)
            else:
                b = self.index.extract_positions(iv_next)
                out = text_check_backward(b, text, pattern.subpatterns[j], lo, hi)
                step.kept_next = int(out.size)
                if not complete:
                    out = intersect_gapped(_sorted(anchors), out, lo, hi)

        else:
            raise ValueError(f"estrategia no soportada: {kind}")

        step.out = int(out.size)
        return out, step


def _prune_levels(levels: list[np.ndarray], gaps) -> list[np.ndarray]:
    """Pasada hacia atrás: deja en cada nivel solo posiciones con sucesor válido."""
    kept = list(levels)
    for j in range(len(gaps) - 1, -1, -1):
        gap = gaps[j]
        # i sobrevive si existe e en el nivel j+1 con e-Δ <= i <= e-δ
        shifted = kept[j + 1] - gap.max_gap
        kept[j] = intersect_gapped(shifted, kept[j], 0, gap.max_gap - gap.min_gap)
    return kept


def _walk(levels, gaps, level, prefix):
    if level == len(levels):
        yield prefix
        return
    if level == 0:
        candidates = levels[0]
    else:
        gap = gaps[level - 1]
        last = prefix[-1]
        row = levels[level]
        lo = np.searchsorted(row, last + gap.min_gap, side="left")
        hi = np.searchsorted(row, last + gap.max_gap, side="right")
        candidates = row[lo:hi]
    for pos in candidates.tolist():
        yield from _walk(levels, gaps, level + 1, prefix + (pos,))


def enumerate_tuples(levels, gaps, cap: int | None = None) -> tuple[list[tuple[int, ...]], bool]:
    """k-tuplas en orden lexicográfico, hasta `cap`. Devuelve (tuplas, truncado)."""
    kept = _prune_levels([_sorted(as_positions(lv)) for lv in levels], gaps)
    walker = _walk(kept, gaps, 0, ())
    if cap is None:
        return list(walker), False
    found = list(islice(walker, cap + 1))
    return found[:cap], len(found) > cap


def search(
    index: SuffixIndex,
    pattern: VlgPattern,
    strategy: StrategyKind = StrategyKind.AUTO,
    want_tuples: bool = False,
    tuple_cap: int | None = None,
    **matcher_options,
) -> MatchResult:
    return VlgMatcher(index, **matcher_options).search(pattern, strategy, want_tuples, tuple_cap)
