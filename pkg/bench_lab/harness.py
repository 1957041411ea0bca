import time
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from index_core import settings
from index_core.console import log
from index_core.errors import BenchConfigError
from index_core.pattern import GapConstraint, generate_patterns, top_frequent_substrings
from index_core.text_index import SuffixIndex
from match_engine.block_filter import default_block_size
from match_engine.engine import StrategyKind, VlgMatcher
from match_engine.kernels import radix_sort, intersect_gapped, scan_windows
from match_engine.oracle import oracle_search

# Bandas de salto del protocolo: pequeña, mediana y grande
DEFAULT_GAP_BANDS = {
    "C_S": (100, 110),
    "C_M": (1000, 1100),
    "C_L": (10000, 11000),
}
FILTERING = (StrategyKind.FILTER, StrategyKind.AUTO)


def _split(value):
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return value


class BenchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    text_path: str | None = None
    dataset: str | None = None
    k_values: list[int] = Field(default=[2, 4, 8, 16, 32], min_length=1)
    m_values: list[int] = Field(default=[3, 5, 7], min_length=1)
    gap_bands: dict[str, tuple[int, int]] = Field(default=dict(DEFAULT_GAP_BANDS), min_length=1)
    patterns_per_cell: int = Field(default=20, ge=1)
    strategies: list[StrategyKind] = Field(
        default=[StrategyKind.BASELINE, StrategyKind.RADIX, StrategyKind.FILTER, StrategyKind.TEXTCHECK],
        min_length=1,
    )
    block_sizes: list[int] = []
    seed: int = 1
    repetitions: int = Field(default=3, ge=1)
    verify: bool = False
    pool_size: int = Field(default=settings.POOL_SIZE, ge=1)
    c_sort: float = Field(default=settings.C_SORT, gt=0)

    @field_validator("k_values", "m_values", "strategies", "block_sizes", mode="before")
    @classmethod
    def _comma_lists(cls, value):
        return _split(value)

    @field_validator("gap_bands", mode="before")
    @classmethod
    def _parse_bands(cls, value):
        # "C_S:100:110,C_M:1000:1100"
        if not isinstance(value, str):
            return value
        bands = {}
        for item in _split(value):
            parts = item.split(":")
            if len(parts) != 3:
                raise ValueError(f"banda mal formada: {item!r} (esperado nombre:δ:Δ)")
            bands[parts[0]] = (int(parts[1]), int(parts[2]))
        return bands

    @field_validator("gap_bands")
    @classmethod
    def _check_bands(cls, bands):
        for name, (lo, hi) in bands.items():
            if not 0 <= lo <= hi:
                raise ValueError(f"banda {name}: se requiere 0 <= δ <= Δ")
        return bands

    @field_validator("k_values", "m_values")
    @classmethod
    def _positive(cls, values):
        if any(v < 1 for v in values):
            raise ValueError("los valores deben ser positivos")
        return values

    @field_validator("block_sizes")
    @classmethod
    def _powers_of_two(cls, values):
        if any(b < 1 or b & (b - 1) for b in values):
            raise ValueError("los tamaños de bloque deben ser potencias de dos")
        return values

    @property
    def dataset_id(self) -> str:
        if self.dataset:
            return self.dataset
        return Path(self.text_path).stem if self.text_path else "dataset"


class BenchRecord(BaseModel):
    dataset: str
    strategy: str
    k: int
    m: int
    gap_lo: int
    gap_hi: int
    block_size: int
    pattern_id: int
    micros: int
    endpoints: int
    cand_stage0: int
    cand_stage1: int
    cand_stage2: int
    verified: bool


def load_bench_config(path=None, overrides: dict | None = None) -> BenchConfig:
    """Archivo plano key=value ('#' comenta) + overrides de la CLI; la CLI gana."""
    data = {}
    if path is not None:
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise BenchConfigError(f"no se pudo leer la configuración {path}: {e}") from e
        for line_no, line in enumerate(lines, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise BenchConfigError(f"{path}:{line_no}: se esperaba key=value")
            key, value = line.split("=", 1)
            data[key.strip()] = value.strip()

    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return BenchConfig.model_validate(data)
    except ValidationError as e:
        raise BenchConfigError(str(e)) from e


def _measure(matcher: VlgMatcher, pattern, strategy, repetitions: int):
    # Calentamiento sin medir; luego mediana de las repeticiones
    result = matcher.search(pattern, strategy)
    samples = []
    for _ in range(repetitions):
        start = time.perf_counter_ns()
        result = matcher.search(pattern, strategy)
        samples.append(time.perf_counter_ns() - start)
    return int(round(np.median(samples) / 1000)), result


def _block_sweep(config: BenchConfig, strategy: StrategyKind) -> list[int | None]:
    if strategy in FILTERING and config.block_sizes:
        return list(config.block_sizes)
    return [None]


def run_bench(config: BenchConfig, index: SuffixIndex) -> list[BenchRecord]:
    """
    Barrido (k, m, banda, estrategia[, b]) con los patrones sintéticos del
    protocolo. El tiempo excluye carga del índice y generación de patrones.
    """
    if index is None:
        raise BenchConfigError("falta el índice para el benchmark")

    n = index.n
    longest = max(hi for _, hi in config.gap_bands.values()) + max(config.m_values)
    if n < longest:
        raise BenchConfigError(f"texto demasiado corto: n={n} < Δ+m={longest}")

    dataset = config.dataset_id
    log(f"🧮 Calculando pools de las {config.pool_size} subcadenas más frecuentes...")
    pools = {m: top_frequent_substrings(index.text, m, config.pool_size) for m in config.m_values}

    records = []
    for band, (lo, hi) in config.gap_bands.items():
        gap = GapConstraint(lo, hi)
        for m in config.m_values:
            for k in config.k_values:
                patterns = generate_patterns(
                    index.text,
                    k,
                    m,
                    gap,
                    config.patterns_per_cell,
                    seed=[config.seed, k, m, lo, hi],
                    pool=pools[m],
                )
                expected = None
                if config.verify:
                    expected = [oracle_search(index.text, p, want_tuples=False).endpoints for p in patterns]

                for strategy in config.strategies:
                    for bs in _block_sweep(config, strategy):
                        matcher = VlgMatcher(index, c_sort=config.c_sort, block_size=bs)
                        if bs is not None:
                            block_col = bs
                        elif strategy in FILTERING:
                            block_col = default_block_size(n, lo, hi, matcher.l3_budget)
                        else:
                            block_col = 0

                        cell_micros = 0
                        for pid, pattern in enumerate(patterns):
                            micros, result = _measure(matcher, pattern, strategy, config.repetitions)
                            cell_micros += micros
                            stages = result.stage_counts
                            verified = expected is not None and bool(
                                np.array_equal(result.endpoints, expected[pid])
                            )
                            records.append(
                                BenchRecord(
                                    dataset=dataset,
                                    strategy=strategy.value,
                                    k=k,
                                    m=m,
                                    gap_lo=lo,
                                    gap_hi=hi,
                                    block_size=block_col,
                                    pattern_id=pid,
                                    micros=micros,
                                    endpoints=int(result.endpoints.size),
                                    cand_stage0=stages[0],
                                    cand_stage1=stages[1],
                                    cand_stage2=stages[2],
                                    verified=verified,
                                )
                            )
                        log(
                            f"⏱ {band} m={m} k={k} {strategy.value}"
                            + (f" b={block_col}" if block_col else "")
                            + f": {cell_micros / 1000:.1f} ms"
                        )
    return records


def calibrate_c_sort(index: SuffixIndex, sample_size: int = 200_000, window: int = 100_000, seed: int = 0) -> dict:
    """
    Mide costo del camino de ordenamiento por elemento y del chequeo de texto
    por byte; c_sort es su cociente.
    """
    n = index.n
    if n < 16:
        raise BenchConfigError("el texto es demasiado corto para calibrar")

    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.integers(0, n, size=sample_size, dtype=np.int64)
    b = rng.integers(0, n, size=sample_size, dtype=np.int64)
    window = min(window, n - 4)
    needle = index.text[:3]
    base = np.zeros(1, dtype=np.int64)

    def sort_path():
        intersect_gapped(radix_sort(a), radix_sort(b), 0, 16)

    def text_path():
        scan_windows(index.text_array, base, needle, 0, window)

    timings = {}
    for name, fn in (("sort", sort_path), ("text", text_path)):
        fn()
        samples = []
        for _ in range(5):
            start = time.perf_counter_ns()
            fn()
            samples.append(time.perf_counter_ns() - start)
        timings[name] = float(np.median(samples))

    sort_ns = timings["sort"] / (2 * sample_size)
    text_ns = timings["text"] / (window + 3)
    return {
        "sort_ns_per_element": sort_ns,
        "text_ns_per_byte": text_ns,
        "c_sort": sort_ns / text_ns,
    }
