import numpy as np
from numba import njit

from index_core import settings
from match_engine.kernels import as_positions

ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
ONE = np.uint64(1)


@njit(cache=True)
def _set_range(words, first, last):
    # Bits first..last inclusive, una palabra de 64 a la vez
    w0 = first >> 6
    w1 = last >> 6
    lo_mask = ALL_ONES << np.uint64(first & 63)
    hi_mask = ALL_ONES >> np.uint64(63 - (last & 63))
    if w0 == w1:
        words[w0] |= lo_mask & hi_mask
        return
    words[w0] |= lo_mask
    for w in range(w0 + 1, w1):
        words[w] = ALL_ONES
    words[w1] |= hi_mask


@njit(cache=True)
def _mark(words, positions, lo_off, hi_off, n, shift):
    last_pos = n - 1
    for p in positions:
        s = max(p + lo_off, 0)
        e = min(p + hi_off, last_pos)
        if s > e:
            continue
        _set_range(words, s >> shift, e >> shift)


@njit(cache=True)
def _prune(words, candidates, shift):
    out = np.empty(candidates.size, dtype=np.int64)
    cnt = 0
    for p in candidates:
        blk = p >> shift
        if (words[blk >> 6] >> np.uint64(blk & 63)) & ONE:
            out[cnt] = p
            cnt += 1
    return out[:cnt]


class BlockFilter:
    """
    Bitvector de ceil(n/b) bits; el bit i cubre las posiciones i*b .. (i+1)*b-1
    del texto (recortadas a [0, n)). b es potencia de dos: la división es un shift.
    Un solo escritor por instancia.
    """

    def __init__(self, n: int, block_size: int):
        if block_size < 1 or block_size & (block_size - 1):
            raise ValueError(f"block_size debe ser potencia de dos >= 1: {block_size}")
        self.n = n
        self.block_size = block_size
        self.shift = block_size.bit_length() - 1
        self.num_blocks = (n + block_size - 1) >> self.shift
        self.words = np.zeros((self.num_blocks + 63) >> 6, dtype=np.uint64)

    def mark_forward(self, positions, min_gap: int, max_gap: int) -> None:
        """Marca los bloques de i+min_gap .. i+max_gap para cada posición i."""
        _mark(self.words, as_positions(positions), min_gap, max_gap, self.n, self.shift)

    def mark_backward(self, positions, min_gap: int, max_gap: int) -> None:
        """Marca los bloques de i-max_gap .. i-min_gap (recortado en 0)."""
        _mark(self.words, as_positions(positions), -max_gap, -min_gap, self.n, self.shift)

    def prune(self, candidates) -> np.ndarray:
        """Conserva, en el orden de entrada, los candidatos cuyo bloque está marcado."""
        return _prune(self.words, as_positions(candidates), self.shift)

    def clear(self) -> None:
        self.words.fill(0)

    def set_blocks(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return np.flatnonzero(bits[: self.num_blocks])

    def count(self) -> int:
        return int(self.set_blocks().size)


def default_block_size(
    n: int,
    min_gap: int,
    max_gap: int,
    l3_budget: int = None,
    max_bits_per_occ: int = None,
) -> int:
    """
    Menor potencia de dos tal que el filtro cabe en el presupuesto de caché y
    cada ocurrencia marca a lo sumo `max_bits_per_occ` bits.
    """
    l3_budget = settings.L3_BUDGET_BYTES if l3_budget is None else l3_budget
    max_bits_per_occ = settings.MAX_BITS_PER_OCC if max_bits_per_occ is None else max_bits_per_occ
    max_bits_per_occ = max(1, max_bits_per_occ)
    budget_bits = max(1, l3_budget * 8)
    width = max_gap - min_gap

    b = 1
    while -(-n // b) > budget_bits or -(-width // b) > max_bits_per_occ:
        b <<= 1
    return b
