import re
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from index_core import settings
from index_core.errors import PatternSyntaxError

GAP_MODES = ("start", "end")

# '[' δ ',' Δ ']' con espacios opcionales dentro de los corchetes
_GAP_RE = re.compile(r"\[\s*(\d+)\s*,\s*(\d+)\s*\]")
_HEX = set(string.hexdigits)
_SPECIAL = b"[]\\"


@dataclass(frozen=True)
class GapConstraint:
    """Distancia permitida inicio-a-inicio entre subpatrones consecutivos."""

    min_gap: int
    max_gap: int

    def __post_init__(self):
        if self.min_gap < 0:
            raise ValueError(f"salto mínimo negativo: {self.min_gap}")
        if self.min_gap > self.max_gap:
            raise ValueError(f"δ > Δ: {self.min_gap} > {self.max_gap}")

    @property
    def width(self) -> int:
        return self.max_gap - self.min_gap


@dataclass(frozen=True)
class VlgPattern:
    subpatterns: tuple[bytes, ...]
    gaps: tuple[GapConstraint, ...]

    def __post_init__(self):
        object.__setattr__(self, "subpatterns", tuple(bytes(p) for p in self.subpatterns))
        object.__setattr__(self, "gaps", tuple(self.gaps))
        if not self.subpatterns:
            raise ValueError("un patrón VLG necesita al menos un subpatrón (k=0)")
        if any(len(p) == 0 for p in self.subpatterns):
            raise ValueError("subpatrón vacío")
        if len(self.gaps) != len(self.subpatterns) - 1:
            raise ValueError(
                f"se esperaban {len(self.subpatterns) - 1} saltos, hay {len(self.gaps)}"
            )

    @property
    def k(self) -> int:
        return len(self.subpatterns)

    @property
    def lengths(self) -> list[int]:
        return [len(p) for p in self.subpatterns]


def parse_pattern(source: str, gap_mode: str = "start") -> VlgPattern:
    """
    Gramática: pattern := subpat (gap subpat)* ; gap := '[' int ',' int ']'.
    Escapes: \\[ \\] \\\\ y \\xNN. En gap_mode='end' el salto se mide desde el
    final de p_i y se convierte a inicio-a-inicio sumando m_i.
    """
    if gap_mode not in GAP_MODES:
        raise ValueError(f"gap_mode inválido: {gap_mode!r} (válidos: {GAP_MODES})")
    if not source:
        raise PatternSyntaxError("patrón vacío", 0)

    subpatterns: list[bytes] = []
    raw_gaps: list[tuple[int, int]] = []
    current = bytearray()
    pos = 0

    while pos < len(source):
        ch = source[pos]
        if ch == "\\":
            if pos + 1 >= len(source):
                raise PatternSyntaxError("escape colgante al final del patrón", pos)
            nxt = source[pos + 1]
            if nxt in "[]\\":
                current += nxt.encode()
                pos += 2
            elif nxt == "x":
                digits = source[pos + 2 : pos + 4]
                if len(digits) != 2 or not set(digits) <= _HEX:
                    raise PatternSyntaxError("escape \\xNN mal formado", pos)
                current.append(int(digits, 16))
                pos += 4
            else:
                raise PatternSyntaxError(f"escape desconocido '\\{nxt}'", pos)
        elif ch == "[":
            if not current:
                raise PatternSyntaxError("subpatrón vacío antes del salto", pos)
            match = _GAP_RE.match(source, pos)
            if match is None:
                raise PatternSyntaxError("expresión de salto mal formada", pos)
            lo, hi = int(match.group(1)), int(match.group(2))
            if lo > hi:
                raise PatternSyntaxError(f"δ > Δ en el salto [{lo},{hi}]", pos)
            subpatterns.append(bytes(current))
            raw_gaps.append((lo, hi))
            current = bytearray()
            pos = match.end()
        elif ch == "]":
            raise PatternSyntaxError("']' sin '[' de apertura", pos)
        else:
            current += ch.encode("utf-8")
            pos += 1

    if not current:
        raise PatternSyntaxError("subpatrón vacío al final del patrón", len(source))
    subpatterns.append(bytes(current))

    # Representación interna siempre inicio-a-inicio
    gaps = []
    for i, (lo, hi) in enumerate(raw_gaps):
        shift = len(subpatterns[i]) if gap_mode == "end" else 0
        gaps.append(GapConstraint(lo + shift, hi + shift))
    return VlgPattern(tuple(subpatterns), tuple(gaps))


def _escape(sub: bytes) -> str:
    out = []
    for b in sub:
        if b in _SPECIAL:
            out.append("\\" + chr(b))
        elif 0x20 <= b < 0x7F:
            out.append(chr(b))
        else:
            out.append(f"\\x{b:02x}")
    return "".join(out)


def render_pattern(pattern: VlgPattern, gap_mode: str = "start") -> str:
    """Inverso de parse_pattern."""
    if gap_mode not in GAP_MODES:
        raise ValueError(f"gap_mode inválido: {gap_mode!r}")
    parts = [_escape(pattern.subpatterns[0])]
    for i, gap in enumerate(pattern.gaps):
        shift = len(pattern.subpatterns[i]) if gap_mode == "end" else 0
        lo, hi = gap.min_gap - shift, gap.max_gap - shift
        if lo < 0:
            raise ValueError(f"el salto {i} no es representable en modo 'end'")
        parts.append(f"[{lo},{hi}]")
        parts.append(_escape(pattern.subpatterns[i + 1]))
    return "".join(parts)


def read_pattern_file(path, gap_mode: str = "start") -> list[VlgPattern]:
    """Un patrón por línea (UTF-8); '#' inicia comentario; líneas vacías se ignoran."""
    patterns = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            patterns.append(parse_pattern(line, gap_mode))
        except PatternSyntaxError as e:
            raise PatternSyntaxError(e.message, e.offset, line=line_no) from e
    return patterns


def _window_keys(text: bytes, m: int) -> np.ndarray:
    """
    Una clave por ventana de largo m. Para m <= 8 se empaqueta big-endian en
    uint64 (orden numérico == orden lexicográfico); si no, se usa np.void.
    """
    arr = np.frombuffer(text, dtype=np.uint8)
    windows = np.lib.stride_tricks.sliding_window_view(arr, m)
    if m <= 8:
        keys = np.zeros(len(windows), dtype=np.uint64)
        for j in range(m):
            keys |= windows[:, j].astype(np.uint64) << np.uint64(8 * (m - 1 - j))
        return keys
    return np.ascontiguousarray(windows).view(np.dtype((np.void, m))).ravel()


def _key_to_bytes(key, m: int) -> bytes:
    if m <= 8:
        return int(key).to_bytes(m, "big")
    return bytes(key)


def top_frequent_substrings(text: bytes, m: int, count: int, with_counts: bool = False) -> list:
    """
    Las `count` subcadenas de largo m más frecuentes (con solapamiento).
    Orden: frecuencia descendente, empates por orden lexicográfico ascendente.
    """
    if m < 1:
        raise ValueError(f"largo de subcadena inválido: {m}")
    if count < 1:
        raise ValueError(f"count debe ser >= 1: {count}")
    if m > len(text):
        raise ValueError(f"m={m} es mayor que el texto (n={len(text)})")

    keys, freqs = np.unique(_window_keys(text, m), return_counts=True)
    # np.unique devuelve claves en orden lexicográfico; lexsort es estable
    order = np.lexsort((np.arange(len(keys)), -freqs))[:count]

    if with_counts:
        return [(_key_to_bytes(keys[i], m), int(freqs[i])) for i in order]
    return [_key_to_bytes(keys[i], m) for i in order]


def generate_patterns(
    text: bytes,
    k: int,
    m: int,
    gap: GapConstraint,
    how_many: int,
    seed: int | Sequence[int],
    pool: list[bytes] | None = None,
    pool_size: int = None,
) -> list[VlgPattern]:
    """
    Patrones sintéticos: k subpatrones sorteados uniformemente (con reemplazo)
    del pool de las subcadenas más frecuentes; todos los saltos = `gap`.
    PRNG: numpy PCG64, reproducible entre plataformas para la misma semilla.
    """
    if k < 1 or m < 1 or how_many < 1:
        raise ValueError("k, m y how_many deben ser positivos")
    if pool is None:
        pool_size = settings.POOL_SIZE if pool_size is None else pool_size
        pool = top_frequent_substrings(text, m, pool_size)
    if not pool:
        raise ValueError("pool de subpatrones vacío")

    rng = np.random.Generator(np.random.PCG64(seed))
    picks = rng.integers(0, len(pool), size=(how_many, k))
    gaps = (gap,) * (k - 1)
    return [VlgPattern(tuple(pool[i] for i in row), gaps) for row in picks.tolist()]
