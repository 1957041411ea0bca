import bisect
import struct
from dataclasses import dataclass, field
from pathlib import Path

import crcmod.predefined
import numpy as np
from pydivsufsort import divsufsort

from index_core import settings
from index_core.errors import (
    IndexCapacityError,
    IndexChecksumError,
    IndexFormatError,
    IndexTruncatedError,
)

MAX_TEXT_LEN = 1 << 40

# Formato del archivo (little-endian):
# magic(8) | ancho(1) | reservado(7) | n(u64) | texto(n) | SA(n*ancho) | crc64(u64)
MAGIC = b"VLGIDX01"
HEADER = struct.Struct("<8sB7sQ")
TRAILER = struct.Struct("<Q")
VALID_WIDTHS = (5, 8)
CRC_NAME = "crc-64-we"

# Entradas del SA por bloque al escribir/verificar (acota memoria temporal)
CHUNK_ENTRIES = 1 << 20


@dataclass(frozen=True)
class SaInterval:
    """Rango [start, end] (inclusivo) de rangos del SA. Vacío si end < start."""

    start: int
    end: int

    @property
    def width(self) -> int:
        return max(0, self.end - self.start + 1)

    @property
    def is_empty(self) -> bool:
        return self.end < self.start


EMPTY_INTERVAL = SaInterval(0, -1)


def build_index(text: bytes) -> np.ndarray:
    """
    Arreglo de sufijos de `text` (int64).
    Sin centinela: un sufijo que es prefijo de otro ordena primero.
    """
    n = len(text)
    if n >= MAX_TEXT_LEN:
        raise IndexCapacityError(f"texto de {n} bytes excede el límite de 2^40")
    if n == 0:
        return np.empty(0, dtype=np.int64)

    sa = divsufsort(np.frombuffer(text, dtype=np.uint8).copy())
    return np.asarray(sa, dtype=np.int64)


def find_interval(sa: np.ndarray, text: bytes, sub: bytes) -> SaInterval:
    """Dos búsquedas binarias (cota inferior/superior), cada sonda compara a lo sumo |sub| bytes."""
    if not sub:
        raise ValueError("el subpatrón no puede ser vacío")

    m = len(sub)

    def prefix(pos):
        return text[pos : pos + m]

    start = bisect.bisect_left(sa, sub, key=prefix)
    stop = bisect.bisect_right(sa, sub, lo=start, key=prefix)
    if start == stop:
        return EMPTY_INTERVAL
    return SaInterval(start, stop - 1)


def extract_positions(sa: np.ndarray, iv: SaInterval) -> np.ndarray:
    """Copia SA[start..end] en orden del SA (no ordenado por posición)."""
    if iv.is_empty:
        return np.empty(0, dtype=np.int64)
    return sa[iv.start : iv.end + 1].copy()


def _sa_chunks(sa: np.ndarray, width: int):
    for lo in range(0, len(sa), CHUNK_ENTRIES):
        block = sa[lo : lo + CHUNK_ENTRIES].astype("<u8")
        yield block.view(np.uint8).reshape(-1, 8)[:, :width].tobytes()


def save_index(text: bytes, sa: np.ndarray, destination, width: int = None) -> int:
    """Escribe el índice y devuelve los bytes escritos."""
    width = settings.INDEX_WIDTH if width is None else width
    if width not in VALID_WIDTHS:
        raise ValueError(f"ancho de posición inválido: {width} (válidos: {VALID_WIDTHS})")
    n = len(text)
    if n >= MAX_TEXT_LEN:
        raise IndexCapacityError(f"texto de {n} bytes excede el límite de 2^40")
    if len(sa) != n:
        raise ValueError("el SA no corresponde al texto")

    crc = crcmod.predefined.Crc(CRC_NAME)
    written = 0
    with open(destination, "wb") as f:
        for piece in (HEADER.pack(MAGIC, width, bytes(7), n), bytes(text)):
            crc.update(piece)
            f.write(piece)
            written += len(piece)
        for piece in _sa_chunks(sa, width):
            crc.update(piece)
            f.write(piece)
            written += len(piece)
        f.write(TRAILER.pack(crc.crcValue))
    return written + TRAILER.size


def load_index(source) -> tuple[bytes, np.ndarray]:
    data = Path(source).read_bytes()

    # 1. Cabecera
    if len(data) >= len(MAGIC) and data[: len(MAGIC)] != MAGIC:
        raise IndexFormatError("magic inválido: no es un índice VLGIDX01")
    if len(data) < HEADER.size:
        raise IndexTruncatedError(f"archivo truncado: {len(data)} bytes, cabecera incompleta")
    _, width, reserved, n = HEADER.unpack_from(data, 0)
    if width not in VALID_WIDTHS:
        raise IndexFormatError(f"ancho de posición inválido en cabecera: {width}")
    if reserved != bytes(7):
        raise IndexFormatError("bytes reservados distintos de cero")
    if n >= MAX_TEXT_LEN:
        raise IndexFormatError(f"n={n} fuera del límite del formato")

    # 2. Tamaño esperado
    body_end = HEADER.size + n + n * width
    expected = body_end + TRAILER.size
    if len(data) < expected:
        raise IndexTruncatedError(f"archivo truncado: {len(data)} de {expected} bytes")
    if len(data) > expected:
        raise IndexFormatError(f"{len(data) - expected} bytes sobrantes tras el checksum")

    # 3. Checksum (por bloques)
    crc = crcmod.predefined.Crc(CRC_NAME)
    step = CHUNK_ENTRIES * 8
    for lo in range(0, body_end, step):
        crc.update(data[lo : min(lo + step, body_end)])
    (stored,) = TRAILER.unpack_from(data, body_end)
    if stored != crc.crcValue:
        raise IndexChecksumError(f"checksum no coincide: {stored:#018x} != {crc.crcValue:#018x}")

    # 4. Decodificación
    text = data[HEADER.size : HEADER.size + n]
    raw = np.frombuffer(data, dtype=np.uint8, count=n * width, offset=HEADER.size + n)
    full = np.zeros((n, 8), dtype=np.uint8)
    full[:, :width] = raw.reshape(n, width)
    sa = full.view("<u8").reshape(n).astype(np.int64)
    return text, sa


@dataclass
class SuffixIndex:
    """Texto + arreglo de sufijos. Inmutable tras construirse; seguro para lectores concurrentes."""

    text: bytes
    sa: np.ndarray
    text_array: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.text = bytes(self.text)
        self.text_array = np.frombuffer(self.text, dtype=np.uint8)

    @property
    def n(self) -> int:
        return len(self.text)

    @classmethod
    def build(cls, text: bytes) -> "SuffixIndex":
        return cls(text, build_index(text))

    @classmethod
    def load(cls, source) -> "SuffixIndex":
        text, sa = load_index(source)
        return cls(text, sa)

    def save(self, destination, width: int = None) -> int:
        return save_index(self.text, self.sa, destination, width)

    def find_interval(self, sub: bytes) -> SaInterval:
        return find_interval(self.sa, self.text, sub)

    def extract_positions(self, iv: SaInterval) -> np.ndarray:
        return extract_positions(self.sa, iv)

    def count(self, sub: bytes) -> int:
        return self.find_interval(sub).width
