"""
Núcleos compilados con numba: radix sort LSD, intersección con saltos, KMP y
escaneo de ventanas de texto. Las envolturas normalizan la entrada a int64/uint8
contiguos antes de entrar al código compilado.
"""
import numpy as np
from numba import njit


def as_positions(values) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=np.int64)


def as_bytes(values) -> np.ndarray:
    if isinstance(values, np.ndarray):
        return np.ascontiguousarray(values, dtype=np.uint8)
    return np.frombuffer(bytes(values), dtype=np.uint8)


def is_sorted(a: np.ndarray) -> bool:
    return a.size < 2 or bool(np.all(a[:-1] <= a[1:]))


# --- Radix sort (base 256) ---


@njit(cache=True)
def _counting_pass(src, dst, shift):
    count = np.zeros(257, dtype=np.int64)
    for x in src:
        count[((x >> shift) & 0xFF) + 1] += 1
    for d in range(256):
        count[d + 1] += count[d]
    # Recorrido hacia adelante sobre offsets iniciales: estable
    for x in src:
        d = (x >> shift) & 0xFF
        dst[count[d]] = x
        count[d] += 1


@njit(cache=True)
def _lsd_radix_sort(a, passes):
    src = a.copy()
    dst = np.empty_like(src)
    for p in range(passes):
        _counting_pass(src, dst, 8 * p)
        src, dst = dst, src
    return src


def radix_sort(positions) -> np.ndarray:
    """
    LSD estable por bytes. Se omiten las pasadas altas que son constantes
    dado el máximo del arreglo.
    """
    a = as_positions(positions)
    if a.size < 2:
        return a.copy()
    if a.min() < 0:
        raise ValueError("radix_sort solo admite posiciones no negativas")
    passes = max(1, (int(a.max()).bit_length() + 7) // 8)
    return _lsd_radix_sort(a, passes)


# --- Intersección con saltos (bucle de SA-scan) ---


@njit(cache=True)
def _intersect_gapped(a, b, lo, hi):
    out = np.empty(b.size, dtype=np.int64)
    cnt = 0
    j = 0
    m2 = b.size
    for i in range(a.size):
        if j >= m2:
            break
        first = a[i] + lo
        last = a[i] + hi
        while j < m2 and b[j] < first:
            j += 1
        # Un b consumido por una ventana no se vuelve a reportar
        while j < m2 and b[j] <= last:
            out[cnt] = b[j]
            cnt += 1
            j += 1
    return out[:cnt]


def intersect_gapped(a_sorted, b_sorted, min_gap: int, max_gap: int) -> np.ndarray:
    """{j in B : existe i in A con i+min_gap <= j <= i+max_gap}, ascendente y sin duplicados."""
    return _intersect_gapped(as_positions(a_sorted), as_positions(b_sorted), min_gap, max_gap)


# --- Knuth-Morris-Pratt ---


@njit(cache=True)
def _failure_function(needle):
    # fail[i] = largo del borde propio más largo de needle[:i+1]
    m = needle.size
    fail = np.zeros(m, dtype=np.int64)
    k = 0
    for i in range(1, m):
        while k > 0 and needle[i] != needle[k]:
            k = fail[k - 1]
        if needle[i] == needle[k]:
            k += 1
        fail[i] = k
    return fail


@njit(cache=True)
def _kmp_scan(hay, start, stop, needle, fail, out, cnt):
    # Escribe en out[cnt:] las posiciones absolutas de needle en hay[start:stop]
    m = needle.size
    k = 0
    for p in range(start, stop):
        c = hay[p]
        while k > 0 and c != needle[k]:
            k = fail[k - 1]
        if c == needle[k]:
            k += 1
        if k == m:
            out[cnt] = p - m + 1
            cnt += 1
            k = fail[k - 1]
    return cnt


@njit(cache=True)
def _kmp_search(hay, needle):
    fail = _failure_function(needle)
    out = np.empty(max(0, hay.size - needle.size + 1), dtype=np.int64)
    cnt = _kmp_scan(hay, 0, hay.size, needle, fail, out, 0)
    return out[:cnt]


def kmp_search(hay, needle) -> np.ndarray:
    """Todas las ocurrencias (con solapamiento) de needle en hay, ascendentes."""
    needle = as_bytes(needle)
    if needle.size == 0:
        raise ValueError("kmp_search: needle vacío")
    return _kmp_search(as_bytes(hay), needle)


@njit(cache=True)
def _scan_windows(text, bases, needle, lo_off, hi_off):
    """
    Ocurrencias de needle cuyo inicio cae en algún rango [base+lo_off, base+hi_off]
    (recortado a [0, n-m]). `bases` ascendente: los rangos se fusionan y cada byte
    del texto se escanea una sola vez.
    """
    n = text.size
    m = needle.size
    starts = np.empty(bases.size, dtype=np.int64)
    ends = np.empty(bases.size, dtype=np.int64)
    r = 0
    for base in bases:
        s = max(base + lo_off, 0)
        e = min(base + hi_off, n - m)
        if s > e:
            continue
        if r > 0 and s <= ends[r - 1] + 1:
            if e > ends[r - 1]:
                ends[r - 1] = e
        else:
            starts[r] = s
            ends[r] = e
            r += 1

    total = 0
    for q in range(r):
        total += ends[q] - starts[q] + 1
    out = np.empty(total, dtype=np.int64)
    fail = _failure_function(needle)
    cnt = 0
    for q in range(r):
        cnt = _kmp_scan(text, starts[q], ends[q] + m, needle, fail, out, cnt)
    return out[:cnt]


def scan_windows(text, bases_sorted, needle, lo_off: int, hi_off: int) -> np.ndarray:
    needle = as_bytes(needle)
    if needle.size == 0:
        raise ValueError("scan_windows: needle vacío")
    return _scan_windows(as_bytes(text), as_positions(bases_sorted), needle, lo_off, hi_off)
