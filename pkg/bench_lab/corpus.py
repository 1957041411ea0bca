import argparse
import os
import string
import sys

import numpy as np

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from index_core.console import log

# Símbolos legibles primero; el resto de bytes solo para alfabetos > 94
_READABLE = (string.ascii_lowercase + string.ascii_uppercase + string.digits + string.punctuation).encode()
SYMBOLS = np.frombuffer(_READABLE + bytes(b for b in range(256) if b not in _READABLE), dtype=np.uint8)


def generate_corpus(
    size: int,
    alphabet_size: int = 20,
    seed: int = 0,
    zipf_exponent: float = 1.1,
    vocabulary: int = 4096,
    repetitiveness: float = 0.0,
    segment: int = 4096,
) -> bytes:
    """
    Texto sintético reproducible: tokens de 3 símbolos con frecuencias Zipf.
    `repetitiveness` en [0, 1] es la fracción del texto sobrescrita con copias
    de segmentos anteriores (imita colecciones tipo Kernel).
    """
    if size < 0:
        raise ValueError("size debe ser >= 0")
    if not 1 <= alphabet_size <= 256:
        raise ValueError(f"alphabet_size fuera de rango: {alphabet_size}")
    if not 0.0 <= repetitiveness <= 1.0:
        raise ValueError(f"repetitiveness fuera de [0, 1]: {repetitiveness}")
    if size == 0:
        return b""

    rng = np.random.Generator(np.random.PCG64(seed))

    # 1. Vocabulario de 3-gramas y pesos Zipf por rango
    vocab = SYMBOLS[rng.integers(0, alphabet_size, size=(vocabulary, 3))]
    weights = 1.0 / np.arange(1, vocabulary + 1, dtype=np.float64) ** zipf_exponent
    weights /= weights.sum()

    # 2. Secuencia de tokens
    tokens = rng.choice(vocabulary, size=-(-size // 3), p=weights)
    text = vocab[tokens].ravel()[:size].copy()

    # 3. Repetitividad: copiar segmentos previos hacia adelante
    if repetitiveness > 0 and size > 2 * segment:
        copies = int(repetitiveness * size / segment)
        for _ in range(copies):
            dst = int(rng.integers(segment, size - segment + 1))
            src = int(rng.integers(0, dst - segment + 1))
            text[dst : dst + segment] = text[src : src + segment]

    return text.tobytes()


def main():
    parser = argparse.ArgumentParser(description="Generador de corpus sintético")
    parser.add_argument("--size", type=int, default=64 * 1024 * 1024)
    parser.add_argument("--alphabet", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--zipf", type=float, default=1.1)
    parser.add_argument("--repetitiveness", type=float, default=0.0)
    parser.add_argument("-o", "--out", required=True)
    args = parser.parse_args()

    log(f"🏭 Generando corpus de {args.size:,} bytes (σ={args.alphabet}, semilla={args.seed})...")
    text = generate_corpus(
        args.size, args.alphabet, args.seed, args.zipf, repetitiveness=args.repetitiveness
    )
    with open(args.out, "wb") as f:
        f.write(text)
    log(f"✅ Guardado: {args.out}")


if __name__ == "__main__":
    main()
