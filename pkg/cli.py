import argparse
import sys
import time

import numpy as np
from dotenv import set_key

from bench_lab.harness import calibrate_c_sort, load_bench_config, run_bench
from bench_lab.report import emit_report
from index_core import settings
from index_core.console import log
from index_core.errors import (
    BenchConfigError,
    GapConstraintError,
    IndexCapacityError,
    IndexFileError,
    PatternSyntaxError,
)
from index_core.pattern import GAP_MODES, parse_pattern, read_pattern_file
from index_core.text_index import VALID_WIDTHS, SuffixIndex
from match_engine.engine import StrategyKind, VlgMatcher
from match_engine.oracle import oracle_search

# Códigos de salida (convención grep)
EXIT_OK = 0
EXIT_NO_MATCH = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_VERIFY = 4

STRATEGIES = [s.value for s in StrategyKind]


def _fail(msg: str, code: int) -> int:
    print(f"❌ {msg}", file=sys.stderr)
    return code


# --- build ---


def cmd_build(args) -> int:
    with open(args.text, "rb") as f:
        text = f.read()
    start = time.perf_counter()
    index = SuffixIndex.build(text)
    written = index.save(args.out, args.width)
    elapsed = time.perf_counter() - start
    print(f"✅ n={index.n} bytes={written} tiempo={elapsed:.3f}s -> {args.out}", file=sys.stderr)
    return EXIT_OK


# --- search ---


def _trace(result) -> None:
    for s in result.steps:
        extra = f" b={s.block_size}" if s.block_size else ""
        print(
            f"🔎 salto {s.level}: {s.strategy.value}{extra} "
            f"entrada={s.anchors_in}+{s.occ_next} filtrado={s.kept_anchors}+{s.kept_next} salida={s.out}",
            file=sys.stderr,
        )
    print(f"🔎 etapas: {result.stage_counts}", file=sys.stderr)


def _verify(index, pattern, result, want_tuples: bool) -> bool:
    if any(g.min_gap == 0 for g in pattern.gaps):
        print("⚠️ el patrón admite distancia 0 (subpatrones con el mismo inicio)", file=sys.stderr)
    expected = oracle_search(index.text, pattern, want_tuples=want_tuples)
    ok = np.array_equal(result.endpoints, expected.endpoints)
    if ok and want_tuples and not result.truncated:
        ok = result.tuples == expected.tuples
    if ok:
        print("✅ verificado contra el oráculo", file=sys.stderr)
    else:
        print(
            f"❌ discrepancia con el oráculo: motor={result.endpoints.size} oráculo={expected.endpoints.size}",
            file=sys.stderr,
        )
    return ok


def _emit(result, args, prefix: str = "") -> None:
    out = sys.stdout
    if args.count:
        out.write(f"{prefix}{result.endpoints.size}\n")
    elif args.tuples:
        for t in result.tuples:
            out.write(prefix + "\t".join(str(p) for p in t) + "\n")
        if result.truncated:
            print(f"⚠️ tuplas truncadas en {args.tuple_cap}", file=sys.stderr)
    else:
        for pos in result.endpoints.tolist():
            out.write(f"{prefix}{pos}\n")


def cmd_search(args) -> int:
    if (args.pattern is None) == (args.pattern_file is None):
        return _fail("indique un patrón o --pattern-file (solo uno)", EXIT_USAGE)

    if args.pattern_file is not None:
        patterns = read_pattern_file(args.pattern_file, args.gap_mode)
    else:
        patterns = [parse_pattern(args.pattern, args.gap_mode)]

    index = SuffixIndex.load(args.index)
    matcher = VlgMatcher(index, block_size=args.block_size)

    any_match = False
    all_verified = True
    for no, pattern in enumerate(patterns, start=1):
        result = matcher.search(pattern, args.strategy, want_tuples=args.tuples, tuple_cap=args.tuple_cap)
        if args.trace:
            _trace(result)
        _emit(result, args, prefix=f"{no}\t" if args.pattern_file is not None else "")
        any_match = any_match or result.endpoints.size > 0
        if args.verify:
            all_verified = _verify(index, pattern, result, args.tuples) and all_verified

    if not all_verified:
        return EXIT_VERIFY
    return EXIT_OK if any_match else EXIT_NO_MATCH


# --- bench ---


def cmd_bench(args) -> int:
    overrides = {
        "dataset": args.dataset,
        "k_values": args.k,
        "m_values": args.m,
        "gap_bands": args.bands,
        "patterns_per_cell": args.patterns,
        "strategies": args.strategies,
        "block_sizes": args.block_sizes,
        "seed": args.seed,
        "repetitions": args.repetitions,
        "pool_size": args.pool_size,
        "verify": True if args.verify else None,
    }
    config = load_bench_config(args.config, overrides)
    if config.text_path is None:
        config = config.model_copy(update={"text_path": args.index})

    log(f"📂 Cargando índice {args.index}...")
    index = SuffixIndex.load(args.index)
    records = run_bench(config, index)
    emit_report(records, args.out)

    if config.verify and not all(r.verified for r in records):
        return _fail("hay registros que no coinciden con el oráculo", EXIT_VERIFY)
    return EXIT_OK


# --- calibrate ---


def cmd_calibrate(args) -> int:
    index = SuffixIndex.load(args.index)
    log("⚖️ Calibrando c_sort...")
    measured = calibrate_c_sort(index)
    print(f"c_sort={measured['c_sort']:.3f}")
    log(
        f"📊 orden={measured['sort_ns_per_element']:.2f} ns/elem, "
        f"texto={measured['text_ns_per_byte']:.2f} ns/byte"
    )
    if args.write_env:
        set_key(args.write_env, "VLG_C_SORT", f"{measured['c_sort']:.3f}")
        log(f"💾 VLG_C_SORT guardado en {args.write_env}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli.py", description="Índice de sufijos y búsqueda VLG")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construye el índice de un archivo de texto")
    p.add_argument("text")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--width", type=int, choices=VALID_WIDTHS, default=settings.INDEX_WIDTH)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("search", help="busca un patrón VLG")
    p.add_argument("index")
    p.add_argument("pattern", nargs="?")
    p.add_argument("--pattern-file")
    p.add_argument("--gap-mode", choices=GAP_MODES, default="start")
    p.add_argument("--strategy", choices=STRATEGIES, default=StrategyKind.AUTO.value)
    p.add_argument("--block-size", type=int)
    p.add_argument("--tuples", action="store_true")
    p.add_argument("--tuple-cap", type=int)
    p.add_argument("--count", action="store_true")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="ejecuta el protocolo de benchmark")
    p.add_argument("index")
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--dataset")
    p.add_argument("--k")
    p.add_argument("--m")
    p.add_argument("--bands")
    p.add_argument("--patterns", type=int)
    p.add_argument("--strategies")
    p.add_argument("--block-sizes")
    p.add_argument("--seed", type=int)
    p.add_argument("--repetitions", type=int)
    p.add_argument("--pool-size", type=int)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("calibrate", help="mide la constante c_sort del planificador")
    p.add_argument("index")
    p.add_argument("--write-env", nargs="?", const=".env")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "block_size", None) is not None:
        b = args.block_size
        if b < 1 or b & (b - 1):
            return _fail(f"--block-size debe ser potencia de dos: {b}", EXIT_USAGE)
    if getattr(args, "tuple_cap", None) is not None and args.tuple_cap < 0:
        return _fail(f"--tuple-cap debe ser >= 0: {args.tuple_cap}", EXIT_USAGE)
    try:
        return args.func(args)
    except IndexCapacityError as e:
        return _fail(str(e), EXIT_CAPACITY)
    except (PatternSyntaxError, GapConstraintError, IndexFileError, BenchConfigError) as e:
        return _fail(str(e), EXIT_USAGE)
    except OSError as e:
        return _fail(f"error de E/S: {e}", EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
