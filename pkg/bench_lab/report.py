import json
import sys
from datetime import datetime
from pathlib import Path

import pandas as pd
import pytz

from bench_lab.harness import BenchRecord
from index_core.console import log

CSV_COLUMNS = list(BenchRecord.model_fields)
CELL_KEYS = ["dataset", "strategy", "k", "m", "gap_lo", "gap_hi", "block_size"]


def records_frame(records: list[BenchRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump() for r in records], columns=CSV_COLUMNS)


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """Una fila por celda: mediana y total de microsegundos, extremos y verificación."""
    if frame.empty:
        return pd.DataFrame(
            columns=CELL_KEYS + ["patterns", "median_micros", "total_ms", "endpoints", "all_verified"]
        )
    grouped = frame.groupby(CELL_KEYS, sort=True)
    summary = grouped.agg(
        patterns=("pattern_id", "count"),
        median_micros=("micros", "median"),
        total_micros=("micros", "sum"),
        endpoints=("endpoints", "sum"),
        all_verified=("verified", "all"),
    ).reset_index()
    summary["total_ms"] = summary.pop("total_micros") / 1000.0
    return summary


def table_view(summary: pd.DataFrame) -> pd.DataFrame:
    """Filas (k, m, estrategia) x columnas (dataset, banda): ms totales por celda."""
    view = summary.assign(band=summary["gap_lo"].astype(str) + "-" + summary["gap_hi"].astype(str))
    return view.pivot_table(
        index=["k", "m", "strategy"],
        columns=["dataset", "band"],
        values="total_ms",
        aggfunc="sum",
    )


def emit_report(records: list[BenchRecord], out_path) -> pd.DataFrame:
    """
    Escribe el CSV por patrón (una cabecera, CRLF), más '<base>_summary.csv' y
    '<base>_summary.json'. Devuelve el resumen por celda.
    """
    out_path = Path(out_path)
    frame = records_frame(records)
    frame.to_csv(out_path, index=False, lineterminator="\r\n")

    summary = summarize(frame)
    base = out_path.with_suffix("")
    summary.to_csv(f"{base}_summary.csv", index=False)

    payload = {
        "generated_at": datetime.now(pytz.utc).isoformat(),
        "rows": len(frame),
        "cells": len(summary),
        "datasets": sorted(frame["dataset"].unique().tolist()),
        "strategies": sorted(frame["strategy"].unique().tolist()),
        "all_verified": bool(frame["verified"].all()) if not frame.empty else False,
        "total_ms": float(summary["total_ms"].sum()) if not summary.empty else 0.0,
    }
    with open(f"{base}_summary.json", "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=4)

    log(f"💾 Reporte: {out_path} ({len(frame)} filas, {len(summary)} celdas)")
    if not summary.empty:
        print(table_view(summary).round(2).to_string(), file=sys.stderr)
    return summary


def read_report(path) -> list[BenchRecord]:
    frame = pd.read_csv(path, dtype={"dataset": str, "strategy": str}, keep_default_na=False)
    missing = set(CSV_COLUMNS) - set(frame.columns)
    if missing:
        raise ValueError(f"columnas faltantes en {path}: {sorted(missing)}")
    return [BenchRecord.model_validate(row) for row in frame[CSV_COLUMNS].to_dict("records")]
