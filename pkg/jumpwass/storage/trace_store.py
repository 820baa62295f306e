"""
CSV interface for traces: one row per k, 17 significant digits, empty
fields for absent values.
"""
import csv
import logging
from pathlib import Path
from typing import List, Optional, Union

from jumpwass.models.trace import TraceEntry, WassersteinTrace

logger = logging.getLogger(__name__)


def csv_header(num_modes: int) -> List[str]:
    return (
        ["k", "w_hat", "w_sq_hat", "w_oracle"]
        + [f"w_mode_{j}" for j in range(1, num_modes + 1)]
        + ["w_markov_exact", "mc_mean_sq", "mc_stderr"]
    )


def format_float(value: Optional[float]) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def _row(entry: TraceEntry, num_modes: int) -> List[str]:
    per_mode = entry.per_mode_w if entry.per_mode_w is not None else (None,) * num_modes
    return (
        [str(entry.k), format_float(entry.w_hat), format_float(entry.w_sq_hat), format_float(entry.w_oracle)]
        + [format_float(w) for w in per_mode]
        + [format_float(entry.w_markov_exact), format_float(entry.mc_mean_sq), format_float(entry.mc_stderr)]
    )


def emit_csv(trace: WassersteinTrace, path: Union[str, Path]) -> None:
    """Write the trace table as UTF-8 CSV, rows in ascending k"""
    path = Path(path)
    if len(trace) == 0:
        raise ValueError("cannot emit an empty trace")
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(csv_header(trace.num_modes))
        for entry in sorted(trace.entries, key=lambda e: e.k):
            writer.writerow(_row(entry, trace.num_modes))
    logger.info(f"Wrote {len(trace)} trace rows to {path}")


def _parse(value: str) -> Optional[float]:
    return float(value) if value != "" else None


def read_trace_csv(path: Union[str, Path]) -> WassersteinTrace:
    """Parse a CSV written by emit_csv back into a trace"""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        mode_columns = [f for f in fields if f.startswith("w_mode_")]
        entries = []
        for row in reader:
            per_mode = tuple(_parse(row[c]) for c in mode_columns)
            entries.append(
                TraceEntry(
                    k=int(row["k"]),
                    w_hat=float(row["w_hat"]),
                    w_sq_hat=float(row["w_sq_hat"]),
                    per_mode_w=per_mode if any(v is not None for v in per_mode) else None,
                    w_oracle=_parse(row["w_oracle"]),
                    w_markov_exact=_parse(row["w_markov_exact"]),
                    mc_mean_sq=_parse(row["mc_mean_sq"]),
                    mc_stderr=_parse(row["mc_stderr"]),
                )
            )
    return WassersteinTrace(entries=tuple(entries), engine="split_merge", num_modes=len(mode_columns))
