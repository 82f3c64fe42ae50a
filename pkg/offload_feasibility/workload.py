import csv
import math
import os
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np

from .model import OffloadError
from .offload_config import offload_log

TRACE_HEADER = ["job_id", "app_name", "job_size", "bytes_written", "bytes_read", "exec_time_s"]
BITS_PER_BYTE = 8

ALL = "all"
SOME = "some"
NONE = "none"
_VERDICT_RANK = {NONE: 0, SOME: 1, ALL: 2}


@dataclass(frozen=True)
class TraceRecord:
    job_id: str
    app_name: str
    job_size: int  # allocation units as recorded, not used to derive C
    bytes_written: int
    bytes_read: int
    exec_time: float  # seconds

    def to_row(self) -> List[str]:
        return [
            self.job_id,
            self.app_name,
            str(self.job_size),
            str(self.bytes_written),
            str(self.bytes_read),
            repr(float(self.exec_time)),
        ]


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass
class TraceParseResult:
    records: List[TraceRecord] = field(default_factory=list)
    diagnostics: List[ParseDiagnostic] = field(default_factory=list)


@dataclass(frozen=True)
class AppStats:
    app_name: str
    count: int
    min_fc: float
    avg_fc: float
    max_fc: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "app_name": self.app_name,
            "count": self.count,
            "min_fc": self.min_fc,
            "avg_fc": self.avg_fc,
            "max_fc": self.max_fc,
        }


@dataclass(frozen=True)
class AppVerdict:
    app_name: str
    verdict: str  # all | some | none of the app's jobs favor offloading

    def to_dict(self) -> Dict[str, Any]:
        return {"app_name": self.app_name, "verdict": self.verdict}


def verdict_rank(verdict: str) -> int:
    return _VERDICT_RANK[verdict]


# Parsing -----------------------------------------------------------------------------


def _parse_row(row: Sequence[str]) -> TraceRecord:
    if len(row) != len(TRACE_HEADER):
        raise ValueError(f"expected {len(TRACE_HEADER)} fields, got {len(row)}")
    job_id, app_name, job_size_raw, written_raw, read_raw, exec_raw = (value.strip() for value in row)
    if not job_id:
        raise ValueError("job_id must not be empty")
    if not app_name:
        raise ValueError("app_name must not be empty")

    try:
        job_size = int(job_size_raw)
    except ValueError:
        raise ValueError(f"job_size must be an integer, got '{job_size_raw}'") from None
    if job_size < 1:
        raise ValueError("job_size must be >= 1")

    byte_counts = []
    for name, raw in (("bytes_written", written_raw), ("bytes_read", read_raw)):
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{name} must be an integer, got '{raw}'") from None
        if value < 0:
            raise ValueError(f"{name} must be >= 0")
        byte_counts.append(value)

    try:
        exec_time = float(exec_raw)
    except ValueError:
        raise ValueError(f"exec_time must be a number, got '{exec_raw}'") from None
    if not math.isfinite(exec_time):
        raise ValueError("exec_time must be finite")
    if exec_time <= 0:
        raise ValueError("exec_time must be > 0")

    return TraceRecord(job_id, app_name, job_size, byte_counts[0], byte_counts[1], exec_time)


def parse_trace(stream: TextIO) -> TraceParseResult:
    """Read a job trace CSV; bad rows become diagnostics, good rows keep file order."""
    result = TraceParseResult()
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None:
            result.diagnostics.append(ParseDiagnostic(1, "missing header"))
            return result
        if header:
            header[0] = header[0].lstrip("\ufeff")
        if [h.strip() for h in header] != TRACE_HEADER:
            result.diagnostics.append(ParseDiagnostic(1, f"header must be {','.join(TRACE_HEADER)}"))
            return result

        for row in reader:
            if not row or all(not value.strip() for value in row):
                continue
            try:
                result.records.append(_parse_row(row))
            except ValueError as exc:
                result.diagnostics.append(ParseDiagnostic(reader.line_num, str(exc)))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise OffloadError(f"unreadable trace: {exc}") from exc
    return result


def load_trace(path: str) -> TraceParseResult:
    if not os.path.isfile(path):
        raise OffloadError(f"trace file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8-sig", newline="") as f:
            result = parse_trace(f)
    except OSError as exc:
        raise OffloadError(f"unreadable trace: {exc}") from exc
    for diagnostic in result.diagnostics:
        offload_log(f"TraceParser: {path} {diagnostic}")
    return result


def serialize_trace(records: Iterable[TraceRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for record in records:
        writer.writerow(record.to_row())


# Derivation and aggregation ----------------------------------------------------------


def derive_inverse_intensity(record: TraceRecord, assumed_rate: float) -> float:
    """F/C for one job: bytes moved as bits over exec_time at the assumed rate."""
    if not assumed_rate > 0 or not math.isfinite(assumed_rate):
        raise OffloadError("assumed_rate must be > 0")
    bits = BITS_PER_BYTE * (record.bytes_read + record.bytes_written)
    instructions = record.exec_time * assumed_rate
    return bits / instructions


def aggregate_by_app(records: Iterable[TraceRecord], assumed_rate: float) -> List[AppStats]:
    """Per-application min, unweighted mean and max of F/C, sorted by name."""
    grouped: "OrderedDict[str, List[float]]" = OrderedDict()
    for record in records:
        grouped.setdefault(record.app_name, []).append(derive_inverse_intensity(record, assumed_rate))

    stats = []
    for app_name in sorted(grouped):
        values = np.asarray(grouped[app_name], dtype=float)
        low = float(values.min())
        high = float(values.max())
        # the rounded mean of equal values can land an ulp outside [min, max]
        mean = min(max(float(values.mean()), low), high)
        stats.append(AppStats(app_name, int(values.size), low, mean, high))
    return stats


def classify_app(stats: AppStats, capacity: float) -> str:
    if stats.max_fc < capacity:
        return ALL
    if stats.min_fc >= capacity:
        return NONE
    return SOME


def classify_apps(stats: Sequence[AppStats], capacity: float) -> List[AppVerdict]:
    return [AppVerdict(s.app_name, classify_app(s, capacity)) for s in stats]


def summarize_trace(result: TraceParseResult, assumed_rate: float, capacity: Optional[float]) -> Dict[str, Any]:
    """Stats plus verdicts in one payload, shared by the CLI and the HTTP API."""
    stats = aggregate_by_app(result.records, assumed_rate)
    verdicts = {v.app_name: v.verdict for v in classify_apps(stats, capacity)} if capacity is not None else {}
    apps = []
    for s in stats:
        entry = s.to_dict()
        if capacity is not None:
            entry["verdict"] = verdicts[s.app_name]
        apps.append(entry)
    return {
        "records": len(result.records),
        "diagnostics": [str(d) for d in result.diagnostics],
        "apps": apps,
    }
