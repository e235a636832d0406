"""Sampling coverage: collected versus expected points per measure and hour.

Coverage is only defined for fixed-frequency sampling, so the report covers
enabled measures with a ``frequency_ms`` whose probe is periodic and whose
task is started immediately. Event-driven measures are left out.

Hour buckets are aligned to the run start: bucket ``k`` spans
``[start + k h, start + (k + 1) h)`` and the last bucket may be partial.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from mobisense.probes.datum import DataPoint
from mobisense.probes.packages import PackageRegistry
from mobisense.probes.probe import ProbeKind
from mobisense.protocol.model import ImmediateTrigger, StudyProtocol
from mobisense.sinks.file import data_files, read_data_file
from mobisense.sinks.http import DEADLETTER_FILE
from mobisense.sinks.memory import MEMORY_FILE
from mobisense.sinks.records import read_ndjson

HOUR_MS = 3_600_000
COVERAGE_HEADER = ("measure", "hour", "expected", "collected", "coverage")
RUN_FILE = "run.json"


@dataclass(frozen=True)
class CoverageCell:
    measure: str
    hour: int
    expected: int
    collected: int

    @property
    def coverage(self) -> float:
        return self.collected / self.expected if self.expected else 0.0


@dataclass(frozen=True)
class CoverageReport:
    cells: tuple[CoverageCell, ...]

    def __iter__(self):
        return iter(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def cell(self, measure: str, hour: int) -> CoverageCell:
        for c in self.cells:
            if c.measure == measure and c.hour == hour:
                return c
        raise KeyError((measure, hour))

    @property
    def measures(self) -> list[str]:
        return sorted({c.measure for c in self.cells})

    @property
    def total_collected(self) -> int:
        return sum(c.collected for c in self.cells)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COVERAGE_HEADER)
        for c in self.cells:
            w.writerow((c.measure, c.hour, c.expected, c.collected, f"{c.coverage:.6f}"))
        return buf.getvalue()


def covered_measures(protocol: StudyProtocol,
                     packages: PackageRegistry) -> dict[str, list[int]]:
    """Measure type -> sampling periods in ms, one per task that samples it."""
    out: dict[str, list[int]] = {}
    for trigger, task in protocol.trigger_tasks:
        if not isinstance(trigger, ImmediateTrigger):
            continue
        for m in task.measures:
            if not m.enabled or not packages.is_registered(m.type):
                continue
            if packages.probe_kind(m.type) is not ProbeKind.PERIODIC:
                continue
            freq = packages.package_for(m.type).effective_measure(m).frequency_ms
            if freq:
                out.setdefault(str(m.type), []).append(freq)
    return out


def published_formats(measure_type: str, data_format: str) -> set[str]:
    """Sink formats a measure's points may carry after re-formatting."""
    _, type_ = measure_type.split(".", 1)
    return {measure_type, f"{data_format}.{type_}"}


def coverage_report(protocol: StudyProtocol, packages: PackageRegistry,
                    counts: Counter, start_ms: int, duration_ms: int) -> CoverageReport:
    """Build the report from a ``(format, hour) -> count`` tally."""
    cells = []
    n_buckets = -(-duration_ms // HOUR_MS)
    for measure, periods in sorted(covered_measures(protocol, packages).items()):
        formats = published_formats(measure, protocol.data_format)
        for hour in range(n_buckets):
            length = min(HOUR_MS, duration_ms - hour * HOUR_MS)
            expected = sum(length // p for p in periods)
            collected = sum(counts.get((f, hour), 0) for f in formats)
            cells.append(CoverageCell(measure, hour, expected, collected))
    return CoverageReport(tuple(cells))


def tally(points: Iterable[DataPoint], start_ms: int) -> Counter:
    counts: Counter = Counter()
    for p in points:
        counts[str(p.format), (p.start_time - start_ms) // HOUR_MS] += 1
    return counts


def sink_points(run_dir: Path | str) -> Iterable[DataPoint]:
    """Every point stored locally in a run directory, file by file."""
    run_dir = Path(run_dir)
    for path in data_files(run_dir):
        yield from read_ndjson(read_data_file(path).decode("utf-8").splitlines())
    for name in (MEMORY_FILE, DEADLETTER_FILE):
        path = run_dir / name
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                yield from read_ndjson(fh)


def read_run_info(run_dir: Path | str) -> tuple[int, int]:
    info = json.loads((Path(run_dir) / RUN_FILE).read_text(encoding="utf-8"))
    return int(info["start_ms"]), int(info["duration_ms"])


def coverage_from_run_dir(run_dir: Path | str, protocol: StudyProtocol,
                          packages: PackageRegistry) -> CoverageReport:
    """Recompute coverage from sink artifacts alone."""
    start_ms, duration_ms = read_run_info(run_dir)
    counts = tally(sink_points(run_dir), start_ms)
    return coverage_report(protocol, packages, counts, start_ms, duration_ms)
