"""End-to-end study execution with on-disk reports.

``run_study`` drives a controller for a fixed duration and leaves these
artifacts in the output directory next to whatever the sink wrote:

- ``adaptation.csv``: battery tier transitions
- ``coverage.csv``: coverage from the runtime's own counters
- ``summary.json``: totals, points per hour and per type
- ``run.json``: run start and duration, used to recompute coverage later
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from mobisense.clock import Clock, VirtualClock, WallClock
from mobisense.coverage import RUN_FILE, CoverageReport, coverage_report
from mobisense.probes.device import SimulatedDevice
from mobisense.protocol.model import StudyProtocol
from mobisense.runtime.controller import (
    HOUR_MS,
    Registries,
    StudyController,
    default_registries,
    write_adaptation_csv,
)
from mobisense.sinks.memory import MemoryDataManager

logger = logging.getLogger(__name__)

ADAPTATION_FILE = "adaptation.csv"
COVERAGE_FILE = "coverage.csv"
SUMMARY_FILE = "summary.json"


@dataclass
class RunResult:
    controller: StudyController
    start_ms: int
    duration_ms: int
    coverage: CoverageReport
    summary: dict
    interrupted: bool = False
    out_dir: Path = field(default_factory=lambda: Path("."))


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def summarize(controller: StudyController, duration_ms: int) -> dict:
    counters = controller.counters
    per_hour = [0] * max(1, -(-duration_ms // HOUR_MS))
    for (_, hour), n in counters.per_hour.items():
        if 0 <= hour < len(per_hour):
            per_hour[hour] += n
    return {
        "total_points": counters.total,
        "points_per_hour": per_hour,
        "per_type": dict(sorted(counters.per_type.items())),
        "adaptation_transitions": len(controller.adaptations),
    }


def run_study(protocol: StudyProtocol, out_dir: Path | str, duration_ms: int, *,
              virtual_time: bool = True, seed: int = 0,
              battery_profile: Sequence[tuple[int, int]] | None = None,
              location_script: Sequence[tuple[int, float, float]] = (),
              registries: Registries | None = None,
              pauses: Sequence[tuple[int, int]] = (),
              clock: Clock | None = None) -> RunResult:
    """Run ``protocol`` for ``duration_ms`` and write the run artifacts.

    ``pauses`` holds ``(offset_ms, length_ms)`` windows, relative to the run
    start, during which the study is paused. Script times in the battery
    profile and location script are offsets from the run start as well.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    registries = registries or default_registries()
    if clock is None:
        clock = VirtualClock(0) if virtual_time else WallClock()
    start = clock.now()
    device = SimulatedDevice(clock, rng_seed=seed,
                             battery_profile=battery_profile or ((0, 100),),
                             location_script=location_script, origin_ms=start)
    controller = StudyController(protocol, registries, clock, device, out_dir)
    controller.initialize()
    controller.start()
    interrupted = False
    try:
        for offset, length in sorted(pauses):
            clock.run_until(start + offset)
            controller.pause()
            clock.run_until(start + offset + length)
            controller.resume()
        clock.run_until(start + duration_ms)
    except KeyboardInterrupt:
        interrupted = True
        logger.warning("interrupted; flushing partial artifacts")
    elapsed = min(duration_ms, clock.now() - start)
    controller.stop()

    if isinstance(controller.data_manager, MemoryDataManager):
        controller.data_manager.dump()
    write_adaptation_csv(controller.adaptations, out_dir / ADAPTATION_FILE)
    report = coverage_report(protocol, registries.packages, controller.counters.per_hour,
                             start, elapsed)
    (out_dir / COVERAGE_FILE).write_text(report.to_csv(), encoding="utf-8")
    summary = summarize(controller, elapsed)
    _write_json(out_dir / SUMMARY_FILE, summary)
    _write_json(out_dir / RUN_FILE, {"start_ms": start, "duration_ms": elapsed})
    return RunResult(controller, start, elapsed, report, summary, interrupted, out_dir)
