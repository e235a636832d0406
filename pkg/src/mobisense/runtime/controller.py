"""Study controller: wires a protocol to probes, the pipeline and a sink."""

from __future__ import annotations

import csv
import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from mobisense.clock import PRIORITY_SYSTEM, Clock, Timer, VirtualClock
from mobisense.errors import (
    IllegalTransitionError,
    TransformError,
    UnknownNamespaceError,
)
from mobisense.formats import CARP
from mobisense.probes.builtin import BATTERY, default_package_registry
from mobisense.probes.datum import DataPoint, Datum, error_datum
from mobisense.probes.device import SimulatedDevice
from mobisense.probes.packages import PackageRegistry, adapt_measure
from mobisense.probes.probe import Probe, ProbeState
from mobisense.protocol.model import Measure, PowerTier, SamplingEventTrigger, StudyProtocol, tier_for_level
from mobisense.runtime.stream import EventStream
from mobisense.runtime.triggers import TriggerExecutor
from mobisense.sinks import DataManager, DataManagerRegistry, SinkContext, default_data_managers
from mobisense.transform import TransformerRegistry, default_transformers, privacy_apply, transform

logger = logging.getLogger(__name__)

HOUR_MS = 3_600_000
ADAPTATION_HEADER = ("t_ms", "level", "old_tier", "new_tier")


class ControllerState(enum.Enum):
    CREATED = "created"
    INITIALIZED = "initialized"
    RUNNING = "running"
    PAUSED = "paused"
    STOPPED = "stopped"


_C = ControllerState
_TRANSITIONS = {
    "initialize": {_C.CREATED: _C.INITIALIZED},
    "start": {_C.INITIALIZED: _C.RUNNING},
    "pause": {_C.RUNNING: _C.PAUSED},
    "resume": {_C.PAUSED: _C.RUNNING},
    "stop": {_C.CREATED: _C.STOPPED, _C.INITIALIZED: _C.STOPPED,
             _C.RUNNING: _C.STOPPED, _C.PAUSED: _C.STOPPED},
}


@dataclass
class Registries:
    packages: PackageRegistry
    data_managers: DataManagerRegistry
    transformers: TransformerRegistry


def default_registries() -> Registries:
    packages = default_package_registry()
    privacy = [t for p in packages for t in p.privacy_functions.values()]
    return Registries(packages, default_data_managers(), default_transformers(privacy))


@dataclass(frozen=True)
class AdaptationEvent:
    t_ms: int
    level: int
    old_tier: PowerTier
    new_tier: PowerTier

    def row(self) -> tuple:
        return self.t_ms, self.level, self.old_tier.value, self.new_tier.value


def write_adaptation_csv(events, path: Path | str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ADAPTATION_HEADER)
        w.writerows(e.row() for e in events)


@dataclass
class RunCounters:
    """The runtime's own tally of published points."""

    start_ms: int = 0
    total: int = 0
    per_type: Counter = field(default_factory=Counter)
    # (rendered format, hour bucket relative to start) -> count
    per_hour: Counter = field(default_factory=Counter)

    def add(self, p: DataPoint) -> None:
        fmt = str(p.format)
        self.total += 1
        self.per_type[fmt] += 1
        self.per_hour[fmt, (p.start_time - self.start_ms) // HOUR_MS] += 1


class StudyController:
    """Runs one study protocol.

    Lifecycle: Created -> initialize -> Initialized -> start -> Running,
    Running <-> Paused, and stop from any state (terminal).
    """

    def __init__(self, protocol: StudyProtocol, registries: Registries | None = None,
                 clock: Clock | None = None, device: SimulatedDevice | None = None,
                 out_dir: Path | str | None = None):
        self.protocol = protocol
        self.registries = registries or default_registries()
        self.clock = clock or (device.clock if device is not None else VirtualClock())
        self.device = device or SimulatedDevice(self.clock)
        if self.device.clock is not self.clock:
            raise ValueError("device and controller must share a clock")
        self.state = ControllerState.CREATED
        self.power_state = PowerTier.NORMAL
        self.events: EventStream[DataPoint] = EventStream()
        self.adaptations: list[AdaptationEvent] = []
        self.counters = RunCounters()
        self.dropped = 0

        context = SinkContext(Path(out_dir) if out_dir is not None else Path("."), self.clock)
        self.data_manager: DataManager = self.registries.data_managers.create(
            protocol.data_end_point, context)

        transformers = self.registries.transformers
        target = protocol.data_format
        if target != CARP and not transformers.has_namespace(target):
            raise UnknownNamespaceError(f"no transformation schema for data format {target!r}")
        self.target_namespace = target
        self.target_schema = transformers.schemas.get(target, {})
        self.privacy_schema = transformers.privacy

        self.executors: list[TriggerExecutor] = []
        self.probes: list[Probe] = []
        self._base_measures: dict[int, Measure] = {}
        self._battery_timer: Timer | None = None

    def __repr__(self) -> str:
        return f"<StudyController {self.protocol.id!r} {self.state.value}>"

    def _transition(self, action: str) -> None:
        try:
            self.state = _TRANSITIONS[action][self.state]
        except KeyError:
            raise IllegalTransitionError(
                f"cannot {action} a study in state {self.state.value}") from None

    # -- lifecycle --------------------------------------------------------

    def initialize(self) -> None:
        if self.state is not ControllerState.CREATED:
            self._transition("initialize")
        packages = self.registries.packages
        executors, probes = [], []
        for trigger, task in self.protocol.trigger_tasks:
            task_probes = []
            for m in task.measures:
                probe = packages.create_probe(m, self.device)
                probe.add_listener(self._on_probe_datum)
                task_probes.append(probe)
            executors.append(TriggerExecutor(trigger, task, task_probes, self.clock))
            probes.extend(task_probes)
        for probe in probes:
            probe.initialize()
        self.data_manager.initialize(self.protocol.data_end_point, self.protocol, self.events)
        self.executors, self.probes = executors, probes
        self._base_measures = {id(p): p.measure for p in probes}
        self._transition("initialize")

    def start(self) -> None:
        self._transition("start")
        self.counters.start_ms = self.clock.now()
        self._check_battery()
        for ex in self.executors:
            ex.start()

    def pause(self) -> None:
        self._transition("pause")
        self._disarm_battery()
        for ex in self.executors:
            ex.pause()

    def resume(self) -> None:
        self._transition("resume")
        self._check_battery()
        for ex in self.executors:
            ex.resume()

    def stop(self) -> None:
        self._transition("stop")
        self._disarm_battery()
        for ex in self.executors:
            ex.stop()
        for p in self.probes:
            if p.state is not ProbeState.STOPPED:
                p.stop()
        if self.data_manager.endpoint is not None:
            self.data_manager.close()

    def flush(self) -> None:
        if self.data_manager.endpoint is not None and not self.data_manager.closed:
            self.data_manager.flush()

    # -- pipeline ---------------------------------------------------------

    def _on_probe_datum(self, probe: Probe, datum: Datum, start: int, end: int | None) -> None:
        if self.state is not ControllerState.RUNNING:
            self.dropped += 1
            return
        p = self.protocol
        raw = DataPoint.create(p.id, p.user_id, datum, start, end, probe.device_role)
        self.emit(raw)
        for ex in self.executors:
            ex.on_event(datum)

    def process(self, raw: DataPoint) -> DataPoint:
        """Privacy first, then the target-format transformation."""
        body = raw.body
        transformers = self.registries.transformers
        if self.protocol.privacy_enabled:
            body = privacy_apply(transformers, body)
        try:
            body = transform(transformers, body, self.target_namespace)
        except TransformError as exc:
            logger.warning("%s", exc)
            body = error_datum(str(exc))
        h = raw.header
        return DataPoint.create(h.study_id, h.user_id, body, h.start_time, h.end_time,
                                h.device_role)

    def emit(self, raw: DataPoint) -> None:
        if self.state is not ControllerState.RUNNING:
            raise IllegalTransitionError(f"cannot emit while {self.state.value}")
        point = self.process(raw)
        self.events.publish(point)
        self.counters.add(point)

    # -- adaptive sampling ------------------------------------------------

    def on_battery(self, level: int) -> PowerTier:
        """Switch every probe to the tier for ``level`` if it changed."""
        if not 0 <= level <= 100:
            raise ValueError(f"battery level {level} outside [0, 100]")
        tier = tier_for_level(level)
        if tier is self.power_state:
            return tier
        event = AdaptationEvent(self.clock.now(), level, self.power_state, tier)
        logger.info("battery %d%%: %s -> %s", level, event.old_tier.value, tier.value)
        self.adaptations.append(event)
        self.power_state = tier
        for probe in self.probes:
            if probe.state is ProbeState.STOPPED:
                continue
            base = self._base_measures[id(probe)]
            probe_tier = tier
            if tier is PowerTier.NONE and probe.type == BATTERY:
                # keep watching the battery so a recharge can be observed
                probe_tier = PowerTier.MINIMUM
            probe.set_measure(adapt_measure(base, probe_tier))
        return tier

    def _check_battery(self) -> None:
        now = self.clock.now()
        self.on_battery(self.device.battery_level(now))
        self._arm_battery(now)

    def _arm_battery(self, after: int) -> None:
        self._disarm_battery()
        times = self.device.battery_change_times(after)
        if times:
            self._battery_timer = self.clock.call_at(times[0], self._battery_tick, times[0],
                                                     priority=PRIORITY_SYSTEM)

    def _disarm_battery(self) -> None:
        if self._battery_timer is not None:
            self._battery_timer.cancel()
            self._battery_timer = None

    def _battery_tick(self, t: int) -> None:
        self._battery_timer = None
        self.on_battery(self.device.battery_level(t))
        self._arm_battery(t)

    @property
    def sampling_event_executors(self) -> list[TriggerExecutor]:
        return [ex for ex in self.executors if isinstance(ex.trigger, SamplingEventTrigger)]


def controller_new(p: StudyProtocol, registries: Registries | None = None,
                   clock: Clock | None = None, **kwargs) -> StudyController:
    return StudyController(p, registries, clock, **kwargs)
