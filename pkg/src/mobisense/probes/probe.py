"""Probe lifecycle and the four scheduling kinds.

A probe owns the timers it puts on the device clock and cancels them when it
leaves the resumed state, so nothing can be emitted while paused or stopped.
"""

from __future__ import annotations

import enum
import logging
from typing import Callable, ClassVar

from mobisense.clock import Timer
from mobisense.errors import IllegalTransitionError, TypeMismatchError
from mobisense.probes import datum as d
from mobisense.probes.device import DEFAULT_LOCATION, SimulatedDevice, simulated_signal
from mobisense.probes.geofence import Fence, GeofenceTracker
from mobisense.protocol.model import Measure

logger = logging.getLogger(__name__)

BURST_SPACING_MS = 100


class ProbeState(enum.Enum):
    CREATED = "created"
    INITIALIZED = "initialized"
    RESUMED = "resumed"
    PAUSED = "paused"
    STOPPED = "stopped"


class ProbeKind(enum.Enum):
    ONE_SHOT = "one_shot"
    PERIODIC = "periodic"
    STREAM = "stream"
    PERIODIC_STREAM = "periodic_stream"


_S = ProbeState
_TRANSITIONS = {
    "initialize": {_S.CREATED: _S.INITIALIZED},
    "resume": {_S.INITIALIZED: _S.RESUMED, _S.PAUSED: _S.RESUMED},
    "pause": {_S.RESUMED: _S.PAUSED},
    "stop": {_S.CREATED: _S.STOPPED, _S.INITIALIZED: _S.STOPPED,
             _S.RESUMED: _S.STOPPED, _S.PAUSED: _S.STOPPED},
}

# listener(probe, datum, start_time, end_time)
Listener = Callable[["Probe", d.Datum, int, "int | None"], None]
Sampler = Callable[[SimulatedDevice, object, int], d.Datum]


class Probe:
    kind: ClassVar[ProbeKind]

    def __init__(self, measure: Measure, device: SimulatedDevice, *,
                 sampler: Sampler = simulated_signal, device_role: str = "phone"):
        self.measure = measure
        self.device = device
        self.clock = device.clock
        self.sampler = sampler
        self.device_role = device_role
        self.state = ProbeState.CREATED
        # set by a time-driven trigger: sample on collect() rather than on own timers
        self.triggered = False
        self.emitted = 0
        self._listeners: list[Listener] = []
        self._timers: set[Timer] = set()
        self._paused_by_config = False

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.measure.type} {self.state.value}>"

    @property
    def type(self):
        return self.measure.type

    def add_listener(self, listener: Listener) -> None:
        self._listeners.append(listener)

    # -- lifecycle --------------------------------------------------------

    def _transition(self, action: str) -> None:
        try:
            self.state = _TRANSITIONS[action][self.state]
        except KeyError:
            raise IllegalTransitionError(
                f"cannot {action} probe {self.measure.type} in state {self.state.value}") from None

    def initialize(self) -> None:
        self._transition("initialize")

    def resume(self) -> None:
        self._transition("resume")
        self._paused_by_config = False
        if not self.triggered:
            self._on_resume(self.clock.now())

    def pause(self) -> None:
        self._transition("pause")
        self._paused_by_config = False
        self._cancel_timers()

    def stop(self) -> None:
        self._transition("stop")
        self._cancel_timers()

    def apply(self, action: str) -> None:
        getattr(self, action)()

    def activate(self) -> None:
        """Resume, or park in Paused until the measure is re-enabled."""
        if self.measure.enabled:
            self.resume()
            return
        if self.state is ProbeState.INITIALIZED:
            self._transition("resume")
            self._transition("pause")
        self._paused_by_config = True

    @property
    def paused_by_config(self) -> bool:
        return self._paused_by_config

    def set_measure(self, measure: Measure) -> None:
        """Reconfigure while running; a disabled measure pauses the probe."""
        if measure.type != self.measure.type:
            raise TypeMismatchError(f"probe samples {self.measure.type}, got {measure.type}")
        old, self.measure = self.measure, measure
        if not measure.enabled:
            if self.state is ProbeState.RESUMED:
                self.pause()
            if self.state is ProbeState.PAUSED:
                self._paused_by_config = True
        elif self.state is ProbeState.PAUSED and self._paused_by_config:
            self.resume()
        elif self.state is ProbeState.RESUMED and not self.triggered:
            self._on_reconfigure(old)

    def collect(self) -> None:
        """Take one sample now (used by time-driven triggers)."""
        if self.state is ProbeState.RESUMED:
            self._collect(self.clock.now())

    # -- scheduling helpers ----------------------------------------------

    def _call_at(self, when: int, callback, *args) -> Timer:
        if len(self._timers) > 32:
            self._timers = {t for t in self._timers if not t.fired}
        timer = self.clock.call_at(when, callback, *args)
        self._timers.add(timer)
        return timer

    def _cancel_timers(self) -> None:
        for timer in self._timers:
            timer.cancel()
        self._timers.clear()

    def _emit(self, datum: d.Datum, start: int, end: int | None = None) -> None:
        if self.state is not ProbeState.RESUMED:
            logger.debug("dropping %s sample outside resumed state", self.measure.type)
            return
        self.emitted += 1
        for listener in self._listeners:
            listener(self, datum, start, end)

    def _sample(self, t: int) -> d.Datum:
        return self.sampler(self.device, self.measure.type, t)

    # -- kind-specific hooks ---------------------------------------------

    def _on_resume(self, t0: int) -> None:
        raise NotImplementedError

    def _on_reconfigure(self, old: Measure) -> None:
        pass

    def _collect(self, t: int) -> None:
        self._emit(self._sample(t), t)


class OneShotProbe(Probe):
    kind = ProbeKind.ONE_SHOT

    def _on_resume(self, t0: int) -> None:
        self._call_at(t0, self._collect, t0)


class PeriodicProbe(Probe):
    """Samples at resume time ``t0`` and then every ``frequency_ms``."""

    kind = ProbeKind.PERIODIC

    def __init__(self, measure: Measure, device: SimulatedDevice, **kwargs):
        super().__init__(measure, device, **kwargs)
        if measure.frequency_ms is None:
            raise ValueError(f"periodic probe for {measure.type} needs frequency_ms")
        self._last: int | None = None
        self._next: Timer | None = None

    @property
    def period(self) -> int:
        return self.measure.frequency_ms

    def _on_resume(self, t0: int) -> None:
        self._schedule(t0)

    def _schedule(self, when: int) -> None:
        self._next = self._call_at(when, self._tick, when)

    def _tick(self, t: int) -> None:
        self._last = t
        self._collect(t)
        if self.state is ProbeState.RESUMED:
            self._schedule(t + self.period)

    def _on_reconfigure(self, old: Measure) -> None:
        if old.frequency_ms == self.measure.frequency_ms or self._next is None:
            return
        self._next.cancel()
        self._timers.discard(self._next)
        now = self.clock.now()
        when = now if self._last is None else max(now, self._last + self.period)
        self._schedule(when)


class PeriodicStreamProbe(PeriodicProbe):
    """Every period, a burst of samples 100 ms apart lasting ``duration_ms``."""

    kind = ProbeKind.PERIODIC_STREAM

    @property
    def burst_size(self) -> int:
        duration = self.measure.duration_ms or 0
        return max(1, -(-duration // BURST_SPACING_MS))

    def _collect(self, t: int) -> None:
        n = self.burst_size
        self._emit(self._sample(t), t)
        for k in range(1, n):
            when = t + k * BURST_SPACING_MS
            self._call_at(when, self._burst_sample, when)

    def _burst_sample(self, t: int) -> None:
        self._emit(self._sample(t), t)


class StreamProbe(Probe):
    """Emits on source events; subclasses define when the source changes."""

    kind = ProbeKind.STREAM

    def _on_resume(self, t0: int) -> None:
        self._call_at(t0, self._event, t0)

    def _event(self, t: int) -> None:
        self._collect(t)
        nxt = self._next_event(t)
        if nxt is not None:
            self._call_at(nxt, self._event, nxt)

    def _next_event(self, t: int) -> int | None:
        raise NotImplementedError


class BatteryProbe(StreamProbe):
    """Reports the level at resume and at every battery-profile change."""

    def _next_event(self, t: int) -> int | None:
        times = self.device.battery_change_times(t)
        return times[0] if times else None


class ScreenProbe(StreamProbe):
    """Screen events at seeded intervals between 1 and 31 minutes."""

    def _next_event(self, t: int) -> int | None:
        return t + 60_000 + int(self.device.noise("screen_gap", t) * 1_800_000)


class GeofenceProbe(StreamProbe):
    """Evaluates the location script against one circular fence.

    Configuration keys: ``center_lat``, ``center_lon``, ``radius_m``,
    ``dwell_ms`` and ``fence_id``.
    """

    def __init__(self, measure: Measure, device: SimulatedDevice, **kwargs):
        super().__init__(measure, device, **kwargs)
        self.fence = fence_from_measure(measure)
        self.tracker = GeofenceTracker(self.fence)
        self._dwell_timer: Timer | None = None

    def _collect(self, t: int) -> None:
        lat, lon = self.device.location(t)
        for when, event in self.tracker.update(t, lat, lon):
            self._emit(d.Datum(self.measure.type, d.Geofence(event, self.fence.fence_id)), when)
        self._arm_dwell()

    def _arm_dwell(self) -> None:
        if self._dwell_timer is not None:
            self._dwell_timer.cancel()
            self._timers.discard(self._dwell_timer)
            self._dwell_timer = None
        due = self.tracker.due_dwell
        if due is not None:
            self._dwell_timer = self._call_at(max(due, self.clock.now()), self._dwell)

    def _dwell(self) -> None:
        self._dwell_timer = None
        for when, event in self.tracker.check_dwell(self.clock.now()):
            self._emit(d.Datum(self.measure.type, d.Geofence(event, self.fence.fence_id)), when)

    def _next_event(self, t: int) -> int | None:
        times = [x for x in self.device.location_times(t) if x > t]
        return times[0] if times else None

    def _on_reconfigure(self, old: Measure) -> None:
        fence = fence_from_measure(self.measure)
        if fence != self.fence:
            self.fence = fence
            self.tracker.fence = fence


def fence_from_measure(measure: Measure) -> Fence:
    c = measure.configuration
    return Fence(
        center_lat=float(c.get("center_lat", DEFAULT_LOCATION[0])),
        center_lon=float(c.get("center_lon", DEFAULT_LOCATION[1])),
        radius_m=float(c.get("radius_m", 100)),
        dwell_ms=int(c.get("dwell_ms", 60_000)),
        fence_id=c.get("fence_id", "home"),
    )
