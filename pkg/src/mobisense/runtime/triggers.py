"""Trigger scheduling.

``next_fire`` is the pure schedule; ``TriggerExecutor`` drives one task's
probes from it on the injected clock.

Immediate and sampling-event triggers start the task's probes, which then
sample on their own schedule. Time-driven triggers (periodic, scheduled,
recurrent) instead take one sample from every probe per fire.
"""

from __future__ import annotations

import logging

from mobisense.clock import PRIORITY_TRIGGER, Clock, Timer
from mobisense.probes.datum import Datum
from mobisense.probes.probe import Probe, ProbeState
from mobisense.protocol.model import (
    TIME_DRIVEN,
    ImmediateTrigger,
    PeriodicTrigger,
    RecurrentScheduledTrigger,
    SamplingEventTrigger,
    ScheduledTrigger,
    Task,
    Trigger,
)

logger = logging.getLogger(__name__)

DAY_MS = 86_400_000
MINUTE_MS = 60_000
# 1970-01-01 was a Thursday
_EPOCH_WEEKDAY = 3


def _next_recurrence(trigger: RecurrentScheduledTrigger, ref: int) -> int:
    """First occurrence strictly after ``ref``."""
    day = ref // DAY_MS
    offset = trigger.minute_of_day * MINUTE_MS
    if trigger.weekday is None:
        candidate = day * DAY_MS + offset
        return candidate if candidate > ref else candidate + DAY_MS
    day += (trigger.weekday - (day + _EPOCH_WEEKDAY)) % 7
    candidate = day * DAY_MS + offset
    return candidate if candidate > ref else candidate + 7 * DAY_MS


def next_fire(trigger: Trigger, now: int, last_fire: int | None = None) -> int | None:
    """Next fire time of ``trigger`` at ``now``, or None if it will not fire.

    >>> next_fire(PeriodicTrigger(1000), 5000)
    5000
    >>> next_fire(PeriodicTrigger(1000), 5000, last_fire=5000)
    6000
    """
    if isinstance(trigger, ImmediateTrigger):
        return now if last_fire is None else None
    if isinstance(trigger, PeriodicTrigger):
        return now if last_fire is None else last_fire + trigger.period_ms
    if isinstance(trigger, ScheduledTrigger):
        return trigger.at_ms if last_fire is None and trigger.at_ms >= now else None
    if isinstance(trigger, RecurrentScheduledTrigger):
        ref = now - 1 if last_fire is None else max(now - 1, last_fire)
        return _next_recurrence(trigger, ref)
    if isinstance(trigger, SamplingEventTrigger):
        return None
    raise TypeError(f"not a trigger: {trigger!r}")


class TriggerExecutor:
    """Runs one (trigger, task) pair."""

    def __init__(self, trigger: Trigger, task: Task, probes: list[Probe], clock: Clock):
        self.trigger = trigger
        self.task = task
        self.probes = probes
        self.clock = clock
        self.time_driven = isinstance(trigger, TIME_DRIVEN)
        self.fire_times: list[int] = []
        self.active = False
        self.running = False
        self._timer: Timer | None = None
        for p in probes:
            p.triggered = self.time_driven

    def __repr__(self) -> str:
        return f"<TriggerExecutor {type(self.trigger).__name__} {self.task.name!r}>"

    @property
    def last_fire(self) -> int | None:
        return self.fire_times[-1] if self.fire_times else None

    @property
    def schedule_cursor(self) -> int | None:
        if self._timer is None or self._timer.cancelled:
            return None
        return self._timer.when

    def start(self) -> None:
        self.running = True
        if isinstance(self.trigger, SamplingEventTrigger):
            return
        if isinstance(self.trigger, ImmediateTrigger):
            self.fire_times.append(self.clock.now())
            self._activate_probes()
            return
        self._activate_probes()
        self._arm(next_fire(self.trigger, self.clock.now(), self.last_fire))

    def pause(self) -> None:
        self.running = False
        self._disarm()
        for p in self.probes:
            if p.state is ProbeState.RESUMED:
                p.pause()

    def resume(self) -> None:
        self.running = True
        if self.active:
            self._activate_probes()
        if not self.time_driven:
            return
        now = self.clock.now()
        last = self.last_fire
        if isinstance(self.trigger, PeriodicTrigger) and last is not None:
            # missed fires are skipped, keeping the original phase
            period = self.trigger.period_ms
            nxt = last + period
            if nxt < now:
                nxt = last + -(-(now - last) // period) * period
        else:
            nxt = next_fire(self.trigger, now, last)
        self._arm(nxt)

    def stop(self) -> None:
        self.running = False
        self._disarm()
        for p in self.probes:
            if p.state is not ProbeState.STOPPED:
                p.stop()

    def on_event(self, datum: Datum) -> bool:
        """Offer a raw datum to a sampling-event trigger; True if it fired."""
        trigger = self.trigger
        if not (self.running and isinstance(trigger, SamplingEventTrigger)):
            return False
        if self.active or not trigger.matches(datum):
            return False
        self.fire_times.append(self.clock.now())
        self._activate_probes()
        return True

    def _activate_probes(self) -> None:
        self.active = True
        for p in self.probes:
            if p.state in (ProbeState.INITIALIZED, ProbeState.PAUSED) and not (
                    p.state is ProbeState.PAUSED and p.paused_by_config):
                p.activate()

    def _arm(self, when: int | None) -> None:
        self._disarm()
        if when is not None:
            self._timer = self.clock.call_at(when, self._fire, priority=PRIORITY_TRIGGER)

    def _disarm(self) -> None:
        if self._timer is not None:
            self._timer.cancel()
            self._timer = None

    def _fire(self) -> None:
        self._timer = None
        now = self.clock.now()
        self.fire_times.append(now)
        for p in self.probes:
            p.collect()
        self._arm(next_fire(self.trigger, now, now))
