"""Injected time sources.

Both clocks share one event queue. ``VirtualClock`` jumps straight to the
next due event, so a 24 hour study runs as fast as the callbacks allow;
``WallClock`` sleeps in real time between events. All times are integer
epoch milliseconds (UTC).
"""

from __future__ import annotations

import heapq
import itertools
import logging
import time
from typing import Any, Callable

logger = logging.getLogger(__name__)

# Lower runs first when several events share a timestamp.
PRIORITY_SYSTEM = 0
PRIORITY_TRIGGER = 1
PRIORITY_PROBE = 2


class Timer:
    """Handle for a scheduled callback."""

    __slots__ = ("when", "callback", "args", "cancelled", "fired")

    def __init__(self, when: int, callback: Callable[..., Any], args: tuple):
        self.when = when
        self.callback = callback
        self.args = args
        self.cancelled = False
        self.fired = False

    def cancel(self) -> None:
        self.cancelled = True


class Clock:
    """Event scheduler over an abstract time source."""

    def __init__(self) -> None:
        self._queue: list[tuple[int, int, int, Timer]] = []
        self._seq = itertools.count()
        self._running = False

    def now(self) -> int:
        raise NotImplementedError

    def _wait_until(self, t: int) -> None:
        raise NotImplementedError

    def call_at(self, when: int, callback: Callable[..., Any], *args: Any,
                priority: int = PRIORITY_PROBE) -> Timer:
        timer = Timer(int(when), callback, args)
        heapq.heappush(self._queue, (timer.when, priority, next(self._seq), timer))
        return timer

    def call_later(self, delay_ms: int, callback: Callable[..., Any], *args: Any,
                   priority: int = PRIORITY_PROBE) -> Timer:
        return self.call_at(self.now() + delay_ms, callback, *args, priority=priority)

    def pending(self) -> int:
        return sum(1 for *_, timer in self._queue if not timer.cancelled)

    def run_until(self, end: int) -> int:
        """Run every event due strictly before ``end``; returns the number run."""
        if self._running:
            raise RuntimeError("run_until is not reentrant")
        self._running = True
        ran = 0
        queue = self._queue
        try:
            while queue and queue[0][0] < end:
                when, _, _, timer = heapq.heappop(queue)
                if timer.cancelled:
                    continue
                self._wait_until(when)
                timer.fired = True
                timer.callback(*timer.args)
                ran += 1
            self._wait_until(end)
        finally:
            self._running = False
        return ran

    def advance(self, delta_ms: int) -> int:
        return self.run_until(self.now() + delta_ms)

    def sleep(self, delta_ms: int) -> None:
        """Block for ``delta_ms``; inside a running callback only time moves."""
        if self._running:
            self._wait_until(self.now() + delta_ms)
        else:
            self.advance(delta_ms)


class VirtualClock(Clock):
    def __init__(self, start_ms: int = 0):
        super().__init__()
        self._now = int(start_ms)

    def now(self) -> int:
        return self._now

    def _wait_until(self, t: int) -> None:
        if t > self._now:
            self._now = t


class WallClock(Clock):
    def now(self) -> int:
        return time.time_ns() // 1_000_000

    def _wait_until(self, t: int) -> None:
        delay = (t - self.now()) / 1000.0
        if delay > 0:
            time.sleep(delay)
