"""Batched HTTP upload with exponential backoff and a deadletter spill.

Points queue up until a batch is full, then the batch is POSTed as NDJSON.
A failed batch is retried after 1 s, 2 s, 4 s, ... on the injected clock
while new points keep queuing behind it. Once ``retry_max`` retries are
spent the batch is appended to ``deadletter.ndjson`` and the queue moves on.
"""

from __future__ import annotations

import logging
import urllib.error
import urllib.request
from collections import deque

from mobisense.clock import PRIORITY_SYSTEM, Timer
from mobisense.probes.datum import DataPoint
from mobisense.protocol.endpoints import HttpDataEndPoint
from mobisense.sinks.base import DataManager
from mobisense.sinks.records import serialize_data_point

logger = logging.getLogger(__name__)

CONTENT_TYPE = "application/x-ndjson"
DEADLETTER_FILE = "deadletter.ndjson"
QUEUE_LIMIT = 100_000
BACKOFF_BASE_MS = 1000


def post_ndjson(url: str, body: bytes, timeout: float = 10.0) -> bool:
    req = urllib.request.Request(url, data=body, method="POST",
                                 headers={"Content-Type": CONTENT_TYPE})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return 200 <= resp.status < 300
    except urllib.error.HTTPError as exc:
        logger.info("POST %s -> %s", url, exc.code)
    except (urllib.error.URLError, OSError) as exc:
        logger.info("POST %s failed: %s", url, exc)
    return False


class HttpDataManager(DataManager):
    kind = "http"

    queue_limit = QUEUE_LIMIT

    def _open(self) -> None:
        ep = self.endpoint
        if not isinstance(ep, HttpDataEndPoint):
            raise TypeError(f"http data manager needs an HttpDataEndPoint, got {ep!r}")
        self.clock = self.context.clock
        self.deadletter_path = self.context.out_dir / DEADLETTER_FILE
        self.queue: deque[DataPoint] = deque()
        self.in_flight: list[DataPoint] | None = None
        self.retries = 0
        self.delivered = 0
        self.spilled = 0
        # (virtual time, wait in ms) for every scheduled retry
        self.backoff_log: list[tuple[int, int]] = []
        self._retry_timer: Timer | None = None
        self._draining = False

    def _write(self, p: DataPoint) -> None:
        if len(self.queue) >= self.queue_limit:
            logger.warning("upload queue full (%d points); spilling to %s",
                           self.queue_limit, self.deadletter_path)
            self._spill([p])
            return
        self.queue.append(p)
        self._pump()

    def _pump(self) -> None:
        batch_size = self.endpoint.batch_size
        while self.in_flight is None and self.queue and (
                self._draining or len(self.queue) >= batch_size):
            n = min(batch_size, len(self.queue))
            self.in_flight = [self.queue.popleft() for _ in range(n)]
            self.retries = 0
            self._attempt()

    def _attempt(self) -> None:
        batch = self.in_flight
        body = "".join(serialize_data_point(p) + "\n" for p in batch).encode("utf-8")
        if post_ndjson(self.endpoint.url, body):
            self.delivered += len(batch)
            self.in_flight = None
            return
        if self.retries < self.endpoint.retry_max:
            wait = BACKOFF_BASE_MS * 2 ** self.retries
            self.retries += 1
            self.backoff_log.append((self.clock.now(), wait))
            self._retry_timer = self.clock.call_later(wait, self._retry,
                                                      priority=PRIORITY_SYSTEM)
            return
        logger.warning("batch of %d points failed after %d retries; spilling",
                       len(batch), self.retries)
        self._spill(batch)
        self.in_flight = None

    def _retry(self) -> None:
        self._retry_timer = None
        self._attempt()
        self._pump()

    def _spill(self, points: list[DataPoint]) -> None:
        self.deadletter_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.deadletter_path, "a", encoding="utf-8", newline="\n") as fh:
            for p in points:
                fh.write(serialize_data_point(p) + "\n")
        self.spilled += len(points)

    def flush(self) -> None:
        """Send queued points, including a final partial batch."""
        self._draining = True
        try:
            self._pump()
        finally:
            self._draining = False

    def _close(self) -> None:
        self._draining = True
        while self.in_flight is not None or self.queue:
            timer = self._retry_timer
            if timer is not None:
                timer.cancel()
                self._retry_timer = None
                self.clock.sleep(max(0, timer.when - self.clock.now()))
                self._attempt()
            self._pump()
