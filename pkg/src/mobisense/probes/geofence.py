"""Circular geofences: enter, dwell and exit detection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

EARTH_RADIUS_M = 6_371_000.0

ENTER = "ENTER"
DWELL = "DWELL"
EXIT = "EXIT"


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in metres."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


@dataclass(frozen=True)
class Fence:
    center_lat: float
    center_lon: float
    radius_m: float
    dwell_ms: int = 0
    fence_id: str = "fence"

    def __post_init__(self) -> None:
        if self.radius_m <= 0:
            raise ValueError(f"radius_m must be > 0, got {self.radius_m}")

    def contains(self, lat: float, lon: float) -> bool:
        return haversine_m(self.center_lat, self.center_lon, lat, lon) <= self.radius_m


class GeofenceTracker:
    """Incremental detector; the device is assumed outside before the first fix.

    ``update`` handles a location fix, ``due_dwell`` reports the pending dwell
    time (if any) so a caller with a clock can wake up exactly then.
    """

    def __init__(self, fence: Fence):
        self.fence = fence
        self.inside = False
        self.entered_at: int | None = None
        self.dwelled = False

    @property
    def due_dwell(self) -> int | None:
        if self.inside and not self.dwelled and self.entered_at is not None:
            return self.entered_at + self.fence.dwell_ms
        return None

    def check_dwell(self, t: int) -> list[tuple[int, str]]:
        due = self.due_dwell
        if due is not None and t >= due:
            self.dwelled = True
            return [(due, DWELL)]
        return []

    def update(self, t: int, lat: float, lon: float) -> list[tuple[int, str]]:
        events = self.check_dwell(t)
        inside = self.fence.contains(lat, lon)
        if inside and not self.inside:
            self.inside, self.entered_at, self.dwelled = True, t, False
            events.append((t, ENTER))
            events.extend(self.check_dwell(t))
        elif not inside and self.inside:
            self.inside, self.entered_at = False, None
            events.append((t, EXIT))
        return events


def geofence_evaluate(fence: Fence, locations: Iterable[tuple[int, float, float]],
                      until: int | None = None) -> list[tuple[int, str]]:
    """Events produced by a time-ordered ``(t, lat, lon)`` stream.

    A DWELL is reported at ``enter + dwell_ms`` once that instant is reached
    by a later fix or by ``until``, provided the device has not left.
    """
    tracker = GeofenceTracker(fence)
    events: list[tuple[int, str]] = []
    for t, lat, lon in locations:
        events.extend(tracker.update(t, lat, lon))
    if until is not None:
        events.extend(tracker.check_dwell(until))
    return events
