"""Deterministic stand-in for the phone's sensors and services.

Every reading is a pure function of ``(rng_seed, measure type, t)`` plus the
scripted battery profile and location track, so two runs with the same
inputs produce identical data.
"""

from __future__ import annotations

import bisect
import csv
import functools
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from mobisense.clock import Clock, VirtualClock
from mobisense.errors import UnknownTypeError
from mobisense.formats import CARP, FormatKey
from mobisense.probes import datum as d

DEFAULT_LOCATION = (55.6761, 12.5683)

_MASK = (1 << 64) - 1


def _mix(x: int) -> int:
    # splitmix64 finalizer
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


@functools.lru_cache(maxsize=None)
def _salt(name: str) -> int:
    return zlib.crc32(name.encode())


def unit_noise(seed: int, salt: int, t: int, k: int = 0) -> float:
    """Uniform value in [0, 1) determined by its arguments."""
    return _mix(_mix((seed ^ (salt << 32)) & _MASK) ^ ((t * 4 + k) & _MASK)) / 2.0**64


WeatherStub = Callable[[int, float, float], d.Weather]

_CONDITIONS = ("clear", "clouds", "rain", "drizzle", "fog", "snow")


def seeded_weather(seed: int) -> WeatherStub:
    """Weather-service responder returning a daily temperature cycle."""
    salt = _salt("weather")

    def respond(t: int, lat: float, lon: float) -> d.Weather:
        hour = (t // 3_600_000) % 24
        temp = 10 + 6 * math.sin(2 * math.pi * (hour - 9) / 24) - abs(lat - 45) / 10
        condition = _CONDITIONS[int(unit_noise(seed, salt, t // 3_600_000) * len(_CONDITIONS))]
        return d.Weather(round(temp, 2), condition)

    return respond


@dataclass
class SimulatedDevice:
    """Scripted sensor source.

    Script timestamps are offsets from ``origin_ms``; under a virtual clock
    starting at 0 they are plain epoch milliseconds.
    """

    clock: Clock = field(default_factory=VirtualClock)
    rng_seed: int = 0
    battery_profile: Sequence[tuple[int, int]] = ((0, 100),)
    location_script: Sequence[tuple[int, float, float]] = ()
    weather_stub: WeatherStub | None = None
    origin_ms: int = 0

    def __post_init__(self) -> None:
        self.battery_profile = [(int(t), int(level)) for t, level in self.battery_profile]
        self.location_script = [(int(t), float(lat), float(lon))
                                for t, lat, lon in self.location_script]
        if not self.battery_profile:
            raise ValueError("battery profile is empty")
        _check_sorted([t for t, _ in self.battery_profile], "battery profile")
        _check_sorted([t for t, *_ in self.location_script], "location script")
        for t, level in self.battery_profile:
            if not 0 <= level <= 100:
                raise ValueError(f"battery level {level} at t={t} outside [0, 100]")
        for t, lat, lon in self.location_script:
            if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                raise ValueError(f"location ({lat}, {lon}) at t={t} out of range")
        if self.weather_stub is None:
            self.weather_stub = seeded_weather(self.rng_seed)
        self._battery_times = [t for t, _ in self.battery_profile]
        self._location_times = [t for t, *_ in self.location_script]

    # -- scripted inputs --------------------------------------------------

    def battery_level(self, t: int) -> int:
        """Last profile level at or before ``t`` (the first level before the profile starts)."""
        i = bisect.bisect_right(self._battery_times, t - self.origin_ms) - 1
        return self.battery_profile[max(i, 0)][1]

    def battery_status(self, t: int) -> str:
        rel = t - self.origin_ms
        i = max(bisect.bisect_right(self._battery_times, rel) - 1, 0)
        level = self.battery_profile[i][1]
        if level >= 100:
            return "full"
        if i + 1 < len(self.battery_profile) and self.battery_profile[i + 1][1] > level:
            return "charging"
        return "discharging"

    def battery_change_times(self, after: int) -> list[int]:
        """Absolute times of profile points strictly after ``after``."""
        rel = after - self.origin_ms
        i = bisect.bisect_right(self._battery_times, rel)
        return [t + self.origin_ms for t in self._battery_times[i:]]

    def location(self, t: int) -> tuple[float, float]:
        """Linear interpolation of the location script, clamped at both ends."""
        script = self.location_script
        if not script:
            return DEFAULT_LOCATION
        rel = t - self.origin_ms
        i = bisect.bisect_right(self._location_times, rel)
        if i == 0:
            return script[0][1], script[0][2]
        if i == len(script):
            return script[-1][1], script[-1][2]
        t0, lat0, lon0 = script[i - 1]
        t1, lat1, lon1 = script[i]
        f = (rel - t0) / (t1 - t0)
        return lat0 + f * (lat1 - lat0), lon0 + f * (lon1 - lon0)

    def location_times(self, after: int) -> list[int]:
        """Absolute script times at or after ``after``."""
        i = bisect.bisect_left(self._location_times, after - self.origin_ms)
        return [t + self.origin_ms for t in self._location_times[i:]]

    def noise(self, name: str, t: int, k: int = 0) -> float:
        return unit_noise(self.rng_seed, _salt(name), t, k)


def _check_sorted(times: list[int], what: str) -> None:
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError(f"{what} is not sorted by time")


# --------------------------------------------------------------------------
# signal generators
# --------------------------------------------------------------------------

def _accelerometer(dev: SimulatedDevice, t: int) -> d.Accelerometer:
    n = dev.noise
    phase = 2 * math.pi * (t % 1000) / 1000
    return d.Accelerometer(
        round(0.5 * math.sin(phase) + 0.2 * (n("acc", t, 0) - 0.5), 4),
        round(0.5 * math.cos(phase) + 0.2 * (n("acc", t, 1) - 0.5), 4),
        round(9.81 + 0.2 * (n("acc", t, 2) - 0.5), 4),
    )


def _gyroscope(dev: SimulatedDevice, t: int) -> d.Gyroscope:
    n = dev.noise
    return d.Gyroscope(round(n("gyro", t, 0) - 0.5, 4), round(n("gyro", t, 1) - 0.5, 4),
                       round(n("gyro", t, 2) - 0.5, 4))


def _light(dev: SimulatedDevice, t: int) -> d.Light:
    hour = (t % 86_400_000) / 3_600_000
    daylight = max(0.0, math.sin(math.pi * (hour - 6) / 12)) if 6 <= hour <= 18 else 0.0
    return d.Light(round(800 * daylight + 5 * dev.noise("light", t), 3))


def _location(dev: SimulatedDevice, t: int) -> d.Location:
    lat, lon = dev.location(t)
    return d.Location(round(lat, 7), round(lon, 7))


def _battery(dev: SimulatedDevice, t: int) -> d.Battery:
    return d.Battery(dev.battery_level(t), dev.battery_status(t))


def _memory(dev: SimulatedDevice, t: int) -> d.Memory:
    return d.Memory(1_500_000_000 + int(dev.noise("memory", t) * 500_000_000))


def _screen(dev: SimulatedDevice, t: int) -> d.Screen:
    return d.Screen(("on", "off", "unlock")[int(dev.noise("screen", t) * 3)])


def _phone_log(dev: SimulatedDevice, t: int) -> d.PhoneLog:
    number = "".join(str(int(dev.noise("phone", t, k) * 10)) for k in range(8))
    return d.PhoneLog(number, int(dev.noise("phone_dur", t) * 600),
                      "in" if dev.noise("phone_dir", t) < 0.5 else "out")


def _weather(dev: SimulatedDevice, t: int) -> d.Weather:
    lat, lon = dev.location(t)
    return dev.weather_stub(t, lat, lon)


_AQ_CATEGORIES = ("good", "fair", "moderate", "poor", "very_poor")


def _air_quality(dev: SimulatedDevice, t: int) -> d.AirQuality:
    idx = int(dev.noise("air_quality", t // 600_000) * 5)
    return d.AirQuality(idx + 1, _AQ_CATEGORIES[idx])


def _noise(dev: SimulatedDevice, t: int) -> d.Noise:
    mean = 35 + 25 * dev.noise("noise", t, 0)
    return d.Noise(round(mean, 2), round(mean + 10 * dev.noise("noise", t, 1), 2))


_SSIDS = ("home", "office", "cafe-guest", "eduroam")


def _wifi(dev: SimulatedDevice, t: int) -> d.Wifi:
    i = int(dev.noise("wifi", t // 3_600_000) * len(_SSIDS))
    return d.Wifi(_SSIDS[i], f"00:1a:2b:3c:4d:{i:02x}")


def _connectivity(dev: SimulatedDevice, t: int) -> d.Connectivity:
    return d.Connectivity(("wifi", "mobile", "none")[int(dev.noise("conn", t // 3_600_000) * 3)])


_APPS = ("mail", "browser", "maps", "camera", "messages")


def _app_usage(dev: SimulatedDevice, t: int) -> d.AppUsage:
    return d.AppUsage(_APPS[int(dev.noise("apps", t) * len(_APPS))],
                      int(dev.noise("apps", t, 1) * 60_000))


def _bluetooth(dev: SimulatedDevice, t: int) -> d.Bluetooth:
    i = int(dev.noise("bt", t, 0) * 16)
    return d.Bluetooth(
        device_name=f"device-{i:02d}",
        device_id=f"AA:BB:CC:DD:EE:{i:02X}",
        device_type=("le", "classic", "dual")[i % 3],
        power_level=-10 - int(dev.noise("bt", t, 1) * 20),
        rssi=-40 - int(dev.noise("bt", t, 2) * 50),
        device_count=1 + int(dev.noise("bt", t, 3) * 8),
    )


def _bloodpressure(dev: SimulatedDevice, t: int) -> d.BloodPressure:
    return d.BloodPressure(
        float(110 + int(dev.noise("bp", t, 0) * 25)),
        float(70 + int(dev.noise("bp", t, 1) * 15)),
        ("sitting", "standing", "lying_down")[int(dev.noise("bp", t, 2) * 3)],
    )


SIGNALS: dict[str, Callable[[SimulatedDevice, int], d.Payload]] = {
    "accelerometer": _accelerometer,
    "gyroscope": _gyroscope,
    "light": _light,
    "location": _location,
    "battery": _battery,
    "memory": _memory,
    "screen": _screen,
    "phone_log": _phone_log,
    "weather": _weather,
    "air_quality": _air_quality,
    "noise": _noise,
    "wifi": _wifi,
    "connectivity": _connectivity,
    "app_usage": _app_usage,
    "bluetooth": _bluetooth,
    "bloodpressure": _bloodpressure,
}


def simulated_signal(dev: SimulatedDevice, type_: FormatKey | str, t: int) -> d.Datum:
    key = FormatKey.parse(type_) if isinstance(type_, str) else type_
    gen = SIGNALS.get(key.type) if key.namespace == CARP else None
    if gen is None:
        raise UnknownTypeError(key, f"no simulated signal for {key}")
    return d.Datum(key, gen(dev, t))


# --------------------------------------------------------------------------
# script files
# --------------------------------------------------------------------------

def _read_csv(path: Path | str, header: list[str]) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows or [c.strip() for c in rows[0]] != header:
        raise ValueError(f"{path}: expected header row {','.join(header)!r}")
    return rows[1:]


def load_battery_profile(path: Path | str) -> list[tuple[int, int]]:
    return [(int(t), int(level)) for t, level in _read_csv(path, ["t_ms", "level"])]


def load_location_script(path: Path | str) -> list[tuple[int, float, float]]:
    return [(int(t), float(lat), float(lon))
            for t, lat, lon in _read_csv(path, ["t_ms", "lat", "lon"])]
