"""Sampling packages shipped with the runtime, all backed by the simulated device."""

from __future__ import annotations

from mobisense.formats import carp
from mobisense.probes.packages import PackageRegistry, ProbeSpec, SamplingPackage
from mobisense.probes.probe import (
    BatteryProbe,
    GeofenceProbe,
    OneShotProbe,
    PeriodicProbe,
    PeriodicStreamProbe,
    ScreenProbe,
)
from mobisense.protocol.model import Measure
from mobisense.transform import PHONE_LOG, phone_log_privacy

ACCELEROMETER = carp("accelerometer")
GYROSCOPE = carp("gyroscope")
LIGHT = carp("light")
BATTERY = carp("battery")
MEMORY = carp("memory")
SCREEN = carp("screen")
CONNECTIVITY = carp("connectivity")
BLUETOOTH = carp("bluetooth")
WIFI = carp("wifi")
APP_USAGE = carp("app_usage")
LOCATION = carp("location")
GEOFENCE = carp("geofence")
WEATHER = carp("weather")
AIR_QUALITY = carp("air_quality")
NOISE = carp("noise")
BLOODPRESSURE = carp("bloodpressure")


def _periodic(key, frequency_ms: int, cls=PeriodicProbe, **config) -> ProbeSpec:
    measure = Measure(key, True, {"frequency_ms": str(frequency_ms),
                                  **{k: str(v) for k, v in config.items()}})
    return ProbeSpec(cls, measure)


def _spec(key, cls, **config) -> ProbeSpec:
    return ProbeSpec(cls, Measure(key, True, {k: str(v) for k, v in config.items()}))


def sensors_package() -> SamplingPackage:
    return SamplingPackage("sensors", {
        ACCELEROMETER: _periodic(ACCELEROMETER, 200),
        GYROSCOPE: _periodic(GYROSCOPE, 200),
        LIGHT: _periodic(LIGHT, 1000),
    })


def device_package() -> SamplingPackage:
    return SamplingPackage("device", {
        BATTERY: _spec(BATTERY, BatteryProbe),
        MEMORY: _periodic(MEMORY, 60_000),
        SCREEN: _spec(SCREEN, ScreenProbe),
    })


def connectivity_package() -> SamplingPackage:
    return SamplingPackage("connectivity", {
        CONNECTIVITY: _spec(CONNECTIVITY, OneShotProbe),
        # scan every 10 minutes for 5 seconds
        BLUETOOTH: _periodic(BLUETOOTH, 600_000, PeriodicStreamProbe, duration_ms=5_000),
        WIFI: _periodic(WIFI, 60_000),
    })


def apps_package() -> SamplingPackage:
    return SamplingPackage("apps", {APP_USAGE: _periodic(APP_USAGE, 60_000)})


def context_package() -> SamplingPackage:
    return SamplingPackage("context", {
        LOCATION: _periodic(LOCATION, 30_000),
        GEOFENCE: _spec(GEOFENCE, GeofenceProbe, radius_m=100, dwell_ms=60_000),
        WEATHER: _periodic(WEATHER, 3_600_000),
        AIR_QUALITY: _periodic(AIR_QUALITY, 3_600_000),
    })


def audio_package() -> SamplingPackage:
    return SamplingPackage("audio", {NOISE: _periodic(NOISE, 60_000)})


def communication_package() -> SamplingPackage:
    return SamplingPackage(
        "communication",
        {PHONE_LOG: _periodic(PHONE_LOG, 3_600_000)},
        privacy_functions={PHONE_LOG: phone_log_privacy},
    )


def health_package() -> SamplingPackage:
    """Simulated external blood-pressure cuff."""
    spec = _periodic(BLOODPRESSURE, 3_600_000)
    return SamplingPackage("health", {
        BLOODPRESSURE: ProbeSpec(spec.probe_class, spec.default, device_role="bp_cuff"),
    })


BUILTIN_PACKAGES = (sensors_package, device_package, connectivity_package, apps_package,
                    context_package, audio_package, communication_package, health_package)


def builtin_packages() -> list[SamplingPackage]:
    return [make() for make in BUILTIN_PACKAGES]


def default_package_registry() -> PackageRegistry:
    return PackageRegistry(builtin_packages())
