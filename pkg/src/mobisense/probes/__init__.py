"""Probes, sampling packages, datum payloads and the simulated device."""

from mobisense.probes.datum import DataPoint, DataPointHeader, Datum, Payload, error_datum
from mobisense.probes.device import (
    SimulatedDevice,
    load_battery_profile,
    load_location_script,
    simulated_signal,
)
from mobisense.probes.geofence import Fence, GeofenceTracker, geofence_evaluate, haversine_m
from mobisense.probes.packages import (
    PackageRegistry,
    ProbeSpec,
    SamplingPackage,
    adapt_measure,
    create_probe,
    register_package,
)
from mobisense.probes.probe import Probe, ProbeKind, ProbeState

__all__ = [
    "DataPoint", "DataPointHeader", "Datum", "Fence", "GeofenceTracker", "PackageRegistry",
    "Payload", "Probe", "ProbeKind", "ProbeSpec", "ProbeState", "SamplingPackage",
    "SimulatedDevice", "adapt_measure", "create_probe", "error_datum", "geofence_evaluate",
    "haversine_m", "load_battery_profile", "load_location_script", "register_package",
    "simulated_signal",
]
