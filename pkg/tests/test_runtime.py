import random

import pytest

from conftest import make_protocol, measure_json
from mobisense.clock import VirtualClock
from mobisense.errors import (
    IllegalTransitionError,
    UnknownEndpointError,
    UnknownNamespaceError,
    UnknownTypeError,
)
from mobisense.formats import FormatKey, carp
from mobisense.probes import SimulatedDevice
from mobisense.probes.datum import BloodPressure, DataPoint, Datum, GenericPayload, Light, PhoneLog
from mobisense.probes.probe import ProbeState
from mobisense.protocol import PowerTier
from mobisense.runtime import ControllerState, controller_new, default_registries
from mobisense.sinks import FileDataManager, MemoryDataManager
from mobisense.transform import DatumTransformer, hash_value

SHA256_12345678 = "ef797c8118f02dfb649607dd5d3f8c7623048c9c063d532cc95c5ed7a898a64f"


def controller(measures, clock=None, battery=((0, 100),), script=(), **kwargs):
    clock = clock or VirtualClock(0)
    dev = SimulatedDevice(clock, rng_seed=1, battery_profile=battery, location_script=script)
    out_dir = kwargs.pop("out_dir", None)
    registries = kwargs.pop("registries", None)
    c = controller_new(make_protocol(measures, **kwargs), registries, clock, device=dev,
                       out_dir=out_dir)
    return c, clock


def started(measures, **kwargs):
    c, clock = controller(measures, **kwargs)
    c.initialize()
    c.start()
    return c, clock


def published(c):
    return c.data_manager.points


# -- controller_new ---------------------------------------------------------

def test_file_endpoint_resolves_file_manager(tmp_path):
    c, _ = controller([measure_json("carp.light")], out_dir=tmp_path,
                      endpoint={"kind": "file", "buffer_size": 500000, "zip": False,
                                "encrypt": False})
    assert isinstance(c.data_manager, FileDataManager)
    assert c.state is ControllerState.CREATED


def test_bogus_endpoint():
    with pytest.raises(UnknownEndpointError):
        controller([measure_json("carp.light")], endpoint={"kind": "bogus"})


def test_omh_target_schema():
    c, _ = controller([measure_json("carp.light")], data_format="omh")
    assert c.target_schema is c.registries.transformers.schemas["omh"]
    assert carp("bloodpressure") in c.target_schema


def test_unknown_namespace():
    with pytest.raises(UnknownNamespaceError):
        controller([measure_json("carp.light")], data_format="fhir")


# -- initialize -------------------------------------------------------------

def test_initialize_creates_every_probe():
    bt = {"trigger": {"kind": "periodic", "period_ms": 60000},
          "task": {"name": "t2", "measures": [measure_json("carp.memory"),
                                               measure_json("carp.wifi")]}}
    c, _ = controller([measure_json("carp.light"), measure_json("carp.battery")],
                      extra_tasks=[bt])
    c.initialize()
    assert c.state is ControllerState.INITIALIZED
    assert len(c.probes) == 4
    assert all(p.state is ProbeState.INITIALIZED for p in c.probes)
    with pytest.raises(IllegalTransitionError):
        c.initialize()


def test_initialize_unknown_type():
    c, _ = controller([measure_json("carp.light"), measure_json("carp.lost_sensor")])
    with pytest.raises(UnknownTypeError) as err:
        c.initialize()
    assert "carp.lost_sensor" in str(err.value)


def test_start_requires_initialize():
    c, _ = controller([measure_json("carp.light")])
    with pytest.raises(IllegalTransitionError):
        c.start()


# -- lifecycle --------------------------------------------------------------

def test_ten_seconds_of_light():
    c, clock = started([measure_json("carp.light", 1000)])
    clock.advance(10_000)
    assert len(published(c)) in (10, 11)


def test_pause_window_is_empty():
    c, clock = started([measure_json("carp.light", 1000), measure_json("carp.accelerometer", 200)])
    clock.run_until(30_000)
    c.pause()
    clock.run_until(90_000)
    c.resume()
    clock.run_until(120_000)
    stamps = [p.start_time for p in published(c)]
    assert not [t for t in stamps if 30_000 <= t < 90_000]
    assert [t for t in stamps if t >= 90_000]


def test_stop_is_terminal():
    c, clock = started([measure_json("carp.light", 1000)])
    clock.advance(5000)
    c.stop()
    assert all(p.state is ProbeState.STOPPED for p in c.probes)
    assert c.data_manager.closed
    with pytest.raises(IllegalTransitionError):
        c.resume()
    n = len(published(c))
    clock.advance(5000)
    assert len(published(c)) == n


# -- emit -------------------------------------------------------------------

def raw(c, datum, t=0):
    return DataPoint.create(c.protocol.id, c.protocol.user_id, datum, t)


def test_phone_log_hashed_when_privacy_on():
    c, _ = started([measure_json("carp.light", 1000)], privacy_enabled=True)
    c.emit(raw(c, Datum(carp("phone_log"), PhoneLog("12345678", 30, "in"))))
    p = published(c)[-1]
    assert p.body.payload.number == SHA256_12345678
    assert p.body.payload.duration_s == 30


def test_phone_log_untouched_when_privacy_off():
    c, _ = started([measure_json("carp.light", 1000)])
    c.emit(raw(c, Datum(carp("phone_log"), PhoneLog("12345678", 30, "in"))))
    assert published(c)[-1].body.payload.number == "12345678"


def test_bloodpressure_becomes_omh():
    c, _ = started([measure_json("carp.light", 1000)], data_format="omh")
    c.emit(raw(c, Datum(carp("bloodpressure"), BloodPressure(120, 80, "sitting"))))
    p = published(c)[-1]
    assert str(p.format) == "omh.bloodpressure"
    assert p.body.payload.systolic_blood_pressure == {"value": 120, "unit": "mmHg"}


def test_unmapped_keeps_carp_key():
    c, _ = started([measure_json("carp.accelerometer", 1000)], data_format="omh")
    c.emit(raw(c, Datum(carp("light"), Light(1.0))))
    assert all(str(p.format).startswith("carp.") for p in published(c))


def test_failed_transform_becomes_error_datum():
    regs = default_registries()

    def broken(d):
        raise ValueError("no mapping today")

    regs.transformers.register(DatumTransformer(carp("light"), "omh", broken))
    c, clock = started([measure_json("carp.light", 1000)], data_format="omh", registries=regs)
    clock.advance(3000)
    formats = {str(p.format) for p in published(c)}
    assert formats == {"carp.error"}
    assert "no mapping today" in published(c)[0].body.payload.message
    assert c.state is ControllerState.RUNNING


def test_privacy_runs_before_transform():
    regs = default_registries()
    seen = []

    def to_omh(d):
        seen.append(d.payload.number)
        return Datum(FormatKey("omh", "phone_log"), GenericPayload(number=d.payload.number))

    regs.transformers.register(DatumTransformer(carp("phone_log"), "omh", to_omh))
    c, _ = started([measure_json("carp.light", 1000)], data_format="omh",
                   privacy_enabled=True, registries=regs)
    marker = "MARKER-555"
    c.emit(raw(c, Datum(carp("phone_log"), PhoneLog(marker, 1, "in"))))
    p = published(c)[-1]
    assert seen == [hash_value(marker)]
    assert p.body.payload.number == hash_value(marker) != marker


def test_emit_outside_running():
    c, _ = controller([measure_json("carp.light", 1000)])
    c.initialize()
    with pytest.raises(IllegalTransitionError):
        c.emit(raw(c, Datum(carp("light"), Light(1.0))))


# -- adaptation -------------------------------------------------------------

@pytest.mark.parametrize("level, tier", [(75, PowerTier.NORMAL), (45, PowerTier.LIGHT),
                                         (20, PowerTier.MINIMUM), (5, PowerTier.NONE),
                                         (50, PowerTier.LIGHT), (30, PowerTier.MINIMUM),
                                         (10, PowerTier.NONE), (51, PowerTier.NORMAL)])
def test_tier_bands(level, tier):
    c, _ = started([measure_json("carp.light", 1000)])
    assert c.on_battery(level) is tier
    assert c.power_state is tier


def test_none_tier_keeps_only_battery():
    c, clock = started([measure_json("carp.light", 1000), measure_json("carp.battery"),
                        measure_json("carp.memory", 1000)])
    c.on_battery(5)
    states = {str(p.type): p.state for p in c.probes}
    assert states == {"carp.light": ProbeState.PAUSED, "carp.memory": ProbeState.PAUSED,
                      "carp.battery": ProbeState.RESUMED}
    battery = next(p for p in c.probes if str(p.type) == "carp.battery")
    assert battery.measure.enabled
    n = len(published(c))
    clock.advance(60_000)
    assert all(str(p.format) == "carp.battery" for p in published(c)[n:])


def test_recharge_restores_sampling():
    c, clock = started([measure_json("carp.light", 1000)])
    c.on_battery(5)
    clock.advance(10_000)
    n = len(published(c))
    c.on_battery(80)
    clock.advance(10_000)
    assert len(published(c)) - n in (10, 11)
    assert [(e.old_tier, e.new_tier) for e in c.adaptations] == [
        (PowerTier.NORMAL, PowerTier.NONE), (PowerTier.NONE, PowerTier.NORMAL)]


def test_light_tier_doubles_period():
    c, clock = started([measure_json("carp.light", 1000)])
    c.on_battery(40)
    n = len(published(c))
    clock.advance(20_000)
    stamps = [p.start_time for p in published(c)[n:]]
    assert {b - a for a, b in zip(stamps, stamps[1:])} == {2000}


def test_initial_low_battery_applies_before_sampling():
    c, clock = started([measure_json("carp.light", 1000)], battery=((0, 25),))
    clock.advance(10_000)
    stamps = [p.start_time for p in published(c)]
    assert stamps == [0]
    assert c.adaptations[0].t_ms == 0 and c.adaptations[0].new_tier is PowerTier.MINIMUM


# -- sampling-event trigger -------------------------------------------------

def test_geofence_enter_starts_bluetooth():
    fence = {"center_lat": "55.0", "center_lon": "12.0", "radius_m": "100"}
    script = [(0, 55.01, 12.0), (600_000, 55.0, 12.0), (1_200_000, 55.0, 12.0)]
    bt = {"trigger": {"kind": "sampling_event", "source_measure_type": "carp.geofence",
                      "condition": {"field_name": "event", "expected_value": "ENTER"}},
          "task": {"name": "bt", "measures": [
              measure_json("carp.bluetooth", 60_000, duration_ms=500)]}}
    c, clock = started([measure_json("carp.geofence", **fence)], script=script,
                       extra_tasks=[bt])
    clock.run_until(900_000)
    points = published(c)
    enter = [p.start_time for p in points if str(p.format) == "carp.geofence"
             and p.body.payload.event == "ENTER"]
    assert enter == [600_000]
    bt_times = [p.start_time for p in points if str(p.format) == "carp.bluetooth"]
    assert bt_times and min(bt_times) >= 600_000
    assert bt_times[:5] == [600_000, 600_100, 600_200, 600_300, 600_400]


# -- invariants -------------------------------------------------------------

ACTIONS = {
    ControllerState.RUNNING: ["pause", "stop", "advance", "battery"],
    ControllerState.PAUSED: ["resume", "stop", "advance", "battery"],
    ControllerState.STOPPED: ["advance"],
}


@pytest.mark.parametrize("seed", range(25))
def test_random_lifecycle_never_publishes_outside_running(seed):
    rng = random.Random(seed)
    c, clock = started([measure_json("carp.light", 700), measure_json("carp.bluetooth", 5000,
                                                                       duration_ms=1000),
                        measure_json("carp.battery"), measure_json("carp.screen")],
                       battery=[(i * 20_000, 100 - i) for i in range(101)])
    bad = []
    c.events.listen(lambda p: bad.append(c.state) if c.state is not ControllerState.RUNNING
                    else None)
    for _ in range(60):
        action = rng.choice(ACTIONS[c.state])
        if action == "advance":
            clock.advance(rng.randrange(1, 20_000))
        elif action == "battery":
            c.on_battery(rng.randrange(0, 101))
        else:
            getattr(c, action)()
    assert bad == []


def test_runs_are_deterministic():
    def run():
        c, clock = started([measure_json("carp.accelerometer", 200),
                            measure_json("carp.screen"), measure_json("carp.noise", 1000)])
        clock.advance(600_000)
        from mobisense.sinks import serialize_data_point
        return [serialize_data_point(p) for p in published(c)]

    assert run() == run()


def test_every_point_header_matches_body():
    c, clock = started([measure_json("carp.bloodpressure", 60_000),
                        measure_json("carp.phone_log", 60_000)], data_format="omh",
                       privacy_enabled=True)
    clock.advance(600_000)
    assert published(c)
    assert all(p.header.format == p.body.format for p in published(c))
    assert isinstance(c.data_manager, MemoryDataManager)
