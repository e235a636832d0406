import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobisense.clock import VirtualClock
from mobisense.errors import ConflictError, IllegalTransitionError, TypeMismatchError, UnknownTypeError
from mobisense.formats import carp
from mobisense.probes import (
    PackageRegistry,
    ProbeKind,
    ProbeState,
    SamplingPackage,
    SimulatedDevice,
    create_probe,
    load_battery_profile,
    load_location_script,
    register_package,
    simulated_signal,
)
from mobisense.probes.builtin import (
    builtin_packages,
    default_package_registry,
    sensors_package,
)
from mobisense.probes.datum import DataPoint, Datum, Light
from mobisense.probes.packages import ProbeSpec, adapt_measure
from mobisense.probes.probe import PeriodicProbe
from mobisense.protocol import Measure, PowerTier

REG = default_package_registry()


def light(freq=1000, **kw):
    return Measure("carp.light", True, {"frequency_ms": str(freq), **kw})


def collect(probe):
    out = []
    probe.add_listener(lambda p, datum, start, end: out.append((start, datum)))
    return out


def running(measure, device):
    probe = create_probe(REG, measure, device)
    times = collect(probe)
    probe.initialize()
    probe.resume()
    return probe, times


# -- registry ---------------------------------------------------------------

def test_register_sensors_package():
    reg = PackageRegistry()
    register_package(reg, sensors_package())
    assert reg.is_registered(carp("accelerometer"))


def test_conflicting_packages():
    reg = PackageRegistry([sensors_package()])
    dup = SamplingPackage("dup", {carp("light"): ProbeSpec(PeriodicProbe, light())})
    with pytest.raises(ConflictError):
        register_package(reg, dup)


def test_types_in_registration_order():
    pkgs = builtin_packages()[:3]
    reg = PackageRegistry(pkgs)
    assert reg.measure_types == [t for p in pkgs for t in p.probes]
    assert [p.name for p in reg] == [p.name for p in pkgs]


def test_every_package_has_all_tiers():
    for p in builtin_packages():
        assert set(p.default_schemas) == set(PowerTier)
        for tier, schema in p.default_schemas.items():
            assert set(schema.defaults) == set(p.measure_types)


def test_tier_schemas_scale_periods():
    pkg = sensors_package()
    schemas = pkg.default_schemas
    acc = carp("accelerometer")
    normal = schemas[PowerTier.NORMAL].defaults[acc].frequency_ms
    assert schemas[PowerTier.LIGHT].defaults[acc].frequency_ms == 2 * normal
    assert schemas[PowerTier.MINIMUM].defaults[acc].frequency_ms == 10 * normal
    assert not schemas[PowerTier.NONE].defaults[acc].enabled


def test_adapt_measure_keeps_other_keys():
    m = light(1000, duration_ms="500", vendor="x")
    assert adapt_measure(m, PowerTier.LIGHT).configuration == {
        "frequency_ms": "2000", "duration_ms": "500", "vendor": "x"}
    assert adapt_measure(m, PowerTier.NORMAL) == m


# -- create_probe -----------------------------------------------------------

def test_create_light_probe(device):
    probe = create_probe(REG, light(1000), device)
    assert probe.kind is ProbeKind.PERIODIC
    assert probe.period == 1000
    assert probe.state is ProbeState.CREATED


def test_create_battery_probe(device):
    probe = create_probe(REG, Measure("carp.battery"), device)
    assert probe.kind is ProbeKind.STREAM
    assert probe.device is device


def test_create_unknown(device):
    with pytest.raises(UnknownTypeError):
        create_probe(REG, Measure("carp.nope"), device)


def test_package_defaults_fill_configuration(device):
    probe = create_probe(REG, Measure("carp.bluetooth"), device)
    assert probe.kind is ProbeKind.PERIODIC_STREAM
    assert (probe.measure.frequency_ms, probe.measure.duration_ms) == (600_000, 5_000)


# -- lifecycle --------------------------------------------------------------

def test_initialize(device):
    probe = create_probe(REG, light(), device)
    probe.initialize()
    assert probe.state is ProbeState.INITIALIZED


def test_resume_after_stop(device):
    probe = create_probe(REG, light(), device)
    probe.initialize()
    probe.stop()
    with pytest.raises(IllegalTransitionError):
        probe.resume()


@pytest.mark.parametrize("actions", [["resume"], ["initialize", "initialize"],
                                     ["initialize", "pause"]])
def test_illegal_transitions(device, actions):
    probe = create_probe(REG, light(), device)
    with pytest.raises(IllegalTransitionError):
        for a in actions:
            probe.apply(a)


def test_periodic_emits_at_resume_then_every_period(device, clock):
    probe, times = running(light(1000), device)
    clock.run_until(10_000)
    assert [t for t, _ in times] == list(range(0, 10_000, 1000))


def test_pause_window_has_no_emissions(device, clock):
    probe, times = running(light(1000), device)
    clock.run_until(5_500)
    probe.pause()
    clock.run_until(15_500)
    probe.resume()
    clock.run_until(20_000)
    stamps = [t for t, _ in times]
    assert not [t for t in stamps if 5_500 <= t < 15_500]
    assert stamps[:6] == [0, 1000, 2000, 3000, 4000, 5000]
    assert stamps[6:] == [15_500, 16_500, 17_500, 18_500, 19_500]


def test_set_measure_changes_spacing(device, clock):
    probe, times = running(light(1000), device)
    clock.run_until(5_000)
    probe.set_measure(light(2000))
    clock.run_until(20_000)
    stamps = [t for t, _ in times]
    gaps = [b - a for a, b in zip(stamps, stamps[1:])]
    # takes effect by the next scheduled emission
    assert stamps[:5] == [0, 1000, 2000, 3000, 4000]
    assert set(gaps[4:]) == {2000}


def test_disabled_measure_pauses(device, clock):
    probe, times = running(light(1000), device)
    clock.run_until(3_000)
    probe.set_measure(light(1000).with_enabled(False))
    n = len(times)
    clock.run_until(30_000)
    assert probe.state is ProbeState.PAUSED
    assert len(times) == n
    probe.set_measure(light(1000))
    assert probe.state is ProbeState.RESUMED
    clock.run_until(32_000)
    assert [t for t, _ in times[n:]] == [30_000, 31_000]


def test_set_measure_type_mismatch(device):
    probe = create_probe(REG, light(), device)
    with pytest.raises(TypeMismatchError):
        probe.set_measure(Measure("carp.gyroscope"))


def test_burst_probe(device, clock):
    m = Measure("carp.bluetooth", True, {"frequency_ms": "10000", "duration_ms": "450"})
    probe, times = running(m, device)
    clock.run_until(20_000)
    assert [t for t, _ in times] == [0, 100, 200, 300, 400, 10_000, 10_100, 10_200, 10_300,
                                     10_400]
    assert all(d.payload.device_count >= 1 for _, d in times)


def test_bluetooth_default_burst_size(device):
    probe = create_probe(REG, Measure("carp.bluetooth"), device)
    assert probe.burst_size == 50


def test_battery_stream_follows_profile(clock):
    dev = SimulatedDevice(clock, battery_profile=[(0, 100), (60_000, 90), (120_000, 80)])
    probe, times = running(Measure("carp.battery"), dev)
    clock.run_until(600_000)
    assert [(t, d.payload.level) for t, d in times] == [(0, 100), (60_000, 90), (120_000, 80)]


def test_geofence_probe_enter_dwell(clock):
    script = [(0, 55.0, 12.0), (30_000, 55.01, 12.0), (120_000, 55.0, 12.0),
              (600_000, 55.0, 12.0)]
    dev = SimulatedDevice(clock, location_script=script)
    m = Measure("carp.geofence", True, {"center_lat": "55.0", "center_lon": "12.0",
                                        "radius_m": "100", "dwell_ms": "60000"})
    probe, times = running(m, dev)
    clock.run_until(1_000_000)
    assert [(t, d.payload.event) for t, d in times] == [
        (0, "ENTER"), (30_000, "EXIT"), (120_000, "ENTER"), (180_000, "DWELL")]


# -- simulated device -------------------------------------------------------

def test_signal_deterministic():
    a = SimulatedDevice(VirtualClock(), rng_seed=3)
    b = SimulatedDevice(VirtualClock(), rng_seed=3)
    for t in (0, 1234, 86_400_000):
        assert simulated_signal(a, "carp.accelerometer", t) == \
            simulated_signal(b, "carp.accelerometer", t)


def test_seed_changes_signal():
    a = SimulatedDevice(VirtualClock(), rng_seed=3)
    b = SimulatedDevice(VirtualClock(), rng_seed=4)
    assert simulated_signal(a, "carp.accelerometer", 5) != \
        simulated_signal(b, "carp.accelerometer", 5)


def test_battery_step_hold():
    dev = SimulatedDevice(VirtualClock(), battery_profile=[(0, 100), (3_600_000, 90)])
    assert simulated_signal(dev, "carp.battery", 1_800_000).payload.level == 100
    assert simulated_signal(dev, "carp.battery", 3_600_000).payload.level == 90


@given(st.integers(0, 10 * 86_400_000), st.integers(0, 2**32))
def test_light_non_negative(t, seed):
    dev = SimulatedDevice(VirtualClock(), rng_seed=seed)
    assert simulated_signal(dev, "carp.light", t).payload.lux >= 0


def test_location_interpolates():
    dev = SimulatedDevice(VirtualClock(), location_script=[(0, 10.0, 20.0), (1000, 12.0, 22.0)])
    assert dev.location(500) == pytest.approx((11.0, 21.0))
    assert dev.location(5000) == (12.0, 22.0)


@pytest.mark.parametrize("key", ["carp.geofence", "omh.light", "carp.nope"])
def test_signal_unknown_type(key):
    with pytest.raises(UnknownTypeError):
        simulated_signal(SimulatedDevice(), key, 0)


def test_device_rejects_unsorted_or_out_of_range():
    with pytest.raises(ValueError):
        SimulatedDevice(battery_profile=[(10, 50), (0, 60)])
    with pytest.raises(ValueError):
        SimulatedDevice(battery_profile=[(0, 101)])


def test_csv_loaders(tmp_path):
    bp = tmp_path / "battery.csv"
    bp.write_text("t_ms,level\n0,100\n60000,95\n")
    assert load_battery_profile(bp) == [(0, 100), (60_000, 95)]
    loc = tmp_path / "loc.csv"
    loc.write_text("t_ms,lat,lon\n0,55.1,12.5\n")
    assert load_location_script(loc) == [(0, 55.1, 12.5)]
    bad = tmp_path / "bad.csv"
    bad.write_text("0,100\n")
    with pytest.raises(ValueError):
        load_battery_profile(bad)


# -- data points ------------------------------------------------------------

def test_datum_must_match_format():
    with pytest.raises((TypeError, ValueError)):
        Datum(carp("accelerometer"), Light(1.0))


def test_data_point_invariants():
    d = Datum(carp("light"), Light(1.0))
    with pytest.raises(ValueError):
        DataPoint.create("s", "u", d, 10, end_time=5)
    p = DataPoint.create("s", "u", d, 10, end_time=10)
    assert p.format == p.body.format


# -- lifecycle fuzz ---------------------------------------------------------

LEGAL = {
    ProbeState.CREATED: ["initialize", "stop"],
    ProbeState.INITIALIZED: ["resume", "stop"],
    ProbeState.RESUMED: ["pause", "stop", "advance"],
    ProbeState.PAUSED: ["resume", "stop", "advance"],
    ProbeState.STOPPED: ["advance"],
}


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 10**6), max_size=30),
       st.sampled_from(["carp.light", "carp.bluetooth", "carp.battery", "carp.screen"]))
def test_no_emission_outside_resumed(choices, type_):
    clock = VirtualClock()
    dev = SimulatedDevice(clock, battery_profile=[(i * 500, 100 - i) for i in range(50)])
    m = Measure(type_, True, {"frequency_ms": "700", "duration_ms": "300"}
                if type_ != "carp.battery" else {})
    probe = create_probe(REG, m, dev)
    bad = []
    probe.add_listener(lambda p, *_: bad.append(p.state) if p.state is not ProbeState.RESUMED
                       else None)
    for c in choices:
        options = LEGAL[probe.state]
        action = options[c % len(options)]
        if action == "advance":
            clock.advance(c % 5000)
        else:
            probe.apply(action)
    clock.advance(5000)
    assert bad == []
