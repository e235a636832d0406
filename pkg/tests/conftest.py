import json

import pytest

from mobisense.clock import VirtualClock
from mobisense.probes.device import SimulatedDevice
from mobisense.protocol import parse_protocol


def measure_json(type_, frequency_ms=None, enabled=True, **config):
    configuration = {k: str(v) for k, v in config.items()}
    if frequency_ms is not None:
        configuration["frequency_ms"] = str(frequency_ms)
    return {"type": type_, "enabled": enabled, "configuration": configuration}


def protocol_json(measures, endpoint=None, trigger=None, extra_tasks=(), **fields):
    doc = {
        "id": "ex-1",
        "user_id": "user@example.org",
        "name": "test study",
        "data_format": "carp",
        "privacy_enabled": False,
        "data_end_point": endpoint or {"kind": "memory"},
        "trigger_tasks": [
            {"trigger": trigger or {"kind": "immediate"},
             "task": {"name": "t1", "measures": list(measures)}},
            *extra_tasks,
        ],
    }
    doc.update(fields)
    return doc


def make_protocol(measures, **kwargs):
    return parse_protocol(json.dumps(protocol_json(measures, **kwargs)))


@pytest.fixture
def clock():
    return VirtualClock(0)


@pytest.fixture
def device(clock):
    return SimulatedDevice(clock, rng_seed=7)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=int):
            terminalreporter.write_line(ACCEPTANCE[key])
