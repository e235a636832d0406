"""Study runtime: controller, trigger executors and the event stream."""

from mobisense.runtime.controller import (
    AdaptationEvent,
    ControllerState,
    Registries,
    RunCounters,
    StudyController,
    controller_new,
    default_registries,
    write_adaptation_csv,
)
from mobisense.runtime.stream import EventStream
from mobisense.runtime.triggers import TriggerExecutor, next_fire

__all__ = [
    "AdaptationEvent", "ControllerState", "EventStream", "Registries", "RunCounters",
    "StudyController", "TriggerExecutor", "controller_new", "default_registries",
    "next_fire", "write_adaptation_csv",
]
