"""Study domain model: protocol, triggers, tasks, measures, sampling schemas.

All types are frozen; collections are stored as tuples so a protocol can be
shared between the controller, the executors and the CLI without copying.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Union

from mobisense.errors import InvariantError
from mobisense.formats import CARP, FormatKey, is_valid_namespace
from mobisense.protocol.endpoints import DataEndPoint

FREQUENCY_MS = "frequency_ms"
DURATION_MS = "duration_ms"

WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")

_MEASURE_TYPE = re.compile(r"[a-z][a-z0-9_]*\.[a-z][a-z0-9_]*\Z")


class PowerTier(enum.Enum):
    NORMAL = "normal"
    LIGHT = "light"
    MINIMUM = "minimum"
    NONE = "none"


def tier_for_level(level: float) -> PowerTier:
    """Map a battery percentage to its sampling tier.

    A boundary level belongs to the band below it, so 50 is light and 10 is none.

    >>> tier_for_level(75), tier_for_level(50), tier_for_level(10)
    (<PowerTier.NORMAL: 'normal'>, <PowerTier.LIGHT: 'light'>, <PowerTier.NONE: 'none'>)
    """
    if level > 50:
        return PowerTier.NORMAL
    if level > 30:
        return PowerTier.LIGHT
    if level > 10:
        return PowerTier.MINIMUM
    return PowerTier.NONE


# --------------------------------------------------------------------------
# triggers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ImmediateTrigger:
    pass


@dataclass(frozen=True)
class PeriodicTrigger:
    period_ms: int

    def __post_init__(self) -> None:
        if self.period_ms <= 0:
            raise InvariantError(f"period must be > 0, got {self.period_ms}")


@dataclass(frozen=True)
class ScheduledTrigger:
    at_ms: int


@dataclass(frozen=True)
class RecurrentScheduledTrigger:
    """Fires at ``hour:minute`` UTC every day, or on one weekday (0=Monday)."""

    hour: int
    minute: int
    weekday: int | None = None

    def __post_init__(self) -> None:
        if not (0 <= self.hour < 24 and 0 <= self.minute < 60):
            raise InvariantError(f"time_of_day {self.hour:02d}:{self.minute:02d} "
                                 "outside [00:00, 24:00)")
        if self.weekday is not None and not 0 <= self.weekday < 7:
            raise InvariantError(f"weekday must be in 0..6, got {self.weekday}")

    @property
    def time_of_day(self) -> str:
        return f"{self.hour:02d}:{self.minute:02d}"

    @property
    def minute_of_day(self) -> int:
        return self.hour * 60 + self.minute


@dataclass(frozen=True)
class EventCondition:
    field_name: str
    expected_value: str


@dataclass(frozen=True)
class SamplingEventTrigger:
    source_measure_type: FormatKey
    condition: EventCondition | None = None

    def matches(self, datum) -> bool:
        if datum.format != self.source_measure_type:
            return False
        if self.condition is None:
            return True
        value = getattr(datum.payload, self.condition.field_name, None)
        return value is not None and str(value) == self.condition.expected_value


Trigger = Union[ImmediateTrigger, PeriodicTrigger, ScheduledTrigger,
                RecurrentScheduledTrigger, SamplingEventTrigger]

TIME_DRIVEN = (PeriodicTrigger, ScheduledTrigger, RecurrentScheduledTrigger)


# --------------------------------------------------------------------------
# measures and tasks
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Measure:
    type: FormatKey
    enabled: bool = True
    configuration: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if isinstance(self.type, str):
            if not _MEASURE_TYPE.match(self.type):
                raise InvariantError(f"measure type {self.type!r} is not "
                                     "<namespace>.<type> in lowercase")
            object.__setattr__(self, "type", FormatKey.parse(self.type))
        for key, value in self.configuration.items():
            if not isinstance(value, str):
                raise InvariantError(f"configuration value for {key!r} must be a string")
        freq = self._int_config(FREQUENCY_MS)
        duration = self._int_config(DURATION_MS)
        if freq is not None and freq <= 0:
            raise InvariantError(f"frequency_ms must be > 0, got {freq}")
        if duration is not None:
            if duration < 0:
                raise InvariantError(f"duration_ms must be >= 0, got {duration}")
            if freq is not None and duration > freq:
                raise InvariantError(f"duration_ms {duration} exceeds frequency_ms {freq}")

    def _int_config(self, key: str) -> int | None:
        raw = self.configuration.get(key)
        if raw is None:
            return None
        try:
            return int(raw)
        except ValueError:
            raise InvariantError(f"{key} must be an integer, got {raw!r}") from None

    @property
    def frequency_ms(self) -> int | None:
        return self._int_config(FREQUENCY_MS)

    @property
    def duration_ms(self) -> int | None:
        return self._int_config(DURATION_MS)

    def configured(self, **values: object) -> "Measure":
        """Copy with configuration keys replaced (``None`` removes a key)."""
        config = dict(self.configuration)
        for key, value in values.items():
            if value is None:
                config.pop(key, None)
            else:
                config[key] = str(value)
        return replace(self, configuration=config)

    def with_enabled(self, enabled: bool) -> "Measure":
        return replace(self, enabled=enabled)


@dataclass(frozen=True)
class Task:
    name: str
    measures: tuple[Measure, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "measures", tuple(self.measures))
        if not self.measures:
            raise InvariantError(f"task {self.name!r} has no measures")
        seen = set()
        for m in self.measures:
            if m.type in seen:
                raise InvariantError(f"measure type {m.type} repeated in task {self.name!r}")
            seen.add(m.type)


class TriggerTask(NamedTuple):
    trigger: Trigger
    task: Task


@dataclass(frozen=True)
class StudyProtocol:
    id: str
    user_id: str
    data_end_point: DataEndPoint
    trigger_tasks: tuple[TriggerTask, ...]
    name: str = ""
    data_format: str = CARP
    privacy_enabled: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "trigger_tasks",
                           tuple(TriggerTask(*tt) for tt in self.trigger_tasks))
        if not self.id:
            raise InvariantError("id must be non-empty", "$.id")
        if not self.user_id:
            raise InvariantError("user_id must be non-empty", "$.user_id")
        if not self.trigger_tasks:
            raise InvariantError("at least one trigger/task pair is required",
                                 "$.trigger_tasks")
        if not is_valid_namespace(self.data_format):
            raise InvariantError(f"data_format {self.data_format!r} is not a namespace",
                                 "$.data_format")

    @property
    def measures(self) -> list[Measure]:
        return [m for tt in self.trigger_tasks for m in tt.task.measures]

    def add_trigger_task(self, trigger: Trigger, task: Task) -> "StudyProtocol":
        return replace(self, trigger_tasks=self.trigger_tasks + (TriggerTask(trigger, task),))


# --------------------------------------------------------------------------
# sampling schemas
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplingSchema:
    name: str
    tier: PowerTier
    defaults: dict[FormatKey, Measure] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, measure in self.defaults.items():
            if measure.type != key:
                raise InvariantError(f"schema {self.name!r}: default for {key} "
                                     f"has type {measure.type}")

    def get_measure_list(self, types) -> list[Measure]:
        from mobisense.protocol.schemas import schema_measures

        return schema_measures(self, types)
