"""Canonical JSON form of a study protocol.

Parsing is strict: unknown keys are rejected everywhere except inside a
measure ``configuration`` map and the options of a custom endpoint kind.
Errors carry the JSON path of the offending value.
"""

from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone
from typing import Any

from mobisense.errors import InvariantError, ProtocolSyntaxError, SchemaError
from mobisense.formats import CARP, FormatKey
from mobisense.protocol.endpoints import (
    CustomDataEndPoint,
    DataEndPoint,
    FileDataEndPoint,
    HttpDataEndPoint,
    MemoryDataEndPoint,
)
from mobisense.protocol.model import (
    WEEKDAYS,
    EventCondition,
    ImmediateTrigger,
    Measure,
    PeriodicTrigger,
    RecurrentScheduledTrigger,
    SamplingEventTrigger,
    ScheduledTrigger,
    StudyProtocol,
    Task,
    Trigger,
    TriggerTask,
)

_MISSING = object()


_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def ms_to_iso(ms: int) -> str:
    dt = _EPOCH + timedelta(milliseconds=ms)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}Z"


def iso_to_ms(text: str) -> int:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    delta = dt - _EPOCH
    return (delta.days * 86_400 + delta.seconds) * 1000 + delta.microseconds // 1000


# --------------------------------------------------------------------------
# typed field access
# --------------------------------------------------------------------------

class _Obj:
    """JSON object wrapper that tracks its path and the keys consumed."""

    def __init__(self, value: Any, path: str):
        if not isinstance(value, dict):
            raise SchemaError(f"expected object, got {_json_type(value)}", path)
        self.value = value
        self.path = path
        self.used: set[str] = set()

    def get(self, key: str, kind: type | tuple[type, ...], default: Any = _MISSING) -> Any:
        self.used.add(key)
        path = f"{self.path}.{key}"
        if key not in self.value:
            if default is _MISSING:
                raise SchemaError("missing required field", path)
            return default
        value = self.value[key]
        # bool is an int subclass; never accept it where a number is wanted
        if kind is int and isinstance(value, bool) or not isinstance(value, kind):
            raise SchemaError(f"expected {_kind_name(kind)}, got {_json_type(value)}", path)
        return value

    def child(self, key: str) -> "_Obj":
        return _Obj(self.get(key, dict), f"{self.path}.{key}")

    def finish(self) -> None:
        extra = sorted(set(self.value) - self.used)
        if extra:
            raise SchemaError(f"unknown field {extra[0]!r}", f"{self.path}.{extra[0]}")


def _json_type(value: Any) -> str:
    if value is None:
        return "null"
    return {bool: "boolean", int: "integer", float: "number", str: "string",
            list: "array", dict: "object"}.get(type(value), type(value).__name__)


def _kind_name(kind: type | tuple[type, ...]) -> str:
    kinds = kind if isinstance(kind, tuple) else (kind,)
    return " or ".join(_json_type(k()) for k in kinds)


def _invariant(path: str, build):
    try:
        return build()
    except InvariantError as exc:
        raise InvariantError(exc.message, path if exc.path == "$" else exc.path) from None
    except ValueError as exc:
        raise InvariantError(str(exc), path) from None


def _format_key(text: str, path: str) -> FormatKey:
    return _invariant(path, lambda: Measure(text).type)


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

def parse_protocol(json_text: str | bytes) -> StudyProtocol:
    """Parse and validate a protocol document.

    Raises ``ProtocolSyntaxError`` for malformed JSON, ``SchemaError`` for
    missing, unknown or ill-typed fields and ``InvariantError`` for values
    that break a domain rule.
    """
    if isinstance(json_text, bytes):
        try:
            json_text = json_text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProtocolSyntaxError(f"not UTF-8: {exc}") from None
    try:
        raw = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise ProtocolSyntaxError(f"malformed JSON at line {exc.lineno} column {exc.colno}: "
                                  f"{exc.msg}") from None
    return protocol_from_json(raw)


def protocol_from_json(raw: Any) -> StudyProtocol:
    obj = _Obj(raw, "$")
    study_id = obj.get("id", str)
    user_id = obj.get("user_id", str)
    name = obj.get("name", str, "")
    data_format = obj.get("data_format", str, CARP)
    privacy = obj.get("privacy_enabled", bool, False)
    endpoint = _endpoint(obj.child("data_end_point"))
    pairs = []
    for i, item in enumerate(obj.get("trigger_tasks", list)):
        pairs.append(_trigger_task(_Obj(item, f"$.trigger_tasks[{i}]")))
    obj.finish()
    return _invariant("$", lambda: StudyProtocol(
        id=study_id, user_id=user_id, name=name, data_end_point=endpoint,
        data_format=data_format, trigger_tasks=tuple(pairs), privacy_enabled=privacy))


def _endpoint(obj: _Obj) -> DataEndPoint:
    kind = obj.get("kind", str)
    if kind == "memory":
        obj.finish()
        return MemoryDataEndPoint()
    if kind == "file":
        buffer_size = obj.get("buffer_size", int, 500 * 1000)
        zip_ = obj.get("zip", bool, False)
        encrypt = obj.get("encrypt", bool, False)
        obj.finish()
        return _invariant(obj.path, lambda: FileDataEndPoint(buffer_size, zip_, encrypt))
    if kind == "http":
        url = obj.get("url", str)
        batch_size = obj.get("batch_size", int, 100)
        retry_max = obj.get("retry_max", int, 3)
        obj.finish()
        return _invariant(obj.path, lambda: HttpDataEndPoint(url, batch_size, retry_max))
    options = {k: v for k, v in obj.value.items() if k != "kind"}
    return CustomDataEndPoint(custom_kind=kind, options=options)


def _trigger_task(obj: _Obj) -> TriggerTask:
    trigger = _trigger(obj.child("trigger"))
    task = _task(obj.child("task"))
    obj.finish()
    return TriggerTask(trigger, task)


def _trigger(obj: _Obj) -> Trigger:
    kind = obj.get("kind", str)
    path = obj.path
    if kind == "immediate":
        trigger: Trigger = ImmediateTrigger()
    elif kind == "periodic":
        period = obj.get("period_ms", int)
        trigger = _invariant(f"{path}.period_ms", lambda: PeriodicTrigger(period))
    elif kind == "scheduled":
        at = obj.get("at", str)
        trigger = ScheduledTrigger(_invariant(f"{path}.at", lambda: iso_to_ms(at)))
    elif kind == "recurrent_scheduled":
        tod = obj.get("time_of_day", str)
        hour, minute = _invariant(f"{path}.time_of_day", lambda: _time_of_day(tod))
        rec = obj.child("recurrence")
        rec_kind = rec.get("kind", str)
        weekday = None
        if rec_kind == "weekly":
            name = rec.get("weekday", str)
            if name not in WEEKDAYS:
                raise InvariantError(f"unknown weekday {name!r}", f"{rec.path}.weekday")
            weekday = WEEKDAYS.index(name)
        elif rec_kind != "daily":
            raise SchemaError(f"unknown recurrence kind {rec_kind!r}", f"{rec.path}.kind")
        rec.finish()
        trigger = _invariant(path, lambda: RecurrentScheduledTrigger(hour, minute, weekday))
    elif kind == "sampling_event":
        source = _format_key(obj.get("source_measure_type", str),
                             f"{path}.source_measure_type")
        cond_raw = obj.get("condition", (dict, type(None)), None)
        condition = None
        if cond_raw is not None:
            cond = _Obj(cond_raw, f"{path}.condition")
            condition = EventCondition(cond.get("field_name", str), cond.get("expected_value", str))
            cond.finish()
        trigger = SamplingEventTrigger(source, condition)
    else:
        raise SchemaError(f"unknown trigger kind {kind!r}", f"{path}.kind")
    obj.finish()
    return trigger


def _time_of_day(text: str) -> tuple[int, int]:
    hh, sep, mm = text.partition(":")
    if not sep or len(hh) != 2 or len(mm) != 2 or not (hh + mm).isdigit():
        raise InvariantError(f"time_of_day must be hh:mm, got {text!r}")
    return int(hh), int(mm)


def _task(obj: _Obj) -> Task:
    name = obj.get("name", str)
    measures = []
    for i, item in enumerate(obj.get("measures", list)):
        measures.append(_measure(_Obj(item, f"{obj.path}.measures[{i}]")))
    obj.finish()
    return _invariant(obj.path, lambda: Task(name, tuple(measures)))


def _measure(obj: _Obj) -> Measure:
    type_ = obj.get("type", str)
    enabled = obj.get("enabled", bool, True)
    config = obj.get("configuration", dict, {})
    for key, value in config.items():
        if not isinstance(value, str):
            raise SchemaError(f"expected string, got {_json_type(value)}",
                              f"{obj.path}.configuration.{key}")
    obj.finish()
    key = _format_key(type_, f"{obj.path}.type")
    return _invariant(f"{obj.path}.configuration",
                      lambda: Measure(key, enabled, dict(config)))


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def protocol_to_json(p: StudyProtocol) -> dict[str, Any]:
    return {
        "id": p.id,
        "user_id": p.user_id,
        "name": p.name,
        "data_format": p.data_format,
        "privacy_enabled": p.privacy_enabled,
        "data_end_point": p.data_end_point.to_json(),
        "trigger_tasks": [
            {"trigger": trigger_to_json(tt.trigger), "task": task_to_json(tt.task)}
            for tt in p.trigger_tasks
        ],
    }


def trigger_to_json(t: Trigger) -> dict[str, Any]:
    if isinstance(t, ImmediateTrigger):
        return {"kind": "immediate"}
    if isinstance(t, PeriodicTrigger):
        return {"kind": "periodic", "period_ms": t.period_ms}
    if isinstance(t, ScheduledTrigger):
        return {"kind": "scheduled", "at": ms_to_iso(t.at_ms)}
    if isinstance(t, RecurrentScheduledTrigger):
        recurrence = ({"kind": "daily"} if t.weekday is None
                      else {"kind": "weekly", "weekday": WEEKDAYS[t.weekday]})
        return {"kind": "recurrent_scheduled", "time_of_day": t.time_of_day,
                "recurrence": recurrence}
    if isinstance(t, SamplingEventTrigger):
        condition = None
        if t.condition is not None:
            condition = {"field_name": t.condition.field_name,
                         "expected_value": t.condition.expected_value}
        return {"kind": "sampling_event", "source_measure_type": str(t.source_measure_type),
                "condition": condition}
    raise TypeError(f"not a trigger: {t!r}")


def task_to_json(task: Task) -> dict[str, Any]:
    return {"name": task.name, "measures": [measure_to_json(m) for m in task.measures]}


def measure_to_json(m: Measure) -> dict[str, Any]:
    return {"type": str(m.type), "enabled": m.enabled, "configuration": dict(m.configuration)}


def serialize_protocol(p: StudyProtocol) -> str:
    return json.dumps(protocol_to_json(p), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)
