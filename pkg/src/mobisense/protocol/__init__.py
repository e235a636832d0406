"""Study protocol model, JSON codec, validation and sampling schemas."""

from mobisense.protocol.codec import parse_protocol, protocol_from_json, serialize_protocol
from mobisense.protocol.endpoints import (
    CustomDataEndPoint,
    DataEndPoint,
    FileDataEndPoint,
    HttpDataEndPoint,
    MemoryDataEndPoint,
)
from mobisense.protocol.model import (
    EventCondition,
    ImmediateTrigger,
    Measure,
    PeriodicTrigger,
    PowerTier,
    RecurrentScheduledTrigger,
    SamplingEventTrigger,
    SamplingSchema,
    ScheduledTrigger,
    StudyProtocol,
    Task,
    Trigger,
    TriggerTask,
    tier_for_level,
)
from mobisense.protocol.schemas import common_schema, schema_measures, tier_schema
from mobisense.protocol.validation import Issue, ValidationReport, validate_protocol

__all__ = [
    "CustomDataEndPoint", "DataEndPoint", "EventCondition", "FileDataEndPoint",
    "HttpDataEndPoint", "ImmediateTrigger", "Issue", "Measure", "MemoryDataEndPoint",
    "PeriodicTrigger", "PowerTier", "RecurrentScheduledTrigger", "SamplingEventTrigger",
    "SamplingSchema", "ScheduledTrigger", "StudyProtocol", "Task", "Trigger", "TriggerTask",
    "ValidationReport", "common_schema", "parse_protocol", "protocol_from_json",
    "schema_measures", "serialize_protocol", "tier_for_level", "tier_schema",
    "validate_protocol",
]
