"""Data points and the typed payloads they carry."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any, ClassVar

from mobisense.formats import CARP, OMH, FormatKey


class Payload:
    """Base for typed datum bodies; subclasses are frozen dataclasses."""

    type_name: ClassVar[str] = ""
    namespace: ClassVar[str] = CARP

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, body: dict[str, Any]) -> "Payload":
        return cls(**body)


_PAYLOADS: dict[str, type[Payload]] = {}


def payload_type(cls: type[Payload]) -> type[Payload]:
    _PAYLOADS[f"{cls.namespace}.{cls.type_name}"] = cls
    return cls


def payload_class(fmt: FormatKey) -> type[Payload]:
    return _PAYLOADS.get(str(fmt), GenericPayload)


class GenericPayload(Payload):
    """Body of a format with no registered payload class; fields kept verbatim."""

    def __init__(self, **fields_: Any):
        self.__dict__.update(fields_)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GenericPayload) and self.__dict__ == other.__dict__

    def __repr__(self) -> str:
        return f"GenericPayload({self.__dict__!r})"


@payload_type
@dataclass(frozen=True)
class Accelerometer(Payload):
    type_name = "accelerometer"
    x: float
    y: float
    z: float


@payload_type
@dataclass(frozen=True)
class Gyroscope(Payload):
    type_name = "gyroscope"
    x: float
    y: float
    z: float


@payload_type
@dataclass(frozen=True)
class Light(Payload):
    type_name = "light"
    lux: float


@payload_type
@dataclass(frozen=True)
class Location(Payload):
    type_name = "location"
    lat: float
    lon: float


@payload_type
@dataclass(frozen=True)
class Battery(Payload):
    type_name = "battery"
    level: int
    status: str  # charging | discharging | full


@payload_type
@dataclass(frozen=True)
class Memory(Payload):
    type_name = "memory"
    free_bytes: int


@payload_type
@dataclass(frozen=True)
class Screen(Payload):
    type_name = "screen"
    event: str  # on | off | unlock


@payload_type
@dataclass(frozen=True)
class PhoneLog(Payload):
    type_name = "phone_log"
    number: str
    duration_s: int
    direction: str  # in | out


@payload_type
@dataclass(frozen=True)
class Weather(Payload):
    type_name = "weather"
    temp_c: float
    condition: str


@payload_type
@dataclass(frozen=True)
class AirQuality(Payload):
    type_name = "air_quality"
    index: int
    category: str


@payload_type
@dataclass(frozen=True)
class Noise(Payload):
    type_name = "noise"
    mean_decibel: float
    max_decibel: float


@payload_type
@dataclass(frozen=True)
class Wifi(Payload):
    type_name = "wifi"
    ssid: str
    bssid: str


@payload_type
@dataclass(frozen=True)
class Connectivity(Payload):
    type_name = "connectivity"
    status: str


@payload_type
@dataclass(frozen=True)
class AppUsage(Payload):
    type_name = "app_usage"
    app: str
    usage_ms: int


@payload_type
@dataclass(frozen=True)
class Bluetooth(Payload):
    """One scan result: the strongest device seen plus how many were seen."""

    type_name = "bluetooth"
    device_name: str
    device_id: str
    device_type: str
    power_level: int
    rssi: int
    device_count: int


@payload_type
@dataclass(frozen=True)
class BloodPressure(Payload):
    type_name = "bloodpressure"
    systolic: float  # mmHg
    diastolic: float  # mmHg
    position: str


@payload_type
@dataclass(frozen=True)
class OmhBloodPressure(Payload):
    """Open mHealth blood-pressure body: unit values plus body posture."""

    type_name = "bloodpressure"
    namespace = OMH
    systolic_blood_pressure: dict
    diastolic_blood_pressure: dict
    body_posture: str


@payload_type
@dataclass(frozen=True)
class Geofence(Payload):
    type_name = "geofence"
    event: str  # ENTER | DWELL | EXIT
    fence_id: str


@payload_type
@dataclass(frozen=True)
class Error(Payload):
    type_name = "error"
    message: str


ERROR_FORMAT = FormatKey(CARP, "error")


@dataclass(frozen=True)
class Datum:
    format: FormatKey
    payload: Payload

    def __post_init__(self) -> None:
        expected = payload_class(self.format)
        if type(self.payload) is not expected:
            raise TypeError(f"{type(self.payload).__name__} payload does not match "
                            f"format {self.format}")

    @classmethod
    def of(cls, payload: Payload) -> "Datum":
        return cls(FormatKey(payload.namespace, payload.type_name), payload)

    def to_dict(self) -> dict[str, Any]:
        return self.payload.to_dict()

    @classmethod
    def from_dict(cls, fmt: FormatKey, body: dict[str, Any]) -> "Datum":
        return cls(fmt, payload_class(fmt).from_dict(body))


def error_datum(message: str) -> Datum:
    return Datum(ERROR_FORMAT, Error(message))


@dataclass(frozen=True)
class DataPointHeader:
    study_id: str
    user_id: str
    format: FormatKey
    start_time: int
    end_time: int | None = None
    device_role: str = "phone"


@dataclass(frozen=True)
class DataPoint:
    header: DataPointHeader
    body: Datum

    def __post_init__(self) -> None:
        h = self.header
        if h.end_time is not None and h.end_time < h.start_time:
            raise ValueError("end_time precedes start_time")
        if h.format != self.body.format:
            raise ValueError(f"header format {h.format} != body format {self.body.format}")

    @property
    def format(self) -> FormatKey:
        return self.header.format

    @property
    def start_time(self) -> int:
        return self.header.start_time

    @classmethod
    def create(cls, study_id: str, user_id: str, body: Datum, start_time: int,
               end_time: int | None = None, device_role: str = "phone") -> "DataPoint":
        header = DataPointHeader(study_id, user_id, body.format, start_time, end_time,
                                 device_role)
        return cls(header, body)


def payload_field_names(cls: type[Payload]) -> list[str]:
    return [f.name for f in fields(cls)]
