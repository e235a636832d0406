"""NDJSON record format for data points."""

from __future__ import annotations

import json
from typing import Iterable, Iterator

from mobisense.formats import FormatKey
from mobisense.probes.datum import DataPoint, DataPointHeader, Datum
from mobisense.protocol.codec import iso_to_ms, ms_to_iso

_dumps = json.JSONEncoder(sort_keys=True, separators=(",", ":")).encode


def data_point_to_json(p: DataPoint) -> dict:
    h = p.header
    record = {
        "study_id": h.study_id,
        "user_id": h.user_id,
        "format": str(h.format),
        "start_time": ms_to_iso(h.start_time),
        "device_role": h.device_role,
        "body": p.body.to_dict(),
    }
    if h.end_time is not None:
        record["end_time"] = ms_to_iso(h.end_time)
    return record


def serialize_data_point(p: DataPoint) -> str:
    """One NDJSON line (no trailing newline) with sorted keys."""
    return _dumps(data_point_to_json(p))


def parse_data_point(line: str) -> DataPoint:
    record = json.loads(line)
    fmt = FormatKey.parse(record["format"])
    end = record.get("end_time")
    header = DataPointHeader(
        study_id=record["study_id"],
        user_id=record["user_id"],
        format=fmt,
        start_time=iso_to_ms(record["start_time"]),
        end_time=None if end is None else iso_to_ms(end),
        device_role=record.get("device_role", "phone"),
    )
    return DataPoint(header, Datum.from_dict(fmt, record["body"]))


def read_ndjson(lines: Iterable[str]) -> Iterator[DataPoint]:
    for line in lines:
        if line.strip():
            yield parse_data_point(line)
