"""Data endpoint configurations carried by a study protocol.

The data manager registry resolves a manager from ``DataEndPoint.kind``.
Kinds without a built-in type parse into :class:`CustomDataEndPoint` so
extension data managers can receive their own options.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, ClassVar
from urllib.parse import urlparse

from mobisense.errors import InvariantError


@dataclass(frozen=True)
class DataEndPoint:
    kind: ClassVar[str] = ""

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind}


@dataclass(frozen=True)
class MemoryDataEndPoint(DataEndPoint):
    kind: ClassVar[str] = "memory"


@dataclass(frozen=True)
class FileDataEndPoint(DataEndPoint):
    kind: ClassVar[str] = "file"

    buffer_size: int = 500 * 1000
    zip: bool = False
    encrypt: bool = False

    def __post_init__(self) -> None:
        if self.buffer_size < 1024:
            raise InvariantError(
                f"buffer_size must be >= 1024, got {self.buffer_size}",
                "$.data_end_point.buffer_size",
            )

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "buffer_size": self.buffer_size,
                "zip": self.zip, "encrypt": self.encrypt}


@dataclass(frozen=True)
class HttpDataEndPoint(DataEndPoint):
    kind: ClassVar[str] = "http"

    url: str = ""
    batch_size: int = 100
    retry_max: int = 3

    def __post_init__(self) -> None:
        parsed = urlparse(self.url)
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            raise InvariantError(f"url must be an absolute http(s) URL, got {self.url!r}",
                                 "$.data_end_point.url")
        if self.batch_size <= 0:
            raise InvariantError("batch_size must be > 0", "$.data_end_point.batch_size")
        if self.retry_max < 0:
            raise InvariantError("retry_max must be >= 0", "$.data_end_point.retry_max")

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "url": self.url,
                "batch_size": self.batch_size, "retry_max": self.retry_max}


@dataclass(frozen=True)
class CustomDataEndPoint(DataEndPoint):
    """Endpoint of a kind this package does not define; options kept verbatim."""

    custom_kind: str = ""
    options: dict[str, Any] = field(default_factory=dict)

    @property
    def kind(self) -> str:  # type: ignore[override]
        return self.custom_kind

    def to_json(self) -> dict[str, Any]:
        return {**self.options, "kind": self.custom_kind}
