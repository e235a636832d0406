"""Data manager interface and registry."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, ClassVar

from mobisense.clock import Clock, VirtualClock
from mobisense.errors import DuplicateError, SinkClosedError, UnknownEndpointError
from mobisense.probes.datum import DataPoint
from mobisense.protocol.endpoints import DataEndPoint


@dataclass
class SinkContext:
    """What a data manager factory gets besides the endpoint: where and when."""

    out_dir: Path = field(default_factory=lambda: Path("."))
    clock: Clock = field(default_factory=VirtualClock)


class DataManager(ABC):
    """Consumes the controller's data-point stream.

    Driven by exactly one consumer loop, so methods need not be reentrant.
    ``flush`` and ``close`` are idempotent.
    """

    kind: ClassVar[str] = ""

    def __init__(self, context: SinkContext | None = None):
        self.context = context or SinkContext()
        self.endpoint: DataEndPoint | None = None
        self.protocol = None
        self.accepted = 0
        self.closed = False

    def initialize(self, endpoint: DataEndPoint, protocol=None, events=None) -> None:
        self.endpoint = endpoint
        self.protocol = protocol
        self._open()
        if events is not None:
            events.listen(self.on_data_point, primary=True)

    def _open(self) -> None:
        pass

    def on_data_point(self, p: DataPoint) -> None:
        if self.closed:
            raise SinkClosedError(f"{type(self).__name__} is closed")
        self.accepted += 1
        self._write(p)

    @abstractmethod
    def _write(self, p: DataPoint) -> None: ...

    def flush(self) -> None:
        pass

    def close(self) -> None:
        if not self.closed:
            self.flush()
            self._close()
            self.closed = True

    def _close(self) -> None:
        pass


DataManagerFactory = Callable[[SinkContext], DataManager]


class DataManagerRegistry:
    def __init__(self) -> None:
        self._factories: dict[str, DataManagerFactory] = {}

    def register(self, kind: str, factory: DataManagerFactory) -> None:
        if kind in self._factories:
            raise DuplicateError(f"data manager for {kind!r} already registered")
        self._factories[kind] = factory

    def __contains__(self, kind: str) -> bool:
        return kind in self._factories

    def resolve(self, kind: str) -> DataManagerFactory:
        try:
            return self._factories[kind]
        except KeyError:
            raise UnknownEndpointError(f"no data manager registered for endpoint kind "
                                       f"{kind!r}") from None

    def create(self, endpoint: DataEndPoint, context: SinkContext) -> DataManager:
        return self.resolve(endpoint.kind)(context)


def register_data_manager(reg: DataManagerRegistry, kind: str,
                          factory: DataManagerFactory) -> None:
    reg.register(kind, factory)
