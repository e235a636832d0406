"""Data managers: where published data points end up."""

from mobisense.protocol.endpoints import (
    CustomDataEndPoint,
    DataEndPoint,
    FileDataEndPoint,
    HttpDataEndPoint,
    MemoryDataEndPoint,
)
from mobisense.sinks.base import (
    DataManager,
    DataManagerRegistry,
    SinkContext,
    register_data_manager,
)
from mobisense.sinks.file import FileDataManager, data_files, read_data_file
from mobisense.sinks.http import HttpDataManager
from mobisense.sinks.memory import MemoryDataManager
from mobisense.sinks.records import parse_data_point, read_ndjson, serialize_data_point


def default_data_managers() -> DataManagerRegistry:
    reg = DataManagerRegistry()
    for cls in (MemoryDataManager, FileDataManager, HttpDataManager):
        reg.register(cls.kind, cls)
    return reg


__all__ = [
    "CustomDataEndPoint", "DataEndPoint", "DataManager", "DataManagerRegistry",
    "FileDataEndPoint", "FileDataManager", "HttpDataEndPoint", "HttpDataManager",
    "MemoryDataEndPoint", "MemoryDataManager", "SinkContext", "data_files",
    "default_data_managers", "parse_data_point", "read_data_file", "read_ndjson",
    "register_data_manager", "serialize_data_point",
]
