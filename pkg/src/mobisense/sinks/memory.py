from __future__ import annotations

from pathlib import Path

from mobisense.probes.datum import DataPoint
from mobisense.sinks.base import DataManager
from mobisense.sinks.records import serialize_data_point

MEMORY_FILE = "memory.ndjson"


class MemoryDataManager(DataManager):
    """Keeps every point in emission order."""

    kind = "memory"

    def _open(self) -> None:
        self.points: list[DataPoint] = []

    def _write(self, p: DataPoint) -> None:
        self.points.append(p)

    def dump(self, path: Path | str | None = None) -> Path:
        path = Path(path) if path is not None else self.context.out_dir / MEMORY_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for p in self.points:
                fh.write(serialize_data_point(p) + "\n")
        return path
