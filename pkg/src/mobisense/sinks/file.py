"""Rolling NDJSON file sink.

Files are named ``data-00001.ndjson``, ``data-00002.ndjson``, ... A file is
rolled before a write that would push it past ``buffer_size``, so a file only
exceeds the limit when a single line is longer than the limit itself. With
``zip`` enabled each rolled file is replaced by ``data-NNNNN.ndjson.zip``.
"""

from __future__ import annotations

import logging
import os
import zipfile
from pathlib import Path

from mobisense.errors import EncryptUnsupportedError
from mobisense.probes.datum import DataPoint
from mobisense.protocol.endpoints import FileDataEndPoint
from mobisense.sinks.base import DataManager
from mobisense.sinks.records import serialize_data_point

logger = logging.getLogger(__name__)

# fixed member timestamp keeps archives byte-identical across runs
_ZIP_DATE = (1980, 1, 1, 0, 0, 0)


def data_file_name(seq: int) -> str:
    return f"data-{seq:05d}.ndjson"


def zip_file(path: Path) -> Path:
    """Deflate ``path`` into ``path.zip`` and remove the original."""
    target = path.with_name(path.name + ".zip")
    info = zipfile.ZipInfo(path.name, date_time=_ZIP_DATE)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    with zipfile.ZipFile(target, "w") as zf:
        zf.writestr(info, path.read_bytes())
    path.unlink()
    return target


def read_data_file(path: Path) -> bytes:
    if path.suffix == ".zip":
        with zipfile.ZipFile(path) as zf:
            (name,) = zf.namelist()
            return zf.read(name)
    return path.read_bytes()


def data_files(directory: Path) -> list[Path]:
    """Rolled data files in sequence order."""
    return sorted(p for p in Path(directory).glob("data-*.ndjson*")
                  if p.name.endswith((".ndjson", ".ndjson.zip")))


class FileDataManager(DataManager):
    kind = "file"

    def _open(self) -> None:
        ep = self.endpoint
        if not isinstance(ep, FileDataEndPoint):
            raise TypeError(f"file data manager needs a FileDataEndPoint, got {ep!r}")
        if ep.encrypt:
            raise EncryptUnsupportedError(
                "encrypt=true is not supported: no encryption scheme is defined for file "
                "endpoints")
        self.directory = Path(self.context.out_dir)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.buffer_size = ep.buffer_size
        self.zip = ep.zip
        self.files: list[Path] = []
        self._seq = 0
        self._fh = None
        self._path: Path | None = None
        self._size = 0

    def _write(self, p: DataPoint) -> None:
        self.write_line(serialize_data_point(p) + "\n")

    def write_line(self, line: str) -> None:
        data = line.encode("utf-8")
        if self._fh is not None and self._size + len(data) > self.buffer_size:
            self._roll()
        if self._fh is None:
            self._seq += 1
            self._path = self.directory / data_file_name(self._seq)
            self._fh = open(self._path, "wb")
            self._size = 0
        self._fh.write(data)
        self._size += len(data)

    def _roll(self) -> None:
        self._fh.close()
        self._fh = None
        path = self._path
        if self.zip:
            path = zip_file(path)
        logger.debug("rolled %s (%d bytes)", path, self._size)
        self.files.append(path)

    def flush(self) -> None:
        if self._fh is not None:
            self._fh.flush()
            os.fsync(self._fh.fileno())

    def _close(self) -> None:
        if self._fh is not None:
            self._roll()
