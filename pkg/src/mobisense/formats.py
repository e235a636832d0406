"""Dotted ``namespace.type`` identifiers for datum schemas."""

from __future__ import annotations

import re
from dataclasses import dataclass

CARP = "carp"
OMH = "omh"

_SEGMENT = re.compile(r"[a-z][a-z0-9_]*\Z")


@dataclass(frozen=True, order=True)
class FormatKey:
    namespace: str
    type: str

    def __post_init__(self) -> None:
        if not _SEGMENT.match(self.namespace) or not _SEGMENT.match(self.type):
            raise ValueError(f"invalid format key {self.namespace!r}.{self.type!r}")

    def __str__(self) -> str:
        return f"{self.namespace}.{self.type}"

    @classmethod
    def parse(cls, text: str) -> "FormatKey":
        namespace, sep, type_ = text.partition(".")
        if not sep:
            raise ValueError(f"format key {text!r} has no namespace")
        return cls(namespace, type_)

    def with_namespace(self, namespace: str) -> "FormatKey":
        return FormatKey(namespace, self.type)


def is_valid_namespace(name: str) -> bool:
    return bool(_SEGMENT.match(name))


def carp(type_: str) -> FormatKey:
    return FormatKey(CARP, type_)
