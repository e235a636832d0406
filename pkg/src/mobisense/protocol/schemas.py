"""Building and querying sampling schemas from registered packages."""

from __future__ import annotations

from typing import Iterable

from mobisense.errors import ConflictError, UnknownTypeError
from mobisense.formats import FormatKey
from mobisense.protocol.model import Measure, PowerTier, SamplingSchema


def tier_schema(packages: Iterable, tier: PowerTier, name: str | None = None) -> SamplingSchema:
    """Union of every package's defaults for ``tier``."""
    defaults: dict[FormatKey, Measure] = {}
    owners: dict[FormatKey, str] = {}
    for package in packages:
        schema = package.default_schemas[tier]
        for key, measure in schema.defaults.items():
            if key in defaults:
                raise ConflictError(f"{key} is provided by both {owners[key]!r} "
                                    f"and {package.name!r}")
            defaults[key] = measure
            owners[key] = package.name
    return SamplingSchema(name or tier.value, tier, defaults)


def common_schema(packages: Iterable) -> SamplingSchema:
    """The 'common' schema: every package's normal-tier defaults."""
    return tier_schema(packages, PowerTier.NORMAL, "common")


def schema_measures(schema: SamplingSchema, types: Iterable[FormatKey | str]) -> list[Measure]:
    measures = []
    for t in types:
        key = FormatKey.parse(t) if isinstance(t, str) else t
        try:
            measures.append(schema.defaults[key])
        except KeyError:
            raise UnknownTypeError(key, f"schema {schema.name!r} has no default for {key}") from None
    return measures
