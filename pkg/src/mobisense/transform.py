"""Datum transformation: privacy obfuscation and namespace re-formatting.

A :class:`TransformerRegistry` holds one schema per target namespace (a map
from source format to transformer) plus the privacy schema, whose functions
keep the datum's format. Lookups fall through to the untouched datum when no
transformer is registered.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Callable

from mobisense.errors import DuplicateError, TransformError
from mobisense.formats import CARP, OMH, FormatKey
from mobisense.probes.datum import BloodPressure, Datum, OmhBloodPressure


def hash_value(s: str) -> str:
    """Unsalted SHA-256 as 64 lowercase hex characters."""
    return hashlib.sha256(s.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class DatumTransformer:
    source: FormatKey
    target_namespace: str
    fn: Callable[[Datum], Datum]

    def __call__(self, datum: Datum) -> Datum:
        return self.fn(datum)


@dataclass
class TransformerRegistry:
    schemas: dict[str, dict[FormatKey, DatumTransformer]] = field(
        default_factory=lambda: {CARP: {}})
    privacy: dict[FormatKey, DatumTransformer] = field(default_factory=dict)

    def register_namespace(self, namespace: str) -> None:
        self.schemas.setdefault(namespace, {})

    def has_namespace(self, namespace: str) -> bool:
        return namespace in self.schemas

    def register(self, t: DatumTransformer) -> None:
        schema = self.schemas.setdefault(t.target_namespace, {})
        if t.source in schema:
            raise DuplicateError(f"transformer {t.source} -> {t.target_namespace} "
                                 "already registered")
        schema[t.source] = t

    def register_privacy(self, t: DatumTransformer) -> None:
        if t.source in self.privacy:
            raise DuplicateError(f"privacy function for {t.source} already registered")
        self.privacy[t.source] = t

    def lookup(self, target_namespace: str, source: FormatKey) -> DatumTransformer | None:
        return self.schemas.get(target_namespace, {}).get(source)


def register_transformer(r: TransformerRegistry, t: DatumTransformer) -> None:
    r.register(t)


def transform(r: TransformerRegistry, d: Datum, target_namespace: str) -> Datum:
    """Re-format ``d`` into ``target_namespace``, or return it unchanged."""
    if d.format.namespace == target_namespace:
        return d
    t = r.lookup(target_namespace, d.format)
    if t is None:
        return d
    try:
        out = t.fn(d)
    except Exception as exc:
        raise TransformError(d.format, exc) from exc
    if not isinstance(out, Datum) or out.format.namespace != target_namespace:
        raise TransformError(d.format, f"produced {out!r}, not a {target_namespace} datum")
    return out


def privacy_apply(r: TransformerRegistry, d: Datum) -> Datum:
    """Obfuscate ``d`` if a privacy function exists for its format.

    Not idempotent: applying the phone-log function twice hashes the hash.
    """
    t = r.privacy.get(d.format)
    return d if t is None else t.fn(d)


# --------------------------------------------------------------------------
# built-in transformers
# --------------------------------------------------------------------------

PHONE_LOG = FormatKey(CARP, "phone_log")
BLOODPRESSURE = FormatKey(CARP, "bloodpressure")


def _hash_phone_number(d: Datum) -> Datum:
    return Datum(d.format, replace(d.payload, number=hash_value(d.payload.number)))


def _bloodpressure_to_omh(d: Datum) -> Datum:
    bp: BloodPressure = d.payload
    return Datum(FormatKey(OMH, "bloodpressure"), OmhBloodPressure(
        systolic_blood_pressure={"value": bp.systolic, "unit": "mmHg"},
        diastolic_blood_pressure={"value": bp.diastolic, "unit": "mmHg"},
        body_posture=bp.position,
    ))


phone_log_privacy = DatumTransformer(PHONE_LOG, CARP, _hash_phone_number)
bloodpressure_omh = DatumTransformer(BLOODPRESSURE, OMH, _bloodpressure_to_omh)


def default_transformers(privacy_functions=()) -> TransformerRegistry:
    """Registry with the carp and omh schemas and the given privacy functions."""
    r = TransformerRegistry()
    r.register_namespace(OMH)
    r.register(bloodpressure_omh)
    for t in privacy_functions:
        r.register_privacy(t)
    return r
