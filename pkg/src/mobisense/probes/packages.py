"""Sampling packages and the registry that resolves probes from measure types."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from mobisense.errors import ConflictError, UnknownTypeError
from mobisense.formats import FormatKey
from mobisense.probes.device import SimulatedDevice, simulated_signal
from mobisense.probes.probe import Probe, Sampler
from mobisense.protocol.model import DURATION_MS, FREQUENCY_MS, Measure, PowerTier, SamplingSchema
from mobisense.transform import DatumTransformer

# period multiplier per tier; NONE disables instead
TIER_PERIOD_FACTOR = {PowerTier.NORMAL: 1, PowerTier.LIGHT: 2, PowerTier.MINIMUM: 10}


def adapt_measure(measure: Measure, tier: PowerTier) -> Measure:
    """The tier variant of ``measure``: longer periods, or disabled for NONE."""
    if tier is PowerTier.NONE:
        return measure.with_enabled(False)
    freq = measure.frequency_ms
    if freq is None or tier is PowerTier.NORMAL:
        return measure
    return measure.configured(frequency_ms=freq * TIER_PERIOD_FACTOR[tier])


@dataclass(frozen=True)
class ProbeSpec:
    """How a package samples one measure type."""

    probe_class: type[Probe]
    default: Measure
    sampler: Sampler = simulated_signal
    device_role: str = "phone"


class SamplingPackage:
    def __init__(self, name: str, probes: dict[FormatKey, ProbeSpec],
                 privacy_functions: dict[FormatKey, DatumTransformer] | None = None):
        for key, spec in probes.items():
            if spec.default.type != key:
                raise ValueError(f"default measure for {key} has type {spec.default.type}")
        self.name = name
        self.probes = dict(probes)
        self.privacy_functions = dict(privacy_functions or {})
        self.default_schemas = {
            tier: SamplingSchema(f"{name}.{tier.value}", tier,
                                 {k: adapt_measure(s.default, tier) for k, s in probes.items()})
            for tier in PowerTier
        }

    def __repr__(self) -> str:
        return f"<SamplingPackage {self.name} {[str(t) for t in self.measure_types]}>"

    @property
    def measure_types(self) -> list[FormatKey]:
        return list(self.probes)

    def adapt(self, measure: Measure, tier: PowerTier) -> Measure:
        return adapt_measure(measure, tier)

    def effective_measure(self, m: Measure) -> Measure:
        """``m`` with unset configuration keys filled from the package default."""
        default = self.probes[m.type].default.configuration
        config = dict(m.configuration)
        for key, value in default.items():
            # an explicit frequency also overrides the default burst duration
            if key in (FREQUENCY_MS, DURATION_MS) and FREQUENCY_MS in m.configuration:
                continue
            config.setdefault(key, value)
        return Measure(m.type, m.enabled, config)

    def probe_factory(self, m: Measure, device: SimulatedDevice) -> Probe:
        spec = self.probes[m.type]
        return spec.probe_class(self.effective_measure(m), device, sampler=spec.sampler,
                                device_role=spec.device_role)


class PackageRegistry:
    """Registered packages in registration order; doubles as the probe registry."""

    def __init__(self, packages=()):
        self._packages: list[SamplingPackage] = []
        self._by_type: dict[FormatKey, SamplingPackage] = {}
        for p in packages:
            self.register(p)

    def register(self, p: SamplingPackage) -> None:
        clash = [t for t in p.measure_types if t in self._by_type]
        if clash:
            raise ConflictError(f"{clash[0]} already provided by package "
                                f"{self._by_type[clash[0]].name!r}")
        self._packages.append(p)
        for t in p.measure_types:
            self._by_type[t] = p

    def __iter__(self) -> Iterator[SamplingPackage]:
        return iter(self._packages)

    def __len__(self) -> int:
        return len(self._packages)

    @property
    def measure_types(self) -> list[FormatKey]:
        return [t for p in self._packages for t in p.measure_types]

    def is_registered(self, t: FormatKey) -> bool:
        return t in self._by_type

    def package_for(self, t: FormatKey) -> SamplingPackage:
        try:
            return self._by_type[t]
        except KeyError:
            raise UnknownTypeError(t) from None

    def probe_kind(self, t: FormatKey):
        return self.package_for(t).probes[t].probe_class.kind

    def create_probe(self, m: Measure, device: SimulatedDevice) -> Probe:
        return self.package_for(m.type).probe_factory(m, device)


def register_package(reg: PackageRegistry, p: SamplingPackage) -> None:
    reg.register(p)


def create_probe(reg: PackageRegistry, m: Measure, dev: SimulatedDevice) -> Probe:
    return reg.create_probe(m, dev)
