"""Registry-aware checks that parsing alone cannot make."""

from __future__ import annotations

from dataclasses import dataclass, field

from mobisense.formats import CARP
from mobisense.protocol.model import SamplingEventTrigger, StudyProtocol

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Issue:
    severity: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.path}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = field(default_factory=tuple)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == ERROR]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __len__(self) -> int:
        return len(self.issues)

    def __iter__(self):
        return iter(self.issues)


def validate_protocol(p: StudyProtocol, registry, transformers=None) -> ValidationReport:
    """Check ``p`` against the registered packages (and namespaces, if given)."""
    issues: list[Issue] = []
    sampled = {m.type for m in p.measures}

    if transformers is not None and p.data_format != CARP \
            and not transformers.has_namespace(p.data_format):
        issues.append(Issue(ERROR, "$.data_format",
                            f"no transformer schema for namespace {p.data_format!r}"))

    for i, (trigger, task) in enumerate(p.trigger_tasks):
        base = f"$.trigger_tasks[{i}]"
        if isinstance(trigger, SamplingEventTrigger):
            source = trigger.source_measure_type
            path = f"{base}.trigger.source_measure_type"
            if not registry.is_registered(source):
                issues.append(Issue(ERROR, path, f"unknown measure type {str(source)!r}"))
            elif source not in sampled:
                issues.append(Issue(ERROR, path,
                                    f"sampling event on {source} but no task samples it"))
        for j, m in enumerate(task.measures):
            path = f"{base}.task.measures[{j}]"
            if not registry.is_registered(m.type):
                issues.append(Issue(ERROR, f"{path}.type",
                                    f"unknown measure type {str(m.type)!r}"))
            if not m.enabled:
                issues.append(Issue(WARNING, f"{path}.enabled", f"measure {m.type} is disabled"))
    return ValidationReport(tuple(issues))
