"""Domain types for use case cards.

Everything here is an immutable value. Cards hold *references* into the
vocabularies (slugs and SDG numbers) rather than resolved entries, so a card
with an unknown slug can still be parsed, serialized and reported on; the
validator is the layer that resolves them.
"""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass, field


class ActorKind(str, enum.Enum):
    INDIVIDUAL = "individual"
    GROUP = "group"
    EXTERNAL_SYSTEM = "external_system"
    HARDWARE_DEVICE = "hardware_device"


class RelationKind(str, enum.Enum):
    ASSOCIATION = "association"
    INCLUDE = "include"
    EXTEND = "extend"
    ACTOR_GENERALIZATION = "actor_generalization"


class TransparencyFlag(str, enum.Enum):
    """Declared behaviours that attract transparency obligations."""

    INTERACTS_WITH_NATURAL_PERSONS = "interacts_with_natural_persons"
    EMOTION_RECOGNITION = "emotion_recognition"
    BIOMETRIC_CATEGORISATION = "biometric_categorisation"
    GENERATES_OR_MANIPULATES_CONTENT = "generates_or_manipulates_content"


# Declaration order of the enum is the canonical order used everywhere a flag
# set is written out.
FLAG_ORDER: tuple[TransparencyFlag, ...] = tuple(TransparencyFlag)


@dataclass(frozen=True)
class IntendedPurpose:
    context_of_use: str
    scope: str
    sdgs: tuple[int, ...] = ()


@dataclass(frozen=True)
class Actor:
    id: str
    name: str
    kind: ActorKind


@dataclass(frozen=True)
class UseCaseNode:
    id: str
    name: str
    is_ai: bool
    is_main: bool = False


@dataclass(frozen=True)
class Relation:
    kind: RelationKind
    source: str
    target: str


@dataclass(frozen=True)
class ApplicationEntry:
    """Reference to an application area, optionally narrowed to a subarea."""

    area: str
    subarea: str | None = None

    @property
    def key(self) -> str:
        return self.area if self.subarea is None else f"{self.area}/{self.subarea}"

    @classmethod
    def from_key(cls, key: str) -> ApplicationEntry:
        area, sep, sub = key.partition("/")
        return cls(area.strip(), sub.strip() if sep else None)


@dataclass(frozen=True)
class Stakeholder:
    party: str
    interest: str


@dataclass(frozen=True)
class Step:
    index: int
    text: str


@dataclass(frozen=True)
class Extension:
    step_ref: int
    condition: str
    handling: str


@dataclass(frozen=True)
class UseCaseCard:
    id: str
    title: str
    version: str
    date: dt.date
    provider: str
    intended_purpose: IntendedPurpose
    product_type: str
    safety_component: bool
    application_entries: tuple[ApplicationEntry, ...]
    actors: tuple[Actor, ...]
    use_cases: tuple[UseCaseNode, ...]
    relations: tuple[Relation, ...]
    primary_actor: str
    main_course: tuple[Step, ...]
    transparency_flags: frozenset[TransparencyFlag] = frozenset()
    stakeholders: tuple[Stakeholder, ...] = ()
    preconditions: tuple[str, ...] = ()
    extensions: tuple[Extension, ...] = ()
    open_issues: tuple[str, ...] = ()

    @property
    def main_use_case(self) -> UseCaseNode | None:
        mains = [uc for uc in self.use_cases if uc.is_main]
        return mains[0] if len(mains) == 1 else None

    def actor(self, actor_id: str) -> Actor | None:
        for a in self.actors:
            if a.id == actor_id:
                return a
        return None

    def use_case(self, uc_id: str) -> UseCaseNode | None:
        for uc in self.use_cases:
            if uc.id == uc_id:
                return uc
        return None

    def sorted_flags(self) -> list[TransparencyFlag]:
        return [f for f in FLAG_ORDER if f in self.transparency_flags]


@dataclass(frozen=True)
class Finding:
    """A single validation finding."""

    rule: str
    severity: str
    subject: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {
            "rule": self.rule,
            "severity": self.severity,
            "subject": self.subject,
            "message": self.message,
        }

    def to_text(self) -> str:
        return f"{self.rule} {self.severity} {self.subject}: {self.message}"


@dataclass(frozen=True)
class Diagnostics:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def is_valid(self) -> bool:
        return not self.errors

    def rules(self) -> list[str]:
        return [f.rule for f in self.findings]

    def to_list(self) -> list[dict[str, str]]:
        return [f.to_dict() for f in self.findings]

    def to_text(self) -> str:
        return "".join(f.to_text() + "\n" for f in self.findings)

    def __iter__(self):
        return iter(self.findings)

    def __len__(self) -> int:
        return len(self.findings)
