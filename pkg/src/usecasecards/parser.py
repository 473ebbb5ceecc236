"""Parser and canonical serializer for the ``.ucc`` card format.

A ``.ucc`` file is a sequence of bracketed sections::

    [card]          id, title, version, date, provider
    [purpose]       context, scope, sdg*
    [table]         product, safety-component, area+, flag*, primary-actor,
                    stakeholder*, precondition*, step+, extension*, issue*
    [actor <id>]    name, kind
    [usecase <id>]  name, ai, main?
    [relation]      kind, source, target

Inside a section every line is ``key: value``. A value continues on following
lines indented by exactly two spaces. Lines starting with ``#`` are comments.
Keys marked ``*``/``+`` above may repeat and accumulate in order.

Parse errors are collected rather than raised one at a time:

    P001  unknown section header
    P002  unknown key in section (or key outside any section)
    P003  duplicate key, section or id
    P004  malformed value or line
    P005  unterminated section header
    P006  missing required key or section
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, field

from .model import (
    FLAG_ORDER,
    Actor,
    ActorKind,
    ApplicationEntry,
    Extension,
    IntendedPurpose,
    Relation,
    RelationKind,
    Stakeholder,
    Step,
    TransparencyFlag,
    UseCaseCard,
    UseCaseNode,
)

PARSE_CODES = {
    "P001": "unknown section header",
    "P002": "unknown key in section",
    "P003": "duplicate key",
    "P004": "malformed value",
    "P005": "unterminated block",
    "P006": "missing required key",
}

IDENT_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")
KEY_RE = re.compile(r"^([^\s:\[#][^:]*?)\s*:(.*)$")


@dataclass(frozen=True, order=True)
class SourceLocation:
    line: int
    column: int = 1


@dataclass(frozen=True)
class ParseDiagnostic:
    location: SourceLocation
    code: str
    message: str

    def to_text(self, path: str | None = None) -> str:
        where = f"{self.location.line}:{self.location.column}"
        if path:
            where = f"{path}:{where}"
        return f"{where}: {self.code} {self.message}"

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "line": self.location.line,
            "column": self.location.column,
            "message": self.message,
        }


class CardParseError(ValueError):
    """Raised by :func:`parse_card`; carries every diagnostic found."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        first = diagnostics[0].to_text() if diagnostics else "parse failed"
        more = f" (+{len(diagnostics) - 1} more)" if len(diagnostics) > 1 else ""
        super().__init__(first + more)


# key -> repeatable; order is the canonical serialization order.
SCHEMA: dict[str, dict[str, bool]] = {
    "card": {"id": False, "title": False, "version": False, "date": False, "provider": False},
    "purpose": {"context": False, "scope": False, "sdg": True},
    "table": {
        "product": False,
        "safety-component": False,
        "area": True,
        "flag": True,
        "primary-actor": False,
        "stakeholder": True,
        "precondition": True,
        "step": True,
        "extension": True,
        "issue": True,
    },
    "actor": {"name": False, "kind": False},
    "usecase": {"name": False, "ai": False, "main": False},
    "relation": {"kind": False, "source": False, "target": False},
}

REQUIRED: dict[str, tuple[str, ...]] = {
    "card": ("id", "title", "version", "date", "provider"),
    "purpose": ("context", "scope"),
    "table": ("product", "safety-component", "area", "primary-actor", "step"),
    "actor": ("name", "kind"),
    "usecase": ("name", "ai"),
    "relation": ("kind", "source", "target"),
}

SINGLETON_SECTIONS = ("card", "purpose", "table")
ID_SECTIONS = ("actor", "usecase")


@dataclass
class _Entry:
    key: str
    value: str
    line: int
    column: int
    continued: bool = False


@dataclass
class _Section:
    kind: str
    ident: str | None
    line: int
    entries: list[_Entry] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str):
        if text.startswith("\ufeff"):
            text = text[1:]
        self.lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
        self.diags: list[ParseDiagnostic] = []
        self.sections: list[_Section] = []

    def error(self, line: int, column: int, code: str, message: str) -> None:
        self.diags.append(ParseDiagnostic(SourceLocation(line, column), code, message))

    # -- pass 1: lines into sections ---------------------------------------

    def scan(self) -> None:
        current: _Section | None = None
        # None while inside an unknown section: its lines are skipped silently.
        skipping = False
        last: _Entry | None = None
        for no, raw in enumerate(self.lines, 1):
            line = raw.rstrip()
            if not line.strip():
                last = None
                continue
            if line.startswith("#"):
                continue
            if line.startswith("  "):
                if skipping:
                    continue
                if last is None:
                    self.error(no, 3, "P004", "continuation line without a preceding key")
                    continue
                last.value = f"{last.value}\n{line[2:]}" if last.value else line[2:]
                last.continued = True
                continue
            if line.startswith("["):
                last = None
                section = self.header(no, line)
                skipping = section is None
                current = section
                if section is not None:
                    self.sections.append(section)
                continue
            last = None
            m = KEY_RE.match(line)
            if m is None:
                col = len(line) - len(line.lstrip()) + 1
                self.error(no, col, "P004", f"malformed line {line.strip()!r}, expected 'key: value'")
                continue
            if skipping:
                continue
            key, value = m.group(1), m.group(2)
            vcol = m.start(2) + 1 + (len(value) - len(value.lstrip()))
            if current is None:
                self.error(no, 1, "P002", f"key {key!r} outside any section")
                continue
            if key not in SCHEMA[current.kind]:
                self.error(no, 1, "P002", f"unknown key {key!r} in [{current.kind}]")
                continue
            last = _Entry(key, value.strip(), no, vcol)
            current.entries.append(last)

    def header(self, no: int, line: str) -> _Section | None:
        if not line.endswith("]"):
            self.error(no, 1, "P005", f"unterminated section header {line!r}")
            return None
        inner = line[1:-1].strip()
        name, _, ident = inner.partition(" ")
        ident = ident.strip()
        if name not in SCHEMA:
            self.error(no, 2, "P001", f"unknown section header [{name}]")
            return None
        if name in ID_SECTIONS:
            if not ident:
                self.error(no, 2, "P004", f"[{name}] header requires an id")
                return None
            if not IDENT_RE.match(ident):
                self.error(no, line.index(ident) + 1, "P004", f"malformed id {ident!r}")
                return None
        elif ident:
            self.error(no, line.index(ident) + 1, "P004", f"[{name}] header takes no id, got {ident!r}")
            return None
        return _Section(name, ident or None, no)

    # -- pass 2: sections into a card --------------------------------------

    def fields(self, section: _Section) -> dict[str, list[_Entry]]:
        out: dict[str, list[_Entry]] = {}
        schema = SCHEMA[section.kind]
        for entry in section.entries:
            seen = out.setdefault(entry.key, [])
            if seen and not schema[entry.key]:
                self.error(entry.line, 1, "P003",
                           f"duplicate key {entry.key!r} in [{section.kind}] (first at line {seen[0].line})")
                continue
            if not entry.value:
                self.error(entry.line, 1, "P004", f"empty value for {entry.key!r}")
                continue
            seen.append(entry)
        for key in REQUIRED[section.kind]:
            if key not in out or not out[key]:
                if not any(e.key == key for e in section.entries):
                    self.error(section.line, 1, "P006", f"[{section.kind}] is missing required key {key!r}")
        return out

    def one(self, f: dict[str, list[_Entry]], key: str) -> _Entry | None:
        vals = f.get(key)
        return vals[0] if vals else None

    def text(self, f, key: str, default: str = "") -> str:
        e = self.one(f, key)
        return e.value if e else default

    def ident(self, f, key: str) -> str:
        e = self.one(f, key)
        if e is None:
            return ""
        if not IDENT_RE.match(e.value):
            self.error(e.line, e.column, "P004", f"malformed id {e.value!r} for {key!r}")
        return e.value

    def boolean(self, e: _Entry | None, default: bool = False) -> bool:
        if e is None:
            return default
        if e.value == "yes":
            return True
        if e.value == "no":
            return False
        self.error(e.line, e.column, "P004", f"{e.key!r} must be 'yes' or 'no', got {e.value!r}")
        return default

    def enum(self, e: _Entry | None, enum_cls, default):
        if e is None:
            return default
        try:
            return enum_cls(e.value)
        except ValueError:
            allowed = ", ".join(m.value for m in enum_cls)
            self.error(e.line, e.column, "P004", f"{e.key!r} must be one of {allowed}; got {e.value!r}")
            return default

    def single_line(self, e: _Entry) -> bool:
        if e.continued:
            self.error(e.line, e.column, "P004", f"{e.key!r} value must fit on one line")
            return False
        return True

    def build(self) -> UseCaseCard | None:
        singles: dict[str, dict[str, list[_Entry]]] = {}
        actors: list[Actor] = []
        use_cases: list[UseCaseNode] = []
        relations: list[Relation] = []
        ids: dict[str, int] = {}

        for sec in self.sections:
            if sec.kind in SINGLETON_SECTIONS:
                if sec.kind in singles:
                    self.error(sec.line, 1, "P003", f"duplicate [{sec.kind}] section")
                    continue
                singles[sec.kind] = self.fields(sec)
                continue
            f = self.fields(sec)
            if sec.kind in ID_SECTIONS:
                assert sec.ident is not None
                if sec.ident in ids:
                    self.error(sec.line, 1, "P003",
                               f"duplicate id {sec.ident!r} (first declared at line {ids[sec.ident]})")
                    continue
                ids[sec.ident] = sec.line
            if sec.kind == "actor":
                actors.append(Actor(sec.ident, self.text(f, "name"),
                                    self.enum(self.one(f, "kind"), ActorKind, ActorKind.INDIVIDUAL)))
            elif sec.kind == "usecase":
                use_cases.append(UseCaseNode(
                    sec.ident,
                    self.text(f, "name"),
                    self.boolean(self.one(f, "ai")),
                    self.boolean(self.one(f, "main")),
                ))
            else:
                relations.append(Relation(
                    self.enum(self.one(f, "kind"), RelationKind, RelationKind.ASSOCIATION),
                    self.ident(f, "source"),
                    self.ident(f, "target"),
                ))

        for kind in SINGLETON_SECTIONS:
            if kind not in singles:
                self.error(1, 1, "P006", f"missing required [{kind}] section")
                singles[kind] = {}

        card_f, purpose_f, table_f = singles["card"], singles["purpose"], singles["table"]

        date = dt.date(1970, 1, 1)
        date_e = self.one(card_f, "date")
        if date_e is not None:
            try:
                date = dt.date.fromisoformat(date_e.value)
            except ValueError:
                self.error(date_e.line, date_e.column, "P004", f"date must be YYYY-MM-DD, got {date_e.value!r}")

        sdgs: list[int] = []
        for e in purpose_f.get("sdg", []):
            if re.fullmatch(r"[0-9]+", e.value):
                sdgs.append(int(e.value))
            else:
                self.error(e.line, e.column, "P004", f"sdg must be a goal number, got {e.value!r}")

        areas: list[ApplicationEntry] = []
        for e in table_f.get("area", []):
            if not self.single_line(e):
                continue
            entry = ApplicationEntry.from_key(e.value)
            if not entry.area or entry.subarea == "" or "/" in (entry.subarea or ""):
                self.error(e.line, e.column, "P004", f"area must be '<area>' or '<area>/<subarea>', got {e.value!r}")
                continue
            areas.append(entry)

        flags: set[TransparencyFlag] = set()
        for e in table_f.get("flag", []):
            flag = self.enum(e, TransparencyFlag, None)
            if flag is not None:
                flags.add(flag)

        stakeholders: list[Stakeholder] = []
        for e in table_f.get("stakeholder", []):
            party, sep, interest = e.value.partition("|")
            if not sep or not party.strip() or not interest.strip() or "\n" in party:
                self.error(e.line, e.column, "P004", "stakeholder must be '<party> | <interest>'")
                continue
            stakeholders.append(Stakeholder(party.strip(), interest.strip()))

        steps = [Step(i, e.value) for i, e in enumerate(table_f.get("step", []), 1)]

        extensions: list[Extension] = []
        for e in table_f.get("extension", []):
            parts = e.value.split("|", 2)
            if (len(parts) != 3 or not re.fullmatch(r"\s*[0-9]+\s*", parts[0])
                    or "\n" in parts[1] or not parts[1].strip() or not parts[2].strip()):
                self.error(e.line, e.column, "P004",
                           "extension must be '<step-index> | <condition> | <handling>'")
                continue
            extensions.append(Extension(int(parts[0]), parts[1].strip(), parts[2].strip()))

        product = self.one(table_f, "product")
        if product is not None:
            self.single_line(product)

        card_id = self.ident(card_f, "id")
        primary = self.ident(table_f, "primary-actor")

        if self.diags:
            return None
        return UseCaseCard(
            id=card_id,
            title=self.text(card_f, "title"),
            version=self.text(card_f, "version"),
            date=date,
            provider=self.text(card_f, "provider"),
            intended_purpose=IntendedPurpose(
                self.text(purpose_f, "context"), self.text(purpose_f, "scope"), tuple(sdgs)
            ),
            product_type=product.value if product else "",
            safety_component=self.boolean(self.one(table_f, "safety-component")),
            application_entries=tuple(areas),
            transparency_flags=frozenset(flags),
            actors=tuple(actors),
            use_cases=tuple(use_cases),
            relations=tuple(relations),
            primary_actor=primary,
            stakeholders=tuple(stakeholders),
            preconditions=tuple(e.value for e in table_f.get("precondition", [])),
            main_course=tuple(steps),
            extensions=tuple(extensions),
            open_issues=tuple(e.value for e in table_f.get("issue", [])),
        )


def parse_diagnostics(text: str) -> tuple[UseCaseCard | None, list[ParseDiagnostic]]:
    """Parse ``text`` and return ``(card, diagnostics)``; card is None on error."""
    p = _Parser(text)
    p.scan()
    card = p.build()
    diags = sorted(p.diags, key=lambda d: (d.location, d.code))
    return (None if diags else card), diags


def parse_card(text: str) -> UseCaseCard:
    """Parse a ``.ucc`` document, raising :class:`CardParseError` on any error."""
    card, diags = parse_diagnostics(text)
    if diags:
        raise CardParseError(diags)
    assert card is not None
    return card


# -- serialization ---------------------------------------------------------

def _kv(key: str, value: str) -> list[str]:
    first, *rest = value.split("\n")
    return [f"{key}: {first}"] + [f"  {line}" for line in rest]


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def serialize_card(card: UseCaseCard) -> str:
    """Canonical ``.ucc`` text: fixed section and key order, LF endings."""
    blocks: list[list[str]] = []
    blocks.append(
        ["[card]"]
        + _kv("id", card.id)
        + _kv("title", card.title)
        + _kv("version", card.version)
        + _kv("date", card.date.isoformat())
        + _kv("provider", card.provider)
    )
    purpose = ["[purpose]"]
    purpose += _kv("context", card.intended_purpose.context_of_use)
    purpose += _kv("scope", card.intended_purpose.scope)
    for n in card.intended_purpose.sdgs:
        purpose += _kv("sdg", str(n))
    blocks.append(purpose)

    table = ["[table]"]
    table += _kv("product", card.product_type)
    table += _kv("safety-component", _yn(card.safety_component))
    for entry in card.application_entries:
        table += _kv("area", entry.key)
    for flag in FLAG_ORDER:
        if flag in card.transparency_flags:
            table += _kv("flag", flag.value)
    table += _kv("primary-actor", card.primary_actor)
    for s in card.stakeholders:
        table += _kv("stakeholder", f"{s.party} | {s.interest}")
    for pre in card.preconditions:
        table += _kv("precondition", pre)
    for step in card.main_course:
        table += _kv("step", step.text)
    for ext in card.extensions:
        table += _kv("extension", f"{ext.step_ref} | {ext.condition} | {ext.handling}")
    for issue in card.open_issues:
        table += _kv("issue", issue)
    blocks.append(table)

    for actor in card.actors:
        blocks.append([f"[actor {actor.id}]"] + _kv("name", actor.name) + _kv("kind", actor.kind.value))
    for uc in card.use_cases:
        block = [f"[usecase {uc.id}]"] + _kv("name", uc.name) + _kv("ai", _yn(uc.is_ai))
        if uc.is_main:
            block += _kv("main", "yes")
        blocks.append(block)
    for rel in card.relations:
        blocks.append(
            ["[relation]"] + _kv("kind", rel.kind.value) + _kv("source", rel.source) + _kv("target", rel.target)
        )
    return "\n\n".join("\n".join(b) for b in blocks) + "\n"
