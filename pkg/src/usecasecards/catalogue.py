"""Registry over a directory of ``.ucc`` files.

``ingest`` parses, validates and assesses every card below a root directory
and writes ``ucc-index.json`` there. Files that fail to parse or validate are
kept in the index with status ``"invalid"`` so corpus hygiene stays visible.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import tempfile
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import vocab
from .model import (
    Actor,
    ActorKind,
    ApplicationEntry,
    Diagnostics,
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
from .parser import parse_diagnostics
from .risk import TIERS, RiskAssessment, assess
from .validator import validate

INDEX_NAME = "ucc-index.json"


class CatalogueError(Exception):
    pass


class DuplicateCardId(CatalogueError):
    def __init__(self, card_id: str, first: str, second: str):
        self.card_id = card_id
        self.paths = (first, second)
        super().__init__(f"card id {card_id!r} is declared by both {first} and {second}")


class UnknownFilterValue(CatalogueError):
    pass


def dumps(data) -> str:
    """Canonical JSON: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- card <-> JSON ---------------------------------------------------------

def card_to_dict(card: UseCaseCard) -> dict:
    return {
        "id": card.id,
        "title": card.title,
        "version": card.version,
        "date": card.date.isoformat(),
        "provider": card.provider,
        "intended_purpose": {
            "context_of_use": card.intended_purpose.context_of_use,
            "scope": card.intended_purpose.scope,
            "sdgs": list(card.intended_purpose.sdgs),
        },
        "product_type": card.product_type,
        "safety_component": card.safety_component,
        "application_entries": [{"area": e.area, "subarea": e.subarea} for e in card.application_entries],
        "transparency_flags": [f.value for f in card.sorted_flags()],
        "actors": [{"id": a.id, "name": a.name, "kind": a.kind.value} for a in card.actors],
        "use_cases": [
            {"id": u.id, "name": u.name, "is_ai": u.is_ai, "is_main": u.is_main} for u in card.use_cases
        ],
        "relations": [{"kind": r.kind.value, "source": r.source, "target": r.target} for r in card.relations],
        "primary_actor": card.primary_actor,
        "stakeholders": [{"party": s.party, "interest": s.interest} for s in card.stakeholders],
        "preconditions": list(card.preconditions),
        "main_course": [{"index": s.index, "text": s.text} for s in card.main_course],
        "extensions": [
            {"step_ref": e.step_ref, "condition": e.condition, "handling": e.handling} for e in card.extensions
        ],
        "open_issues": list(card.open_issues),
    }


def card_from_dict(d: dict) -> UseCaseCard:
    """Inverse of :func:`card_to_dict`; raises KeyError/ValueError on bad input."""
    p = d["intended_purpose"]
    return UseCaseCard(
        id=d["id"],
        title=d["title"],
        version=d["version"],
        date=dt.date.fromisoformat(d["date"]),
        provider=d["provider"],
        intended_purpose=IntendedPurpose(p["context_of_use"], p["scope"], tuple(int(n) for n in p["sdgs"])),
        product_type=d["product_type"],
        safety_component=bool(d["safety_component"]),
        application_entries=tuple(ApplicationEntry(e["area"], e.get("subarea")) for e in d["application_entries"]),
        transparency_flags=frozenset(TransparencyFlag(f) for f in d.get("transparency_flags", [])),
        actors=tuple(Actor(a["id"], a["name"], ActorKind(a["kind"])) for a in d["actors"]),
        use_cases=tuple(
            UseCaseNode(u["id"], u["name"], bool(u["is_ai"]), bool(u.get("is_main", False))) for u in d["use_cases"]
        ),
        relations=tuple(Relation(RelationKind(r["kind"]), r["source"], r["target"]) for r in d["relations"]),
        primary_actor=d["primary_actor"],
        stakeholders=tuple(Stakeholder(s["party"], s["interest"]) for s in d.get("stakeholders", [])),
        preconditions=tuple(d.get("preconditions", [])),
        main_course=tuple(Step(int(s["index"]), s["text"]) for s in d["main_course"]),
        extensions=tuple(
            Extension(int(e["step_ref"]), e["condition"], e["handling"]) for e in d.get("extensions", [])
        ),
        open_issues=tuple(d.get("open_issues", [])),
    )


def export_card_json(card: UseCaseCard) -> str:
    """Card plus its diagnostics and (when valid) its risk assessment."""
    diags = validate(card)
    assessment = assess(card, check=False) if diags.is_valid else None
    return dumps({
        "card": card_to_dict(card),
        "diagnostics": diags.to_list(),
        "assessment": assessment.to_dict() if assessment else None,
    })


def load_card_json(text: str) -> UseCaseCard:
    data = json.loads(text)
    return card_from_dict(data["card"] if "card" in data and "intended_purpose" not in data else data)


# -- catalogue -------------------------------------------------------------

@dataclass(frozen=True)
class CatalogueEntry:
    path: str
    card_id: str | None
    title: str | None
    status: str
    tier: str | None = None
    areas: tuple[str, ...] = ()
    product: str | None = None
    sdgs: tuple[int, ...] = ()
    errors: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return self.status == "valid"

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "id": self.card_id,
            "title": self.title,
            "status": self.status,
            "tier": self.tier,
            "areas": list(self.areas),
            "product": self.product,
            "sdgs": list(self.sdgs),
            "errors": list(self.errors),
        }

    @classmethod
    def from_dict(cls, d: dict) -> CatalogueEntry:
        return cls(
            path=d["path"], card_id=d["id"], title=d["title"], status=d["status"], tier=d["tier"],
            areas=tuple(d["areas"]), product=d["product"], sdgs=tuple(d["sdgs"]), errors=tuple(d["errors"]),
        )


@dataclass(frozen=True)
class Catalogue:
    entries: tuple[CatalogueEntry, ...] = ()
    root: Path | None = field(default=None, compare=False)

    @property
    def valid_entries(self) -> list[CatalogueEntry]:
        return [e for e in self.entries if e.valid]

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries], "total": len(self.entries)}


def entry_for(rel_path: str, text: str) -> CatalogueEntry:
    """Derive a catalogue entry from one file's contents."""
    card, parse_diags = parse_diagnostics(text)
    if card is None:
        return CatalogueEntry(rel_path, _sniff_id(text), None, "invalid",
                              errors=tuple(sorted({d.code for d in parse_diags})))
    diags: Diagnostics = validate(card)
    if not diags.is_valid:
        return CatalogueEntry(rel_path, card.id, card.title, "invalid",
                              errors=tuple(dict.fromkeys(f.rule for f in diags.errors)))
    assessment: RiskAssessment = assess(card, check=False)
    return CatalogueEntry(
        rel_path,
        card.id,
        card.title,
        "valid",
        tier=assessment.tier,
        areas=tuple(vocab.lookup_entry(e).key for e in card.application_entries),
        product=vocab.lookup_product_type(card.product_type).slug,
        sdgs=tuple(sorted(set(card.intended_purpose.sdgs))),
    )


def _sniff_id(text: str) -> str | None:
    # Best effort for unparseable files, so duplicate ids are still caught.
    in_card = False
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("["):
            in_card = s == "[card]"
        elif in_card and not line.startswith(" ") and s.startswith("id:"):
            value = s[3:].strip()
            return value or None
    return None


def ingest(root: str | os.PathLike, *, write_index: bool = True) -> Catalogue:
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(f"{root}: not a directory")
    paths = sorted(p.relative_to(root).as_posix() for p in root.rglob("*.ucc") if p.is_file())
    entries = []
    seen: dict[str, str] = {}
    for rel in paths:
        text = (root / rel).read_bytes().decode("utf-8", errors="replace")
        entry = entry_for(rel, text)
        if entry.card_id is not None:
            if entry.card_id in seen:
                raise DuplicateCardId(entry.card_id, seen[entry.card_id], rel)
            seen[entry.card_id] = rel
        entries.append(entry)
    cat = Catalogue(tuple(entries), root)
    if write_index:
        write_index_file(cat, root / INDEX_NAME)
    return cat


def write_index_file(cat: Catalogue, target: Path) -> None:
    data = dumps(cat.to_dict()).encode("utf-8")
    fd, tmp = tempfile.mkstemp(prefix=".ucc-index-", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_index(path: str | os.PathLike) -> Catalogue:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return Catalogue(tuple(CatalogueEntry.from_dict(e) for e in data["entries"]), Path(path).parent)


# -- statistics and queries ------------------------------------------------

@dataclass(frozen=True)
class StatsReport:
    total: int
    valid: int
    invalid: int
    per_tier: dict[str, int]
    per_area: dict[str, int]
    per_product: dict[str, int]
    per_sdg: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "valid": self.valid,
            "invalid": self.invalid,
            "per_tier": dict(self.per_tier),
            "per_area": dict(self.per_area),
            "per_product": dict(self.per_product),
            "per_sdg": {str(k): v for k, v in self.per_sdg.items()},
        }


def stats(cat: Catalogue) -> StatsReport:
    valid = cat.valid_entries
    tiers = Counter(e.tier for e in valid)
    areas: Counter[str] = Counter()
    products: Counter[str] = Counter()
    sdgs: Counter[int] = Counter()
    for e in valid:
        areas.update(set(e.areas))
        products[e.product] += 1
        sdgs.update(set(e.sdgs))
    return StatsReport(
        total=len(cat.entries),
        valid=len(valid),
        invalid=len(cat.entries) - len(valid),
        per_tier={t: tiers.get(t, 0) for t in TIERS},
        per_area=dict(sorted(areas.items())),
        per_product=dict(sorted(products.items())),
        per_sdg=dict(sorted(sdgs.items())),
    )


def normalize_filter(
    tier: str | None = None,
    area: str | None = None,
    product: str | None = None,
    sdg: int | str | None = None,
) -> dict:
    """Resolve filter values to canonical slugs, raising UnknownFilterValue."""
    out: dict = {}
    if tier is not None:
        if tier.lower() not in TIERS:
            raise UnknownFilterValue(f"unknown tier {tier!r}; expected one of {', '.join(TIERS)}")
        out["tier"] = tier.lower()
    if area is not None:
        entry = ApplicationEntry.from_key(area)
        try:
            found = vocab.lookup_area(entry.area)
            if entry.subarea is None:
                out["area"] = found.slug
            else:
                out["area"] = vocab.lookup_application_subarea(found.slug, entry.subarea).key
        except vocab.VocabularyError as exc:
            raise UnknownFilterValue(str(exc)) from None
    if product is not None:
        try:
            out["product"] = vocab.lookup_product_type(product).slug
        except vocab.VocabularyError as exc:
            raise UnknownFilterValue(str(exc)) from None
    if sdg is not None:
        try:
            out["sdg"] = vocab.lookup_sdg(sdg).number
        except vocab.VocabularyError as exc:
            raise UnknownFilterValue(str(exc)) from None
    return out


def _matches(e: CatalogueEntry, f: dict) -> bool:
    if "tier" in f and e.tier != f["tier"]:
        return False
    if "area" in f:
        want = f["area"]
        if "/" in want:
            if want not in e.areas:
                return False
        elif not any(a.split("/", 1)[0] == want for a in e.areas):
            return False
    if "product" in f and e.product != f["product"]:
        return False
    if "sdg" in f and f["sdg"] not in e.sdgs:
        return False
    return True


def query(cat: Catalogue, **filters) -> list[CatalogueEntry]:
    """Conjunctive filter over valid entries; keeps catalogue order.

    Accepted keywords: ``tier``, ``area`` (``area`` or ``area/subarea``),
    ``product`` and ``sdg``. ``None`` values are ignored.
    """
    unknown = set(filters) - {"tier", "area", "product", "sdg"}
    if unknown:
        raise UnknownFilterValue(f"unknown filter key(s): {', '.join(sorted(unknown))}")
    f = normalize_filter(**{k: v for k, v in filters.items() if v is not None})
    return [e for e in cat.valid_entries if _matches(e, f)]


def subset(cat: Catalogue, entries) -> Catalogue:
    return replace(cat, entries=tuple(entries))


def export_catalogue_json(cat: Catalogue) -> str:
    return dumps(cat.to_dict())
