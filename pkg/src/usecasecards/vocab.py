"""Closed vocabularies: product types, application areas and SDGs.

Lists follow the AI Act "General Approach" text of December 2022. Entries are
referenced from card files by slug; slugs are frozen and must never be
renumbered or derived from list position.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from typing import Union

from .model import ApplicationEntry, TransparencyFlag


class VocabularyError(LookupError):
    """Base class for failed vocabulary lookups."""


class UnknownProductType(VocabularyError):
    def __init__(self, key: str, suggestions: list[str]):
        self.key = key
        self.suggestions = suggestions
        hint = f"; did you mean {', '.join(repr(s) for s in suggestions)}?" if suggestions else ""
        super().__init__(f"unknown product type {key!r}{hint}")


class UnknownArea(VocabularyError):
    pass


class MissingSubarea(VocabularyError):
    pass


class UnknownSubarea(VocabularyError):
    pass


class UnknownSdg(VocabularyError):
    pass


def slugify(text: str) -> str:
    """Lowercase, ASCII-folded, hyphen-separated slug.

    >>> slugify("In vitro diagnostic medical device")
    'in-vitro-diagnostic-medical-device'
    >>> slugify("2- or 3-wheel vehicle or quadricycle")
    '2-or-3-wheel-vehicle-or-quadricycle'
    """
    folded = unicodedata.normalize("NFKD", text).encode("ascii", "ignore").decode("ascii")
    return re.sub(r"[^a-z0-9]+", "-", folded.lower()).strip("-")


def edit_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class ProductType:
    slug: str
    label: str
    annex_ii: bool


@dataclass(frozen=True)
class ApplicationSubarea:
    slug: str
    label: str
    annex_iii: bool = True


@dataclass(frozen=True)
class ApplicationArea:
    slug: str
    label: str
    subareas: tuple[ApplicationSubarea, ...] = ()

    def subarea(self, key: str) -> ApplicationSubarea | None:
        folded = key.strip().lower()
        for sub in self.subareas:
            if sub.slug == key or sub.label.lower() == folded:
                return sub
        return None


@dataclass(frozen=True)
class AreaMatch:
    """An application entry resolved against the vocabulary."""

    area: ApplicationArea
    subarea: ApplicationSubarea | None

    @property
    def annex_iii(self) -> bool:
        return self.subarea is not None and self.subarea.annex_iii

    @property
    def key(self) -> str:
        return self.entry.key

    @property
    def entry(self) -> ApplicationEntry:
        return ApplicationEntry(self.area.slug, self.subarea.slug if self.subarea else None)

    @property
    def label(self) -> str:
        if self.subarea is None:
            return self.area.label
        return f"{self.area.label}: {self.subarea.label}"


@dataclass(frozen=True)
class Sdg:
    number: int
    name: str

    @property
    def slug(self) -> str:
        return slugify(self.name)


def _p(label: str, annex_ii: bool = True, slug: str | None = None) -> ProductType:
    return ProductType(slug or slugify(label), label, annex_ii)


PRODUCT_TYPES: tuple[ProductType, ...] = (
    _p("Machinery"),
    _p("Toy"),
    _p("Recreational craft or personal watercraft"),
    _p("Lift"),
    _p("Equipment and protective systems for use in potentially explosive atmospheres"),
    _p("Radio equipment"),
    _p("Pressure equipment"),
    _p("Cableway installation"),
    _p("Personal protective equipment"),
    _p("Appliances burning gaseous fuels"),
    _p("Medical device"),
    _p("In vitro diagnostic medical device"),
    _p("Civil aviation"),
    _p("2- or 3-wheel vehicle or quadricycle"),
    _p("Agricultural and forestry vehicle"),
    _p("Marine equipment"),
    _p("Interoperability of the rail system"),
    _p("Motor vehicles and their trailers"),
    _p("Other hardware product/system", annex_ii=False, slug="other-hardware"),
    _p("Other software product/system", annex_ii=False, slug="other-software"),
)


def _s(slug: str, label: str) -> ApplicationSubarea:
    return ApplicationSubarea(slug, label, True)


# Subarea slugs are hand-assigned short names; the labels are full sentences.
APPLICATION_AREAS: tuple[ApplicationArea, ...] = (
    ApplicationArea("biometrics", "Biometrics", (
        _s("remote-biometric-identification", "Remote biometric identification systems"),
    )),
    ApplicationArea("critical-infrastructure", "Critical infrastructure", (
        _s("critical-infrastructure-safety",
           "AI systems used as safety components in the management and operation of critical "
           "digital infrastructure, road traffic and the supply of water, gas, heating and "
           "electricity"),
    )),
    ApplicationArea("education-and-vocational-training", "Education and vocational training", (
        _s("access-and-admission",
           "AI systems used to determine access, admission or to assign natural persons to "
           "educational and vocational training institutions or programmes"),
        _s("evaluate-learning-outcomes",
           "AI systems intended to be used to evaluate learning outcomes"),
    )),
    ApplicationArea("employment", "Employment, workers management and access to self-employment", (
        _s("recruitment-and-selection",
           "AI systems used for recruitment or selection of natural persons, notably to place "
           "targeted job advertisements, to analyse and filter job applications, and to "
           "evaluate candidates"),
        _s("work-relationship-decisions",
           "AI systems to make decisions on promotion and termination of work-related "
           "relationships, to allocate tasks or monitor and evaluate performance based on "
           "person's behavior, personal traits or characteristics"),
    )),
    ApplicationArea("essential-services",
                    "Access to essential private services, public services and benefits", (
        _s("public-assistance-eligibility",
           "AI systems used by public authorities to evaluate the eligibility of natural persons "
           "for essential public assistance benefits and services, and to grant, reduce, revoke "
           "or reclaim such benefits and services"),
        _s("creditworthiness",
           "AI systems used to evaluate the creditworthiness of natural persons or establish "
           "their credit score"),
        _s("emergency-dispatch",
           "AI systems used to dispatch, or to establish priority in the dispatching of emergency "
           "first response services, including by firefighters and medical aid"),
        _s("life-and-health-insurance",
           "AI systems for risk assessment and pricing in the case of life and health insurance"),
    )),
    ApplicationArea("law-enforcement", "Law enforcement", (
        _s("offending-risk-assessment",
           "AI systems used by law enforcement to assess the risk of a natural person for "
           "offending or reoffending or the risk for a natural person to become a potential "
           "victim of criminal offences"),
        _s("polygraphs-and-emotion-detection",
           "AI systems used by law enforcement as polygraphs or to detect the emotional state of "
           "a natural person"),
        _s("evidence-reliability",
           "AI systems used by law enforcement to evaluate the reliability of evidence in the "
           "course of investigation or prosecution of criminal offences"),
        _s("offence-prediction",
           "AI systems used by law enforcement to predict the (re)occurrence of a criminal "
           "offence based on profiling of natural persons or to assess personality traits and "
           "characteristics or past criminal behaviour"),
        _s("criminal-profiling",
           "AI systems used by law enforcement to profile natural persons in the course of "
           "detection, investigation or prosecution of criminal offences"),
    )),
    ApplicationArea("migration-asylum-and-border-control",
                    "Migration, asylum and border control management", (
        _s("polygraphs-and-emotion-detection",
           "AI systems used by public authorities as polygraphs or to detect the emotional state "
           "of a natural person"),
        _s("entry-risk-assessment",
           "AI systems used by public authorities to assess a risk (security risk, risk of "
           "irregular immigration, health risk) posed by a person who enters or has entered into "
           "the territory of a Member State"),
        _s("asylum-visa-and-residence-applications",
           "AI systems to assist public authorities to examine applications for asylum, visa and "
           "residence permits and associated complaints"),
    )),
    ApplicationArea("administration-of-justice",
                    "Administration of justice and democratic processes", (
        _s("judicial-interpretation",
           "AI systems used by a judicial authority to interpret facts or the law and to apply "
           "the law to a concrete set of facts"),
    )),
    ApplicationArea("entertainment-and-leisure", "Entertainment and leisure"),
    ApplicationArea("marketing-and-retail", "Marketing and retail"),
    ApplicationArea("culture-art-and-heritage", "Culture, art and heritage"),
    ApplicationArea("clinical-use-in-medicine-and-healthcare",
                    "Clinical use in medicine and healthcare"),
    ApplicationArea("finances-and-banking", "Finances and banking"),
    ApplicationArea("social-assistance", "Social assistance"),
    ApplicationArea("video-surveillance-for-security", "Video-surveillance for security"),
    ApplicationArea("transportation-and-mobility", "Transportation and mobility"),
    ApplicationArea("tourism-hospitality-and-restaurants", "Tourism, hospitality and restaurants"),
    ApplicationArea("industry-and-logistics", "Industry and logistics"),
    ApplicationArea("politics", "Politics"),
    ApplicationArea("other", "Other"),
)

SDGS: tuple[Sdg, ...] = tuple(Sdg(i, name) for i, name in enumerate((
    "No poverty",
    "Zero hunger",
    "Good health and well-being",
    "Quality education",
    "Gender equality",
    "Clean water and sanitation",
    "Affordable and clean energy",
    "Decent work and economic growth",
    "Industry, innovation and infrastructure",
    "Reduced inequalities",
    "Sustainable cities and communities",
    "Responsible consumption and production",
    "Climate action",
    "Life below water",
    "Life on land",
    "Peace, justice and strong institutions",
    "Partnerships for the goals",
), start=1))


def check_cardinalities() -> None:
    """Assert the vocabulary tallies; raises AssertionError on drift."""
    assert len(PRODUCT_TYPES) == 20
    assert sum(p.annex_ii for p in PRODUCT_TYPES) == 18
    assert len(APPLICATION_AREAS) == 20
    assert [len(a.subareas) for a in APPLICATION_AREAS if a.subareas] == [1, 1, 2, 2, 4, 5, 3, 1]
    assert sum(s.annex_iii for a in APPLICATION_AREAS for s in a.subareas) == 19
    assert [s.number for s in SDGS] == list(range(1, 18))
    assert len(TransparencyFlag) == 4
    assert len({p.slug for p in PRODUCT_TYPES}) == 20
    assert len({a.slug for a in APPLICATION_AREAS}) == 20


check_cardinalities()


def lookup_product_type(key: str) -> ProductType:
    if not key or not key.strip():
        raise UnknownProductType(key, [])
    folded = key.strip().lower()
    for p in PRODUCT_TYPES:
        if p.slug == key or p.label.lower() == folded:
            return p
    ranked = sorted(PRODUCT_TYPES, key=lambda p: (edit_distance(folded, p.label.lower()), p.label))
    raise UnknownProductType(key, [p.label for p in ranked[:3]])


def lookup_area(key: str) -> ApplicationArea:
    folded = key.strip().lower()
    for a in APPLICATION_AREAS:
        if a.slug == key or a.label.lower() == folded:
            return a
    raise UnknownArea(f"unknown application area {key!r}")


def lookup_application_subarea(area: str, subarea: str | None = None) -> AreaMatch:
    """Resolve an (area, subarea) pair by slug or label.

    Areas that list Annex III subareas must be narrowed to one of them; the
    remaining areas accept no subarea at all.
    """
    if not area or not area.strip():
        raise UnknownArea("empty application area")
    found = lookup_area(area)
    if subarea is None or not subarea.strip():
        if found.subareas:
            raise MissingSubarea(
                f"area {found.slug!r} requires a subarea, one of: "
                + ", ".join(s.slug for s in found.subareas)
            )
        return AreaMatch(found, None)
    sub = found.subarea(subarea)
    if sub is None:
        raise UnknownSubarea(f"unknown subarea {subarea!r} in area {found.slug!r}")
    return AreaMatch(found, sub)


def lookup_entry(entry: ApplicationEntry) -> AreaMatch:
    return lookup_application_subarea(entry.area, entry.subarea)


def lookup_area_key(key: str) -> AreaMatch:
    """Resolve an ``area`` or ``area/subarea`` key string."""
    return lookup_entry(ApplicationEntry.from_key(key))


SdgKey = Union[int, str]


def lookup_sdg(key: SdgKey) -> Sdg:
    if isinstance(key, bool):
        raise UnknownSdg(f"unknown SDG {key!r}")
    if isinstance(key, int):
        if 1 <= key <= len(SDGS):
            return SDGS[key - 1]
        raise UnknownSdg(f"SDG number {key} outside 1..{len(SDGS)}")
    text = str(key).strip()
    if text.isdigit():
        return lookup_sdg(int(text))
    folded = text.lower()
    for sdg in SDGS:
        if sdg.name.lower() == folded or sdg.slug == text:
            return sdg
    raise UnknownSdg(f"unknown SDG {key!r}")


def lookup_flag(key: str) -> TransparencyFlag:
    norm = key.strip().lower().replace("-", "_")
    try:
        return TransparencyFlag(norm)
    except ValueError:
        raise VocabularyError(f"unknown transparency flag {key!r}") from None


def vocab_json(name: str) -> list[dict]:
    """Export one vocabulary as JSON-ready data."""
    if name == "products":
        return [{"slug": p.slug, "label": p.label, "annex_ii": p.annex_ii} for p in PRODUCT_TYPES]
    if name == "areas":
        return [
            {
                "slug": a.slug,
                "label": a.label,
                "subareas": [
                    {"slug": s.slug, "label": s.label, "annex_iii": s.annex_iii} for s in a.subareas
                ],
            }
            for a in APPLICATION_AREAS
        ]
    if name == "sdgs":
        return [{"number": s.number, "name": s.name, "slug": s.slug} for s in SDGS]
    if name == "flags":
        return [{"slug": f.value} for f in TransparencyFlag]
    raise KeyError(name)


VOCAB_NAMES = ("products", "areas", "sdgs", "flags")
