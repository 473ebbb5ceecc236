"""Toolkit for use case cards: parse, validate, risk-classify, render, catalogue."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    Actor,
    ActorKind,
    ApplicationEntry,
    Diagnostics,
    Extension,
    Finding,
    IntendedPurpose,
    Relation,
    RelationKind,
    Stakeholder,
    Step,
    TransparencyFlag,
    UseCaseCard,
    UseCaseNode,
)
from .parser import CardParseError, ParseDiagnostic, SourceLocation, parse_card, serialize_card  # noqa: E402
from .validator import NotValidated, validate, word_count  # noqa: E402
from .risk import RiskAssessment, RiskTrigger, assess, explain  # noqa: E402
from .render import layout_diagram, render_card_html, render_svg  # noqa: E402
from .catalogue import Catalogue, StatsReport, export_card_json, ingest, query, stats  # noqa: E402
