"""AI Act risk-tier rules with explainable triggers.

Every rule that fires is reported, even when a single one is enough to set
the tier. Prohibited (unacceptable-risk) practices cannot be read off card
fields, so they are never emitted; a fixed note asks for manual review.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import vocab
from .model import UseCaseCard
from .validator import NotValidated, require_valid

HIGH = "high"
TRANSPARENCY = "transparency"
MINIMAL = "minimal"
TIERS = (HIGH, TRANSPARENCY, MINIMAL)

LEGAL_REFS = {
    "R1": "Art. 3(14) / Annex II",
    "R2": "Art. 6 / Annex II",
    "R3": "Art. 6 / Annex III",
    "R4": "transparency obligations (tier 3)",
    "R5": "minimal risk (tier 4)",
}

MANUAL_REVIEW_NOTE = (
    "Unacceptable-risk (prohibited) practices are outside automated scope; "
    "review the intended purpose manually against the AI Act's prohibited practices."
)

HIGH_RULES = frozenset({"R1", "R2", "R3"})


@dataclass(frozen=True)
class RiskTrigger:
    rule_id: str
    subject: str
    legal_ref: str
    sentence: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"rule": self.rule_id, "subject": self.subject, "legal_ref": self.legal_ref}


@dataclass(frozen=True)
class RiskAssessment:
    tier: str
    triggers: tuple[RiskTrigger, ...]
    manual_review_note: str = MANUAL_REVIEW_NOTE

    @property
    def rule_ids(self) -> list[str]:
        return [t.rule_id for t in self.triggers]

    def to_dict(self) -> dict:
        return {
            "tier": self.tier,
            "triggers": [t.to_dict() for t in self.triggers],
            "manual_review_note": self.manual_review_note,
        }


def _trigger(rule: str, subject: str, sentence: str) -> RiskTrigger:
    return RiskTrigger(rule, subject, LEGAL_REFS[rule], sentence)


def tier_for(rule_ids) -> str:
    ids = set(rule_ids)
    if ids & HIGH_RULES:
        return HIGH
    if "R4" in ids:
        return TRANSPARENCY
    return MINIMAL


def assess(card: UseCaseCard, *, check: bool = True) -> RiskAssessment:
    """Classify ``card`` into a risk tier.

    With ``check`` (the default) the card is validated first and
    :class:`NotValidated` is raised if it carries errors.
    """
    if check:
        require_valid(card)

    triggers: list[RiskTrigger] = []
    if card.safety_component:
        triggers.append(_trigger(
            "R1", "table.safety_component",
            "the use case is declared a safety component of a product or system",
        ))
    product = vocab.lookup_product_type(card.product_type)
    if product.annex_ii:
        triggers.append(_trigger(
            "R2", product.slug,
            f"product type '{product.label}' might be subject to Union harmonisation "
            "legislation listed in Annex II and is treated as high-risk",
        ))
    for entry in card.application_entries:
        match = vocab.lookup_entry(entry)
        if match.annex_iii:
            triggers.append(_trigger(
                "R3", match.key,
                f"application subarea '{match.subarea.label}' is listed as high-risk in Annex III",
            ))
    for flag in card.sorted_flags():
        triggers.append(_trigger(
            "R4", flag.value,
            f"declared behaviour '{flag.value}' carries transparency obligations",
        ))
    if not triggers:
        triggers.append(_trigger(
            "R5", "card", "no high-risk or transparency trigger applies",
        ))
    return RiskAssessment(tier_for(t.rule_id for t in triggers), tuple(triggers))


def explain(assessment: RiskAssessment) -> str:
    lines = []
    for t in assessment.triggers:
        line = f"{t.rule_id} {t.subject} [{t.legal_ref}]: {t.sentence}"
        if t.rule_id == "R4" and assessment.tier == HIGH:
            line += " (informational; tier is already high)"
        lines.append(line)
    lines.append(f"NOTE: {assessment.manual_review_note}")
    return "\n".join(lines) + "\n"
