"""Deterministic use-case diagram layout, SVG and HTML rendering.

Layout is a fixed recipe, not an optimiser: use cases form one column inside
the system boundary in declaration order, the primary actor (plus every actor
tied to it by generalization) sits on the left, the rest on the right.
Dependencies between use cases are routed through vertical lanes to the
right of the column so parallel «include» arrows stay distinguishable.
All coordinates are integers; identical cards give identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from html import escape

from .model import FLAG_ORDER, RelationKind, UseCaseCard
from . import vocab
from .risk import RiskAssessment, explain
from .validator import require_valid

OVAL_W, OVAL_H = 160, 56
OVAL_GAP = 24
PAD = 32
TOP = 16
SIDE = 240
LANE = 16
ACTOR_SLOT = 80
GLYPH_W, GLYPH_H = 32, 48
LABEL_MAX = 22

BLUE = "#cfe2f3"
WHITE = "#ffffff"
STROKE = "#000000"

# relation kind -> (line style, arrowhead, label)
EDGE_STYLE = {
    RelationKind.ASSOCIATION: ("solid", "none", None),
    RelationKind.INCLUDE: ("dashed", "open", "«include»"),
    RelationKind.EXTEND: ("dashed", "open", "«extend»"),
    RelationKind.ACTOR_GENERALIZATION: ("solid", "hollow_triangle", None),
}

Point = tuple[int, int]


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    width: int
    height: int

    def contains_strictly(self, px: int, py: int) -> bool:
        return self.x < px < self.x + self.width and self.y < py < self.y + self.height


@dataclass(frozen=True)
class ActorGlyph:
    actor_id: str
    x: int
    y: int
    side: str


@dataclass(frozen=True)
class Oval:
    use_case_id: str
    cx: int
    cy: int
    rx: int
    ry: int
    fill_class: str


@dataclass(frozen=True)
class Edge:
    relation_index: int
    points: tuple[Point, ...]
    style: str
    arrowhead: str
    label: str | None
    label_at: Point | None = None
    vertical_label: bool = False


@dataclass(frozen=True)
class DiagramLayout:
    width: int
    height: int
    boundary: Rect
    actor_glyphs: tuple[ActorGlyph, ...]
    ovals: tuple[Oval, ...]
    edges: tuple[Edge, ...]


def _round(v: float) -> int:
    return int(math.floor(v + 0.5))


def _ellipse_exit(o: Oval, toward: Point) -> Point:
    dx, dy = toward[0] - o.cx, toward[1] - o.cy
    t = 1.0 / math.sqrt((dx / o.rx) ** 2 + (dy / o.ry) ** 2)
    return _round(o.cx + t * dx), _round(o.cy + t * dy)


def _box_exit(g: ActorGlyph, toward: Point) -> Point:
    dx, dy = toward[0] - g.x, toward[1] - g.y
    scale = min(
        (GLYPH_W / 2) / abs(dx) if dx else math.inf,
        (GLYPH_H / 2) / abs(dy) if dy else math.inf,
    )
    return _round(g.x + scale * dx), _round(g.y + scale * dy)


def _left_actor_ids(card: UseCaseCard) -> set[str]:
    # Generalization links are followed in both directions.
    links: dict[str, set[str]] = {}
    for r in card.relations:
        if r.kind is RelationKind.ACTOR_GENERALIZATION:
            links.setdefault(r.source, set()).add(r.target)
            links.setdefault(r.target, set()).add(r.source)
    seen = {card.primary_actor}
    todo = [card.primary_actor]
    while todo:
        for nxt in links.get(todo.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def layout_diagram(card: UseCaseCard, *, check: bool = True) -> DiagramLayout:
    if check:
        require_valid(card)

    n = len(card.use_cases)
    lanes = sum(r.kind in (RelationKind.INCLUDE, RelationKind.EXTEND) for r in card.relations)
    left_ids = _left_actor_ids(card)
    left = [a for a in card.actors if a.id in left_ids]
    right = [a for a in card.actors if a.id not in left_ids]

    column_h = n * OVAL_H + max(n - 1, 0) * OVAL_GAP
    height = max(column_h + 2 * PAD, max(len(left), len(right)) * ACTOR_SLOT)
    width = OVAL_W + 2 * PAD + LANE * lanes
    boundary = Rect(SIDE, TOP, width, height)

    top = boundary.y + PAD + (height - 2 * PAD - column_h) // 2
    cx = boundary.x + PAD + OVAL_W // 2
    ovals = tuple(
        Oval(uc.id, cx, top + OVAL_H // 2 + i * (OVAL_H + OVAL_GAP), OVAL_W // 2, OVAL_H // 2,
             "ai" if uc.is_ai else "non_ai")
        for i, uc in enumerate(card.use_cases)
    )

    glyphs = []
    for side, group, x in (("left", left, SIDE // 2),
                           ("right", right, boundary.x + boundary.width + SIDE // 2)):
        k = len(group)
        for i, actor in enumerate(group):
            glyphs.append(ActorGlyph(actor.id, x, boundary.y + height * (i + 1) // (k + 1), side))

    oval_by_id = {o.use_case_id: o for o in ovals}
    glyph_by_id = {g.actor_id: g for g in glyphs}

    edges = []
    lane = 0
    for idx, rel in enumerate(card.relations):
        style, head, label = EDGE_STYLE[rel.kind]
        if rel.kind is RelationKind.ASSOCIATION:
            actor_end, uc_end = (rel.source, rel.target) if rel.source in glyph_by_id else (rel.target, rel.source)
            g, o = glyph_by_id[actor_end], oval_by_id[uc_end]
            edges.append(Edge(idx, (_box_exit(g, (o.cx, o.cy)), _ellipse_exit(o, (g.x, g.y))), style, head, None))
        elif rel.kind is RelationKind.ACTOR_GENERALIZATION:
            # Both ends sit in the same actor column (generalization pulls actors
            # onto one side), so detour around the outer side to clear the labels.
            a, b = glyph_by_id[rel.source], glyph_by_id[rel.target]
            sign = -1 if a.side == "left" else 1
            edge_x, far_x = a.x + sign * GLYPH_W // 2, a.x + sign * (ACTOR_SLOT - GLYPH_W // 2)
            points = ((edge_x, a.y), (far_x, a.y), (far_x, b.y), (edge_x, b.y))
            edges.append(Edge(idx, points, style, head, None))
        else:
            s, t = oval_by_id[rel.source], oval_by_id[rel.target]
            lane += 1
            lx = s.cx + s.rx + LANE * lane
            points = ((s.cx + s.rx, s.cy), (lx, s.cy), (lx, t.cy), (t.cx + t.rx, t.cy))
            edges.append(Edge(idx, points, style, head, label, (lx - 4, (s.cy + t.cy) // 2), True))

    return DiagramLayout(
        width=boundary.x + boundary.width + SIDE,
        height=boundary.y + boundary.height + TOP,
        boundary=boundary,
        actor_glyphs=tuple(glyphs),
        ovals=ovals,
        edges=tuple(edges),
    )


def truncate(name: str, limit: int = LABEL_MAX) -> str:
    name = " ".join(name.split())
    return name if len(name) <= limit else name[: limit - 1] + "…"


def _attr(v) -> str:
    return escape(str(v), quote=True)


def _points(points) -> str:
    return " ".join(f"{x},{y}" for x, y in points)


def render_svg(layout: DiagramLayout, card: UseCaseCard, *, xml_declaration: bool = True) -> str:
    """Emit SVG 1.1 in a fixed order: boundary, edges, ovals, actors, labels."""
    w, h, b = layout.width, layout.height, layout.boundary
    out: list[str] = []
    if xml_declaration:
        out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">'
    )
    out.append(f"<title>{escape(card.title)}</title>")
    out.append("<defs>")
    out.append(
        '<marker id="open-arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="10" '
        'markerHeight="10" markerUnits="userSpaceOnUse" orient="auto">'
        f'<path d="M0,0 L10,5 L0,10" fill="none" stroke="{STROKE}"/></marker>'
    )
    out.append(
        '<marker id="hollow-triangle" viewBox="0 0 12 12" refX="12" refY="6" markerWidth="12" '
        'markerHeight="12" markerUnits="userSpaceOnUse" orient="auto">'
        f'<path d="M0,0 L12,6 L0,12 Z" fill="{WHITE}" stroke="{STROKE}"/></marker>'
    )
    out.append("</defs>")
    out.append(
        f'<rect class="boundary" x="{b.x}" y="{b.y}" width="{b.width}" height="{b.height}" '
        f'fill="{WHITE}" stroke="{STROKE}"/>'
    )

    out.append('<g class="edges">')
    for e in layout.edges:
        kind = card.relations[e.relation_index].kind.value
        extra = ' stroke-dasharray="6,4"' if e.style == "dashed" else ""
        if e.arrowhead == "open":
            extra += ' marker-end="url(#open-arrow)"'
        elif e.arrowhead == "hollow_triangle":
            extra += ' marker-end="url(#hollow-triangle)"'
        out.append(
            f'<polyline class="edge edge-{kind}" points="{_points(e.points)}" fill="none" '
            f'stroke="{STROKE}"{extra}/>'
        )
    out.append("</g>")

    out.append('<g class="ovals">')
    for o in layout.ovals:
        cls, fill = ("uc-ai", BLUE) if o.fill_class == "ai" else ("uc", WHITE)
        out.append(
            f'<ellipse class="{cls}" id="uc-{_attr(o.use_case_id)}" cx="{o.cx}" cy="{o.cy}" '
            f'rx="{o.rx}" ry="{o.ry}" fill="{fill}" stroke="{STROKE}"/>'
        )
    out.append("</g>")

    out.append('<g class="actors" fill="none" stroke="#000000" stroke-width="1.5">')
    for g in layout.actor_glyphs:
        x, y = g.x, g.y - GLYPH_H // 2
        out.append(f'<g class="actor actor-{g.side}" id="actor-{_attr(g.actor_id)}">')
        out.append(f'<circle cx="{x}" cy="{y + 7}" r="7"/>')
        out.append(f'<line x1="{x}" y1="{y + 14}" x2="{x}" y2="{y + 32}"/>')
        out.append(f'<line x1="{x - 16}" y1="{y + 20}" x2="{x + 16}" y2="{y + 20}"/>')
        out.append(f'<line x1="{x}" y1="{y + 32}" x2="{x - 14}" y2="{y + 48}"/>')
        out.append(f'<line x1="{x}" y1="{y + 32}" x2="{x + 14}" y2="{y + 48}"/>')
        out.append("</g>")
    out.append("</g>")

    out.append('<g class="labels" fill="#000000" text-anchor="middle">')
    out.append(
        f'<text class="boundary-label" x="{b.x + b.width // 2}" y="{b.y + 20}" '
        f'font-weight="bold">{escape(truncate(card.title, 40))}</text>'
    )
    for o, uc in zip(layout.ovals, card.use_cases):
        out.append(
            f'<text class="uc-label" x="{o.cx}" y="{o.cy + 4}"><title>{escape(uc.name)}</title>'
            f"{escape(truncate(uc.name))}</text>"
        )
    for g in layout.actor_glyphs:
        actor = card.actor(g.actor_id)
        name = actor.name if actor else g.actor_id
        out.append(
            f'<text class="actor-label" x="{g.x}" y="{g.y + GLYPH_H // 2 + 14}"><title>{escape(name)}</title>'
            f"{escape(truncate(name))}</text>"
        )
    for e in layout.edges:
        if e.label and e.label_at:
            x, y = e.label_at
            rotate = f' transform="rotate(-90 {x} {y})"' if e.vertical_label else ""
            out.append(f'<text class="edge-label" x="{x}" y="{y}" font-size="10"{rotate}>{escape(e.label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_card_svg(card: UseCaseCard) -> str:
    return render_svg(layout_diagram(card), card)


# -- HTML ------------------------------------------------------------------

EMPTY = "—"

TIER_COLOURS = {"high": "#c0392b", "transparency": "#d68910", "minimal": "#1e8449"}

CSS_TABLE = "border-collapse:collapse;width:100%;font-size:13px;"
CSS_TH = "text-align:left;vertical-align:top;background:#eef3f8;border:1px solid #999999;padding:4px 8px;width:30%;"
CSS_TD = "vertical-align:top;border:1px solid #999999;padding:4px 8px;"
CSS_SECTION = "text-align:left;background:#cfe2f3;border:1px solid #999999;padding:4px 8px;"


def _text(value: str) -> str:
    return escape(value).replace("\n", "<br>")


def _list(items: list[str], ordered: bool = False) -> str:
    if not items:
        return EMPTY
    tag = "ol" if ordered else "ul"
    body = "".join(f"<li>{item}</li>" for item in items)
    return f'<{tag} style="margin:0;padding-left:20px;">{body}</{tag}>'


def _row(label: str, html_value: str) -> str:
    return f'<tr><th style="{CSS_TH}">{escape(label)}</th><td style="{CSS_TD}">{html_value}</td></tr>'


def _section(label: str) -> str:
    return f'<tr><th colspan="2" style="{CSS_SECTION}">{escape(label)}</th></tr>'


def _product_label(slug: str) -> str:
    try:
        return vocab.lookup_product_type(slug).label
    except vocab.VocabularyError:
        return slug


def _sdg_label(n: int) -> str:
    try:
        return f"{n}. {vocab.lookup_sdg(n).name}"
    except vocab.VocabularyError:
        return str(n)


def _area_labels(card: UseCaseCard) -> list[str]:
    out = []
    for entry in card.application_entries:
        try:
            m = vocab.lookup_entry(entry)
        except vocab.VocabularyError:
            out.append(escape(entry.key))
            continue
        text = escape(m.area.label)
        if m.subarea is not None:
            text += f": {escape(m.subarea.label)}"
        if m.annex_iii:
            text += " <strong>(Annex III)</strong>"
        out.append(text)
    return out


def _extension_items(card: UseCaseCard) -> list[str]:
    counts: dict[int, int] = {}
    items = []
    for ext in card.extensions:
        letter = chr(ord("a") + counts.get(ext.step_ref, 0) % 26)
        counts[ext.step_ref] = counts.get(ext.step_ref, 0) + 1
        items.append(
            f"<strong>{ext.step_ref}{letter}.</strong> {_text(ext.condition)}"
            f"<br><em>Failure protection:</em> {_text(ext.handling)}"
        )
    return items


def render_card_html(card: UseCaseCard, assessment: RiskAssessment) -> str:
    """Full card: table on the left, diagram on the right, risk badge on top."""
    svg = render_svg(layout_diagram(card), card, xml_declaration=False)
    purpose = card.intended_purpose
    primary = card.actor(card.primary_actor)
    colour = TIER_COLOURS.get(assessment.tier, "#555555")
    rules = ", ".join(dict.fromkeys(assessment.rule_ids))

    rows = [
        _section("Intended purpose"),
        _row("Context of use", _text(purpose.context_of_use)),
        _row("Scope", _text(purpose.scope)),
        _row("Sustainable Development Goals", _list([escape(_sdg_label(n)) for n in purpose.sdgs])),
        _section("Risk-related information"),
        _row("Type of product", escape(_product_label(card.product_type))),
        _row("Is it a safety component?", "Yes" if card.safety_component else "No"),
        _row("Application area(s)", _list(_area_labels(card))),
        _row("Transparency-relevant behaviour",
             _list([escape(f.value) for f in FLAG_ORDER if f in card.transparency_flags])),
        _section("Use case"),
        _row("Primary actor", escape(primary.name if primary else card.primary_actor)),
        _row("Actors", _list([f"{escape(a.name)} <em>({a.kind.value})</em>" for a in card.actors])),
        _row("Stakeholders and interests",
             _list([f"<strong>{escape(s.party)}:</strong> {_text(s.interest)}" for s in card.stakeholders])),
        _row("Preconditions", _list([_text(p) for p in card.preconditions])),
        _row("Main course", _list([_text(s.text) for s in card.main_course], ordered=True)),
        _row("Extensions", _list(_extension_items(card))),
        _row("Open issues", _list([_text(i) for i in card.open_issues])),
    ]
    triggers = "".join(f"<li><code>{escape(line)}</code></li>"
                       for line in explain(assessment).splitlines() if not line.startswith("NOTE: "))

    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        f"<title>Use case card: {escape(card.title)}</title>",
        "</head>",
        '<body style="font-family:sans-serif;margin:24px;color:#111111;">',
        f'<h1 style="font-size:22px;margin:0 0 4px 0;">{escape(card.title)}</h1>',
        f'<p style="margin:0 0 12px 0;color:#444444;">{escape(card.id)} &middot; version {escape(card.version)}'
        f" &middot; {card.date.isoformat()} &middot; {escape(card.provider)}</p>",
        f'<div class="risk-badge risk-{escape(assessment.tier)}" style="display:inline-block;padding:4px 12px;'
        f'border-radius:4px;color:#ffffff;background:{colour};font-weight:bold;margin-bottom:12px;">'
        f"Risk tier: {escape(assessment.tier)} ({escape(rules)})</div>",
        '<div style="display:flex;gap:24px;align-items:flex-start;">',
        f'<div class="ucc-table" style="flex:1 1 50%;"><table style="{CSS_TABLE}">',
        *rows,
        "</table></div>",
        '<div class="ucc-canvas" style="flex:1 1 50%;overflow:auto;">',
        svg.rstrip("\n"),
        "</div>",
        "</div>",
        '<h2 style="font-size:16px;margin:16px 0 4px 0;">Risk triggers</h2>',
        f'<ul class="risk-triggers" style="margin:0;">{triggers}</ul>',
        f'<p class="manual-review" style="font-size:12px;color:#444444;">{escape(assessment.manual_review_note)}</p>',
        "</body>",
        "</html>",
    ]
    return "\n".join(parts) + "\n"
