"""Semantic checks over a parsed card.

Rule IDs are stable and are part of the JSON output contract:

    V1  error    primary actor declared; exactly one main use case
    V2  error    at least one AI use case
    V3  error    relation endpoints resolve and have the right kinds
    V4  warning  context of use / scope longer than 100 words
    V5  error    SDGs, product type and application areas resolve
    V6  error    main use case takes part in some relation
    V7  error    main course non-empty; extensions point at real steps
    V8  warning  actor never referenced by a relation
    V9  error    include/extend graph is acyclic
    V10 warning  no open issues (foreseeable misuses) documented
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from . import vocab
from .model import Diagnostics, Finding, RelationKind, UseCaseCard

WORD_LIMIT = 100

RULES = ("V1", "V2", "V3", "V4", "V5", "V6", "V7", "V8", "V9", "V10")


class NotValidated(ValueError):
    """The card still has validation errors."""

    def __init__(self, card_id: str, rules: list[str]):
        self.card_id = card_id
        self.rules = rules
        super().__init__(f"card {card_id!r} has validation errors: {', '.join(rules)}")


def word_count(text: str) -> int:
    return len(text.split())


def dependency_cycles(nodes: Sequence[str], edges: Iterable[tuple[str, str]]) -> list[list[str]]:
    """Return one cycle per strongly connected component that contains one.

    Each cycle is a list of node ids ``[v0, v1, ..., vk]`` with an edge from
    every element to the next and from ``vk`` back to ``v0``. Components are
    reported in order of their first node in ``nodes``.
    """
    order = {n: i for i, n in enumerate(nodes)}
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        if a in succ and b in succ and b not in succ[a]:
            succ[a].append(b)
    for n in succ:
        succ[n].sort(key=order.__getitem__)

    # Kahn's algorithm first: the acyclic case is the common one.
    indeg = {n: 0 for n in nodes}
    for n in nodes:
        for m in succ[n]:
            indeg[m] += 1
    queue = [n for n in nodes if indeg[n] == 0]
    removed = 0
    while queue:
        n = queue.pop()
        removed += 1
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    if removed == len(order):
        return []

    # Tarjan's SCC, iterative.
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    stack: list[str] = []
    on_stack: set[str] = set()
    components: list[list[str]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            recurse = False
            for j in range(i, len(succ[v])):
                w = succ[v][j]
                if w not in index:
                    work.append((v, j + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    cycles = []
    for comp in components:
        members = set(comp)
        start = min(comp, key=order.__getitem__)
        if len(comp) == 1 and start not in succ[start]:
            continue
        cycles.append(_cycle_within(start, members, succ))
    cycles.sort(key=lambda c: order[c[0]])
    return cycles


def _cycle_within(start: str, members: set[str], succ: dict[str, list[str]]) -> list[str]:
    # Shortest path back to start, breadth-first inside the component.
    if start in succ[start]:
        return [start]
    prev: dict[str, str] = {}
    frontier = [start]
    seen = {start}
    while frontier:
        nxt = []
        for v in frontier:
            for w in succ[v]:
                if w == start:
                    path = [v]
                    while path[-1] != start:
                        path.append(prev[path[-1]])
                    return path[::-1]
                if w in members and w not in seen:
                    seen.add(w)
                    prev[w] = v
                    nxt.append(w)
        frontier = nxt
    raise AssertionError("strongly connected component without a cycle")


def validate(card: UseCaseCard) -> Diagnostics:
    findings: list[Finding] = []

    def add(rule: str, severity: str, subject: str, message: str) -> None:
        findings.append(Finding(rule, severity, subject, message))

    actor_ids = [a.id for a in card.actors]
    uc_ids = [u.id for u in card.use_cases]
    actor_set, uc_set = set(actor_ids), set(uc_ids)

    # V1
    if card.primary_actor not in actor_set:
        add("V1", "error", "table.primary_actor",
            f"primary actor {card.primary_actor!r} is not a declared actor")
    mains = [u.id for u in card.use_cases if u.is_main]
    if len(mains) != 1:
        detail = "none" if not mains else ", ".join(mains)
        add("V1", "error", "use_cases", f"exactly one use case must be marked main (found: {detail})")

    # V2
    if not any(u.is_ai for u in card.use_cases):
        add("V2", "error", "use_cases", "no AI use case; a card must describe at least one AI use case")

    # V3
    for i, rel in enumerate(card.relations):
        subject = f"relations[{i}]"
        unresolved = [x for x in (rel.source, rel.target) if x not in actor_set and x not in uc_set]
        if unresolved:
            add("V3", "error", subject,
                f"{rel.kind.value} endpoint(s) not declared: {', '.join(unresolved)}")
            continue
        if rel.kind is RelationKind.ASSOCIATION:
            ok = ({rel.source in actor_set, rel.target in actor_set} == {True, False})
            if not ok:
                add("V3", "error", subject,
                    f"association {rel.source} -- {rel.target} must join one actor and one use case")
        elif rel.kind in (RelationKind.INCLUDE, RelationKind.EXTEND):
            if rel.source not in uc_set or rel.target not in uc_set:
                add("V3", "error", subject,
                    f"{rel.kind.value} {rel.source} -> {rel.target} must join two use cases")
            elif rel.source == rel.target:
                add("V3", "error", subject, f"{rel.kind.value} of {rel.source} with itself")
        else:
            if rel.source not in actor_set or rel.target not in actor_set:
                add("V3", "error", subject,
                    f"generalization {rel.source} -> {rel.target} must join two actors")
            elif rel.source == rel.target:
                add("V3", "error", subject, f"actor {rel.source} generalizes itself")

    # V4
    purpose = card.intended_purpose
    for field_name, text in (("purpose.context_of_use", purpose.context_of_use),
                             ("purpose.scope", purpose.scope)):
        n = word_count(text)
        if n > WORD_LIMIT:
            add("V4", "warning", field_name, f"{n} words; at most {WORD_LIMIT} are recommended")

    # V5
    for i, n in enumerate(purpose.sdgs):
        try:
            vocab.lookup_sdg(n)
        except vocab.VocabularyError as exc:
            add("V5", "error", f"purpose.sdgs[{i}]", str(exc))
    try:
        vocab.lookup_product_type(card.product_type)
    except vocab.VocabularyError as exc:
        add("V5", "error", "table.product_type", str(exc))
    if not card.application_entries:
        add("V5", "error", "table.application_entries", "at least one application area is required")
    for i, entry in enumerate(card.application_entries):
        try:
            vocab.lookup_entry(entry)
        except vocab.VocabularyError as exc:
            add("V5", "error", f"table.application_entries[{i}]", str(exc))

    # V6
    if len(mains) == 1:
        main = mains[0]
        linked = any(
            main in (r.source, r.target)
            for r in card.relations
            if r.kind is not RelationKind.ACTOR_GENERALIZATION
        )
        if not linked:
            add("V6", "error", main, "main use case takes part in no association, include or extend")

    # V7
    if not card.main_course:
        add("V7", "error", "table.main_course", "main course has no steps")
    indices = {s.index for s in card.main_course}
    for i, ext in enumerate(card.extensions):
        if ext.step_ref not in indices:
            add("V7", "error", f"table.extensions[{i}]",
                f"extension refers to step {ext.step_ref}, which does not exist")

    # V8
    referenced = {x for r in card.relations for x in (r.source, r.target)}
    for a in card.actors:
        if a.id not in referenced:
            add("V8", "warning", a.id, f"actor {a.id!r} is not connected to anything")

    # V9
    dep_edges = [
        (r.source, r.target)
        for r in card.relations
        if r.kind in (RelationKind.INCLUDE, RelationKind.EXTEND)
        and r.source in uc_set and r.target in uc_set and r.source != r.target
    ]
    for cycle in dependency_cycles(uc_ids, dep_edges):
        path = " -> ".join(cycle + [cycle[0]])
        add("V9", "error", cycle[0], f"include/extend cycle: {path}")

    # V10
    if not card.open_issues:
        add("V10", "warning", "table.open_issues",
            "no open issues listed; document foreseeable misuses")

    rank = {r: i for i, r in enumerate(RULES)}
    findings.sort(key=lambda f: rank[f.rule])  # stable: keeps subject order
    return Diagnostics(tuple(findings))


def require_valid(card: UseCaseCard) -> Diagnostics:
    diags = validate(card)
    if not diags.is_valid:
        rules = sorted({f.rule for f in diags.errors}, key=lambda r: int(r[1:]))
        raise NotValidated(card.id, rules)
    return diags
