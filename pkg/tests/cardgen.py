"""Random card generation for property tests.

Cards come from a plain ``random.Random`` so the acceptance suite can run
a thousand of them quickly with a fixed seed; the hypothesis strategies in
conftest wrap the same functions.
"""

from __future__ import annotations

import datetime as dt
import random

from usecasecards import vocab
from usecasecards.model import (
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
from usecasecards.parser import serialize_card

WORDS = (
    "camera scene user data model risk person text image voice report "
    "système données café naïve über 42 3.5 (beta) O'Brien e-mail #tag "
    "x:y [note] a/b 50% «quote» ünïcödé ok."
).split()
ID_CHARS = "abcdefghijklmnopqrstuvwxyz0123456789"


def words(rng: random.Random, lo: int = 1, hi: int = 8) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(lo, hi)))


def text(rng: random.Random, max_lines: int = 3) -> str:
    """Possibly multi-line text that survives the continuation-line encoding."""
    return "\n".join(words(rng) for _ in range(rng.randint(1, max_lines)))


def ident(rng: random.Random, prefix: str) -> str:
    tail = "".join(rng.choice(ID_CHARS) for _ in range(rng.randint(1, 6)))
    sep = rng.choice(["-", "_", ".", ""])
    return f"{prefix}{sep}{tail}"


def _unique_ids(rng: random.Random, prefix: str, n: int, taken: set[str]) -> list[str]:
    out = []
    while len(out) < n:
        candidate = ident(rng, prefix)
        if candidate not in taken:
            taken.add(candidate)
            out.append(candidate)
    return out


def random_entry(rng: random.Random, *, annex_iii: bool | None = None) -> ApplicationEntry:
    options = []
    for area in vocab.APPLICATION_AREAS:
        if area.subareas:
            options += [(area.slug, s.slug, True) for s in area.subareas]
        else:
            options.append((area.slug, None, False))
    if annex_iii is not None:
        options = [o for o in options if o[2] == annex_iii]
    area, sub, _ = rng.choice(options)
    return ApplicationEntry(area, sub)


def random_card(rng: random.Random, *, n_actors: int | None = None, n_use_cases: int | None = None) -> UseCaseCard:
    """A card that parses and validates without errors (warnings allowed)."""
    taken: set[str] = set()
    n_actors = n_actors if n_actors is not None else rng.randint(1, 4)
    n_use_cases = n_use_cases if n_use_cases is not None else rng.randint(1, 8)
    actor_ids = _unique_ids(rng, "a", n_actors, taken)
    uc_ids = _unique_ids(rng, "u", n_use_cases, taken)

    actors = tuple(Actor(i, words(rng, 1, 4), rng.choice(list(ActorKind))) for i in actor_ids)
    main_idx = rng.randrange(n_use_cases)
    ai_idx = main_idx if rng.random() < 0.7 else rng.randrange(n_use_cases)
    use_cases = tuple(
        UseCaseNode(u, words(rng, 1, 5), is_ai=(k == ai_idx or rng.random() < 0.5), is_main=(k == main_idx))
        for k, u in enumerate(uc_ids)
    )

    relations = [Relation(RelationKind.ASSOCIATION, actor_ids[0], uc_ids[main_idx])]
    for _ in range(rng.randint(0, 6)):
        kind = rng.choice(list(RelationKind))
        if kind is RelationKind.ASSOCIATION:
            relations.append(Relation(kind, rng.choice(actor_ids), rng.choice(uc_ids)))
        elif kind is RelationKind.ACTOR_GENERALIZATION:
            if n_actors >= 2:
                a, b = rng.sample(actor_ids, 2)
                relations.append(Relation(kind, a, b))
        elif n_use_cases >= 2:
            # Edges only point forward in declaration order, so no cycles.
            i, j = sorted(rng.sample(range(n_use_cases), 2))
            relations.append(Relation(kind, uc_ids[i], uc_ids[j]))
    rng.shuffle(relations)

    steps = tuple(Step(i, words(rng, 2, 10)) for i in range(1, rng.randint(1, 6) + 1))
    extensions = tuple(
        Extension(rng.randint(1, len(steps)), words(rng, 1, 5), words(rng, 1, 5))
        for _ in range(rng.randint(0, 3))
    )
    entries: list[ApplicationEntry] = []
    for _ in range(rng.randint(1, 3)):
        e = random_entry(rng)
        if e not in entries:
            entries.append(e)

    return UseCaseCard(
        id=ident(rng, "card"),
        title=words(rng, 1, 6),
        version=rng.choice(["1.0", "0.1", "2", "1.2.3-rc1"]),
        date=dt.date(2000, 1, 1) + dt.timedelta(days=rng.randint(0, 12000)),
        provider=words(rng, 1, 4),
        intended_purpose=IntendedPurpose(
            text(rng), text(rng),
            tuple(rng.sample(range(1, 18), rng.randint(0, 4))),
        ),
        product_type=rng.choice(vocab.PRODUCT_TYPES).slug,
        safety_component=rng.random() < 0.3,
        application_entries=tuple(entries),
        actors=actors,
        use_cases=use_cases,
        relations=tuple(relations),
        primary_actor=actor_ids[0],
        main_course=steps,
        transparency_flags=frozenset(f for f in TransparencyFlag if rng.random() < 0.25),
        stakeholders=tuple(Stakeholder(words(rng, 1, 3), words(rng)) for _ in range(rng.randint(0, 3))),
        preconditions=tuple(text(rng, 2) for _ in range(rng.randint(0, 2))),
        extensions=extensions,
        open_issues=tuple(text(rng, 2) for _ in range(rng.randint(0, 3))),
    )


# -- corruption -------------------------------------------------------------
#
# Each mutation takes canonical card text and returns (corrupt_text, line, token):
# the 1-based line the parser must point at and a token that line contains.

def _lines(text_: str) -> list[str]:
    return text_.split("\n")


def _index_of(lines: list[str], prefix: str) -> int:
    return next(i for i, ln in enumerate(lines) if ln.startswith(prefix))


def _insert_after_header(rng, lines, header, new_line):
    i = _index_of(lines, header)
    lines.insert(i + 1, new_line)
    return i + 2


def _unknown_key(rng, lines):
    token = f"bogus{rng.randint(0, 999)}"
    header = rng.choice(["[card]", "[purpose]", "[table]", "[relation]"])
    return _insert_after_header(rng, lines, header, f"{token}: value"), token


def _duplicate_key(rng, lines):
    # Appended at the end of the section, so the copy is the second occurrence.
    header, key = rng.choice([("[card]", "title"), ("[card]", "provider"), ("[table]", "product"),
                              ("[table]", "primary-actor"), ("[purpose]", "scope")])
    i = _index_of(lines, header)
    end = next(k for k in range(i, len(lines)) if not lines[k].strip())
    lines.insert(end, f"{key}: again")
    return end + 1, key


def _unknown_header(rng, lines):
    token = f"widget{rng.randint(0, 99)}"
    lines.insert(0, f"[{token}]")
    return 1, token


def _unterminated_header(rng, lines):
    i = rng.choice([k for k, ln in enumerate(lines) if ln.startswith("[")])
    lines[i] = lines[i][:-1]
    return i + 1, lines[i]


def _bad_boolean(rng, lines):
    i = _index_of(lines, "safety-component:")
    token = rng.choice(["maybe", "true", "YES", "1"])
    lines[i] = f"safety-component: {token}"
    return i + 1, token


def _bad_date(rng, lines):
    i = _index_of(lines, "date:")
    token = rng.choice(["2024-13-01", "01/02/2024", "yesterday", "2024-02-30"])
    lines[i] = f"date: {token}"
    return i + 1, token


def _bad_sdg(rng, lines):
    token = rng.choice(["three", "x1", "-"])
    return _insert_after_header(rng, lines, "[purpose]", f"sdg: {token}"), token


def _bad_kind(rng, lines):
    i = _index_of(lines, "kind: ")
    token = rng.choice(["robot", "aggregation", "uses"])
    lines[i] = f"kind: {token}"
    return i + 1, token


def _no_colon(rng, lines):
    token = f"stray{rng.randint(0, 999)}"
    header = rng.choice(["[card]", "[table]", "[purpose]"])
    return _insert_after_header(rng, lines, header, f"{token} without separator"), token


def _bad_extension(rng, lines):
    token = rng.choice(["x", "first"])
    return _insert_after_header(rng, lines, "[table]", f"extension: {token} | cond | handle"), "extension"


def _empty_value(rng, lines):
    return _insert_after_header(rng, lines, "[table]", "issue:"), "issue"


MUTATIONS = (
    _unknown_key, _duplicate_key, _unknown_header, _unterminated_header, _bad_boolean,
    _bad_date, _bad_sdg, _bad_kind, _no_colon, _bad_extension, _empty_value,
)


def corrupt(rng: random.Random, card_text: str):
    """Apply one mutation; return (text, name, expected_line, token)."""
    mutation = rng.choice(MUTATIONS)
    lines = _lines(card_text)
    line, token = mutation(rng, lines)
    return "\n".join(lines), mutation.__name__.lstrip("_"), line, token


def random_card_text(rng: random.Random) -> str:
    return serialize_card(random_card(rng))
