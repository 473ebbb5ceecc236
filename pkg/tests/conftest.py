from __future__ import annotations

import os
import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cardgen import random_card
from usecasecards import parse_card

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"
FIXTURE_NAMES = ("scene-narrator", "smart-camera", "music-recommender", "driver-monitoring", "student-proctoring")

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Random-driven strategy: shrinking happens on the seed, which is enough here.
valid_cards = st.randoms(use_true_random=False).map(random_card)


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.ucc"


def load_fixture(name: str):
    return parse_card(fixture_path(name).read_text(encoding="utf-8"))


def check_golden(name: str, actual: str) -> None:
    """Compare against tests/golden/<name>; UCC_REGEN_GOLDENS=1 rewrites it."""
    path = GOLDEN / name
    if os.environ.get("UCC_REGEN_GOLDENS") == "1":
        path.parent.mkdir(exist_ok=True)
        path.write_bytes(actual.encode("utf-8"))
    expected = path.read_bytes().decode("utf-8").replace("\r\n", "\n")
    assert actual == expected, f"{name} differs from its golden file"


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in FIXTURE_NAMES}


@pytest.fixture
def rng():
    return random.Random(20240601)


MINIMAL_CARD = """\
[card]
id: tiny
title: Tiny
version: 1
date: 2024-01-01
provider: Someone

[purpose]
context: A context.
scope: A scope.

[table]
product: other-software
safety-component: no
area: other
primary-actor: user
step: Do the thing

[actor user]
name: User
kind: individual

[usecase main]
name: Main
ai: yes
main: yes

[relation]
kind: association
source: user
target: main
"""


@pytest.fixture
def minimal_text():
    return MINIMAL_CARD


# -- acceptance reporting ---------------------------------------------------

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} [{n}] {title}: {detail}")
