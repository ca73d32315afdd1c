from pathlib import Path

import pytest

from sit_session import Session

SESSIONS_DIR = Path(__file__).resolve().parent.parent / "sessions"


def run(session, *lines):
    """Run lines through the REPL and return their outputs."""
    return [session.repl_step(line, number)[1] for number, line in enumerate(lines, start=1)]


@pytest.fixture
def session():
    return Session()


@pytest.fixture
def worked_session():
    """The anchoring walkthrough knowledge base, before any directive."""
    session = Session()
    outputs = run(
        session,
        "bob: ~IND",
        "sit1: ~SIT",
        "sit2: ~SIT",
        "anchor1: ~SIT",
        "t2: ~TIM",
        "<sees | ~IND, ~SIT> [1]",
        "<blind | ~IND> [1]",
        "w |= <<sees, bob, sit1, 1>>",
        "E = IND1 ^ <<sees, IND1, sit1, 1>>",
        "anchor1 |= <<anchor, E, bob, 1>>",
        "sit1 |= {<<sees, E, sit2, 1>>, <<part-of, sit2, sit1, 1>>}",
        "sit2 |= <<time-of, sit2, t2, 1>>",
    )
    assert all(output.startswith("✓") for output in outputs), outputs
    return session


@pytest.fixture
def sessions_dir():
    return SESSIONS_DIR
