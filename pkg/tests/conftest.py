import pathlib

import pytest

from intentsim.parser import parse_program

ROOT = pathlib.Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"

CAT_SRC = (SCENARIOS / "cat.iag").read_text(encoding="utf-8")
PREY_SRC = (SCENARIOS / "prey_predator.iag").read_text(encoding="utf-8")


def cat_with_scenario(extra: str) -> str:
    """The cat class with a custom scenario block."""
    head, _, _ = CAT_SRC.partition("scenario {")
    return head + extra


@pytest.fixture
def cat_program():
    return parse_program(CAT_SRC)


@pytest.fixture
def prey_program():
    return parse_program(PREY_SRC)
