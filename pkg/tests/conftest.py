import pytest

from encoders.text_formats import load_system, parse_tuple
from modules.word_engine import Alphabet


@pytest.fixture
def xy():
    return Alphabet.from_text("xy")


@pytest.fixture
def commutator():
    return load_system("commutator")


@pytest.fixture
def defect_one_instance():
    """((1 2 3), (1 2)): its commutator moves every point."""
    return parse_tuple("(1 2 3)\n(1 2)", 3)
