import pytest

from mcgkit.grammar_io import parse_grammar
from mcgkit.phenomena import (
    build_cfg_center_embedding,
    build_cfg_fig2,
    build_fsg_center_embedding,
    build_fsg_fig1,
    build_scrambling_fragment,
)

ANBN_TEXT = """
grammar anbn
start S
tree alpha initial (S eps)
tree beta auxiliary (S 'a S* 'b)
"""

ANBN_OA_TEXT = """
grammar anbn_oa
start S
tree alpha initial (S@oa eps)
tree beta auxiliary (S 'a S* 'b)
"""


@pytest.fixture(scope="session")
def fig1():
    return build_fsg_fig1()


@pytest.fixture(scope="session")
def fig2():
    return build_cfg_fig2()


@pytest.fixture(scope="session")
def cfg_center():
    return build_cfg_center_embedding()


@pytest.fixture(scope="session")
def fsg_m1():
    return build_fsg_center_embedding(1)


@pytest.fixture(scope="session")
def fsg_m2():
    return build_fsg_center_embedding(2)


@pytest.fixture(scope="session")
def scrambling4():
    return build_scrambling_fragment(4)


@pytest.fixture(scope="session")
def anbn():
    return parse_grammar(ANBN_TEXT)


@pytest.fixture(scope="session")
def anbn_oa():
    return parse_grammar(ANBN_OA_TEXT)
