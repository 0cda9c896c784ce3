import pytest

import catafind.expr as ex
from catafind.determinants import DeterminantSet
from catafind.scenarios import make_reaction_diffusion


@pytest.fixture(scope="session")
def rd_field():
    return make_reaction_diffusion()


@pytest.fixture(scope="session")
def rd_dets(rd_field):
    return DeterminantSet(rd_field)


SEC6_TEMPLATE = """\
vars: x y
params: a1 a2
eq: x + y^2
eq: x^2 + a1*x + a2 + y^2 + {k}*x
"""


@pytest.fixture(scope="session")
def corank_zero_field():
    """The 2-D family whose subrank collapses at k=0."""
    return ex.parse_vector_field(SEC6_TEMPLATE.format(k=0), name="corank0")


@pytest.fixture(scope="session")
def corank_ok_field():
    """Same family at k=0.5, where the corank-1 assumption holds."""
    return ex.parse_vector_field(SEC6_TEMPLATE.format(k=0.5), name="corank_ok")
