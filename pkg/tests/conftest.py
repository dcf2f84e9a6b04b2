import pytest
from hypothesis import strategies as st

from oddaut.gf import make_field
from oddaut.mpoly import Poly

FIELDS = {
    "F2": (2, 1),
    "F3": (3, 1),
    "F4": (2, 2),
    "F5": (5, 1),
    "F8": (2, 3),
    "F9": (3, 2),
    "F16": (2, 4),
    "F32": (2, 5),
}


@pytest.fixture(scope="session")
def fields():
    return {name: make_field(p, m) for name, (p, m) in FIELDS.items()}


@pytest.fixture(scope="session")
def F2(fields):
    return fields["F2"]


@pytest.fixture(scope="session")
def F3(fields):
    return fields["F3"]


@pytest.fixture(scope="session")
def F4(fields):
    return fields["F4"]


@pytest.fixture(scope="session")
def F8(fields):
    return fields["F8"]


@st.composite
def polys(draw, field, n, max_degree=4, max_terms=5):
    """Random sparse polynomial in n variables of total degree <= max_degree."""
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = draw(st.lists(st.integers(0, max_degree), min_size=n, max_size=n)
                    .filter(lambda e: sum(e) <= max_degree))
        terms[tuple(exps)] = draw(st.integers(0, field.q - 1))
    return Poly(field, n, terms)


# acceptance summary --------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
