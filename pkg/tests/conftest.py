import itertools

import hypothesis.strategies as st
from hypothesis import settings

from hyperenum.hypercore import Hypergraph

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def hypergraphs(draw, max_n=8, r=3):
    n = draw(st.integers(min_value=r, max_value=max_n))
    pool = list(itertools.combinations(range(n), r))
    edges = draw(st.lists(st.sampled_from(pool), unique=True, max_size=min(len(pool), 12)))
    return Hypergraph(n, r, tuple(edges))


@st.composite
def shuffled_edges(draw, h: Hypergraph):
    edges = [tuple(draw(st.permutations(e))) for e in h.edges]
    return draw(st.permutations(edges))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
