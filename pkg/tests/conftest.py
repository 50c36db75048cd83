import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

from ggnet.graph import SignedGraph

hypothesis.settings.register_profile("default", deadline=None, max_examples=100)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile("default")

_criteria: dict = {}
_RANK = {"PASS": 0, "SKIP": 1, "FAIL": 2}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number = marker.kwargs.get("criterion")
    if call.excinfo is None:
        status = "PASS"
    elif call.excinfo.errisinstance(pytest.skip.Exception):
        status = "SKIP"
    else:
        status = "FAIL"
    # a criterion spanning several tests reports its worst outcome
    prev = _criteria.get(number, ("PASS", None))[0]
    worst = max(prev, status, key=_RANK.__getitem__)
    _criteria[number] = (worst, marker.kwargs.get("title", item.name))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")


def random_graph(rng: np.random.Generator, n: int, p: float = 0.3,
                 weights=(-1.0, 1.0), integer: bool = True) -> SignedGraph:
    """Undirected graph with each pair present with probability p."""
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    if integer:
        w = rng.choice(np.asarray(weights), size=keep.sum())
    else:
        w = rng.uniform(-2, 2, size=keep.sum())
    return SignedGraph(n, False, iu[keep], ju[keep], w)


@st.composite
def signed_graphs(draw, max_nodes: int = 12, integer: bool = True):
    n = draw(st.integers(1, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    present = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    if integer:
        wgen = st.sampled_from([-2.0, -1.0, 1.0, 2.0])
    else:
        wgen = st.floats(-3, 3, allow_nan=False).filter(lambda x: x != 0)
    edges = [(i, j, draw(wgen)) for (i, j), keep in zip(pairs, present) if keep]
    return SignedGraph.from_edges(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
