import numpy as np
import pytest
from hypothesis import settings, strategies as st

from gwalk.graph import complete_graph, cycle_graph, path_graph, random_connected_graph
from gwalk.oracle import build_internal_evolution

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def k4():
    return complete_graph(4, 2)


@pytest.fixture
def p2():
    return path_graph(2, 2)


@pytest.fixture
def c4():
    return cycle_graph(4, 3)


@st.composite
def graphs(draw, n_min=3, n_max=8, bipartite=None):
    """Random connected graph with a random ordered boundary."""
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(n_min, n_max))
    rng = np.random.default_rng(seed)
    return random_connected_graph(rng, n, p_extra=draw(st.floats(0.0, 0.6)), bipartite=bipartite)


@st.composite
def graph_and_inflow(draw, **kw):
    g = draw(graphs(**kw))
    parts = draw(
        st.lists(
            st.tuples(st.floats(-2, 2), st.floats(-2, 2)),
            min_size=g.n_boundary,
            max_size=g.n_boundary,
        )
    )
    alpha = np.array([complex(a, b) for a, b in parts])
    return g, alpha


def oracle_is_fast(g, gap=1e-3):
    """True when the walk's decay rate lets iteration converge in ~1e4 steps."""
    return build_internal_evolution(g, np.zeros(g.n_boundary)).lambda1() < 1 - gap


thetas = st.floats(-np.pi, np.pi, allow_nan=False)


def unit(theta):
    return complex(np.exp(1j * theta))


def grover(r):
    return (2.0 / r) * np.ones((r, r)) - np.eye(r)


# acceptance report ---------------------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record one ``PASS``/``FAIL`` line for an acceptance criterion."""

    def record(number, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
