import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from dirichlet_spectra import assemble, build_graph, lattice_path, random_graph

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def two_vertex():
    return assemble(build_graph(2, [(0, 1, 1.0)]))


@pytest.fixture
def path3():
    return assemble(lattice_path(3))


@st.composite
def graphs(draw, min_n=1, max_n=12, unit_measure=False):
    """Random connected weighted graphs drawn through a seeded generator."""
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.floats(0.0, 0.8))
    rng = np.random.default_rng(seed)
    return random_graph(rng, n, density=density, unit_measure=unit_measure)


@st.composite
def graph_and_subset(draw, min_n=2, max_n=12, proper=True):
    g = draw(graphs(min_n=min_n, max_n=max_n))
    size = draw(st.integers(1, g.n - 1 if proper else g.n))
    B = draw(st.lists(st.integers(0, g.n - 1), min_size=size, max_size=size, unique=True))
    return g, sorted(B)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
