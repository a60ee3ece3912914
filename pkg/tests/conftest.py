import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from sitepercolation.graph import Graph


@st.composite
def small_graphs(draw, max_n=12):
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return Graph.from_edges(n, np.array(chosen, dtype=np.int64).reshape(-1, 2))


@st.composite
def graph_and_sets(draw, max_n=12, k=2):
    g = draw(small_graphs(max_n=max_n))
    sets = [draw(st.sets(st.integers(0, g.n - 1), max_size=g.n)) for _ in range(k)]
    return (g, *sets)


def bfs_components(g, active):
    """Plain adjacency-list BFS, independent of the library's component code."""
    adj = {v: set() for v in range(g.n)}
    for u, v in g.edges().tolist():
        adj[u].add(v)
        adj[v].add(u)
    active = set(active)
    seen, parts = set(), []
    for s in sorted(active):
        if s in seen:
            continue
        comp, frontier = {s}, [s]
        seen.add(s)
        while frontier:
            x = frontier.pop()
            for y in adj[x]:
                if y in active and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    frontier.append(y)
        parts.append(sorted(comp))
    return parts


@pytest.fixture(scope="session")
def rr_1000_10():
    from sitepercolation.generators import random_regular
    return random_regular(1000, 10, seed=3)


ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
