import itertools
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from gainspec.gain_core import GainGraph, Graph, UnitComplex


@st.composite
def simple_graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [e for e, k in zip(pairs, keep) if k])


@st.composite
def gain_graphs(draw, min_n=1, max_n=7):
    g = draw(simple_graphs(min_n, max_n))
    angles = draw(st.lists(st.floats(0, 2 * math.pi), min_size=g.m, max_size=g.m))
    return GainGraph.from_graph(g, [UnitComplex.from_angle(t) for t in angles])


def random_gain_graph(rng, n, p=0.5):
    edges = [(a, b, UnitComplex.from_angle(rng.uniform(0, 2 * math.pi)))
             for a, b in itertools.combinations(range(n), 2) if rng.random() < p]
    return GainGraph(n, edges)


def multiset_distance(a, b):
    return float(np.abs(np.sort(np.asarray(a)) - np.sort(np.asarray(b))).max(initial=0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def disjoint(*graphs):
    edges, off = [], 0
    for g in graphs:
        edges += [(p + off, q + off, x) for p, q, x in g.edges]
        off += g.n
    return GainGraph(off, edges)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""
    def record(number, ok, text):
        line = f"ACCEPTANCE {number:>2}: {'PASS' if ok else 'FAIL'}  {text}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
