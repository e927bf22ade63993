import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from conftest import disjoint, gain_graphs, simple_graphs
from gainspec import combinatorics as C
from gainspec.gain_core import (
    GainGraph,
    Graph,
    GraphError,
    SwitchingFunction,
    UnitComplex,
    adjacency,
    cycle_gain,
    switch,
)
from gainspec.generators_io import (
    GainAssignmentSpec,
    GainMode,
    connected_graphs,
    make_complete,
    make_complete_bipartite,
    make_cycle,
    make_figure2_graph,
    make_path,
    make_star,
    random_gains,
)
from gainspec.spectra import energy, numerical_rank, vertex_energy
from oracles import (
    brute_acyclic_deletion_matching,
    brute_bipartite_obstruction,
    brute_matching_number,
    brute_vertex_cover,
    johnson_odd_cycles,
    to_nx,
)

I = UnitComplex(0.0, 1.0)


def test_fundamental_cycles_examples():
    assert C.fundamental_cycles(make_path(5)).cycles == ()
    c5 = make_cycle(5, 1.3)
    basis = C.fundamental_cycles(c5)
    assert len(basis.cycles) == 1 and len(basis.cycles[0]) == 5
    assert basis.cycles[0][0] == 0
    assert basis.gains[0].distance(UnitComplex.from_angle(1.3)) <= 1e-12
    assert len(C.fundamental_cycles(make_complete(4)).cycles) == 3


@settings(max_examples=80, deadline=None)
@given(gain_graphs(max_n=8))
def test_fundamental_cycle_basis_invariants(g):
    basis = C.fundamental_cycles(g)
    assert len(basis.cycles) == g.m - g.n + len(C.components(g))
    for (u, v), cyc, gain in zip(basis.non_tree_edges, basis.cycles, basis.gains):
        assert cyc[0] == u and cyc[-1] == v and u < v
        closing = list(zip(cyc, cyc[1:] + cyc[:1]))
        non_tree = [e for e in closing if (min(e), max(e)) not in basis.tree_edges]
        assert non_tree == [(v, u)]
        assert len(set(cyc)) == len(cyc)
        assert gain.distance(cycle_gain(g, cyc)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(gain_graphs(max_n=7))
def test_fundamental_gains_survive_switching(g):
    h = switch(g, SwitchingFunction.random(g.n, np.random.default_rng(g.m)))
    for a, b in zip(C.fundamental_cycles(g).gains, C.fundamental_cycles(h).gains):
        assert a.distance(b) <= 1e-12
    assert C.switching_equivalent(g, h)


def test_balance_examples():
    assert C.is_balanced(make_complete(5))
    assert not C.is_balanced(GainGraph(3, [(0, 1, I), (1, 2, 1), (0, 2, 1)]))
    assert C.is_antibalanced(make_complete_bipartite(2, 3))
    assert not C.is_antibalanced(make_complete(3))
    assert C.is_antibalanced(GainGraph(4))


@settings(max_examples=60, deadline=None)
@given(gain_graphs(max_n=7))
def test_switched_balanced_is_balanced(g):
    flat = GainGraph.from_graph(g.underlying())
    s = SwitchingFunction.random(g.n, np.random.default_rng(g.n))
    assert C.is_balanced(switch(flat, s))


def test_switching_equivalence_examples():
    assert not C.switching_equivalent(make_cycle(4, 0), make_cycle(4, math.pi / 2))
    tree = make_path(5)
    rng = np.random.default_rng(0)
    other = GainGraph.from_graph(tree.underlying(), [UnitComplex.from_angle(t) for t in rng.uniform(0, 6, 4)])
    assert C.switching_equivalent(tree, other)
    with pytest.raises(GraphError):
        C.switching_equivalent(make_path(4), make_star(3))


@settings(max_examples=60, deadline=None)
@given(gain_graphs(max_n=7))
def test_balanced_means_same_energies_as_underlying(g):
    if not C.is_balanced(g):
        return
    flat = GainGraph.from_graph(g.underlying())
    assert abs(energy(g) - energy(flat)) <= 1e-9
    assert np.abs(vertex_energy(g) - vertex_energy(flat)).max(initial=0) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(gain_graphs(max_n=7))
def test_bipartite_balanced_is_antibalanced(g):
    g = GainGraph.from_graph(g.underlying())
    if C.is_bipartite(g):
        assert C.is_antibalanced(g)


@pytest.mark.parametrize("p,q", [(2, 2), (2, 3), (3, 3)])
def test_four_cycles_through_one_vertex_force_balance(p, q):
    base = make_complete_bipartite(p, q)
    for signs in itertools.product((1, -1), repeat=base.m):
        g = GainGraph.from_graph(base.underlying(), list(signs))
        through0 = [(0, p + a, b, p + c) for a in range(q) for c in range(q) if a != c
                    for b in range(1, p)]
        if all(cycle_gain(g, cyc).distance(1) <= 1e-9 for cyc in through0):
            assert C.is_balanced(g)


@pytest.mark.parametrize("g,mu", [
    (make_complete_bipartite(3, 3), 3),
    (make_cycle(5, 0), 2),
    (make_figure2_graph(), 3),
    (make_complete(7), 3),
    (GainGraph(3), 0),
])
def test_matching_examples(g, mu):
    assert C.matching_number(g) == mu
    matching = C.maximum_matching(g)
    assert len({v for e in matching for v in e}) == 2 * len(matching)
    assert all(g.has_edge(*e) for e in matching)


@settings(max_examples=150, deadline=None)
@given(simple_graphs(max_n=9))
def test_blossom_matches_brute_force(g):
    assert C.matching_number(g) == brute_matching_number(g)


def test_blossom_on_larger_random_graphs(rng):
    for _ in range(30):
        n = int(rng.integers(10, 30))
        h = nx.gnp_random_graph(n, rng.uniform(0.05, 0.4), seed=int(rng.integers(1 << 30)))
        g = Graph(n, h.edges())
        assert C.matching_number(g) == len(nx.max_weight_matching(h, maxcardinality=True))


@pytest.mark.parametrize("g,tau", [
    (make_star(6), 1),
    (make_cycle(5, 0), 3),
    (make_complete(6), 5),
    (GainGraph(4), 0),
])
def test_vertex_cover_examples(g, tau):
    assert C.vertex_cover_number(g) == tau


@settings(max_examples=150, deadline=None)
@given(simple_graphs(max_n=9))
def test_vertex_cover_matches_brute_force(g):
    tau = C.vertex_cover_number(g)
    assert tau == brute_vertex_cover(g)
    assert tau >= C.matching_number(g)


def test_vertex_cover_larger_graphs_against_clique_complement(rng):
    for _ in range(15):
        n = int(rng.integers(12, 26))
        h = nx.gnp_random_graph(n, rng.uniform(0.1, 0.5), seed=int(rng.integers(1 << 30)))
        alpha = max(len(c) for c in nx.find_cliques(nx.complement(h)))
        assert C.vertex_cover_number(Graph(n, h.edges())) == n - alpha


def test_vertex_cover_cap():
    with pytest.raises(C.CapExceeded):
        C.vertex_cover_number(make_path(41))
    assert C.vertex_cover_number(make_path(40)) == 20


def test_koenig_on_connected_bipartite_graphs():
    for n in range(1, 8):
        for g in connected_graphs(n):
            if C.is_bipartite(g):
                assert C.matching_number(g) == C.vertex_cover_number(g)


def test_odd_cycle_examples():
    assert C.odd_cycle_count(make_complete_bipartite(3, 4)) == 0
    assert C.odd_cycle_count(make_complete(3)) == 1
    assert C.odd_cycle_count(make_complete(4)) == 4
    assert C.odd_cycle_count(make_complete(4)) == johnson_odd_cycles(make_complete(4))


@settings(max_examples=120, deadline=None)
@given(simple_graphs(max_n=8))
def test_cycle_enumeration_matches_johnson(g):
    ours = list(C.simple_cycles(g))
    theirs = list(nx.simple_cycles(to_nx(g)))
    assert len(ours) == len(theirs)
    assert len(set(ours)) == len(ours)
    for c in ours:
        assert c[0] == min(c) and c[1] < c[-1]
    assert C.odd_cycle_count(g) == johnson_odd_cycles(g)
    assert (C.odd_cycle_count(g) == 0) == C.is_bipartite(g)


def test_cycle_caps():
    with pytest.raises(C.CapExceeded):
        C.odd_cycle_count(make_path(17))
    with pytest.raises(C.CapExceeded):
        C.odd_cycle_count(make_complete(9), cap_count=100)


def test_bipartite_obstruction_examples():
    assert C.bipartite_obstruction(make_cycle(6, 0)) == 0
    assert C.bipartite_obstruction(make_complete(3)) == 1
    assert C.bipartite_obstruction(disjoint(make_complete(3), make_complete(3))) == 2
    with pytest.raises(C.CapExceeded):
        C.bipartite_obstruction(make_path(17))


@settings(max_examples=80, deadline=None)
@given(simple_graphs(max_n=7))
def test_bipartite_obstruction_matches_brute_force(g):
    b = C.bipartite_obstruction(g)
    assert b == brute_bipartite_obstruction(g)
    assert (b == 0) == C.is_bipartite(g)


def test_acyclic_deletion_examples():
    assert C.max_acyclic_deletion_matching(make_cycle(4, 0)) == 1
    assert C.max_acyclic_deletion_matching(GainGraph(3)) == 0
    # a forest keeps all its vertices when the empty deletion is allowed
    assert C.max_acyclic_deletion_matching(make_path(6)) == 3


@settings(max_examples=60, deadline=None)
@given(simple_graphs(max_n=7))
def test_acyclic_deletion_matches_brute_force(g):
    assert C.max_acyclic_deletion_matching(g) == brute_acyclic_deletion_matching(g)


@settings(max_examples=80, deadline=None)
@given(gain_graphs(max_n=8))
def test_rank_sandwich(g):
    rank = numerical_rank(adjacency(g))
    assert 2 * C.max_acyclic_deletion_matching(g) <= rank
    assert rank <= 2 * C.matching_number(g) + C.bipartite_obstruction(g)


def test_structural_class_examples():
    k33 = make_complete_bipartite(3, 3)
    s = C.structural_class(disjoint(k33, k33, GainGraph(1)))
    assert s.equality_class_matching and not s.equality_class_cover
    assert s.components[-1].is_isolated_vertex
    assert s.components[0].part_sizes == (3, 3) and s.components[0].has_perfect_matching

    stars = C.structural_class(disjoint(make_star(4), make_star(4), make_star(4)))
    assert stars.equality_class_cover and not stars.equality_class_matching
    assert C.vertex_cover_number(disjoint(make_star(4), make_star(4), make_star(4))) == 3

    c6 = C.structural_class(make_cycle(6, 0))
    assert not c6.equality_class_matching and not c6.equality_class_cover

    unbalanced = make_complete_bipartite(2, 2, GainAssignmentSpec(GainMode.EXPLICIT, explicit=(1, 1, 1, -1)))
    assert not C.structural_class(unbalanced).equality_class_matching
    # a star with mismatched size breaks the cover class
    assert not C.structural_class(disjoint(make_star(4), make_star(3))).equality_class_cover


def test_combinatorial_profile_invariants():
    for g in connected_graphs(6):
        prof = C.combinatorial_profile(g)
        assert prof.vertex_cover_number >= prof.matching_number
        if prof.is_bipartite:
            assert prof.vertex_cover_number == prof.matching_number
        assert (prof.odd_cycle_count == 0) == prof.is_bipartite
        assert (prof.bipartite_obstruction == 0) == prof.is_bipartite
        assert sorted(v for c in prof.components for v in c) == list(range(g.n))


def test_components_order():
    g = GainGraph(5, [(3, 4, 1), (0, 2, 1)])
    assert C.components(g) == [[0, 2], [1], [3, 4]]
    assert not C.is_connected(g)
    assert C.is_connected(random_gains(make_path(3)))
