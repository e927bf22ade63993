import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import disjoint, gain_graphs, random_gain_graph
from gainspec import bounds as B
from gainspec.bounds import TheoremId as T
from gainspec.combinatorics import components, is_bipartite
from gainspec.gain_core import GainGraph, GraphError, adjacency, induced_subgraph
from gainspec.generators_io import (
    GainAssignmentSpec,
    GainMode,
    make_complete,
    make_complete_bipartite,
    make_cycle,
    make_figure2_graph,
    make_path,
    make_star,
)
from gainspec.spectra import energy, vertex_energy, walk_gain_sum

UNIFORM = GainAssignmentSpec(GainMode.UNIFORM_CIRCLE, seed=17)


def shared_leaf_stars():
    # two stars K_{1,3} (centres 0 and 1) sharing the leaves 2 and 3, with the
    # 4-cycle 0-2-1-3 made unbalanced; spectrum is +-sqrt(3) twice plus two zeros
    return GainGraph(6, [(0, 2, -1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (0, 4, 1), (1, 5, 1)])


def test_vertex_energy_sqrt_examples():
    g = make_complete_bipartite(2, 3)
    rep = B.check_vertex_energy_sqrt(g, 2)
    assert g.degree(2) == 2 and rep.equality and rep.characterizer and rep.characterizer_agrees
    for r in range(1, 5):
        rep = B.check_vertex_energy_sqrt(make_complete_bipartite(r, r), 0)
        assert rep.bound_value == 1 and rep.equality
    rep = B.check_vertex_energy_sqrt(make_cycle(4, math.pi / 2), 1)
    assert rep.holds and not rep.equality and rep.characterizer_agrees
    with pytest.raises(GraphError):
        B.check_vertex_energy_sqrt(GainGraph(3), 0)


def test_vertex_energy_deg_examples():
    rep = B.check_vertex_energy_deg(make_complete_bipartite(3, 3), 4)
    assert rep.equality and rep.actual_value == pytest.approx(1, abs=1e-12)
    centre = B.check_vertex_energy_deg(make_star(3), 0)
    assert centre.bound_value == 1 and centre.actual_value == pytest.approx(math.sqrt(3))
    assert not centre.equality and centre.characterizer_agrees
    leaf = B.check_vertex_energy_deg(make_star(3), 1)
    assert leaf.bound_value == pytest.approx(1 / 3) and leaf.actual_value == pytest.approx(1 / math.sqrt(3))
    assert not leaf.equality


def test_vertex_energy_m4_examples():
    for d in range(1, 6):
        rep = B.check_vertex_energy_m4(make_star(d, UNIFORM), 0)
        assert rep.bound_value == pytest.approx(math.sqrt(d), abs=1e-12) and rep.equality
    iso = B.check_vertex_energy_m4(GainGraph(2), 1)
    assert iso.bound_value == 0 and iso.actual_value == 0 and iso.holds
    rep = B.check_vertex_energy_m4(make_cycle(4, 0), 0)
    # closed 4-walks at a C_4 vertex: 2 back-and-forth along one edge, 2 mixed, 2 around
    assert rep.detail["M4"] == pytest.approx(8)
    assert rep.bound_value == pytest.approx(1) and rep.actual_value == pytest.approx(1)


@settings(max_examples=60, deadline=None)
@given(gain_graphs(max_n=7))
def test_holder_with_three_halves_reproduces_m4(g):
    for v in range(g.n):
        if g.degree(v) == 0:
            continue
        m4 = B.check_vertex_energy_m4(g, v)
        h = B.check_vertex_energy_holder(g, v, r=2, s=3, t=1.5)
        assert h.bound_value == pytest.approx(m4.bound_value, rel=1e-9)
        assert h.holds


@settings(max_examples=60, deadline=None)
@given(gain_graphs(max_n=7))
def test_holder_general_exponents_hold(g):
    for v in range(g.n):
        for r, s in [(2, 2.0), (3, 2.0), (2, 4.0), (4, 1.25)]:
            assert B.check_vertex_energy_holder(g, v, r=r, s=s, t=s / (s - 1)).holds


def test_holder_validation_and_edgeless():
    g = make_path(3)
    with pytest.raises(ValueError):
        B.check_vertex_energy_holder(g, 0, r=2, s=2, t=3)
    with pytest.raises(ValueError):
        B.check_vertex_energy_holder(g, 0, r=1, s=2, t=2)
    rep = B.check_vertex_energy_holder(GainGraph(3), 0, r=2, s=2, t=2)
    assert rep.bound_value == 0 and rep.actual_value == 0 and rep.holds


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_fund_cycle_n2_complete_graph_is_sharp(n):
    rep = B.check_fund_cycle_n2(make_complete(n))
    assert rep.bound_value == pytest.approx(2 * (n - 1)) and rep.equality
    assert rep.detail["sharp_witness"] and rep.characterizer is None


def test_fund_cycle_n2_other_examples():
    for n in range(4, 8):
        rep = B.check_fund_cycle_n2(make_path(n))
        assert rep.bound_value == 5 * n - n * n - 4 and rep.holds
    rep = B.check_fund_cycle_n2(make_cycle(5, math.pi))
    assert rep.bound_value == pytest.approx(-2 + 25 - 25 - 4) and rep.holds
    with pytest.raises(GraphError):
        B.check_fund_cycle_n2(GainGraph(3, [(0, 1, 1)]))


def test_fund_cycle_4n_examples():
    for r in range(1, 5):
        rep = B.check_fund_cycle_4n(make_complete_bipartite(r, r))
        assert rep.equality and rep.characterizer and rep.characterizer_agrees
    # complete tripartite K_{2,2,2}: the bound equals 4m/n and is attained
    k222 = GainGraph(6, [(a, b, 1) for a in range(6) for b in range(a + 1, 6) if a // 2 != b // 2])
    rep = B.check_fund_cycle_4n(k222)
    assert rep.bound_value == pytest.approx(4 * 12 / 6) and rep.equality
    assert rep.characterizer is None
    p4 = B.check_fund_cycle_4n(make_path(4))
    assert p4.holds and not p4.equality and p4.characterizer_agrees
    with pytest.raises(GraphError):
        B.check_fund_cycle_4n(GainGraph(1))


def test_two_rho_examples():
    rep = B.check_two_rho(make_complete_bipartite(2, 5))
    assert rep.equality and rep.characterizer
    rep = B.check_two_rho(make_cycle(4, math.pi / 2))
    assert not rep.equality and rep.characterizer_agrees
    c6 = B.check_two_rho(make_cycle(6, 0))
    assert c6.bound_value == pytest.approx(4) and c6.actual_value == pytest.approx(8)
    # (K_n, -1) attains the bound without being bipartite; no characterizer applies
    neg = B.check_two_rho(make_complete(5, GainAssignmentSpec(GainMode.ALL_MINUS_ONE)))
    assert neg.equality and neg.characterizer is None


def test_two_mu_examples():
    g = disjoint(make_complete_bipartite(4, 4), GainGraph(2))
    rep = B.check_two_mu(g)
    assert rep.bound_value == 8 and rep.equality and rep.characterizer
    for spec in (GainAssignmentSpec(GainMode.ALL_ONE), UNIFORM):
        rep = B.check_two_mu(make_complete(3, spec))
        assert rep.slack > 1e-7 and rep.characterizer_agrees
    rep = B.check_two_mu(make_complete_bipartite(2, 3))
    assert rep.actual_value == pytest.approx(2 * math.sqrt(6)) and not rep.equality


def test_tau_minus_c_examples():
    rep = B.check_tau_minus_c(make_complete_bipartite(3, 3))
    assert rep.bound_value == 6 and rep.equality and rep.characterizer
    k4 = B.check_tau_minus_c(make_complete(4))
    assert k4.detail == {"tau": 3, "c": 4} and k4.bound_value == -2 and k4.holds
    c5 = B.check_tau_minus_c(make_cycle(5, 0))
    assert c5.bound_value == 4 and c5.actual_value == pytest.approx(6.472, abs=1e-3)
    assert not c5.equality and c5.characterizer_agrees


def test_tau_sqrt_delta_examples():
    rep = B.check_tau_sqrt_delta(disjoint(make_star(4), make_star(4), make_star(4)))
    assert rep.kind == "upper" and rep.bound_value == pytest.approx(12) and rep.equality
    assert rep.characterizer_agrees
    for r in range(1, 7):
        assert B.check_tau_sqrt_delta(make_star(r, UNIFORM)).equality
    k33 = B.check_tau_sqrt_delta(make_complete_bipartite(3, 3, UNIFORM))
    assert k33.bound_value == pytest.approx(6 * math.sqrt(3)) and k33.slack > 1e-7
    assert k33.actual_value >= 6 - 1e-9


def test_shared_leaf_stars_reach_cover_bound_without_being_stars():
    g = shared_leaf_stars()
    vals = np.linalg.eigvalsh(adjacency(g).array)
    assert np.allclose(vals, [-math.sqrt(3)] * 2 + [0, 0] + [math.sqrt(3)] * 2, atol=1e-12)
    rep = B.check_tau_sqrt_delta(g)
    assert rep.detail == {"tau": 2, "delta": 3}
    assert rep.equality
    # the graph is connected and not a star, so the structural class rejects it
    assert rep.characterizer is False and rep.disagrees


def test_one_positive_examples():
    rep = B.check_one_positive(make_complete_bipartite(2, 5))
    assert rep.kind == "count" and rep.actual_value == 1 and rep.equality and rep.characterizer
    c4 = B.check_one_positive(make_cycle(4, math.pi / 3))
    assert c4.actual_value == 2 and not c4.characterizer and c4.characterizer_agrees and c4.holds
    for seed in range(5):
        p4 = B.check_one_positive(make_path(4, GainAssignmentSpec(GainMode.UNIFORM_CIRCLE, seed=seed)))
        assert p4.actual_value == 2
    with pytest.raises(GraphError):
        B.check_one_positive(make_complete(3))


def test_rank_sandwich_report():
    rep = B.check_rank_sandwich(make_cycle(4, 0))
    assert rep.kind == "two-sided"
    assert rep.bound_value == 2 and rep.actual_value == 2 and rep.detail["upper"] == 4
    assert rep.slack == 0 and rep.equality and rep.holds
    k3 = B.check_rank_sandwich(make_complete(3))
    assert k3.detail["upper"] == 3 and k3.actual_value == 3


@pytest.mark.parametrize("g,mu_eq,cover_eq", [
    (make_complete_bipartite(2, 2), True, False),
    (make_path(2), True, True),
])
def test_combined_equality_examples(g, mu_eq, cover_eq):
    assert B.check_two_mu(g).equality == mu_eq
    assert B.check_tau_sqrt_delta(g).equality == cover_eq


def test_triangle_bounds():
    # spectrum {2, -1, -1}: E = 4 = 2 rho, and both cycle-sum bounds also give 4
    reps = B.run_all(make_complete(3))
    tight = {T.TWO_RHO, T.FUND_CYCLE_N2, T.FUND_CYCLE_4N}
    for rep in reps:
        if rep.theorem_id in tight:
            assert rep.equality, rep.theorem_id
        elif rep.theorem_id in (T.VE_SQRT_DEG, T.VE_DEG, T.TWO_MU, T.TAU_MINUS_C):
            assert rep.slack > 1e-7, rep.theorem_id


@settings(max_examples=80, deadline=None)
@given(gain_graphs(max_n=7))
def test_run_all_never_fails(g):
    reps = B.run_all(g, holder=(2, 3.0, 1.5))
    assert not [r for r in reps if r.failed]
    for r in reps:
        if r.vertex is not None:
            assert r.vertex in r.component


def test_run_all_per_component_labels():
    g = disjoint(GainGraph(1), make_star(2), make_cycle(3, 0))
    reps = B.run_all(g, theorems=[T.VE_DEG, T.ONE_POSITIVE, T.TWO_MU])
    ve = [r for r in reps if r.theorem_id == T.VE_DEG]
    assert sorted(r.vertex for r in ve) == [1, 2, 3, 4, 5, 6]
    one = [r for r in reps if r.theorem_id == T.ONE_POSITIVE]
    assert [r.skipped is None for r in one] == [True, False]
    assert one[0].component == (1, 2, 3)
    assert [r.theorem_id for r in reps].count(T.TWO_MU) == 1


def test_run_all_turns_caps_into_skips():
    reps = B.run_all(make_complete(17), theorems=[T.TAU_MINUS_C])
    assert len(reps) == 1 and reps[0].skipped and not reps[0].failed


def test_report_slack_sign_conventions():
    lower = B.check_two_mu(make_cycle(5, 0))
    assert lower.slack == pytest.approx(lower.actual_value - lower.bound_value)
    upper = B.check_tau_sqrt_delta(make_cycle(5, 0))
    assert upper.slack == pytest.approx(upper.bound_value - upper.actual_value)


def test_tolerance_event_flagged():
    rep = B._report(T.TWO_MU, 1.0, 1.0 - 5e-9)
    assert rep.holds and rep.tolerance_event and rep.equality
    rep = B._report(T.TWO_MU, 1.0, 1.0 - 5e-8)
    assert not rep.holds and rep.failed


def test_cut_monotonicity_examples():
    after, before = B.check_cut_monotonicity(make_complete_bipartite(2, 3), [0, 1])
    assert after == 0 and before == pytest.approx(2 * math.sqrt(6))
    g = disjoint(make_path(3), make_path(2))
    after, before = B.check_cut_monotonicity(g, [0, 1, 2])
    assert after == pytest.approx(before, abs=1e-12)
    assert not B.cut_is_vertex_star(g, [0, 1, 2])
    p3 = make_path(3)
    assert B.cut_is_vertex_star(p3, [0])
    after, before = B.check_cut_monotonicity(p3, [0])
    assert before - after > 1e-9


def test_cut_monotonicity_random(rng):
    for _ in range(200):
        n = int(rng.integers(2, 8))
        g = random_gain_graph(rng, n, p=rng.uniform(0.2, 0.9))
        part = [v for v in range(n) if rng.random() < 0.5] or [0]
        if len(part) == n:
            part = part[1:]
        after, before = B.check_cut_monotonicity(g, part)
        assert after <= before + 1e-9
        if B.cut_is_vertex_star(g, part):
            assert before - after > 1e-9


def test_block_and_principal_submatrix_energy(rng):
    for _ in range(200):
        n = int(rng.integers(2, 8))
        g = random_gain_graph(rng, n, p=rng.uniform(0.2, 0.9))
        keep = [v for v in range(n) if rng.random() < 0.5]
        rest = [v for v in range(n) if v not in keep]
        e = energy(g)
        assert energy(induced_subgraph(g, keep)) <= e + 1e-8
        assert energy(induced_subgraph(g, keep)) + energy(induced_subgraph(g, rest)) <= e + 1e-8


def test_figure2_graph_is_strict(rng):
    base = make_figure2_graph()
    assert is_bipartite(base) and len(components(base)) == 1
    for k in range(50):
        spec = GainAssignmentSpec(GainMode.UNIFORM_CIRCLE, seed=int(rng.integers(1 << 31)))
        rep = B.check_two_mu(make_figure2_graph(spec))
        assert rep.bound_value == 6 and rep.slack > 1e-7


@settings(max_examples=60, deadline=None)
@given(gain_graphs(min_n=3, max_n=7))
def test_pendant_vertex_makes_two_mu_strict(g):
    if len(components(g)) != 1 or not any(g.degree(v) == 1 for v in range(g.n)):
        return
    assert B.check_two_mu(g).slack > 1e-7


def test_vertex_energies_sum_to_energy_in_reports():
    g = make_figure2_graph(UNIFORM)
    total = sum(r.actual_value for r in B.run_all(g, theorems=[T.VE_DEG]))
    assert total == pytest.approx(energy(g), abs=1e-9)
    assert walk_gain_sum(g, 2, 0) == g.degree(0)
    assert vertex_energy(g).min() > 0
