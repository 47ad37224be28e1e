import random

import networkx as nx
import pytest

from oracles import (bowtie, complete, cycle, from_nx, has_induced_star_oracle,
                     max_flower_c2_oracle, max_theta_order_oracle,
                     min_hitting_oracle, path, random_multigraph, star,
                     theta_free_oracle)
from thetadel.errors import BudgetExceeded, PreconditionError
from thetadel.graph import Multigraph, validate_model
from thetadel.minors import (brute_force_hitting_set, exact_hitting_set,
                             exact_hitting_set_td, find_induced_star,
                             has_theta_c, is_cactus_multigraph, is_k1t_free,
                             max_cross_multiplicity, max_flower,
                             minimal_model, theta_exhaustive)
from thetadel.treedecomp import nice_decomposition

DIGON = Multigraph([0, 1], [(0, 1, 2)])


def _sample(seed, count, n_lo=2, n_hi=8, max_mult=3):
    rng = random.Random(seed)
    return [random_multigraph(rng, rng.randint(n_lo, n_hi), rng.uniform(0.15, 0.7), max_mult)
            for _ in range(count)]


# detection ------------------------------------------------------------------

def test_detect_examples():
    assert has_theta_c(cycle(3), 2)
    assert not has_theta_c(bowtie(), 3)
    assert has_theta_c(complete(4), 3)
    assert is_cactus_multigraph(bowtie())
    assert not is_cactus_multigraph(complete(4))


def test_detect_c1_and_trivial():
    assert has_theta_c(path(2), 1)
    assert not has_theta_c(Multigraph(range(3)), 1)
    assert not has_theta_c(path(5), 2)
    assert has_theta_c(DIGON, 2) and not has_theta_c(DIGON, 3)


def test_detect_budget():
    with pytest.raises(BudgetExceeded, match="oracle budget exceeded"):
        has_theta_c(complete(20), 4)
    with pytest.raises(PreconditionError):
        has_theta_c(path(2), 0)


@pytest.mark.parametrize("seed", range(4))
def test_fast_paths_agree_with_exhaustive_and_oracle(seed):
    for g in _sample(seed, 40):
        order = max_theta_order_oracle(g)
        assert max_cross_multiplicity(g) == order
        for c in (1, 2, 3, 4):
            assert has_theta_c(g, c) == (order >= c)
            assert theta_exhaustive(g, c) == (order >= c)
            if c <= 2:
                assert has_theta_c(g, c) == (not theta_free_oracle(g, c))


def test_k4_order():
    # two disjoint edges of K4 see all four remaining edges
    assert max_cross_multiplicity(complete(4)) == 4
    assert max_theta_order_oracle(complete(4)) == 4


# minimal models -------------------------------------------------------------

def test_minimal_model_triangle():
    m = minimal_model(cycle(3), 2)
    assert validate_model(cycle(3), m, 2) is None
    assert sorted([len(m.tree1), len(m.tree2)]) == [1, 2]
    assert len(m.cross_edges) == 2


def test_minimal_model_forest_and_digon():
    assert minimal_model(path(6), 2) is None
    m = minimal_model(DIGON, 2)
    assert m.vertices == {0, 1} and len(m.cross_edges) == 2


def _no_cut_vertex(model):
    h = nx.MultiGraph()
    h.add_nodes_from(model.vertices)
    h.add_edges_from(list(model.tree_edges) + list(model.cross_edges))
    simple = nx.Graph(h)
    return len(simple) <= 2 or not list(nx.articulation_points(simple))


@pytest.mark.parametrize("c", [2, 3, 4])
def test_minimal_model_valid_on_random(c):
    for g in _sample(10 + c, 40):
        m = minimal_model(g, c)
        assert (m is not None) == has_theta_c(g, c)
        if m is not None:
            assert validate_model(g, m, c) is None
            assert _no_cut_vertex(m)


# flowers --------------------------------------------------------------------

def test_flower_examples():
    assert max_flower(bowtie(), 0, 2).size == 2
    assert max_flower(bowtie(), 1, 2).size == 1
    assert max_flower(from_nx(nx.random_labeled_tree(9, seed=4)), 3, 2).size == 0


def _check_flower(g, f, c):
    seen = set()
    for p in f.petals:
        assert f.center in p.vertices
        assert validate_model(g, p, c, minimal=False) is None
        rest = p.vertices - {f.center}
        assert not (rest & seen)
        seen |= rest


@pytest.mark.parametrize("seed", range(3))
def test_flower_c2_matches_cycle_packing_oracle(seed):
    for g in _sample(20 + seed, 30, max_mult=2):
        for v in sorted(g.vertices):
            f = max_flower(g, v, 2)
            _check_flower(g, f, 2)
            assert f.size == max_flower_c2_oracle(g, v)


def test_flower_limit_short_circuits():
    g = Multigraph(range(9), [(0, i) for i in range(1, 9)] + [(i, i + 1) for i in range(1, 9, 2)])
    assert max_flower(g, 0, 2).size == 4
    assert max_flower(g, 0, 2, limit=2).size == 2


def test_flower_c3():
    # three K4s glued at vertex 0
    es = []
    for i in range(3):
        q = [0, 3 * i + 1, 3 * i + 2, 3 * i + 3]
        es += [(a, b) for j, a in enumerate(q) for b in q[j + 1:]]
    g = Multigraph(range(10), es)
    f = max_flower(g, 0, 3)
    _check_flower(g, f, 3)
    assert f.size == 3


def test_flower_positive_iff_in_minimal_model_c2():
    # for c = 2 a vertex lies in a minimal model exactly when it lies on a cycle
    for g in _sample(30, 40, max_mult=2):
        for v in g.vertices:
            on_cycle = max_flower_c2_oracle(g, v) >= 1
            assert (max_flower(g, v, 2).size >= 1) == on_cycle


# exact hitting sets ---------------------------------------------------------

def test_exact_examples():
    assert len(exact_hitting_set(complete(4), 2)) == 2
    assert len(exact_hitting_set(cycle(3), 2)) == 1
    assert exact_hitting_set(path(3), 1) == {1}


def test_exact_budget():
    with pytest.raises(BudgetExceeded):
        exact_hitting_set(complete(20), 4)


@pytest.mark.parametrize("c", [1, 2, 3])
def test_exact_matches_oracle(c):
    for g in _sample(40 + c, 30, n_hi=7):
        S = exact_hitting_set(g, c)
        assert not has_theta_c(g.remove_vertices(S), c)
        assert len(S) == min_hitting_oracle(g, c)
        assert len(brute_force_hitting_set(g, c)) == len(S)


def test_exact_monotone_under_deletion():
    for g in _sample(50, 25):
        base = len(exact_hitting_set(g, 2))
        for v in g.vertices:
            assert len(exact_hitting_set(g.remove_vertices([v]), 2)) <= base


def test_petersen_fvs():
    g = from_nx(nx.petersen_graph())
    assert len(exact_hitting_set(g, 2)) == 3


# tree-decomposition DP ------------------------------------------------------

def test_dp_examples():
    assert exact_hitting_set_td(path(5), nice_decomposition(path(5)), 2) == frozenset()
    assert len(exact_hitting_set_td(cycle(5), nice_decomposition(cycle(5)), 2)) == 1
    assert exact_hitting_set_td(star(3), nice_decomposition(star(3)), 1) == {0}


def test_dp_rejects_c3():
    with pytest.raises(PreconditionError, match="DP only for c <= 2"):
        exact_hitting_set_td(cycle(3), nice_decomposition(cycle(3)), 3)


@pytest.mark.parametrize("c", [1, 2])
def test_dp_matches_exact(c):
    rng = random.Random(60 + c)
    for _ in range(60):
        g = random_multigraph(rng, rng.randint(1, 12), rng.uniform(0.1, 0.35), 2)
        ntd = nice_decomposition(g, exact_up_to=-1)
        if ntd.width > 4:
            continue
        S = exact_hitting_set_td(g, ntd, c)
        assert not has_theta_c(g.remove_vertices(S), c)
        assert len(S) == len(exact_hitting_set(g, c))


# induced stars --------------------------------------------------------------

def test_k1t_examples():
    assert not is_k1t_free(star(3), 3)
    assert is_k1t_free(cycle(6), 3)
    assert is_k1t_free(from_nx(nx.line_graph(nx.complete_graph(4))), 3)


def test_k1t_budget():
    with pytest.raises(BudgetExceeded, match="independence check budget exceeded"):
        is_k1t_free(star(30), 3, deg_max=24)


def test_k1t_matches_oracle():
    for g in _sample(70, 60, max_mult=1):
        for t in (2, 3, 4):
            assert is_k1t_free(g, t) == (not has_induced_star_oracle(g, t))
            w = find_induced_star(g, t)
            assert (w is None) == is_k1t_free(g, t)
