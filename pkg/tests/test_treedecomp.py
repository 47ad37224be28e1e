import random

import networkx as nx
import pytest

from oracles import bowtie, complete, cycle, from_nx, path, random_multigraph, star, treewidth_oracle
from thetadel.errors import PreconditionError
from thetadel.graph import Multigraph
from thetadel.treedecomp import (TreeDecomposition, build_heuristic,
                                 decide_width_at_most, elimination_order,
                                 make_nice, nice_decomposition, subtree_graphs,
                                 td_from_order, treewidth_exact,
                                 treewidth_lower_bound, validate, validate_nice)

ABC = Multigraph("abc", [("a", "b"), ("b", "c")])


def td(*bags):
    return TreeDecomposition({i: frozenset(b) for i, b in enumerate(bags)},
                             tuple((i, i + 1) for i in range(len(bags) - 1)))


def test_validate_path_ok():
    d = td("ab", "bc")
    assert validate(d, ABC) is None
    assert d.width == 1


def test_validate_missing_edge():
    v = validate(td("ab", "c"), ABC)
    assert v.axiom == "edge coverage" and set(v.witness) == {"b", "c"}


def test_validate_missing_edge_with_shared_a():
    v = validate(td("ab", "ca"), ABC)
    assert v.axiom == "edge coverage" and set(v.witness) == {"b", "c"}


def test_validate_connectedness():
    g = Multigraph("abc", [("a", "b")])
    v = validate(td("ab", "c", "a"), g)
    assert v.axiom == "connectedness" and v.witness == "a"


def test_validate_not_a_tree():
    d = TreeDecomposition({0: frozenset("ab"), 1: frozenset("bc")}, ())
    assert validate(d, ABC).axiom == "tree"


def test_validate_vertex_coverage():
    g = Multigraph("abcd", [("a", "b"), ("b", "c")])
    assert validate(td("ab", "bc"), g).axiom == "vertex coverage"


def test_make_nice_single_bag_triangle():
    g = cycle(3)
    ntd = make_nice(TreeDecomposition({0: frozenset(range(3))}), g)
    assert validate_nice(ntd, g) is None
    assert ntd.width == 2
    kinds = [ntd.kind[t] for t in ntd.postorder()]
    assert kinds == ["base"] + ["introduce"] * 3 + ["forget"] * 3


def test_make_nice_empty_graph():
    g = Multigraph([])
    ntd = make_nice(TreeDecomposition({}), g)
    assert validate_nice(ntd, g) is None
    assert ntd.bags[ntd.root] == frozenset()


def test_make_nice_rejects_invalid():
    with pytest.raises(PreconditionError):
        make_nice(td("ab", "c"), ABC)


@pytest.mark.parametrize("seed", range(40))
def test_make_nice_fuzz(seed):
    rng = random.Random(seed)
    g = random_multigraph(rng, rng.randint(1, 12), rng.uniform(0.1, 0.6))
    d = build_heuristic(g, seed=seed)
    assert validate(d, g) is None
    ntd = make_nice(d, g)
    assert validate_nice(ntd, g) is None
    assert ntd.width == d.width
    assert len(ntd.bags) <= 4 * (d.width + 2) * max(g.n, 1) + 1
    for t in ntd.nodes:
        G_t, H_t = subtree_graphs(ntd, g, t)
        assert not (H_t.vertices & ntd.bags[t])
        assert G_t.vertices == H_t.vertices | ntd.bags[t]


def test_make_nice_keep_root():
    g = cycle(5)
    keep = frozenset({0, 2})
    ntd = nice_decomposition(g, keep=keep)
    assert ntd.bags[ntd.root] == keep
    assert validate_nice(ntd, g, keep) is None


@pytest.mark.parametrize("g,w", [
    (from_nx(nx.random_labeled_tree(10, seed=1)), 1),
    (path(6), 1),
    (cycle(5), 2),
    (complete(5), 4),
    (star(5), 1),
])
def test_heuristic_widths(g, w):
    assert build_heuristic(g).width == w


def test_heuristic_deterministic():
    g = random_multigraph(random.Random(3), 12, 0.4)
    assert build_heuristic(g, seed=5) == build_heuristic(g, seed=5)
    assert elimination_order(g, "min_degree") == elimination_order(g, "min_degree")


def test_decide_examples():
    assert decide_width_at_most(from_nx(nx.random_labeled_tree(8, seed=2)), 1) is not None
    assert decide_width_at_most(cycle(4), 1) is None
    ntd = decide_width_at_most(bowtie(), 2)
    assert ntd is not None and validate_nice(ntd, bowtie()) is None


def test_decide_out_of_range():
    with pytest.raises(PreconditionError, match="out of configured range"):
        decide_width_at_most(cycle(3), 5)


def _graphs_up_to_8():
    rng = random.Random(11)
    out = [from_nx(h) for h in nx.graph_atlas_g()[1:200]]
    out += [random_multigraph(rng, 8, rng.uniform(0.2, 0.7), 1) for _ in range(60)]
    return out


def test_decide_matches_oracle():
    for g in _graphs_up_to_8():
        tw = treewidth_oracle(g)
        for w in range(0, 4):
            ntd = decide_width_at_most(g, w)
            assert (ntd is not None) == (tw <= w), (g, w, tw)
            if ntd is not None:
                assert ntd.width <= w and validate_nice(ntd, g) is None
        assert treewidth_lower_bound(g) <= tw <= build_heuristic(g).width
        if tw <= 4:
            assert treewidth_exact(g) == tw


def test_td_from_order_rejects_bad_order():
    with pytest.raises(PreconditionError):
        td_from_order(path(3), [0, 1])


def test_subtree_graphs_root_and_base():
    g = bowtie()
    ntd = nice_decomposition(g)
    G_r, H_r = subtree_graphs(ntd, g, ntd.root)
    assert G_r == g and H_r == g
    base = next(t for t in ntd.nodes if ntd.kind[t] == "base")
    G_b, H_b = subtree_graphs(ntd, g, base)
    assert G_b.n == 0 and H_b.n == 0


def test_subtree_graphs_first_forget_of_triangle():
    g = cycle(3)
    ntd = make_nice(TreeDecomposition({0: frozenset(range(3))}), g)
    t = next(t for t in ntd.postorder() if ntd.kind[t] == "forget")
    (v,) = ntd.bags[ntd.children[t][0]] - ntd.bags[t]
    _, H_t = subtree_graphs(ntd, g, t)
    assert H_t.vertices == {v} and H_t.m == 0


def test_subtree_graphs_unknown_node():
    ntd = nice_decomposition(path(3))
    with pytest.raises(PreconditionError):
        subtree_graphs(ntd, path(3), "nope")


def test_multiplicity_does_not_change_width():
    g = Multigraph(range(3), [(0, 1, 3), (1, 2, 2)])
    assert treewidth_exact(g) == 1
