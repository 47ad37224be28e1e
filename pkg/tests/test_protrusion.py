import json
import random

import pytest

from oracles import cycle, path, random_multigraph, random_partial_ktree, star
from thetadel.errors import BudgetExceeded, PreconditionError
from thetadel.graph import BoundariedGraph, Instance, Multigraph, boundary_of, glue, replay
from thetadel.minors import exact_hitting_set, is_k1t_free
from thetadel.protrusion import (CACHE_ENV, RepresentativeCache, Signature,
                                 component_protrusions, find_protrusion,
                                 gamma_impl, pendant_protrusions,
                                 protrusion_candidates, protrusion_size_bound,
                                 replace_protrusion, set_partitions, signature,
                                 signature_bruteforce)
from thetadel.treedecomp import treewidth_exact, validate


def _check_witness(g, w):
    assert len(w.boundary) <= w.r
    assert w.boundary == boundary_of(g, w.X)
    assert validate(w.decomposition, g.induced(w.X)) is None
    assert w.decomposition.width <= w.r


# finding --------------------------------------------------------------------

def test_path_endpoint():
    g = path(20)
    w = find_protrusion(g, {0}, 1)
    _check_witness(g, w)
    assert w.r == 4
    assert len(w.X) >= protrusion_size_bound(g, {0}) >= 19 / 5 - 1e-9


def test_all_of_v_gives_none():
    assert find_protrusion(path(5), set(range(5)), 1) is None


def test_star_center():
    g = star(6)
    ps = protrusion_candidates(g, {0}, 0)
    assert ps and all(w.X <= set(range(1, 7)) for w in ps)
    for w in ps:
        _check_witness(g, w)
    assert len(ps[0].X) >= protrusion_size_bound(g, {0})


def test_width_precondition():
    with pytest.raises(PreconditionError):
        find_protrusion(cycle(6), set(), 0)
    with pytest.raises(PreconditionError):
        find_protrusion(path(3), {9}, 1)


@pytest.mark.parametrize("d", [0, 1, 2])
def test_finder_fuzz(d):
    rng = random.Random(d)
    for _ in range(40):
        n = rng.randint(3, 25)
        vs, es = random_partial_ktree(rng, n, d)
        X = [100 + i for i in range(rng.randint(1, 3))]
        es += [(x, rng.choice(vs)) for x in X for _ in range(rng.randint(1, 3))]
        g = Multigraph(vs + X, es)
        ps = protrusion_candidates(g, X, d)
        S = boundary_of(g, set(vs)) & set(vs)
        assert len(ps) <= 2 * (2 * len(S)) + 1
        for w in ps:
            _check_witness(g, w)
            assert not (w.X & set(X))
        bound = protrusion_size_bound(g, X)
        assert (len(ps[0].X) if ps else 0) >= bound or bound < 1


def test_pendant_and_component_protrusions():
    k4 = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    g = Multigraph(range(10), k4 + [(0, 4), (4, 5), (5, 6), (6, 4), (8, 9)])
    pend = pendant_protrusions(g)
    assert any(w.X == {0, 4, 5, 6} and w.boundary == {0} for w in pend)
    for w in pend:
        assert len(w.boundary) <= 1
    comps = component_protrusions(g)
    assert {frozenset({8, 9}), frozenset({7})} <= {w.X for w in comps}
    assert all(not w.boundary for w in comps)


# signatures -----------------------------------------------------------------

def test_set_partitions_bell_numbers():
    assert [sum(1 for _ in set_partitions(range(n))) for n in range(5)] == [1, 1, 2, 5, 15]


def test_signature_pendant_triangle():
    g = Multigraph(["b", "x", "y", "z"], [("b", "x"), ("x", "y"), ("y", "z"), ("z", "x")])
    sig = signature(BoundariedGraph(g, ("b",)), 2)
    assert set(sig.as_dict().values()) == {0} and len(sig.table) == 2
    assert sig.offset == 1


def test_signature_isolated_boundary():
    g = Multigraph(["p", "q"])
    for c in (1, 2):
        sig = signature(BoundariedGraph(g, ("p", "q")), c)
        assert set(sig.as_dict().values()) == {0} and sig.offset == 0


def test_signature_digon_same_component_infinite():
    g = Multigraph(["p", "q"], [("p", "q", 2)])
    sig = signature(BoundariedGraph(g, ("p", "q")), 2)
    table = sig.as_dict()
    assert ((), ((1, 2),)) not in table
    assert ((), ((1,), (2,))) not in table
    assert table[((1,), ((2,),))] == 0


def test_signature_c3_rejected():
    with pytest.raises(PreconditionError):
        signature(BoundariedGraph(cycle(3), (0,)), 3)


def _random_boundaried(rng, t, n_inner, c):
    g = random_multigraph(rng, t + n_inner, rng.uniform(0.2, 0.6), c)
    return BoundariedGraph(g, tuple(range(t)))


@pytest.mark.parametrize("c", [1, 2])
def test_dp_signature_matches_bruteforce(c):
    rng = random.Random(c)
    for _ in range(80):
        bg = _random_boundaried(rng, rng.randint(0, 3), rng.randint(0, 5), c)
        if treewidth_exact(bg.graph) is None:
            continue
        a, b = signature(bg, c), signature_bruteforce(bg, c)
        assert a == b and a.offset == b.offset


def _opt_glued(bg1, bg3, c):
    return len(exact_hitting_set(glue(bg1, bg3), c))


@pytest.mark.parametrize("c", [1, 2])
def test_equal_signatures_are_canonically_equivalent(c):
    rng = random.Random(10 + c)
    buckets = {}
    for _ in range(400):
        bg = _random_boundaried(rng, 2, rng.randint(0, 4), c)
        sig = signature(bg, c)
        buckets.setdefault(sig.key(), []).append((bg, sig))
    pairs = [(a, b) for group in buckets.values() for a, b in zip(group, group[1:])][:15]
    assert len(pairs) >= 10
    for (g1, s1), (g2, s2) in pairs:
        for _ in range(10):
            g3 = _random_boundaried(rng, 2, rng.randint(0, 4), c)
            g3 = BoundariedGraph(g3.graph.relabel({v: ("ctx", v) for v in g3.graph.vertices}),
                                 tuple(("ctx", v) for v in g3.boundary))
            assert _opt_glued(g1, g3, c) - _opt_glued(g2, g3, c) == s1.offset - s2.offset


# replacement ----------------------------------------------------------------

CORE = ["b", "u", "v", "w"]
K4 = [(a, b) for i, a in enumerate(CORE) for b in CORE[i + 1:]]


def test_replace_pendant_tree(tmp_path):
    tree = [("b", f"t{i}") for i in range(3)] + [(f"t{i}", f"s{i}") for i in range(3)]
    g = Multigraph(CORE, K4 + tree)
    X = frozenset(["b"] + [f"t{i}" for i in range(3)] + [f"s{i}" for i in range(3)])
    w = [w for w in pendant_protrusions(g) if w.X == X][0]
    inst = Instance(g, 1, 2)
    out = replace_protrusion(inst, w, gamma=2, cache=RepresentativeCache(tmp_path / "c.json"))
    assert out.k == 1 and out.graph.vertices == set(CORE)
    assert replay(inst, out.trace) == out


def test_replace_pendant_triangle(tmp_path):
    es = K4 + [("b", "x"), ("x", "y"), ("y", "z"), ("z", "x")]
    g = Multigraph(CORE + ["x", "y", "z"], es)
    w = [w for w in pendant_protrusions(g) if w.X == {"b", "x", "y", "z"}][0]
    out = replace_protrusion(Instance(g, 3, 2), w, gamma=2, cache=RepresentativeCache(tmp_path / "c.json"))
    assert out.k == 2 and out.graph.vertices == set(CORE)


def test_replace_below_gamma_is_noop():
    g = path(6)
    w = find_protrusion(g, {0}, 1)
    inst = Instance(g, 1, 2)
    assert replace_protrusion(inst, w, gamma=len(w.X) + 1) is inst
    assert gamma_impl(2) == 7


def test_replace_rejects_c3():
    g = path(6)
    with pytest.raises(PreconditionError):
        replace_protrusion(Instance(g, 1, 3), find_protrusion(g, {0}, 1))


@pytest.mark.parametrize("c", [1, 2])
def test_replacement_soundness(c, tmp_path):
    rng = random.Random(30 + c)
    cache = RepresentativeCache(tmp_path / "c.json")
    fired = 0
    for _ in range(40):
        vs, es = random_partial_ktree(rng, rng.randint(4, 9), 1, keep=0.9)
        X = [50, 51]
        es += [(x, rng.choice(vs)) for x in X for _ in range(2)] + [(50, 51, c)]
        g = Multigraph(vs + X, es)
        for w in pendant_protrusions(g) + protrusion_candidates(g, X, 1):
            if len(w.boundary) > 3:
                continue
            try:
                out = replace_protrusion(Instance(g, 0, c), w, gamma=1, cache=cache)
            except BudgetExceeded:
                continue
            if out.graph == g:
                continue
            fired += 1
            delta = out.k
            before = len(exact_hitting_set(g, c))
            after = len(exact_hitting_set(out.graph, c))
            for k in range(g.n + 1):
                assert (before <= k) == (after <= k + delta)
            break
    assert fired >= 10


def test_k1t_filter_keeps_claw_freeness(tmp_path):
    cache = RepresentativeCache(tmp_path / "c.json")
    g = Multigraph(["a", "b", "x", "y"], [("a", "x"), ("x", "y"), ("y", "b"), ("x", "b")])
    sig = signature(BoundariedGraph(g, ("a", "b")), 2)
    rep = cache.lookup(sig, k1t=3)
    assert is_k1t_free(rep.graph, 3)
    assert signature_bruteforce(rep, 2) == sig


def test_cache_roundtrip_via_env(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    cache = RepresentativeCache()
    sig = signature(BoundariedGraph(Multigraph(["p"]), ("p",)), 2)
    rep = cache.lookup(sig)
    f = tmp_path / "representatives-v1.json"
    assert f.exists()
    doc = json.loads(f.read_text())
    assert doc["version"] == 1 and doc["reps"]
    again = RepresentativeCache()
    assert again.reps == cache.reps and again.lookup(sig) == rep


def test_signature_key_ignores_offset():
    table = ((((), ((1,),)), 0),)
    a = Signature(2, 1, (), table, offset=3)
    b = Signature(2, 1, (), table, offset=0)
    assert a == b and a.key() == b.key()
