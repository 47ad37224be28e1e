import random
from itertools import combinations

import networkx as nx
import pytest

from oracles import matching_saturates
from thetadel.errors import PreconditionError
from thetadel.expansion import max_matching, q_expansion


def bip(edges):
    adj = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
    return adj


def random_bipartite(rng, na, nb, p):
    A = [f"a{i}" for i in range(na)]
    B = [f"b{j}" for j in range(nb)]
    adj = {a: {b for b in B if rng.random() < p} for a in A}
    for b in B:
        if not any(b in nb_ for nb_ in adj.values()):
            adj[rng.choice(A)].add(b)
    return A, B, adj


def test_single_center_q1():
    r = q_expansion(["a"], ["b1", "b2"], bip([("a", "b1"), ("a", "b2")]), 1)
    assert r.S == {"a"} and r.T == {"b1", "b2"}
    assert len(r.stars["a"]) == 1 and r.stars["a"] <= r.T


def test_single_center_q2():
    adj = bip([("a", "b1"), ("a", "b2"), ("a", "b3")])
    r = q_expansion(["a"], ["b1", "b2", "b3"], adj, 2)
    assert r.S == {"a"} and r.T == {"b1", "b2", "b3"}
    assert len(r.stars["a"]) == 2


def test_perfect_matching_not_applicable():
    adj = bip([(f"a{i}", f"b{i}") for i in range(3)])
    assert q_expansion([f"a{i}" for i in range(3)], [f"b{i}" for i in range(3)], adj, 1) is None


def test_isolated_b_rejected():
    with pytest.raises(PreconditionError, match="isolated"):
        q_expansion(["a"], ["b1", "b2"], bip([("a", "b1")]), 1)


def test_bad_q():
    with pytest.raises(PreconditionError):
        q_expansion(["a"], ["b"], bip([("a", "b")]), 0)


def test_matching_examples():
    c4 = bip([("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")])
    assert len(max_matching(["a1", "a2"], ["b1", "b2"], c4)) == 2
    assert len(max_matching(["a"], ["x", "y", "z"], bip([("a", "x"), ("a", "y"), ("a", "z")]))) == 1
    k33 = {f"a{i}": {f"b{j}" for j in range(3)} for i in range(3)}
    assert len(max_matching(list(k33), [f"b{j}" for j in range(3)], k33)) == 3


def test_matching_maximum_vs_networkx():
    rng = random.Random(1)
    for _ in range(200):
        A, B, adj = random_bipartite(rng, rng.randint(1, 8), rng.randint(1, 10), rng.uniform(0.1, 0.6))
        M = max_matching(A, B, adj)
        assert all(b in adj[a] for a, b in M.items())
        assert len(set(M.values())) == len(M)
        h = nx.Graph([(a, b) for a in A for b in adj[a]])
        h.add_nodes_from(A)
        assert len(M) == len(nx.bipartite.maximum_matching(h, top_nodes=A)) // 2


@pytest.mark.parametrize("q", [1, 2, 3])
def test_expansion_invariants_fuzz(q):
    rng = random.Random(q)
    hits = 0
    for _ in range(300):
        na = rng.randint(1, 6)
        A, B, adj = random_bipartite(rng, na, rng.randint(q * na // 2 + 1, q * na + 6), rng.uniform(0.1, 0.5))
        m = len(max_matching(A, B, adj))
        r = q_expansion(A, B, adj, q)
        if len(B) <= q * m:
            assert r is None
            continue
        hits += 1
        assert r.check(adj) is None
        assert r.S and r.T
        for a in A:
            if a not in r.S:
                assert not adj[a] & r.T
        leaves = [b for F in r.stars.values() for b in F]
        assert len(leaves) == len(set(leaves)) == q * len(r.S)
    assert hits > 30


def _crown_exists(A, B, adj):
    """Brute force: a nonempty S ⊆ A with N(T) ⊆ S and S matchable into T."""
    for r in range(1, len(A) + 1):
        for S in combinations(A, r):
            S = set(S)
            T = {b for b in B if any(b in adj[a] for a in A) and all(a in S for a in A if b in adj[a])}
            if T and matching_saturates(S, T, adj):
                return True
    return False


def _stars_and_matchings(rng):
    adj, A, B = {}, [], []
    for i in range(rng.randint(0, 3)):
        a = f"s{i}"
        A.append(a)
        leaves = [f"{a}l{j}" for j in range(rng.randint(1, 4))]
        B += leaves
        adj[a] = set(leaves)
    for i in range(rng.randint(0, 3)):
        a, b = f"m{i}", f"m{i}b"
        A.append(a)
        B.append(b)
        adj[a] = {b}
    if not A:
        A, B, adj = ["s"], ["t"], {"s": {"t"}}
    for _ in range(rng.randint(0, 4)):
        adj[rng.choice(A)].add(rng.choice(B))
    return A, B, adj


def test_q1_is_crown():
    rng = random.Random(7)
    for _ in range(300):
        A, B, adj = _stars_and_matchings(rng)
        r = q_expansion(A, B, adj, 1)
        if r is None:
            continue
        assert matching_saturates(r.S, r.T, adj)
        assert all(a in r.S for a in A if adj[a] & r.T)
        assert _crown_exists(A, B, adj)


def test_crown_exists_when_b_outnumbers_matching():
    # whenever B outnumbers the matching, both finders agree a crown exists
    rng = random.Random(8)
    for _ in range(200):
        A, B, adj = _stars_and_matchings(rng)
        m = len(max_matching(A, B, adj))
        if len(B) > m:
            assert q_expansion(A, B, adj, 1) is not None and _crown_exists(A, B, adj)


@pytest.mark.parametrize("q", [1, 2])
def test_stability(q):
    rng = random.Random(20 + q)
    for _ in range(200):
        A, B, adj = random_bipartite(rng, rng.randint(1, 5), rng.randint(3, 14), rng.uniform(0.1, 0.5))
        r = q_expansion(A, B, adj, q)
        if r is None:
            continue
        A2 = [a for a in A if a not in r.S]
        adj2 = {a: adj[a] - r.T for a in A2}
        B2 = [b for b in B if b not in r.T and any(b in adj2[a] for a in A2)]
        if not A2 or not B2:
            continue
        r2 = q_expansion(A2, B2, adj2, q)
        if r2 is not None:
            assert not (r2.S & r.S) and not (r2.T & r.T)
            assert r2.check(adj2) is None


def test_deterministic():
    rng = random.Random(5)
    A, B, adj = random_bipartite(rng, 4, 12, 0.4)
    assert q_expansion(A, B, adj, 2) == q_expansion(list(reversed(A)), list(reversed(B)), adj, 2)
