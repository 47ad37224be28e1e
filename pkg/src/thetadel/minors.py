"""θ_c minor detection, minimal models, flowers and exact hitting sets.

Everything here is exact.  The exponential routines guard themselves with
an ``n_max`` budget and raise :class:`BudgetExceeded` rather than hang.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import networkx as nx

from .errors import BudgetExceeded, PreconditionError
from .graph import (MinorModel, Multigraph, components, is_connected,
                    sorted_vertices, vertex_key)

N_MAX = 16
DEG_MAX = 24


# ---------------------------------------------------------------------------
# detection

def blocks(g: Multigraph) -> list:
    """Biconnected blocks of the underlying simple graph as vertex sets.

    Isolated vertices form no block.
    """
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from((u, v) for u, v, _ in g.pairs())
    out = [frozenset(b) for b in nx.biconnected_components(G)]
    return sorted(out, key=lambda b: sorted(vertex_key(x) for x in b))


def is_cactus_multigraph(g: Multigraph) -> bool:
    """True iff every block is a pair of multiplicity <= 2 or a plain cycle."""
    for b in blocks(g):
        sub = g.induced(b)
        if len(b) == 2:
            if sub.m > 2:
                return False
        elif sub.num_pairs() != len(b) or sub.m != len(b):
            return False
    return True


def max_cross_multiplicity(g: Multigraph, n_max: int = N_MAX) -> int:
    """Largest c with θ_c a minor of g, by exhaustive bipartition search.

    A θ_c model extends to a split of one connected component into two
    connected halves without losing cross edges, so it suffices to scan
    those splits.
    """
    best = 0
    for comp in components(g):
        if len(comp) < 2:
            continue
        if len(comp) > n_max:
            raise BudgetExceeded("oracle budget exceeded")
        vs = sorted_vertices(comp)
        first, rest = vs[0], vs[1:]
        sub = g.induced(comp)
        for r in range(0, len(rest)):
            for extra in combinations(rest, r):
                A = {first, *extra}
                B = comp - A
                cross = sum(sub.mult(a, b) for a in A for b in sub.neighbors(a) if b in B)
                if cross <= best:
                    continue
                if is_connected(sub, A) and is_connected(sub, B):
                    best = cross
    return best


def theta_exhaustive(g: Multigraph, c: int, n_max: int = N_MAX) -> bool:
    if g.m < c:
        return False
    return max_cross_multiplicity(g, n_max) >= c


def has_theta_c(g: Multigraph, c: int, n_max: int = N_MAX) -> bool:
    """Whether θ_c (two vertices, c parallel edges) is a minor of ``g``."""
    if c < 1:
        raise PreconditionError("c must be >= 1")
    if c == 1:
        return g.m > 0
    if c == 2:
        if any(m >= 2 for _, _, m in g.pairs()):
            return True
        return g.num_pairs() > g.n - len(components(g))
    if c == 3:
        if any(m >= 3 for _, _, m in g.pairs()):
            return True
        return not is_cactus_multigraph(g)
    return theta_exhaustive(g, c, n_max)


def prune_low_degree(g: Multigraph, protect=()) -> Multigraph:
    """Repeatedly drop vertices of degree <= 1 (never in a minimal θ_c model, c >= 2)."""
    protect = set(protect)
    deg = {v: g.degree(v) for v in g.vertices}
    alive = set(g.vertices)
    stack = [v for v in alive if deg[v] <= 1 and v not in protect]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for u, m in g.adjacency(v).items():
            if u in alive:
                deg[u] -= m
                if deg[u] <= 1 and u not in protect:
                    stack.append(u)
    return g if len(alive) == g.n else g.induced(alive)


# ---------------------------------------------------------------------------
# models

def _shortest_cycle(g: Multigraph) -> Optional[list]:
    for u, v, m in g.pairs():
        if m >= 2:
            return [u, v]
    best = None
    for s in sorted_vertices(g.vertices):
        parent = {s: None}
        depth = {s: 0}
        order = [s]
        for x in order:
            for y in sorted_vertices(g.neighbors(x)):
                if y not in parent:
                    parent[y] = x
                    depth[y] = depth[x] + 1
                    order.append(y)
                elif parent[x] != y:
                    if best is None or depth[x] + depth[y] + 1 < len(best):
                        px, py = [x], [y]
                        while parent[px[-1]] is not None:
                            px.append(parent[px[-1]])
                        while parent[py[-1]] is not None:
                            py.append(parent[py[-1]])
                        common = set(px) & set(py)
                        px = px[:next(i for i, a in enumerate(px) if a in common) + 1]
                        py = py[:next(i for i, a in enumerate(py) if a in common)]
                        cyc = px[::-1] + py
                        if best is None or len(cyc) < len(best):
                            best = cyc
            if best is not None and depth[x] * 2 + 1 > len(best):
                break
    return best


def _connected_sets_with(g: Multigraph, s, within: frozenset):
    """Yield every connected subset of ``within`` containing ``s``."""
    def grow(cur, frontier, banned):
        yield cur
        frontier = sorted_vertices(frontier)
        for i, x in enumerate(frontier):
            banned_here = banned | set(frontier[:i])
            new_front = (set(frontier[i + 1:]) | {y for y in g.neighbors(x) if y in within}) - cur - banned_here - {x}
            yield from grow(cur | {x}, new_front, banned_here)

    yield from grow(frozenset([s]), {y for y in g.neighbors(s) if y in within}, set())


def _model_from_split(g: Multigraph, A: frozenset, B: frozenset, c: int) -> MinorModel:
    def spanning(tree):
        root = sorted_vertices(tree)[0]
        seen = {root}
        es = []
        order = [root]
        for x in order:
            for y in sorted_vertices(g.neighbors(x)):
                if y in tree and y not in seen:
                    seen.add(y)
                    es.append((x, y))
                    order.append(y)
        return es

    cross = []
    for a in sorted_vertices(A):
        for b in sorted_vertices(g.neighbors(a)):
            if b in B:
                cross += [(a, b)] * g.mult(a, b)
    cross = cross[:c]
    t1, t2 = set(A), set(B)
    e1, e2 = spanning(A), spanning(B)
    changed = True
    while changed:
        changed = False
        for tree, es in ((t1, e1), (t2, e2)):
            if len(tree) == 1:
                continue
            touch = {x for e in cross for x in e}
            for x in sorted_vertices(tree):
                d = sum(1 for e in es if x in e)
                if d <= 1 and x not in touch:
                    tree.discard(x)
                    es[:] = [e for e in es if x not in e]
                    changed = True
                    break
    return MinorModel(frozenset(t1), frozenset(t2), tuple(cross), tuple(e1 + e2))


def minimal_model(g: Multigraph, c: int, n_max: int = N_MAX) -> Optional[MinorModel]:
    """A minimal θ_c minor-model of ``g`` or ``None`` if there is none."""
    if not has_theta_c(g, c, n_max):
        return None
    if c == 1:
        u, v, _ = next(iter(g.pairs()))
        return MinorModel(frozenset([u]), frozenset([v]), ((u, v),), ())
    if c == 2:
        cyc = _shortest_cycle(g)
        W = frozenset(cyc)
    else:
        h = prune_low_degree(g)
        W = set(h.vertices)
        for x in sorted_vertices(h.vertices):
            if has_theta_c(h.induced(W - {x}), c, n_max):
                W.discard(x)
        W = frozenset(W)
    sub = g.induced(W)
    s = sorted_vertices(W)[0]
    for A in _connected_sets_with(sub, s, W):
        B = W - A
        if not B:
            continue
        cross = sum(sub.mult(a, b) for a in A for b in sub.neighbors(a) if b in B)
        if cross >= c and is_connected(sub, B):
            return _model_from_split(sub, A, B, c)
    raise AssertionError("vertex-minimal θ_c witness has no connected split")


# ---------------------------------------------------------------------------
# flowers

@dataclass(frozen=True)
class Flower:
    center: object
    petals: tuple

    @property
    def size(self) -> int:
        return len(self.petals)

    def __len__(self):
        return len(self.petals)


def _split_needs_all(g: Multigraph, A: frozenset, B: frozenset, c: int) -> bool:
    """``(A, B)`` is a θ_c split of ``A | B`` from which no vertex can be dropped."""
    def cross(A, B):
        return sum(g.mult(a, b) for a in A for b in g.neighbors(a) if b in B)

    if cross(A, B) < c:
        return False
    for side, other in ((A, B), (B, A)):
        for x in side:
            rest = side - {x}
            if rest and is_connected(g.induced(rest)) and cross(rest, other) >= c:
                return False
    return True


def _petal_split(g: Multigraph, M: frozenset, v, c: int):
    sub = g.induced(M)
    for A in _connected_sets_with(sub, v, M):
        B = M - A
        if B and is_connected(sub.induced(B)) and _split_needs_all(sub, A, B, c):
            return A, B
    return None


def _cycle_petals(g: Multigraph, v) -> list:
    """Vertex sets (minus ``v``) of chordless cycles through ``v``."""
    nbrs = g.neighbors(v)
    doubled = {u for u in nbrs if g.mult(v, u) >= 2}
    found = [frozenset([u]) for u in sorted_vertices(doubled)]

    def extend(path, inside):
        last = path[-1]
        for y in sorted_vertices(g.neighbors(last)):
            if y == v or y in inside:
                continue
            if any(g.mult(y, x) for x in path[:-1]):
                continue
            if y in nbrs:
                if vertex_key(y) > vertex_key(path[0]) and not {y, path[0]} & doubled:
                    found.append(inside | {y})
                continue
            extend(path + [y], inside | {y})

    for a in sorted_vertices(nbrs - doubled):
        extend([a], frozenset([a]))
    return found


def _minimal_petals(g: Multigraph, v, c: int, n_max: int) -> list:
    """Vertex sets P (without ``v``) such that ``P + v`` carries a θ_c model
    through ``v`` that needs all of its vertices."""
    if c == 1:
        return [frozenset([u]) for u in sorted_vertices(g.neighbors(v))]
    if c == 2:
        return _cycle_petals(g, v)
    others = g.vertices - {v}
    if len(others) > n_max:
        raise BudgetExceeded("oracle budget exceeded")
    found: list = []
    level = {frozenset([u]) for u in g.neighbors(v)}
    seen = set(level)
    while level:
        nxt = set()
        for P in sorted(level, key=lambda s: sorted(vertex_key(x) for x in s)):
            if any(f <= P for f in found):
                continue
            if _petal_split(g, P | {v}, v, c) is not None:
                found.append(P)
                continue
            for x in P:
                for y in g.neighbors(x):
                    if y != v and y not in P:
                        Q = P | {y}
                        if Q not in seen:
                            seen.add(Q)
                            nxt.add(Q)
        level = nxt
    return found


def _max_packing(sets: list, universe: list, limit: Optional[int]) -> list:
    """Largest family of pairwise disjoint members of ``sets`` (exact)."""
    idx = {x: i for i, x in enumerate(universe)}
    masks = sorted({sum(1 << idx[x] for x in s) for s in sets}, key=lambda m: (bin(m).count("1"), m))
    by_low = {}
    for m in masks:
        low = (m & -m).bit_length() - 1
        by_low.setdefault(low, []).append(m)
    memo = {}
    full = (1 << len(universe)) - 1
    target = limit if limit is not None else len(masks) + 1

    def best(avail: int) -> list:
        if avail in memo:
            return memo[avail]
        result: list = []
        rest = avail
        while rest:
            low = (rest & -rest).bit_length() - 1
            if low in by_low and any(m & avail == m for m in by_low[low]):
                break
            rest &= rest - 1
        if rest:
            low = (rest & -rest).bit_length() - 1
            for m in by_low[low]:
                if m & avail == m:
                    cand = [m] + best(avail & ~m)
                    if len(cand) > len(result):
                        result = cand
                        if len(result) >= target:
                            break
            if len(result) < target:
                skip = best(avail & ~(1 << low))
                if len(skip) > len(result):
                    result = skip
        memo[avail] = result
        return result

    # members containing a vertex below ``low`` were excluded by the scan,
    # so every subset is reachable through its lowest vertex.
    chosen = best(full)
    inv = {sum(1 << idx[x] for x in s): s for s in sets}
    return [inv[m] for m in chosen]


def max_flower(g: Multigraph, v, c: int, limit: Optional[int] = None, n_max: int = N_MAX) -> Flower:
    """Maximum set of θ_c models through ``v``, pairwise sharing only ``v``.

    With ``limit`` the search stops once that many petals are found.
    """
    if v not in g:
        raise PreconditionError(f"{v!r} not in graph")
    petal_sets: list = []
    if c == 1:
        petal_sets = _minimal_petals(g, v, 1, n_max)
        if limit is not None:
            petal_sets = petal_sets[:limit]
    else:
        h = prune_low_degree(g, protect=[v])
        for b in blocks(h):
            if v not in b:
                continue
            sub = h.induced(b)
            cands = _minimal_petals(sub, v, c, n_max)
            if not cands:
                continue
            want = None if limit is None else limit - len(petal_sets)
            petal_sets += _max_packing(cands, sorted_vertices(b - {v}), want)
            if limit is not None and len(petal_sets) >= limit:
                break
    petals = []
    for P in petal_sets:
        M = P | {v}
        A, B = _petal_split(g, M, v, c)
        petals.append(_model_from_split(g.induced(M), A, B, c))
    return Flower(v, tuple(petals))


# ---------------------------------------------------------------------------
# exact hitting sets

def brute_force_hitting_set(g: Multigraph, c: int, n_max: int = N_MAX) -> frozenset:
    """Smallest S (first in id order among equals) with g - S θ_c-free."""
    if g.n > n_max:
        raise BudgetExceeded("oracle budget exceeded")
    vs = sorted_vertices(g.vertices)
    for r in range(len(vs) + 1):
        for S in combinations(vs, r):
            if not has_theta_c(g.remove_vertices(S), c, n_max):
                return frozenset(S)
    raise AssertionError("unreachable")


def _vc_branch(adj: dict, k: int) -> Optional[set]:
    adj = {v: set(nb) for v, nb in adj.items() if nb}
    taken = set()
    while True:
        leaf = next((v for v in sorted_vertices(adj) if len(adj[v]) == 1), None)
        if leaf is None:
            break
        (u,) = adj[leaf]
        taken.add(u)
        for x in adj.pop(u):
            adj[x].discard(u)
            if not adj[x]:
                del adj[x]
        if len(taken) > k:
            return None
    k -= len(taken)
    if not adj:
        return taken
    if k <= 0:
        return None
    m = sum(len(nb) for nb in adj.values()) // 2
    maxdeg = max(len(nb) for nb in adj.values())
    if m > k * maxdeg:
        return None
    v = max(sorted_vertices(adj), key=lambda x: len(adj[x]))
    for pick in ([v], sorted_vertices(adj[v])):
        if len(pick) > k:
            continue
        sub = {x: set(nb) - set(pick) for x, nb in adj.items() if x not in pick}
        res = _vc_branch(sub, k - len(pick))
        if res is not None:
            return taken | set(pick) | res
    return None


def _fvs_reduce(adj: dict, taken: set) -> None:
    """In-place degree <= 2 reductions for feedback vertex set."""
    changed = True
    while changed:
        changed = False
        for v in sorted_vertices(adj):
            if v not in adj:
                continue
            nb = adj[v]
            d = sum(nb.values())
            if d <= 1:
                for u in nb:
                    del adj[u][v]
                del adj[v]
                changed = True
            elif d == 2:
                if len(nb) == 1:
                    (u,) = nb
                    taken.add(u)
                    for x in adj.pop(u):
                        del adj[x][u]
                    changed = True
                else:
                    a, b = nb
                    del adj[a][v], adj[b][v], adj[v]
                    mm = min(2, adj[a].get(b, 0) + 1)
                    adj[a][b] = adj[b][a] = mm
                    changed = True


def _adj_cycle(adj: dict) -> Optional[list]:
    g = Multigraph._wrap(adj, None)
    return _shortest_cycle(g)


def _fvs_branch(adj: dict, k: int) -> Optional[set]:
    adj = {v: dict(nb) for v, nb in adj.items()}
    taken: set = set()
    _fvs_reduce(adj, taken)
    k -= len(taken)
    if k < 0:
        return None
    if not adj:
        return taken
    if k == 0:
        return None
    n = len(adj)
    m = sum(sum(nb.values()) for nb in adj.values()) // 2
    comps = len(components(Multigraph._wrap(adj, None)))
    degs = sorted((sum(nb.values()) for nb in adj.values()), reverse=True)
    if sum(d - 1 for d in degs[:k]) < m - n + comps:
        return None
    cyc = _adj_cycle(adj)
    for x in sorted(cyc, key=lambda y: (-sum(adj[y].values()), vertex_key(y))):
        sub = {y: {z: mm for z, mm in nb.items() if z != x} for y, nb in adj.items() if y != x}
        res = _fvs_branch(sub, k - 1)
        if res is not None:
            return taken | {x} | res
    return None


def exact_hitting_set(g: Multigraph, c: int, n_max: int = N_MAX) -> frozenset:
    """Minimum θ_c hitting set.

    c = 1 and c = 2 use bounded-search branching (vertex cover, feedback
    vertex set) and have no size budget; larger c falls back to subset
    enumeration per component after pruning degree <= 1 vertices.
    """
    if c < 1:
        raise PreconditionError("c must be >= 1")
    out = set()
    for comp in components(g):
        sub = g.induced(comp)
        if not has_theta_c(sub, c, n_max):
            continue
        if c == 1:
            adj = {v: set(sub.neighbors(v)) for v in sub.vertices}
            k = 1
            while (res := _vc_branch(adj, k)) is None:
                k += 1
        elif c == 2:
            adj = {v: {u: min(2, m) for u, m in sub.adjacency(v).items()} for v in sub.vertices}
            k = 1
            while (res := _fvs_branch(adj, k)) is None:
                k += 1
        else:
            res = brute_force_hitting_set(prune_low_degree(sub), c, n_max)
        out |= set(res)
    return frozenset(out)


def hitting_number(g: Multigraph, c: int, n_max: int = N_MAX) -> int:
    return len(exact_hitting_set(g, c, n_max))


# ---------------------------------------------------------------------------
# dynamic programming on nice tree decompositions (c in {1, 2})

def _merge_forest(groups, edges_to_add):
    """Union-find merge; returns the new partition or None on a cycle."""
    parent = {}
    for grp in groups:
        items = list(grp)
        for x in items:
            parent[x] = items[0]

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges_to_add:
        ra, rb = find(a), find(b)
        if ra == rb:
            return None
        parent[ra] = rb
    out = {}
    for x in parent:
        out.setdefault(find(x), set()).add(x)
    return frozenset(frozenset(s) for s in out.values())


def _better(a, b) -> bool:
    if a[0] != b[0]:
        return a[0] < b[0]
    return sorted(vertex_key(x) for x in a[1]) < sorted(vertex_key(x) for x in b[1])


def dp_tables(g: Multigraph, ntd, c: int) -> dict:
    """Run the hitting-set DP; return the table of the root node.

    Table maps a bag state to ``(deletions, deleted_set)``.  For c = 1 a
    state is the frozenset of bag vertices in the cover; for c = 2 it is
    ``(deleted, partition)`` where ``partition`` groups the kept bag
    vertices by forest component.  Edges are charged when their first
    endpoint is forgotten, so edges between two root-bag vertices are not
    charged at all.
    """
    if c not in (1, 2):
        raise PreconditionError("DP only for c <= 2")
    tables = {}
    for t in ntd.postorder():
        kind = ntd.kind[t]
        bag = ntd.bags[t]
        chs = ntd.children[t]
        new = {}

        def put(state, val):
            old = new.get(state)
            if old is None or _better(val, old):
                new[state] = val

        if kind == "base":
            put(frozenset() if c == 1 else (frozenset(), frozenset()), (0, frozenset()))
        elif kind == "introduce":
            (v,) = bag - ntd.bags[chs[0]]
            for state, (cost, chosen) in tables[chs[0]].items():
                if c == 1:
                    put(state | {v}, (cost + 1, chosen | {v}))
                    put(state, (cost, chosen))
                else:
                    D, P = state
                    put((D | {v}, P), (cost + 1, chosen | {v}))
                    put((D, P | {frozenset([v])}), (cost, chosen))
        elif kind == "forget":
            child_bag = ntd.bags[chs[0]]
            (v,) = child_bag - bag
            nbrs = [(u, g.mult(v, u)) for u in child_bag if u != v and g.mult(v, u)]
            for state, val in tables[chs[0]].items():
                if c == 1:
                    if v in state:
                        put(state - {v}, val)
                    elif all(u in state for u, _ in nbrs):
                        put(state, val)
                else:
                    D, P = state
                    if v in D:
                        put((D - {v}, P), val)
                        continue
                    es = [(v, u) for u, m in nbrs if u not in D for _ in range(m)]
                    merged = _merge_forest(P, es)
                    if merged is None:
                        continue
                    P2 = frozenset(s - {v} for s in merged if s - {v})
                    put((D, P2), val)
        elif kind == "join":
            t1, t2 = tables[chs[0]], tables[chs[1]]
            for s1, (c1, ch1) in t1.items():
                D1 = s1 if c == 1 else s1[0]
                for s2, (c2, ch2) in t2.items():
                    D2 = s2 if c == 1 else s2[0]
                    if D1 != D2:
                        continue
                    val = (c1 + c2 - len(D1), ch1 | ch2)
                    if c == 1:
                        put(s1, val)
                    else:
                        es = []
                        for grp in s2[1]:
                            items = sorted_vertices(grp)
                            es += list(zip(items, items[1:]))
                        merged = _merge_forest(s1[1], es)
                        if merged is not None:
                            put((D1, merged), val)
        else:
            raise PreconditionError(f"unknown node kind {kind!r}")
        tables[t] = new
        for ch in chs:
            del tables[ch]
    return tables[ntd.root]


def exact_hitting_set_td(g: Multigraph, ntd, c: int) -> frozenset:
    """Minimum hitting set by DP over a nice decomposition (c in {1, 2})."""
    if c not in (1, 2):
        raise PreconditionError("DP only for c <= 2")
    if ntd.bags[ntd.root]:
        raise PreconditionError("root bag must be empty")
    table = dp_tables(g, ntd, c)
    best = None
    for val in table.values():
        if best is None or _better(val, best):
            best = val
    return frozenset(best[1])


# ---------------------------------------------------------------------------
# claw-type freeness

def _has_independent(adj: dict, vs: list, t: int) -> bool:
    if t <= 0:
        return True
    if len(vs) < t:
        return False
    v, rest = vs[0], vs[1:]
    if _has_independent(adj, [x for x in rest if x not in adj[v]], t - 1):
        return True
    return _has_independent(adj, rest, t)


def is_k1t_free(g: Multigraph, t: int, deg_max: int = DEG_MAX) -> bool:
    """No vertex has ``t`` pairwise non-adjacent neighbours."""
    if t < 1:
        raise PreconditionError("t must be >= 1")
    for v in sorted_vertices(g.vertices):
        nb = sorted_vertices(g.neighbors(v))
        if len(nb) < t:
            continue
        if len(nb) > deg_max:
            raise BudgetExceeded("independence check budget exceeded")
        adj = {x: g.neighbors(x) for x in nb}
        if _has_independent(adj, nb, t):
            return False
    return True


def find_induced_star(g: Multigraph, t: int, deg_max: int = DEG_MAX):
    """A witness ``(center, leaves)`` of an induced K_{1,t}, or ``None``."""
    for v in sorted_vertices(g.vertices):
        nb = sorted_vertices(g.neighbors(v))
        if len(nb) < t:
            continue
        if len(nb) > deg_max:
            raise BudgetExceeded("independence check budget exceeded")
        for leaves in combinations(nb, t):
            if all(g.mult(a, b) == 0 for a, b in combinations(leaves, 2)):
                return v, leaves
    return None
