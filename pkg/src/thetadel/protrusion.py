"""Protrusions: finding them next to a modulator and replacing them.

Replacement works for c in {1, 2}.  Each boundaried graph gets an explicit
signature (a table over boundary states) and is swapped for the smallest
boundaried graph with the same table, found by enumeration.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from itertools import combinations, product
from pathlib import Path
from typing import Optional

import networkx as nx

from .errors import BudgetExceeded, PreconditionError
from .graph import (BoundariedGraph, Instance, Multigraph, RuleApplication,
                    boundary_of, components, neighborhood, sorted_vertices,
                    vertex_key)
from .minors import _merge_forest, dp_tables, is_k1t_free
from .treedecomp import (W_MAX, TreeDecomposition, build_heuristic,
                         decide_width_at_most, nice_decomposition)

CACHE_ENV = "THETADEL_CACHE_DIR"
CACHE_VERSION = 1
SEARCH_BUDGET = 60000


# ---------------------------------------------------------------------------
# finding

@dataclass(frozen=True)
class ProtrusionWitness:
    """``X`` with |∂(X)| <= r and a width <= r decomposition of G[X]."""

    X: frozenset
    r: int
    boundary: frozenset
    decomposition: TreeDecomposition = field(compare=False)


def _subdivided(td: TreeDecomposition, root) -> tuple:
    """Subdivide every tree edge with a node holding the bag intersection.

    Returns ``(bags, parent, order)`` in BFS order with ``parent[root] is None``.  After this,
    two original nodes are never adjacent, which is what makes every marked
    node touch an unmarked one.
    """
    adj = td.adjacency()
    bags = dict(td.bags)
    parent = {root: None}
    order = [root]
    for x in order:
        for y in sorted(adj.get(x, ()), key=vertex_key):
            if y in parent:
                continue
            mid = ("mid", x, y)
            bags[mid] = td.bags[x] & td.bags[y]
            parent[mid] = x
            parent[y] = mid
            order += [mid, y]
    return bags, parent, order


def protrusion_candidates(g: Multigraph, X, d: int) -> list:
    """All pieces produced by the marking procedure, largest first."""
    X = frozenset(X)
    if not X <= g.vertices:
        raise PreconditionError("X is not a subset of V(g)")
    R = g.vertices - X
    if not R:
        return []
    rest = g.induced(R)
    ntd = decide_width_at_most(rest, d) if d <= W_MAX else None
    if ntd is not None:
        td = ntd.as_tree_decomposition()
        root = ntd.root
    else:
        td = build_heuristic(rest)
        if td.width > d:
            raise PreconditionError(f"no decomposition of width <= {d} for g - X")
        root = sorted(td.bags, key=vertex_key)[0]
    bags, parent, order = _subdivided(td, root)
    depth = {}
    for x in order:
        depth[x] = 0 if parent[x] is None else depth[parent[x]] + 1

    S = neighborhood(g, X) if X else frozenset()
    marked = set()
    for s in sorted_vertices(S):
        top = min((t for t in order if s in bags[t]), key=lambda t: depth[t])
        marked.add(top)

    pre = {x: i for i, x in enumerate(_preorder(order, parent))}

    def lca(a, b):
        while depth[a] > depth[b]:
            a = parent[a]
        while depth[b] > depth[a]:
            b = parent[b]
        while a != b:
            a, b = parent[a], parent[b]
        return a

    seq = sorted(marked, key=pre.__getitem__)
    for a, b in zip(seq, seq[1:]):
        marked.add(lca(a, b))

    nbrs = {x: set() for x in order}
    for x in order:
        if parent[x] is not None:
            nbrs[x].add(parent[x])
            nbrs[parent[x]].add(x)
    seen = set(marked)
    pieces = []
    for x in order:
        if x in seen:
            continue
        comp, stack = [], [x]
        seen.add(x)
        while stack:
            y = stack.pop()
            comp.append(y)
            for z in nbrs[y]:
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        cset = set(comp)
        touch = {z for y in comp for z in nbrs[y] if z in marked}
        nodes = cset | touch
        P = frozenset().union(*(bags[y] for y in nodes))
        if not P:
            continue
        sub_bags = {y: bags[y] & P for y in nodes}
        sub_edges = tuple((y, parent[y]) for y in nodes if parent[y] in nodes)
        dec = TreeDecomposition(sub_bags, sub_edges)
        pieces.append(ProtrusionWitness(P, 2 * (d + 1), boundary_of(g, P), dec))
    pieces.sort(key=lambda w: (-len(w.X), sorted(vertex_key(v) for v in w.X)))
    return pieces


def _preorder(order, parent):
    kids = {x: [] for x in order}
    for x in order:
        if parent[x] is not None:
            kids[parent[x]].append(x)
    root = order[0]
    out, stack = [], [root]
    while stack:
        x = stack.pop()
        out.append(x)
        stack.extend(reversed(kids[x]))
    return out


def find_protrusion(g: Multigraph, X, d: int) -> Optional[ProtrusionWitness]:
    """Largest 2(d+1)-protrusion produced by marking around N(X) in g - X."""
    pieces = protrusion_candidates(g, X, d)
    return pieces[0] if pieces else None


def protrusion_size_bound(g: Multigraph, X) -> float:
    X = frozenset(X)
    S = neighborhood(g, X) if X else frozenset()
    return (g.n - len(X)) / (4 * len(S) + 1)


# ---------------------------------------------------------------------------
# signatures

def set_partitions(items: list):
    """All set partitions of ``items`` as frozensets of frozensets."""
    items = list(items)
    if not items:
        yield frozenset()
        return
    first, rest = items[0], items[1:]
    for p in set_partitions(rest):
        groups = list(p)
        yield frozenset(groups + [frozenset([first])])
        for i, grp in enumerate(groups):
            yield frozenset(groups[:i] + [grp | {first}] + groups[i + 1:])


def _refines(fine, coarse) -> bool:
    return all(any(a <= b for b in coarse) for a in fine)


def _canon_state(c: int, D, P=None) -> tuple:
    if c == 1:
        return tuple(sorted(D))
    return (tuple(sorted(D)), tuple(sorted(tuple(sorted(grp)) for grp in P)))


@dataclass(frozen=True)
class Signature:
    """Normalized boundary-state table of a boundaried graph.

    ``table`` lists ``(state, cost)`` with minimum cost 0 and infeasible
    states omitted; states use boundary labels 1..t.  ``boundary_edges``
    lists ``(i, j, m)`` for terminal pairs, which are not part of the
    table.  ``offset`` is excluded from equality.
    """

    c: int
    t: int
    boundary_edges: tuple
    table: tuple
    offset: int = field(default=0, compare=False)

    def as_dict(self) -> dict:
        return dict(self.table)

    def key(self) -> str:
        return json.dumps([self.c, self.t, self.boundary_edges, self.table])


def _strip(bg: BoundariedGraph, c: int) -> tuple:
    lab = {v: i + 1 for i, v in enumerate(bg.boundary)}
    bset = set(bg.boundary)
    bedges = []
    changes = []
    for u, v, m in bg.graph.pairs():
        if u in bset and v in bset:
            i, j = sorted((lab[u], lab[v]))
            bedges.append((i, j, min(m, c)))
            changes.append((u, v, 0))
    g = bg.graph.with_edges(changes) if changes else bg.graph
    return g, lab, tuple(sorted(bedges))


def _terminal_feasible(c: int, state: tuple, bedges: tuple) -> bool:
    """Whether the terminal edges alone are compatible with ``state``."""
    if c == 1:
        return all(i in state or j in state for i, j, _ in bedges)
    D, P = state
    es = [(i, j) for i, j, m in bedges if i not in D and j not in D for _ in range(m)]
    return _merge_forest([frozenset(g) for g in P], es) is not None


def _finish(c: int, t: int, bedges: tuple, exact: dict) -> Signature:
    """Turn exact-state costs into a normalized (refinement-closed) signature."""
    labels = list(range(1, t + 1))
    if c == 2:
        closed = {}
        for r in range(t + 1):
            for D in combinations(labels, r):
                D = frozenset(D)
                for P in set_partitions([x for x in labels if x not in D]):
                    best = None
                    for (D2, P2), val in exact.items():
                        if D2 == D and _refines(P2, P) and (best is None or val < best):
                            best = val
                    if best is not None:
                        closed[_canon_state(2, D, P)] = best
    else:
        closed = {_canon_state(1, D): val for D, val in exact.items()}
    closed = {s: v for s, v in closed.items() if _terminal_feasible(c, s, bedges)}
    if not closed:
        raise AssertionError("no feasible boundary state")
    off = min(closed.values())
    table = tuple(sorted((s, v - off) for s, v in closed.items()))
    return Signature(c, t, bedges, table, off)


def signature(bg: BoundariedGraph, c: int) -> Signature:
    """Signature by dynamic programming over a decomposition keeping ∂ in every bag."""
    if c not in (1, 2):
        raise PreconditionError("signatures are implemented for c in {1, 2}")
    g, lab, bedges = _strip(bg, c)
    keep = frozenset(bg.boundary)
    ntd = nice_decomposition(g, keep=keep)
    root = dp_tables(g, ntd, c)
    exact = {}
    for state, (cost, _) in root.items():
        if c == 1:
            D = frozenset(lab[v] for v in state)
            key = D
            val = cost - len(state)
        else:
            Dv, Pv = state
            D = frozenset(lab[v] for v in Dv)
            P = frozenset(frozenset(lab[v] for v in grp) for grp in Pv)
            key = (D, P)
            val = cost - len(Dv)
        if key not in exact or val < exact[key]:
            exact[key] = val
    return _finish(c, bg.t, bedges, exact)


def signature_bruteforce(bg: BoundariedGraph, c: int) -> Signature:
    """Same table as :func:`signature`, by enumerating interior deletion sets."""
    if c not in (1, 2):
        raise PreconditionError("signatures are implemented for c in {1, 2}")
    g, lab, bedges = _strip(bg, c)
    B = list(bg.boundary)
    inner = sorted_vertices(bg.interior())
    exact = {}
    for r in range(len(B) + 1):
        for Dv in combinations(B, r):
            for s in range(len(inner) + 1):
                for Y in combinations(inner, s):
                    h = g.remove_vertices(set(Dv) | set(Y))
                    if c == 1:
                        if h.m:
                            continue
                        key = frozenset(lab[v] for v in Dv)
                    else:
                        es = [(u, v) for u, v, m in h.pairs() for _ in range(m)]
                        P = _merge_forest([frozenset([x]) for x in h.vertices], es)
                        if P is None:
                            continue
                        kept = set(B) - set(Dv)
                        groups = frozenset(frozenset(lab[x] for x in grp if x in kept) for grp in P)
                        groups = frozenset(grp for grp in groups if grp)
                        key = (frozenset(lab[v] for v in Dv), groups)
                    if key not in exact or s < exact[key]:
                        exact[key] = s
    return _finish(c, bg.t, bedges, exact)


# ---------------------------------------------------------------------------
# representatives

def _cache_path() -> Optional[Path]:
    d = os.environ.get(CACHE_ENV)
    if not d:
        return None
    return Path(d) / f"representatives-v{CACHE_VERSION}.json"


class RepresentativeCache:
    """Maps ``(c, t, k1t, signature key)`` to the smallest known representative.

    A representative is stored as ``[j, [[u, v, m], ...]]`` where vertices
    ``1..t`` are terminals and ``t+1..t+j`` interior.  When the cache
    directory variable is set the table is mirrored to a JSON file.
    """

    def __init__(self, path: Optional[Path] = None):
        self.path = path if path is not None else _cache_path()
        self.reps: dict = {}
        self.done: set = set()
        if self.path is not None and self.path.exists():
            data = json.loads(self.path.read_text())
            if data.get("version") == CACHE_VERSION:
                self.reps = {k: tuple(v) for k, v in data["reps"].items()}
                self.done = {tuple(x) for x in data["done"]}

    def save(self) -> None:
        if self.path is None:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        doc = {"version": CACHE_VERSION, "reps": self.reps, "done": sorted(self.done)}
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc))
        tmp.replace(self.path)

    @staticmethod
    def _slot(c, t, k1t, sig_key) -> str:
        return json.dumps([c, t, k1t, sig_key])

    def _fill(self, c: int, t: int, j: int, k1t: Optional[int], budget: int) -> None:
        tag = (c, t, j, k1t or 0)
        if tag in self.done:
            return
        terms = list(range(1, t + 1))
        inner = list(range(t + 1, t + j + 1))
        pairs = [(u, v) for v in inner for u in terms] + list(combinations(inner, 2))
        total = (c + 1) ** len(pairs)
        if total > budget:
            raise BudgetExceeded("replacement cache miss beyond budget")
        mins = 2 if c == 2 else 1
        for mults in product(range(c + 1), repeat=len(pairs)):
            deg = dict.fromkeys(inner, 0)
            for (u, v), m in zip(pairs, mults):
                if m:
                    if u in deg:
                        deg[u] += m
                    deg[v] += m
            if any(x < mins for x in deg.values()):
                continue
            es = [(u, v, m) for (u, v), m in zip(pairs, mults) if m]
            g = Multigraph(terms + inner, es)
            if k1t and not is_k1t_free(g, k1t):
                continue
            sig = signature_bruteforce(BoundariedGraph(g, tuple(terms)), c)
            slot = self._slot(c, t, k1t or 0, sig.key())
            cand = (j, [list(e) for e in es])
            old = self.reps.get(slot)
            if old is None or (old[0], _edge_total(old[1])) > (j, _edge_total(es)):
                self.reps[slot] = cand
        self.done.add(tag)

    def lookup(self, sig: Signature, k1t: Optional[int] = None, max_interior: Optional[int] = None,
               budget: int = SEARCH_BUDGET):
        """Smallest representative as ``(graph, terminals)`` or raise on a miss."""
        if sig.boundary_edges:
            raise PreconditionError("representatives are searched without terminal edges")
        slot = self._slot(sig.c, sig.t, k1t or 0, sig.key())
        limit = max_interior if max_interior is not None else 3
        for j in range(limit + 1):
            if slot in self.reps and self.reps[slot][0] <= j:
                break
            grew = (sig.c, sig.t, j, k1t or 0) not in self.done
            self._fill(sig.c, sig.t, j, k1t, budget)
            if grew:
                self.save()
        if slot not in self.reps:
            raise BudgetExceeded("replacement cache miss beyond budget")
        nj, es = self.reps[slot]
        terms = list(range(1, sig.t + 1))
        g = Multigraph(terms + list(range(sig.t + 1, sig.t + nj + 1)), [tuple(e) for e in es])
        return BoundariedGraph(g, tuple(terms))


def _edge_total(es) -> int:
    return sum(e[2] for e in es)


_DEFAULT_CACHE: Optional[RepresentativeCache] = None


def default_cache() -> RepresentativeCache:
    global _DEFAULT_CACHE
    if _DEFAULT_CACHE is None or _DEFAULT_CACHE.path != _cache_path():
        _DEFAULT_CACHE = RepresentativeCache()
    return _DEFAULT_CACHE


def gamma_impl(r: int) -> int:
    """Minimum protrusion size before replacement is attempted."""
    return 2 * r + 3


# ---------------------------------------------------------------------------
# replacement

def _fresh_ids(g: Multigraph, j: int) -> list:
    ints = [v for v in g.vertices if isinstance(v, int) and not isinstance(v, bool)]
    start = max(ints, default=-1) + 1
    return list(range(start, start + j))


def replace_protrusion(inst: Instance, w: ProtrusionWitness, gamma: Optional[int] = None,
                       cache: Optional[RepresentativeCache] = None,
                       k1t: Optional[int] = None) -> Instance:
    """Swap G[X] for the smallest boundaried graph with the same signature.

    Returns the instance unchanged when |X| is below ``gamma`` or no
    strictly smaller representative exists.
    """
    c = inst.c
    if c not in (1, 2):
        raise PreconditionError("protrusion replacement needs c in {1, 2}")
    g = inst.graph
    X = frozenset(w.X)
    if not X <= g.vertices:
        raise PreconditionError("protrusion is not inside the graph")
    bnd = boundary_of(g, X)
    terms = tuple(sorted_vertices(bnd))
    r = len(terms)
    threshold = gamma_impl(r) if gamma is None else gamma
    if len(X) < threshold:
        return inst
    sig = signature(BoundariedGraph(g.induced(X), terms), c)
    if sig.boundary_edges:
        sig = Signature(c, sig.t, (), sig.table, sig.offset)
    cache = cache if cache is not None else default_cache()
    rep = cache.lookup(sig, k1t=k1t)
    if rep.graph.n >= len(X):
        return inst
    rep_sig = signature_bruteforce(rep, c)
    assert rep_sig == sig
    interior = sorted_vertices(rep.interior())
    fresh = _fresh_ids(g.remove_vertices(X - bnd), len(interior))
    ren = dict(zip(rep.boundary, terms))
    ren.update(zip(interior, fresh))
    edges = tuple((ren[u], ren[v], m) for u, v, m in rep.graph.pairs())
    delta = rep_sig.offset - sig.offset
    rec = RuleApplication("protrusion", removed=tuple(sorted_vertices(X - bnd)), added=tuple(fresh),
                          edges=edges, k_delta=delta,
                          note=f"|X|={len(X)} r={r} -> {rep.graph.n} vertices",
                          data={"boundary": terms, "offset": sig.offset})
    return inst.apply(rec)


def component_protrusions(g: Multigraph, w_max: int = 2) -> list:
    """Connected components of treewidth <= ``w_max`` as boundary-free protrusions."""
    out = []
    for comp in components(g):
        sub = g.induced(comp)
        ntd = decide_width_at_most(sub, w_max)
        if ntd is not None:
            out.append(ProtrusionWitness(comp, w_max, frozenset(), ntd.as_tree_decomposition()))
    return out


def pendant_protrusions(g: Multigraph, w_max: int = 2) -> list:
    """1-protrusions at cut vertices, largest first.

    For a cut vertex v, the union of v with every component of g - v
    whose closure has treewidth <= ``w_max`` has boundary {v} (or is
    boundary-free when nothing else is left).
    """
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from((u, v) for u, v, _ in g.pairs())
    out = []
    for v in sorted_vertices(nx.articulation_points(G)):
        rest = g.remove_vertices([v])
        parts = [C for C in components(rest) if C & g.neighbors(v)]
        good = [C for C in parts if decide_width_at_most(g.induced(C | {v}), w_max) is not None]
        if not good or len(good) == len(parts):
            continue
        X = frozenset([v]).union(*good)
        ntd = decide_width_at_most(g.induced(X), w_max)
        if ntd is None:
            continue
        out.append(ProtrusionWitness(X, w_max, boundary_of(g, X), ntd.as_tree_decomposition()))
    out.sort(key=lambda w: (-len(w.X), sorted(vertex_key(v) for v in w.X)))
    return out
