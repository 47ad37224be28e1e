"""Tree decompositions: validation, heuristic construction, exact small-width
decisions, and conversion to nice form."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .errors import PreconditionError
from .graph import Multigraph, sorted_vertices, vertex_key

W_MAX = 4


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: object

    def __str__(self):
        return f"{self.axiom}: {self.witness!r}"


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags over an undirected tree.  ``edges`` are pairs of node ids."""

    bags: dict
    edges: tuple = ()

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def adjacency(self) -> dict:
        adj = {t: [] for t in self.bags}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def validate(td: TreeDecomposition, g: Multigraph) -> Optional[Violation]:
    """Return the first violated decomposition axiom, or ``None`` if valid."""
    nodes = list(td.bags)
    if not nodes:
        return None if g.n == 0 else Violation("vertex coverage", sorted_vertices(g.vertices)[0])
    adj = {t: [] for t in nodes}
    for a, b in td.edges:
        if a not in adj or b not in adj:
            return Violation("tree", (a, b))
        adj[a].append(b)
        adj[b].append(a)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != len(nodes) or len(td.edges) != len(nodes) - 1:
        return Violation("tree", "decomposition graph is not a tree")
    covered = set().union(*td.bags.values())
    if covered - g.vertices:
        return Violation("bag vertex not in graph", sorted_vertices(covered - g.vertices)[0])
    if g.vertices - covered:
        return Violation("vertex coverage", sorted_vertices(g.vertices - covered)[0])
    for u, v, _ in g.pairs():
        if not any(u in b and v in b for b in td.bags.values()):
            return Violation("edge coverage", (u, v))
    for v in sorted_vertices(g.vertices):
        holding = {t for t in nodes if v in td.bags[t]}
        start = next(iter(holding))
        reach = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in holding and y not in reach:
                    reach.add(y)
                    stack.append(y)
        if reach != holding:
            return Violation("connectedness", v)
    return None


# ---------------------------------------------------------------------------
# elimination orderings

def _simple_adj(g: Multigraph) -> dict:
    return {v: set(g.neighbors(v)) for v in g.vertices}


def _eliminate(adj: dict, v) -> None:
    nb = adj.pop(v)
    for x in nb:
        adj[x].discard(v)
        adj[x] |= nb - {x}


def _fill_in(adj, v) -> int:
    nb = list(adj[v])
    missing = 0
    for i, x in enumerate(nb):
        ax = adj[x]
        for y in nb[i + 1:]:
            if y not in ax:
                missing += 1
    return missing


def td_from_order(g: Multigraph, order) -> TreeDecomposition:
    """Decomposition induced by an elimination ordering of all of V(g)."""
    order = list(order)
    if set(order) != set(g.vertices) or len(order) != g.n:
        raise PreconditionError("order must list every vertex once")
    if not order:
        return TreeDecomposition({0: frozenset()}, ())
    pos = {v: i for i, v in enumerate(order)}
    adj = _simple_adj(g)
    bags = {}
    parent = {}
    for i, v in enumerate(order):
        later = adj[v]
        bags[i] = frozenset(later | {v})
        if later:
            parent[i] = min(pos[x] for x in later)
        _eliminate(adj, v)
    edges = [(i, p) for i, p in parent.items()]
    roots = [i for i in range(len(order)) if i not in parent]
    edges += [(a, b) for a, b in zip(roots, roots[1:])]
    return TreeDecomposition(bags, tuple(edges))


def elimination_order(g: Multigraph, method: str = "min_fill", seed: Optional[int] = None) -> list:
    adj = _simple_adj(g)
    rng = random.Random(seed) if seed is not None else None
    order = []
    while adj:
        best = None
        for v in adj:
            if method == "min_fill":
                score = (_fill_in(adj, v), len(adj[v]))
            elif method == "min_degree":
                score = (len(adj[v]), _fill_in(adj, v))
            else:
                raise PreconditionError(f"unknown heuristic {method!r}")
            tie = rng.random() if rng else vertex_key(v)
            if best is None or (score, tie) < best[0]:
                best = ((score, tie), v)
        v = best[1]
        order.append(v)
        _eliminate(adj, v)
    return order


def build_heuristic(g: Multigraph, method: str = "min_fill", seed: Optional[int] = None) -> TreeDecomposition:
    """Greedy elimination decomposition; ties broken by vertex id (or ``seed``)."""
    return td_from_order(g, elimination_order(g, method, seed))


def treewidth_lower_bound(g: Multigraph) -> int:
    """Contraction degeneracy bound: repeatedly contract a minimum-degree
    vertex into its least-degree neighbour; the largest minimum degree seen
    bounds the treewidth from below."""
    adj = _simple_adj(g)
    best = -1 if not adj else 0
    while len(adj) > 1:
        v = min(adj, key=lambda x: (len(adj[x]), vertex_key(x)))
        best = max(best, len(adj[v]))
        if not adj[v]:
            del adj[v]
            continue
        u = min(adj[v], key=lambda x: (len(adj[x]), vertex_key(x)))
        nb = adj.pop(v)
        for x in nb:
            adj[x].discard(v)
        for x in nb - {u}:
            adj[u].add(x)
            adj[x].add(u)
    return best


def _is_clique(adj, vs) -> bool:
    vs = list(vs)
    return all(y in adj[x] for i, x in enumerate(vs) for y in vs[i + 1:])


def _safe_reduce(adj: dict, w: int, order: list) -> bool:
    """Eliminate vertices whose removal cannot change the answer to tw <= w.

    Simplicial and almost-simplicial vertices of degree <= w qualify.
    Returns False if a vertex of degree > w with a clique neighbourhood
    shows the width bound is violated.
    """
    changed = True
    while changed:
        changed = False
        for v in sorted_vertices(adj):
            d = len(adj[v])
            nb = adj[v]
            if _is_clique(adj, nb):
                if d > w:
                    return False
            elif d <= w:
                ok = any(_is_clique(adj, nb - {x}) for x in nb)
                if not ok:
                    continue
            else:
                continue
            order.append(v)
            _eliminate(adj, v)
            changed = True
            break
    return True


def _order_at_most(adj: dict, w: int, memo: set, counter: list) -> Optional[list]:
    order: list = []
    adj = {v: set(nb) for v, nb in adj.items()}
    if not _safe_reduce(adj, w, order):
        return None
    if len(adj) <= w + 1:
        return order + sorted_vertices(adj)
    key = frozenset(adj)
    if key in memo:
        return None
    counter[0] += 1
    if min(len(nb) for nb in adj.values()) > w or treewidth_lower_bound(
            Multigraph(adj, [(u, v) for u in adj for v in adj[u]])) > w:
        memo.add(key)
        return None
    cands = sorted((v for v in adj if len(adj[v]) <= w), key=lambda v: (_fill_in(adj, v), len(adj[v]), vertex_key(v)))
    for v in cands:
        nxt = {x: set(nb) for x, nb in adj.items()}
        _eliminate(nxt, v)
        rest = _order_at_most(nxt, w, memo, counter)
        if rest is not None:
            return order + [v] + rest
    memo.add(key)
    return None


def exact_order_at_most(g: Multigraph, w: int) -> Optional[list]:
    """An elimination order of width <= w, or ``None`` if tw(g) > w."""
    if g.n == 0:
        return []
    if w < 0:
        return None
    from .graph import components

    order = []
    for comp in components(g):
        adj = _simple_adj(g.induced(comp))
        sub = _order_at_most(adj, w, set(), [0])
        if sub is None:
            return None
        order += sub
    return order


def decide_width_at_most(g: Multigraph, w: int, w_max: int = W_MAX):
    """Exact test of tw(g) <= w; returns a nice decomposition or ``None``."""
    if w > w_max:
        raise PreconditionError("exact width check out of configured range")
    order = exact_order_at_most(g, w)
    if order is None:
        return None
    return make_nice(td_from_order(g, order), g)


def treewidth_exact(g: Multigraph, w_max: int = W_MAX) -> Optional[int]:
    """Exact treewidth if it is at most ``w_max`` (empty graph: -1), else ``None``."""
    if g.n == 0:
        return -1
    for w in range(0, w_max + 1):
        if exact_order_at_most(g, w) is not None:
            return w
    return None


# ---------------------------------------------------------------------------
# nice decompositions

@dataclass
class NiceTreeDecomposition:
    """Rooted binary decomposition with base/introduce/forget/join nodes."""

    root: int
    bags: dict
    children: dict
    kind: dict
    _below: dict = field(default=None, repr=False, compare=False)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    @property
    def nodes(self):
        return list(self.bags)

    def parent_map(self) -> dict:
        return {ch: t for t, chs in self.children.items() for ch in chs}

    def postorder(self) -> list:
        out = []
        stack = [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                out.append(t)
                continue
            stack.append((t, True))
            for ch in reversed(self.children[t]):
                stack.append((ch, False))
        return out

    def vertices_below(self, t) -> frozenset:
        """Union of bags over ``t`` and its descendants, i.e. V(G_t)."""
        if self._below is None:
            below = {}
            for s in self.postorder():
                acc = set(self.bags[s])
                for ch in self.children[s]:
                    acc |= below[ch]
                below[s] = frozenset(acc)
            self._below = below
        if t not in self.bags:
            raise PreconditionError(f"unknown node {t!r}")
        return self._below[t]

    def forgotten_below(self, t) -> frozenset:
        """V(H_t): vertices below ``t`` that are not in its bag."""
        return self.vertices_below(t) - self.bags[t]

    def as_tree_decomposition(self) -> TreeDecomposition:
        edges = tuple((t, ch) for t, chs in self.children.items() for ch in chs)
        return TreeDecomposition(dict(self.bags), edges)


def validate_nice(ntd: NiceTreeDecomposition, g: Multigraph, keep: frozenset = frozenset()) -> Optional[Violation]:
    v = validate(ntd.as_tree_decomposition(), g)
    if v is not None:
        return v
    if ntd.bags[ntd.root] != keep:
        return Violation("root bag", ntd.bags[ntd.root])
    for t in ntd.postorder():
        chs = ntd.children[t]
        b = ntd.bags[t]
        k = ntd.kind[t]
        if k == "base":
            if chs or b:
                return Violation("base node", t)
            if t == ntd.root and len(ntd.bags) > 1:
                return Violation("base node is root", t)
        elif k == "introduce":
            if len(chs) != 1 or not (ntd.bags[chs[0]] < b) or len(b) != len(ntd.bags[chs[0]]) + 1:
                return Violation("introduce node", t)
        elif k == "forget":
            if len(chs) != 1 or not (b < ntd.bags[chs[0]]) or len(b) != len(ntd.bags[chs[0]]) - 1:
                return Violation("forget node", t)
        elif k == "join":
            if len(chs) != 2 or any(ntd.bags[c] != b for c in chs):
                return Violation("join node", t)
        else:
            return Violation("unknown node kind", t)
    if not keep and len(ntd.bags) > 1 and ntd.kind[ntd.root] not in ("forget", "join"):
        return Violation("root kind", ntd.kind[ntd.root])
    return None


def make_nice(td: TreeDecomposition, g: Multigraph, keep=frozenset()) -> NiceTreeDecomposition:
    """Convert a valid decomposition to nice form with the same width.

    ``keep`` (default empty) becomes the root bag; it must lie inside a
    single bag of ``td``.  Only internal callers need a nonempty root.
    """
    bad = validate(td, g)
    if bad is not None:
        raise PreconditionError(f"invalid tree decomposition: {bad}")
    keep = frozenset(keep)
    if not td.bags and not keep:
        return NiceTreeDecomposition(0, {0: frozenset()}, {0: ()}, {0: "base"})
    adj = td.adjacency()
    cands = [t for t in adj if keep <= td.bags[t]]
    if not cands:
        raise PreconditionError("no bag contains the requested root set")
    root_td = min(cands, key=vertex_key)

    bags, children, kind = {}, {}, {}

    def new(k, bag, chs=()):
        t = len(bags)
        bags[t] = frozenset(bag)
        children[t] = tuple(chs)
        kind[t] = k
        return t

    def chain(top, cur_bag, target):
        for v in sorted_vertices(cur_bag - target):
            cur_bag = cur_bag - {v}
            top = new("forget", cur_bag, (top,))
        for v in sorted_vertices(target - cur_bag):
            cur_bag = cur_bag | {v}
            top = new("introduce", cur_bag, (top,))
        return top

    parent = {root_td: None}
    order = [root_td]
    for t in order:
        for s in sorted(adj[t], key=vertex_key):
            if s not in parent:
                parent[s] = t
                order.append(s)
    top_of = {}
    for t in reversed(order):
        b = td.bags[t]
        kids = [s for s in sorted(adj[t], key=vertex_key) if parent.get(s) == t and parent[t] != s]
        tops = [chain(top_of[s], td.bags[s], b) for s in kids]
        if not tops:
            tops = [chain(new("base", ()), frozenset(), b)]
        cur = tops[0]
        for other in tops[1:]:
            cur = new("join", b, (cur, other))
        top_of[t] = cur
    root = chain(top_of[root_td], td.bags[root_td], keep)
    return NiceTreeDecomposition(root, bags, children, kind)


def subtree_graphs(ntd: NiceTreeDecomposition, g: Multigraph, t):
    """``(G_t, H_t)``: graph induced below ``t``, and that graph minus X_t."""
    below = ntd.vertices_below(t)
    return g.induced(below), g.induced(below - ntd.bags[t])


def nice_decomposition(g: Multigraph, exact_up_to: int = 2, keep=frozenset()) -> NiceTreeDecomposition:
    """Convenience: exact small-width decomposition if tw <= ``exact_up_to``,
    otherwise the min-fill heuristic."""
    for w in range(0, exact_up_to + 1):
        order = exact_order_at_most(g, w)
        if order is not None:
            td = td_from_order(g, order)
            break
    else:
        td = build_heuristic(g)
    if keep:
        td = TreeDecomposition({t: b | keep for t, b in td.bags.items()}, td.edges)
    return make_nice(td, g, keep)
