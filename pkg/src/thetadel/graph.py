"""Undirected multigraphs and the records every reduction pass transforms.

Graphs are immutable values.  Every operation returns a new graph, so the
same object may be shared between passes or threads without copying.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Hashable, Iterable, Iterator, Mapping, Optional

from .errors import PreconditionError

Vertex = Hashable


def vertex_key(v):
    """Total order on heterogeneous vertex ids, used for every tie-break."""
    if isinstance(v, bool):
        return (1, repr(v))
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, tuple):
        return (2, tuple(vertex_key(x) for x in v))
    return (1, repr(v))


def sorted_vertices(vs: Iterable[Vertex]) -> list:
    return sorted(vs, key=vertex_key)


class Multigraph:
    """Undirected loopless multigraph with per-pair multiplicities.

    Parameters
    ----------
    vertices : iterable
        Vertex ids. Endpoints of ``edges`` are added automatically.
    edges : iterable or mapping
        Either ``(u, v)`` / ``(u, v, mult)`` tuples, where repeated pairs
        accumulate, or a mapping from pairs to multiplicities.
    cap : int, optional
        Multiplicities above ``cap`` are truncated to ``cap``.  For θ_c
        questions this is harmless when ``cap >= c``.
    """

    __slots__ = ("_adj", "cap", "_nedges")

    def __init__(self, vertices: Iterable[Vertex] = (), edges=(), cap: Optional[int] = None):
        adj: dict = {v: {} for v in vertices}
        items = edges.items() if isinstance(edges, Mapping) else edges
        for e in items:
            if isinstance(edges, Mapping):
                (u, v), m = e
            elif len(e) == 3:
                u, v, m = e
            else:
                (u, v), m = e, 1
            if m < 0:
                raise PreconditionError("negative multiplicity")
            adj.setdefault(u, {})
            adj.setdefault(v, {})
            if u == v or m == 0:
                continue
            adj[u][v] = adj[u].get(v, 0) + m
            adj[v][u] = adj[u][v]
        if cap is not None:
            if cap < 1:
                raise PreconditionError("cap must be >= 1")
            for u in adj:
                for v in adj[u]:
                    if adj[u][v] > cap:
                        adj[u][v] = cap
        self._adj = adj
        self.cap = cap
        self._nedges = None

    @classmethod
    def _wrap(cls, adj, cap):
        g = cls.__new__(cls)
        g._adj = adj
        g.cap = cap
        g._nedges = None
        return g

    # -- basic queries -------------------------------------------------
    @property
    def vertices(self) -> frozenset:
        return frozenset(self._adj)

    def __len__(self):
        return len(self._adj)

    def __contains__(self, v):
        return v in self._adj

    def __iter__(self) -> Iterator:
        return iter(self._adj)

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        """Number of edges counted with multiplicity."""
        if self._nedges is None:
            self._nedges = sum(sum(nb.values()) for nb in self._adj.values()) // 2
        return self._nedges

    def num_pairs(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def mult(self, u, v) -> int:
        return self._adj.get(u, {}).get(v, 0)

    def neighbors(self, v) -> frozenset:
        return frozenset(self._adj[v])

    def adjacency(self, v) -> Mapping:
        return MappingProxyType(self._adj[v])

    def degree(self, v) -> int:
        return sum(self._adj[v].values())

    def max_degree(self) -> int:
        return max((self.degree(v) for v in self._adj), default=0)

    def pairs(self) -> Iterator[tuple]:
        """Yield ``(u, v, mult)`` once per adjacent pair, in id order."""
        for u in sorted_vertices(self._adj):
            ku = vertex_key(u)
            for v in sorted_vertices(self._adj[u]):
                if vertex_key(v) > ku:
                    yield u, v, self._adj[u][v]

    def edge_list(self) -> list:
        return list(self.pairs())

    # -- derived graphs ------------------------------------------------
    def induced(self, S: Iterable[Vertex]) -> "Multigraph":
        S = set(S)
        missing = S - self._adj.keys()
        if missing:
            raise PreconditionError(f"vertices not in graph: {sorted_vertices(missing)}")
        adj = {u: {v: m for v, m in self._adj[u].items() if v in S} for u in S}
        return Multigraph._wrap(adj, self.cap)

    def remove_vertices(self, S: Iterable[Vertex]) -> "Multigraph":
        S = set(S)
        return self.induced(v for v in self._adj if v not in S)

    def add_vertices(self, S: Iterable[Vertex]) -> "Multigraph":
        adj = {u: dict(nb) for u, nb in self._adj.items()}
        for v in S:
            adj.setdefault(v, {})
        return Multigraph._wrap(adj, self.cap)

    def with_edges(self, changes: Iterable[tuple]) -> "Multigraph":
        """Set the multiplicity of each listed pair; 0 deletes the pair."""
        adj = {u: dict(nb) for u, nb in self._adj.items()}
        for u, v, m in changes:
            if u == v:
                raise PreconditionError("self-loops are not stored")
            if u not in adj or v not in adj:
                raise PreconditionError(f"edge endpoint missing: {(u, v)}")
            if self.cap is not None:
                m = min(m, self.cap)
            if m <= 0:
                adj[u].pop(v, None)
                adj[v].pop(u, None)
            else:
                adj[u][v] = m
                adj[v][u] = m
        return Multigraph._wrap(adj, self.cap)

    def with_cap(self, cap: Optional[int]) -> "Multigraph":
        return Multigraph(self._adj.keys(), {(u, v): m for u, v, m in self.pairs()}, cap=cap)

    def relabel(self, mapping: Mapping) -> "Multigraph":
        f = lambda x: mapping.get(x, x)
        images = [f(v) for v in self._adj]
        if len(set(images)) != len(images):
            raise PreconditionError("relabel mapping is not injective")
        return Multigraph(images, [(f(u), f(v), m) for u, v, m in self.pairs()], cap=self.cap)

    def simple(self) -> "Multigraph":
        """Underlying simple graph (all multiplicities set to 1)."""
        adj = {u: {v: 1 for v in nb} for u, nb in self._adj.items()}
        return Multigraph._wrap(adj, self.cap)

    def to_networkx(self):
        import networkx as nx

        G = nx.Graph()
        G.add_nodes_from(self._adj)
        G.add_weighted_edges_from(self.pairs(), weight="mult")
        return G

    # -- dunder ----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self):
        return hash((frozenset(self._adj), tuple((vertex_key(u), vertex_key(v), m) for u, v, m in self.pairs())))

    def __repr__(self):
        es = ", ".join(f"{u}-{v}" + (f"x{m}" if m > 1 else "") for u, v, m in self.pairs())
        return f"Multigraph(n={self.n}, m={self.m}: {es})"


def contract_edge(g: Multigraph, u, v) -> Multigraph:
    """Identify ``v`` into ``u``; parallel edges accumulate, loops vanish.

    The merged vertex keeps the id ``u``.
    """
    if g.mult(u, v) < 1:
        raise PreconditionError(f"not adjacent: {u!r}, {v!r}")
    adj = {x: dict(nb) for x, nb in g._adj.items() if x != v}
    del adj[u][v]
    for w, m in g._adj[v].items():
        if w == u:
            continue
        del adj[w][v]
        new = adj[u].get(w, 0) + m
        if g.cap is not None:
            new = min(new, g.cap)
        adj[u][w] = adj[w][u] = new
    return Multigraph._wrap(adj, g.cap)


def components(g: Multigraph) -> list:
    """Connected components as frozensets, ordered by smallest member id."""
    seen = set()
    out = []
    for s in sorted_vertices(g.vertices):
        if s in seen:
            continue
        comp = {s}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g._adj[x]:
                if y not in comp:
                    comp.add(y)
                    queue.append(y)
        seen |= comp
        out.append(frozenset(comp))
    return out


def is_connected(g: Multigraph, S: Optional[Iterable[Vertex]] = None) -> bool:
    """Whether ``g[S]`` (default: all of ``g``) is connected; the empty set is not."""
    S = set(g.vertices if S is None else S)
    if not S:
        return False
    start = next(iter(S))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in g._adj[x]:
            if y in S and y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(S)


def induced(g: Multigraph, S) -> Multigraph:
    return g.induced(S)


def _check_subset(g, S):
    S = set(S)
    if not S <= g.vertices:
        raise PreconditionError("S is not a subset of V(g)")
    return S


def neighborhood(g: Multigraph, S) -> frozenset:
    """Open neighbourhood N(S): vertices outside S adjacent to S."""
    S = _check_subset(g, S)
    return frozenset(y for x in S for y in g._adj[x] if y not in S)


def boundary_of(g: Multigraph, S) -> frozenset:
    """Members of S with at least one neighbour outside S."""
    S = _check_subset(g, S)
    return frozenset(x for x in S if any(y not in S for y in g._adj[x]))


@dataclass(frozen=True)
class BoundariedGraph:
    """A graph with ``t`` labelled terminals; label ``i`` is ``boundary[i-1]``."""

    graph: Multigraph
    boundary: tuple

    def __post_init__(self):
        b = self.boundary
        if isinstance(b, Mapping):
            labels = sorted(b)
            if labels != list(range(1, len(b) + 1)):
                raise PreconditionError("boundary labels must be exactly 1..t")
            b = tuple(b[i] for i in labels)
        b = tuple(b)
        object.__setattr__(self, "boundary", b)
        if len(set(b)) != len(b):
            raise PreconditionError("boundary vertices must be distinct")
        if not set(b) <= self.graph.vertices:
            raise PreconditionError("boundary vertex missing from graph")

    @property
    def t(self) -> int:
        return len(self.boundary)

    def interior(self) -> frozenset:
        return self.graph.vertices - set(self.boundary)


def glue(g1: BoundariedGraph, g2: BoundariedGraph) -> Multigraph:
    """G1 ⊕ G2: disjoint union with equal labels identified.

    Ids of ``g1`` are kept.  Interior vertices of ``g2`` keep their id unless
    it is already used, in which case they are wrapped as ``(id, "'")`` until
    free.  A pair of terminals adjacent in either side gets the larger of the
    two multiplicities.
    """
    if g1.t != g2.t:
        raise PreconditionError(f"boundary sizes differ: {g1.t} != {g2.t}")
    cap = g1.graph.cap if g2.graph.cap is None else (
        g2.graph.cap if g1.graph.cap is None else min(g1.graph.cap, g2.graph.cap))
    ren = {b2: b1 for b1, b2 in zip(g1.boundary, g2.boundary)}
    used = set(g1.graph.vertices)
    for x in sorted_vertices(g2.interior()):
        y = x
        while y in used:
            y = (y, "'")
        ren[x] = y
        used.add(y)
    edges = {}
    for u, v, m in g1.graph.pairs():
        edges[frozenset((u, v))] = m
    for u, v, m in g2.graph.pairs():
        key = frozenset((ren[u], ren[v]))
        edges[key] = max(edges.get(key, 0), m)
    return Multigraph(used, {tuple(sorted_vertices(k)): m for k, m in edges.items()}, cap=cap)


@dataclass(frozen=True)
class MinorModel:
    """Two disjoint trees plus ``c`` cross edges witnessing a θ_c minor.

    ``cross_edges`` lists one ``(u, v)`` entry per unit of multiplicity with
    ``u`` in ``tree1``; ``tree_edges`` are the spanning-tree edges of both trees.
    """

    tree1: frozenset
    tree2: frozenset
    cross_edges: tuple
    tree_edges: tuple = ()

    @property
    def vertices(self) -> frozenset:
        return self.tree1 | self.tree2

    def as_graph(self) -> Multigraph:
        return Multigraph(self.vertices, list(self.tree_edges) + list(self.cross_edges))


def validate_model(g: Multigraph, model: MinorModel, c: int, minimal: bool = True) -> Optional[str]:
    """Return ``None`` if ``model`` is a θ_c minor-model in ``g``, else a reason."""
    t1, t2 = model.tree1, model.tree2
    if not t1 or not t2:
        return "empty tree"
    if t1 & t2:
        return "trees intersect"
    if not (t1 | t2) <= g.vertices:
        return "model vertex missing from host"
    if len(model.cross_edges) != c:
        return f"expected {c} cross edges, got {len(model.cross_edges)}"
    used: dict = {}
    for u, v in list(model.cross_edges) + list(model.tree_edges):
        key = frozenset((u, v))
        used[key] = used.get(key, 0) + 1
        if used[key] > g.mult(u, v):
            return f"edge {u}-{v} used beyond its multiplicity"
    for u, v in model.cross_edges:
        if not ((u in t1 and v in t2) or (u in t2 and v in t1)):
            return f"cross edge {u}-{v} does not join the trees"
    for tree in (t1, t2):
        es = [(u, v) for u, v in model.tree_edges if u in tree and v in tree]
        if len(es) != len(tree) - 1 or not is_connected(Multigraph(tree, es)):
            return "tree edges do not span a tree"
    if len(model.tree_edges) != len(t1) + len(t2) - 2:
        return "stray tree edges"
    if minimal and c >= 2:
        mg = model.as_graph()
        for x in mg.vertices:
            if mg.degree(x) < 2:
                return f"vertex {x} has degree < 2 in the model"
        for x in mg.vertices:
            if len(mg) > 2 and not is_connected(mg.remove_vertices([x])):
                return f"vertex {x} is a cut vertex of the model"
    return None


@dataclass(frozen=True)
class RuleApplication:
    """One logged, replayable change to an instance.

    Applying it removes ``removed``, adds ``added`` (isolated), then sets the
    multiplicity of each ``(u, v, m)`` in ``edges`` and shifts k by ``k_delta``.
    """

    rule: str
    removed: tuple = ()
    added: tuple = ()
    edges: tuple = ()
    k_delta: int = 0
    note: str = ""
    data: Mapping = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Instance:
    graph: Multigraph
    k: int
    c: int
    trace: tuple = ()

    def __post_init__(self):
        if self.c < 1:
            raise PreconditionError("c must be >= 1")

    @property
    def rejected(self) -> bool:
        return self.k < 0

    def apply(self, rec: RuleApplication) -> "Instance":
        g = self.graph
        if rec.removed:
            g = g.remove_vertices(rec.removed)
        if rec.added:
            g = g.add_vertices(rec.added)
        if rec.edges:
            g = g.with_edges(rec.edges)
        return replace(self, graph=g, k=self.k + rec.k_delta, trace=self.trace + (rec,))


def replay(inst: Instance, trace: Iterable[RuleApplication]) -> Instance:
    for rec in trace:
        inst = inst.apply(rec)
    return inst
