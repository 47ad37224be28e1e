"""Bipartite matching and the constructive q-expansion."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import PreconditionError
from .graph import sorted_vertices


@dataclass(frozen=True)
class ExpansionResult:
    """``S`` ⊆ A with pairwise disjoint ``q``-stars into ``T`` ⊆ B and N(T) ⊆ S."""

    S: frozenset
    T: frozenset
    stars: Mapping = field(default_factory=dict)
    q: int = 1

    def check(self, adj: Mapping) -> Optional[str]:
        """Return a reason string if the result is malformed for ``adj``."""
        if not self.S or not self.T:
            return "empty side"
        if set(self.stars) != set(self.S):
            return "stars do not cover S"
        used = set()
        for x, F in self.stars.items():
            if len(F) != self.q:
                return f"star at {x!r} has {len(F)} leaves"
            if not F <= self.T:
                return f"star at {x!r} leaves T"
            if not F <= set(adj.get(x, ())):
                return f"star at {x!r} uses a non-edge"
            if used & F:
                return "stars overlap"
            used |= F
        for a, nb in adj.items():
            if a not in self.S and set(nb) & self.T:
                return f"{a!r} outside S sees T"
        return None


def _normalize(A, B, adj) -> tuple:
    A = sorted_vertices(A)
    B_set = set(B)
    if isinstance(adj, Mapping):
        out = {a: set(adj.get(a, ())) for a in A}
    else:
        out = {a: set() for a in A}
        for a, b in adj:
            out.setdefault(a, set()).add(b)
    for a, nb in out.items():
        if a not in set(A):
            raise PreconditionError(f"{a!r} is not in A")
        if not nb <= B_set:
            raise PreconditionError(f"neighbours of {a!r} leave B")
    return A, sorted_vertices(B_set), {a: sorted_vertices(nb) for a, nb in out.items()}


def max_matching(A: Iterable, B: Iterable, adj) -> dict:
    """Maximum bipartite matching as a dict from A to B.

    Augmenting paths in the order of vertex ids, so the output is a
    deterministic function of the input.
    """
    A, _, adj = _normalize(A, B, adj)
    match_b: dict = {}

    def augment(a, seen) -> bool:
        for b in adj[a]:
            if b in seen:
                continue
            seen.add(b)
            if b not in match_b or augment(match_b[b], seen):
                match_b[b] = a
                return True
        return False

    for a in A:
        augment(a, set())
    return {a: b for b, a in match_b.items()}


def q_expansion(A: Iterable, B: Iterable, adj, q: int) -> Optional[ExpansionResult]:
    """Find a q-expansion of A into B, or ``None`` when |B| <= q times the matching number.

    ``adj`` maps each a in A to its neighbours in B (or is an edge list).
    """
    if q < 1:
        raise PreconditionError("q must be >= 1")
    A, B, adj = _normalize(A, B, adj)
    covered = {b for nb in adj.values() for b in nb}
    isolated = [b for b in B if b not in covered]
    if isolated:
        raise PreconditionError(f"isolated vertex in B: {isolated[0]!r}")
    m = len(max_matching(A, B, adj))
    if len(B) <= q * m:
        return None

    copies = [(a, i) for a in A for i in range(q)]
    cadj = {(a, i): adj[a] for a, i in copies}
    match = max_matching(copies, B, cadj)
    partner_of_b = {b: x for x, b in match.items()}

    unsat = [x for x in copies if x not in match]
    reached = set(unsat)
    stack = list(unsat)
    while stack:
        x = stack.pop()
        for b in cadj[x]:
            y = partner_of_b.get(b)
            if y is not None and y not in reached and match.get(x) != b:
                reached.add(y)
                stack.append(y)
    S_A = [x for x in copies if x not in reached]

    in_SA = set(S_A)
    S = set()
    for a in A:
        flags = {(a, i) in in_SA for i in range(q)}
        assert len(flags) == 1, f"copies of {a!r} split across S_A"
        if flags == {True}:
            S.add(a)
    T = {match[x] for x in S_A} | {b for b in B if b not in partner_of_b}
    stars = {a: frozenset(match[(a, i)] for i in range(q)) for a in S}
    res = ExpansionResult(frozenset(S), frozenset(T), stars, q)
    problem = res.check(adj)
    assert problem is None, problem
    return res
