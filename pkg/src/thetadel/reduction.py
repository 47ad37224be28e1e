"""Degree-bounding reduction rules: flowers, H_v sets and c-expansion."""

from __future__ import annotations

from typing import NamedTuple

from .approx import split_avoiding
from .errors import PreconditionError, ThetaError
from .expansion import q_expansion
from .graph import (Instance, Multigraph, RuleApplication, components,
                    sorted_vertices, vertex_key)
from .minors import N_MAX, has_theta_c, max_flower


def _require_live(inst: Instance) -> None:
    if inst.rejected:
        raise PreconditionError("instance already rejected (k < 0)")


def degree_bound(c: int, h: int) -> int:
    """Maximum degree a reduced vertex may keep: c·h + c(c-1)·h."""
    return c * h + c * (c - 1) * h


def nu(g: Multigraph, c: int, x) -> int:
    """Neighbours of ``x`` joined to it by fewer than ``c`` edges."""
    return sum(1 for m in g.adjacency(x).values() if m < c)


def nu_total(g: Multigraph, c: int) -> int:
    return sum(nu(g, c, x) for x in g.vertices)


def _check_hitting(g: Multigraph, S, c: int, n_max: int) -> None:
    S = frozenset(S)
    if not S <= g.vertices:
        raise PreconditionError("S is not a subset of V(g)")
    if has_theta_c(g.remove_vertices(S), c, n_max):
        raise PreconditionError("S is not a hitting set")


# ---------------------------------------------------------------------------
# flower rules

def flower_rule(inst: Instance, v, n_max: int = N_MAX) -> Instance:
    """Delete ``v`` and decrement k when a (k+1)-flower passes through ``v``."""
    _require_live(inst)
    fl = max_flower(inst.graph, v, inst.c, limit=inst.k + 1, n_max=n_max)
    if fl.size < inst.k + 1:
        raise PreconditionError(f"flower through {v!r} has {fl.size} petals, need {inst.k + 1}")
    return inst.apply(RuleApplication("flower", removed=(v,), k_delta=-1,
                                      note=f"{fl.size}-flower at {v!r}"))


def selective_flower_rule(inst: Instance, S, n_max: int = N_MAX) -> tuple:
    """Apply the flower rule to members of ``S`` measured in G - (S - v).

    Returns ``(instance, S')``.  Stops early once the instance is rejected.
    """
    S = set(S)
    _check_hitting(inst.graph, S, inst.c, n_max)
    changed = True
    while changed and not inst.rejected:
        changed = False
        for v in sorted_vertices(S):
            gv = inst.graph.remove_vertices(S - {v})
            fl = max_flower(gv, v, inst.c, limit=inst.k + 1, n_max=n_max)
            if fl.size >= inst.k + 1:
                inst = inst.apply(RuleApplication("selective-flower", removed=(v,), k_delta=-1,
                                                  note=f"{fl.size}-flower at {v!r}"))
                S.discard(v)
                changed = True
                break
    return inst, frozenset(S)


# ---------------------------------------------------------------------------
# hitting sets avoiding a vertex

def specialized_hitting_set_avoiding(g: Multigraph, v, c: int, n_max: int = N_MAX) -> frozenset:
    """T ⊆ V(g) - v with g - T θ_c-free, given that g - v is already θ_c-free."""
    if v not in g:
        raise PreconditionError(f"{v!r} not in graph")
    if has_theta_c(g.remove_vertices([v]), c, n_max):
        raise PreconditionError("g - v still contains θ_c")

    def mu(W):
        return max_flower(g.induced(W | {v}), v, c, n_max=n_max).size

    T = split_avoiding(g, v, c, mu, n_max=n_max)
    assert v not in T and not has_theta_c(g.remove_vertices(T), c, n_max)
    return T


def compute_Hv(inst: Instance, S, v, n_max: int = N_MAX) -> frozenset:
    """A hitting set of every θ_c model through ``v`` that avoids ``v``."""
    S = frozenset(S)
    if v not in S:
        return S
    Sv = S - {v}
    gv = inst.graph.remove_vertices(Sv)
    fl = max_flower(gv, v, inst.c, limit=inst.k + 1, n_max=n_max)
    if fl.size > inst.k:
        raise PreconditionError("flower bound not established; run the selective flower rule first")
    return Sv | specialized_hitting_set_avoiding(gv, v, inst.c, n_max)


# ---------------------------------------------------------------------------
# c-expansion

def c_expansion_rule(inst: Instance, v, Hv, n_max: int = N_MAX) -> Instance:
    """Prune irrelevant components at ``v`` and rewire via a c-expansion.

    Inapplicable (instance returned unchanged) when deg(v) is within
    :func:`degree_bound`.
    """
    _require_live(inst)
    g, c = inst.graph, inst.c
    Hv = frozenset(Hv)
    if v in Hv:
        raise PreconditionError("H_v must avoid v")
    if not Hv <= g.vertices:
        raise PreconditionError("H_v is not a subset of V(g)")
    bound = degree_bound(c, len(Hv))
    if g.degree(v) <= bound:
        return inst
    if has_theta_c(g.remove_vertices(Hv), c, n_max):
        raise PreconditionError("H_v does not hit every model through v")

    rest = g.remove_vertices(Hv | {v})
    nbrs = g.neighbors(v)
    comps = [D for D in components(rest) if D & nbrs]
    irrelevant = [D for D in comps if not any(g.neighbors(x) & Hv for x in D)]
    if irrelevant:
        drop = sorted_vertices(frozenset().union(*irrelevant))
        inst = inst.apply(RuleApplication("irrelevant-vertex", removed=tuple(drop),
                                          note=f"{len(irrelevant)} component(s) at {v!r} miss H_v"))
        g = inst.graph
        if g.degree(v) <= bound:
            return inst
    relevant = [D for D in comps if D not in irrelevant]
    B = list(range(len(relevant)))
    adj = {w: [i for i, D in enumerate(relevant) if any(g.mult(w, x) for x in D)] for w in Hv}
    res = q_expansion(sorted_vertices(Hv), B, adj, c)
    if res is None:
        raise ThetaError("degree invariant violated")
    changes = []
    for i in sorted(res.T):
        for x in sorted_vertices(relevant[i]):
            if g.mult(v, x):
                changes.append((v, x, 0))
    for w in sorted_vertices(res.S):
        changes.append((v, w, c))
    return inst.apply(RuleApplication("c-expansion", edges=tuple(changes),
                                      note=f"at {v!r}: |S|={len(res.S)}, |T|={len(res.T)}",
                                      data={"S": res.S, "T_size": len(res.T)}))


# ---------------------------------------------------------------------------
# the Bound-Degree loop

class BoundDegreeResult(NamedTuple):
    instance: Instance
    hitting_set: frozenset
    h_values: dict
    nu_history: tuple


def bound_degree(inst: Instance, S, n_max: int = N_MAX) -> BoundDegreeResult:
    """Alternate the selective flower rule and c-expansion until neither fires.

    ``h_values`` records |H_v| on the final graph for every vertex, and
    ``nu_history`` the pair (Σν before, Σν after) of each expansion.
    """
    S = frozenset(S)
    c = inst.c
    history = []
    while True:
        inst, S = selective_flower_rule(inst, S, n_max)
        if inst.rejected:
            return BoundDegreeResult(inst, S, {}, tuple(history))
        g = inst.graph
        h_values = {}
        fired = False
        for v in sorted(g.vertices, key=lambda x: (-g.degree(x), vertex_key(x))):
            Hv = compute_Hv(inst, S, v, n_max)
            h_values[v] = len(Hv)
            if g.degree(v) <= degree_bound(c, len(Hv)):
                continue
            before = nu_total(g, c)
            new = c_expansion_rule(inst, v, Hv, n_max)
            removed = {x for rec in new.trace[len(inst.trace):] for x in rec.removed}
            if any(rec.rule == "c-expansion" for rec in new.trace[len(inst.trace):]):
                history.append((before, nu_total(new.graph, c)))
            inst, S = new, S - removed
            assert not has_theta_c(inst.graph.remove_vertices(S), c, n_max)
            fired = True
            break
        if not fired:
            return BoundDegreeResult(inst, S, h_values, tuple(history))
