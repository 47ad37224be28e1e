"""Two-phase divide-and-conquer approximation for θ_c hitting sets.

Phase one splits along a nice decomposition at the lowest node whose
forgotten part reaches the base treewidth ``d``.  Phase two takes any
hitting set ``Z`` and splits at the node that balances the ``Z`` mass,
which keeps the recursion depth logarithmic in ``|Z|``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional

from .errors import PreconditionError
from .graph import Multigraph, sorted_vertices
from .minors import (N_MAX, exact_hitting_set,
                     exact_hitting_set_td, has_theta_c)
from .treedecomp import (NiceTreeDecomposition, decide_width_at_most,
                         nice_decomposition, treewidth_lower_bound)

log = logging.getLogger(__name__)

DEFAULT_D = {1: 0, 2: 1, 3: 2}
D_PRIME = 4


def default_d(c: int) -> int:
    """Largest treewidth of a θ_c-minor-free graph, for c <= 3."""
    if c in DEFAULT_D:
        return DEFAULT_D[c]
    raise PreconditionError(f"no default base treewidth for c={c}; pass d explicitly")


def width_threshold(k: int, d: int, d_prime: float = D_PRIME) -> float:
    kd = max(k + d, 1)
    return kd * d_prime * math.sqrt(math.log2(kd) + 1)


# ---------------------------------------------------------------------------
# labelings

def validate_labeling(values: dict, ntd: NiceTreeDecomposition, kind: str) -> Optional[str]:
    """Check the node-kind rules of a good (``"good"``) or max (``"max"``) labeling."""
    if kind not in ("good", "max"):
        raise PreconditionError(f"unknown labeling kind {kind!r}")
    for t in ntd.nodes:
        if t not in values:
            return f"node {t!r} has no value"
        val, chs = values[t], ntd.children[t]
        k = ntd.kind[t]
        if k == "base":
            if val != 0:
                return f"base node {t!r} has value {val}"
        elif k == "introduce":
            if val != values[chs[0]]:
                return f"introduce node {t!r} changes the value"
        elif k == "forget":
            if val - values[chs[0]] not in (0, 1):
                return f"forget node {t!r} jumps by {val - values[chs[0]]}"
        elif k == "join":
            a, b = values[chs[0]], values[chs[1]]
            want = a + b if kind == "good" else max(a, b)
            if val != want:
                return f"join node {t!r} has {val}, expected {want}"
    return None


def mass_labeling(ntd: NiceTreeDecomposition, Z) -> dict:
    """μ(t) = |V(H_t) ∩ Z| for every node."""
    Z = frozenset(Z)
    return {t: len(ntd.forgotten_below(t) & Z) for t in ntd.nodes}


# ---------------------------------------------------------------------------
# base case

def base_solve(g: Multigraph, c: int, ntd: Optional[NiceTreeDecomposition] = None,
               n_max: int = N_MAX) -> frozenset:
    """Exact hitting set for a graph of small treewidth."""
    if not has_theta_c(g, c, n_max):
        return frozenset()
    if c in (1, 2):
        if ntd is None:
            ntd = nice_decomposition(g)
        return exact_hitting_set_td(g, ntd, c)
    return exact_hitting_set(g, c, n_max)


# ---------------------------------------------------------------------------
# phase one

@dataclass
class PhaseStats:
    depth: int = 0
    splits: int = 0
    anomalies: int = 0


def hit_set_1(g: Multigraph, k: int, c: int, d: Optional[int] = None,
              d_prime: float = D_PRIME, n_max: int = N_MAX,
              stats: Optional[PhaseStats] = None) -> Optional[frozenset]:
    """Phase one; returns a hitting set or ``None`` for reject.

    Rejection happens only when a lower bound certifies tw(g) > k + d,
    which no yes-instance can have, and the heuristic width also exceeds
    the configured threshold.
    """
    d = default_d(c) if d is None else d
    stats = stats if stats is not None else PhaseStats()

    def rec(V: frozenset, depth: int) -> Optional[frozenset]:
        sub = g.induced(V)
        if not has_theta_c(sub, c, n_max):
            return frozenset()
        exact = decide_width_at_most(sub, d)
        if exact is not None:
            return base_solve(sub, c, exact, n_max)
        ntd = nice_decomposition(sub, exact_up_to=-1)
        if ntd.width > width_threshold(k, d, d_prime) and treewidth_lower_bound(sub) > k + d:
            return None
        stats.depth = max(stats.depth, depth)
        stats.splits += 1
        split = None
        for t in ntd.postorder():
            H = ntd.forgotten_below(t)
            if H and (d == 0 or decide_width_at_most(sub.induced(H), d - 1) is None):
                split = t
                break
        assert split is not None, "root has treewidth above d"
        V1 = ntd.forgotten_below(split)
        X = ntd.bags[split]
        V2 = V - V1 - X
        if decide_width_at_most(sub.induced(V1), d) is None:
            stats.anomalies += 1
            log.info("phase one split at a node above width d")
        out = set(X)
        for part in (V1, V2):
            r = rec(part, depth + 1)
            if r is None:
                return None
            out |= r
        return frozenset(out)

    res = rec(frozenset(g.vertices), 1)
    if res is not None:
        assert not has_theta_c(g.remove_vertices(res), c, n_max)
    return res


# ---------------------------------------------------------------------------
# phase two and the flower-guided variant

def find_balanced_node(ntd: NiceTreeDecomposition, mu: Callable):
    """The node t with μ(t) > 2μ(root)/3 whose children all have μ <= 2μ(root)/3."""
    total = mu(ntd.root)
    t = ntd.root
    while True:
        heavy = [ch for ch in ntd.children[t] if 3 * mu(ch) > 2 * total]
        if not heavy:
            return t
        assert len(heavy) == 1
        t = heavy[0]


def balanced_split(ntd: NiceTreeDecomposition, V: frozenset, mu: Callable) -> tuple:
    """Return ``(V1, X, V2)`` for the balanced node; V1 and V2 are non-adjacent."""
    total = mu(ntd.root)
    t = find_balanced_node(ntd, mu)
    kind = ntd.kind[t]
    if kind == "forget":
        child = ntd.children[t][0]
    elif kind == "join":
        a, b = ntd.children[t]
        child = a if mu(a) >= mu(b) else b
        assert 3 * mu(child) >= total
    else:
        raise AssertionError(f"balanced node has kind {kind}")
    V1 = ntd.forgotten_below(child)
    X = ntd.bags[child]
    V2 = V - V1 - X
    return V1, X, V2


@dataclass(frozen=True)
class Phase2Result:
    hitting_set: frozenset
    depth: int
    splits: int


def hit_set_2_detailed(g: Multigraph, Z, c: int, d: Optional[int] = None,
                       n_max: int = N_MAX) -> Phase2Result:
    """Phase two with bookkeeping.

    ``depth`` counts nested splitting calls, so a run that never splits
    has depth 0.
    """
    d = default_d(c) if d is None else d
    Z = frozenset(Z)
    if not Z <= g.vertices:
        raise PreconditionError("Z is not a subset of V(g)")
    if has_theta_c(g.remove_vertices(Z), c, n_max):
        raise PreconditionError("Z is not a hitting set")
    stats = PhaseStats()

    def rec(V: frozenset, depth: int) -> frozenset:
        sub = g.induced(V)
        ZV = Z & V
        if not ZV:
            return frozenset()
        exact = decide_width_at_most(sub, d)
        if exact is not None:
            return base_solve(sub, c, exact, n_max)
        ntd = nice_decomposition(sub, exact_up_to=-1)
        values = mass_labeling(ntd, ZV)
        V1, X, V2 = balanced_split(ntd, V, values.__getitem__)
        k_prime = len(ZV)
        for part in (V1, V2):
            assert 3 * len(part & Z) <= 2 * k_prime, "μ-mass of a side above 2k'/3"
        stats.depth = max(stats.depth, depth)
        stats.splits += 1
        return frozenset(X) | rec(V1, depth + 1) | rec(V2, depth + 1)

    res = rec(frozenset(g.vertices), 1)
    assert not has_theta_c(g.remove_vertices(res), c, n_max)
    return Phase2Result(res, stats.depth, stats.splits)


def hit_set_2(g: Multigraph, Z, c: int, d: Optional[int] = None, n_max: int = N_MAX) -> frozenset:
    return hit_set_2_detailed(g, Z, c, d, n_max).hitting_set


def depth_bound(z: int) -> int:
    """Upper bound on splitting depth for a hitting set of size ``z``."""
    if z <= 0:
        return 0
    return math.ceil(math.log(z, 1.5) - 1e-12) + 1


# ---------------------------------------------------------------------------
# wrapper

@dataclass(frozen=True)
class ApproxResult:
    hitting_set: frozenset
    k: int
    phase1_size: int
    depth: int

    @property
    def size(self) -> int:
        return len(self.hitting_set)


def hitting_set_or_reject(g: Multigraph, k: int, c: int, d: Optional[int] = None,
                          d_prime: float = D_PRIME, n_max: int = N_MAX) -> Optional[Phase2Result]:
    """Phase one followed by phase two; ``None`` means reject for budget ``k``."""
    Z = hit_set_1(g, k, c, d, d_prime, n_max)
    if Z is None:
        return None
    return hit_set_2_detailed(g, Z, c, d, n_max)


def approximate_detailed(g: Multigraph, c: int, d: Optional[int] = None,
                         d_prime: float = D_PRIME, n_max: int = N_MAX) -> ApproxResult:
    if not has_theta_c(g, c, n_max):
        return ApproxResult(frozenset(), 0, 0, 0)
    for k in range(1, g.n + 1):
        Z = hit_set_1(g, k, c, d, d_prime, n_max)
        if Z is None:
            continue
        res = hit_set_2_detailed(g, Z, c, d, n_max)
        return ApproxResult(res.hitting_set, k, len(Z), res.depth)
    raise AssertionError("phase one rejected k = n")


def approximate(g: Multigraph, c: int, d: Optional[int] = None,
                d_prime: float = D_PRIME, n_max: int = N_MAX) -> frozenset:
    """A θ_c hitting set of ``g`` (always valid, size not guaranteed optimal)."""
    return approximate_detailed(g, c, d, d_prime, n_max).hitting_set


def split_avoiding(g: Multigraph, v, c: int, mu: Callable[[frozenset], int],
                   small: int = 8, n_max: int = N_MAX) -> frozenset:
    """Hitting set of all θ_c models of ``g`` avoiding ``v``.

    ``g - v`` must be θ_c-free.  ``mu(W)`` is the flower number of v in
    ``g[W + v]``; it drives the same balanced splitting as phase two.
    Minimal models have no cut vertex, so a model through v lies on one
    side of each split.
    """
    rest = frozenset(g.vertices - {v})

    def solve_small(W: frozenset) -> frozenset:
        sub = g.induced(W | {v})
        vs = sorted_vertices(W)
        for r in range(len(vs) + 1):
            for S in combinations(vs, r):
                if not has_theta_c(sub.remove_vertices(S), c, n_max):
                    return frozenset(S)
        raise AssertionError("unreachable")

    def rec(W: frozenset) -> frozenset:
        if not W or mu(W) == 0:
            return frozenset()
        if len(W) <= small:
            return solve_small(W)
        sub = g.induced(W)
        ntd = nice_decomposition(sub)
        cache = {}

        def node_mu(t):
            if t not in cache:
                cache[t] = mu(ntd.forgotten_below(t))
            return cache[t]

        V1, X, V2 = balanced_split(ntd, W, node_mu)
        return frozenset(X) | rec(V1) | rec(V2)

    return rec(rest)
